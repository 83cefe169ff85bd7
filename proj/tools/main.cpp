// t2nav command-line tool.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "t2nav/plot.hpp"
#include "t2nav/t2nav.hpp"

namespace fs = std::filesystem;
using namespace t2nav;
using namespace t2nav::navsim;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

// Errors raised while checking inputs map to exit code 1.
struct InputError : Error {
  using Error::Error;
};

const std::string& input_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot open '" + path + "'");
  return path;
}

Config load_config_opt(const std::string& path) {
  if (path.empty()) return Config{};
  return load_config(input_file(path));
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

// "1-10", "3" or "1,4,7".
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(spec);
  std::string part;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-') throw ValidationError("invalid seed '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = num(part.substr(0, dash)), hi = num(part.substr(dash + 1));
      if (hi < lo) throw ValidationError("empty seed range '" + part + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(num(part));
    }
  }
  if (out.empty()) throw ValidationError("no seeds given");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Ablation> parse_ablations(const std::string& spec) {
  std::vector<Ablation> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const Ablation a = parse_ablation(part);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  if (out.empty()) throw ValidationError("no ablations given");
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json summary_record(Ablation a, const std::vector<EpisodeResult>& rs) {
  const Metrics m = compute_metrics(rs);
  double path = 0.0, revisits = 0.0, loops = 0.0;
  for (const auto& r : rs) {
    path += r.path_length;
    revisits += r.revisited_cells;
    loops += r.loop_detections;
  }
  const double n = static_cast<double>(rs.size());
  return {{"summary", true},
          {"ablation", std::string(to_string(a))},
          {"episodes", rs.size()},
          {"SR", m.sr},
          {"SPL", m.spl},
          {"mean_path_length", path / n},
          {"mean_revisited_cells", revisits / n},
          {"mean_loop_detections", loops / n}};
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& world_path, const std::string& config_path, std::uint64_t seed,
            const std::string& ablation, const std::string& trace_path) {
  const Config cfg = load_config_opt(config_path);
  const Ablation ab = parse_ablation(ablation);
  const GridWorld w = load_world(input_file(world_path));
  EpisodeTrace trace;
  const EpisodeResult r = run_episode(w, cfg, seed, ab, trace_path.empty() ? nullptr : &trace);
  if (!trace_path.empty()) write_output(trace_path, to_json(trace, w).dump() + "\n");
  std::cout << to_json(r).dump() << "\n";
  return kOk;
}

int cmd_sweep(const std::string& worlds_dir, const std::string& config_path, const std::string& seeds_spec,
              const std::string& ablations_spec, const std::string& out_path, unsigned jobs) {
  const Config cfg = load_config_opt(config_path);
  const auto seeds = parse_seeds(seeds_spec);
  const auto ablations = parse_ablations(ablations_spec);
  if (!fs::is_directory(worlds_dir)) throw ValidationError("worlds directory '" + worlds_dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(worlds_dir))
    if (e.is_regular_file() && e.path().extension() == ".world") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no .world files in '" + worlds_dir + "'");
  std::vector<GridWorld> worlds;
  for (const auto& f : files) worlds.push_back(load_world(f));

  struct Job {
    std::size_t world;
    std::uint64_t seed;
    Ablation ablation;
  };
  std::vector<Job> todo;
  for (std::size_t wi = 0; wi < worlds.size(); ++wi)
    for (auto s : seeds)
      for (auto a : ablations) todo.push_back({wi, s, a});

  std::vector<std::optional<EpisodeResult>> results(todo.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string err;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size() || failed) return;
      try {
        results[i] = run_episode(worlds[todo[i].world], cfg, todo[i].seed, todo[i].ablation);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!failed) err = worlds[todo[i].world].name + " seed " + std::to_string(todo[i].seed) + " " +
                           std::string(to_string(todo[i].ablation)) + ": " + e.what();
        failed = true;
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, todo.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string text;
  std::map<Ablation, std::vector<EpisodeResult>> by_ablation;
  for (const auto& r : results) {
    if (!r) continue;
    text += to_json(*r).dump() + "\n";
    by_ablation[r->ablation].push_back(*r);
  }
  if (failed) {
    text += nlohmann::json{{"incomplete", true}, {"error", err}}.dump() + "\n";
    write_output(out_path, text);
    std::cerr << "t2nav sweep: episode failed: " << err << "\n";
    return kRuntime;
  }
  std::string summary;
  for (const auto& [a, rs] : by_ablation) summary += summary_record(a, rs).dump() + "\n";
  write_output(out_path, text + summary);
  if (!out_path.empty() && out_path != "-") std::cout << summary;
  return kOk;
}

int cmd_compute_pd(const std::string& traj_path, const std::string& config_path, const std::string& out_path) {
  const Config cfg = load_config_opt(config_path);
  const Trajectory traj = read_trajectory_file(input_file(traj_path));
  if (static_cast<int>(traj.size()) < cfg.min_traj_len)
    throw ValidationError("trajectory has " + std::to_string(traj.size()) + " points, min_traj_len is " +
                          std::to_string(cfg.min_traj_len));
  const TopologicalSignature sig = compute_signature(traj.tail(static_cast<std::size_t>(cfg.segment_window)), cfg);
  PersistenceDiagram pd;
  pd.dim1 = sig.pd1;
  pd.eps_max = cfg.eps_max;
  std::ostringstream out;
  write_diagram(pd, out);
  write_output(out_path, out.str());
  return kOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& config_path) {
  const Config cfg = load_config_opt(config_path);
  const PersistenceDiagram a = read_diagram_file(input_file(a_path)), b = read_diagram_file(input_file(b_path));
  const TopologicalSignature sa{a.dim1, landscape(a.dim1, cfg.landscape_grid, cfg.eps_max), {}, 0};
  const TopologicalSignature sb{b.dim1, landscape(b.dim1, cfg.landscape_grid, cfg.eps_max), {}, 0};
  const double w2 = wasserstein2(sa.pd1, sb.pd1);
  const double ld = landscape_distance(sa.landscape, sb.landscape);
  const double comb = combined_distance(sa, sb, distance_weights(cfg));
  std::cout << nlohmann::json{{"wasserstein2", w2}, {"landscape_distance", ld}, {"combined", comb}}.dump() << "\n";
  return kOk;
}

int cmd_landscape(const std::string& diagram_path, const std::string& config_path, const std::string& out_path) {
  const Config cfg = load_config_opt(config_path);
  const PersistenceDiagram pd = read_diagram_file(input_file(diagram_path));
  std::ostringstream out;
  write_landscape(landscape(pd.dim1, cfg.landscape_grid, cfg.eps_max), out);
  write_output(out_path, out.str());
  return kOk;
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
  const std::string text = read_text_file(input_file(in_path));
  const std::string first = text.substr(0, text.find('\n'));
  std::string svg;
  std::istringstream in(text);
  if (first.rfind("dim,birth,death", 0) == 0) {
    svg = plot::diagram_svg(read_diagram(in));
  } else if (first.rfind("t,value", 0) == 0) {
    svg = plot::landscape_svg(read_landscape(in));
  } else if (first.rfind("t,x,y,theta", 0) == 0) {
    svg = plot::trajectory_svg(read_trajectory(in));
  } else if (!first.empty() && first.front() == '{') {
    std::vector<nlohmann::json> docs;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) docs.push_back(nlohmann::json::parse(line));
    if (docs.size() == 1 && docs[0].value("kind", "") == "trace") {
      svg = plot::trace_svg(docs[0]);
    } else {
      std::vector<nlohmann::json> summaries;
      for (const auto& d : docs)
        if (d.value("summary", false)) summaries.push_back(d);
      if (summaries.empty()) throw InputError("'" + in_path + "': unknown input kind");
      svg = plot::results_svg(summaries);
    }
  } else {
    throw InputError("'" + in_path + "': unknown input kind");
  }
  write_output(out_path, svg);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-aware object navigation toolkit: episodes, sweeps, persistence diagrams and plots.", "t2nav"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every verb");

  std::string config_path;
  std::uint64_t seed = 1;
  std::string world, ablation = "full", trace;
  auto* run = app.add_subcommand("run", "Run one episode and print its result record");
  run->add_option("--world", world, "World file (.world with .objects.json sidecar)")->required();
  run->add_option("--config", config_path, "Config file (JSON)");
  run->add_option("--seed", seed, "Episode seed");
  run->add_option("--ablation", ablation, "full | no-term | no-tslc | baseline");
  run->add_option("--trace", trace, "Write an episode trace (JSON) for plotting");

  std::string worlds_dir, seeds = "1-10", ablations = "full,no-term,no-tslc,baseline", out;
  unsigned jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run worlds x seeds x ablations and summarise SR/SPL");
  sweep->add_option("--worlds", worlds_dir, "Directory of .world files")->required();
  sweep->add_option("--config", config_path, "Config file (JSON)");
  sweep->add_option("--seeds", seeds, "Seeds: N, A-B or comma list");
  sweep->add_option("--ablations", ablations, "Comma-separated ablation list");
  sweep->add_option("--out", out, "Results file (JSON lines)")->required();
  sweep->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string traj_path;
  auto* cpd = app.add_subcommand("compute-pd", "Compute the filtered dimension-1 diagram of a trajectory");
  cpd->add_option("--trajectory", traj_path, "Trajectory CSV (t,x,y,theta)")->required();
  cpd->add_option("--config", config_path, "Config file (JSON)");
  cpd->add_option("--out", out, "Diagram CSV (default stdout)");

  std::string diag_a, diag_b;
  auto* cmp = app.add_subcommand("compare-diagrams", "Wasserstein, landscape and combined distance of two diagrams");
  cmp->add_option("a", diag_a, "First diagram CSV")->required();
  cmp->add_option("b", diag_b, "Second diagram CSV")->required();
  cmp->add_option("--config", config_path, "Config file (JSON)");

  std::string diagram;
  auto* land = app.add_subcommand("landscape", "First persistence landscape of a diagram");
  land->add_option("--diagram", diagram, "Diagram CSV")->required();
  land->add_option("--config", config_path, "Config file (JSON)");
  land->add_option("--out", out, "Landscape CSV (default stdout)");

  std::string input, output;
  auto* plt = app.add_subcommand("plot", "Render a diagram, landscape, trajectory, trace or results file as SVG");
  plt->add_option("--input", input, "Input file")->required();
  plt->add_option("--output", output, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "t2nav: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (*run) return cmd_run(world, config_path, seed, ablation, trace);
    if (*sweep) return cmd_sweep(worlds_dir, config_path, seeds, ablations, out, jobs);
    if (*cpd) return cmd_compute_pd(traj_path, config_path, out);
    if (*cmp) return cmd_compare(diag_a, diag_b, config_path);
    if (*land) return cmd_landscape(diagram, config_path, out);
    if (*plt) return cmd_plot(input, output);
  } catch (const ValidationError& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kValidation;
  } catch (const PreconditionError& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kValidation;
  } catch (const OrderingError& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kValidation;
  } catch (const InputError& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "t2nav: malformed JSON: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "t2nav: " << e.what() << "\n";
    return kRuntime;
  }
  return kValidation;
}
