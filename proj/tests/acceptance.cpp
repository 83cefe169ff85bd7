// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "support.hpp"
#include "t2nav/t2nav.hpp"

using namespace t2nav;
using namespace t2nav::navsim;

namespace {

const std::string kCli = T2NAV_CLI;
const std::string kRoot = T2NAV_ROOT;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome topology_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200 && o.ok; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const double eps = trial % 5 == 0 ? 1.0 : 10.0;
    const auto filt = build_vr_filtration(oracle::random_cloud(rng, n, trial % 3 == 0), eps);
    o.require(oracle::positive_pairs(compute_persistence(filt)) == oracle::rank_persistence(filt),
              "mismatch on cloud " + std::to_string(trial));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "took " + fmt("%.1f", secs) + " s");
  if (o.ok) o.detail = "200 clouds, " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome boundary_and_euler() {
  Outcome o;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100 && o.ok; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const double eps = 0.4 + 0.1 * static_cast<double>(rng() % 12);
    const auto filt = build_vr_filtration(oracle::random_cloud(rng, n, trial % 2 == 1), eps);
    long counts[3] = {0, 0, 0};
    for (const auto& s : filt.simplices) {
      ++counts[s.dim];
      if (s.dim < 2) continue;
      std::map<std::uint32_t, int> parity;
      for (const auto& e : boundary(s))
        for (const auto& v : boundary(e)) parity[v.vertices[0]] ^= 1;
      for (const auto& [v, p] : parity) o.require(p == 0, "boundary of boundary nonzero");
    }
    const auto pd = compute_persistence(filt);
    const long betti = static_cast<long>(pd.essential0()) - static_cast<long>(pd.essential1) + static_cast<long>(pd.betti2);
    o.require(counts[0] - counts[1] + counts[2] == betti, "Euler identity fails on filtration " + std::to_string(trial));
  }
  if (o.ok) o.detail = "100 filtrations";
  return o;
}

Outcome canonical_shapes() {
  Outcome o;
  EmbeddedCloud sq(3);
  for (auto p : {std::array<double, 3>{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}) sq.push(p);
  const auto square = filter_diagram(compute_persistence(build_vr_filtration(sq, 5.0)), 0.0);
  o.require(square.dim1.size() == 1 && std::abs(square.dim1[0].birth - 1.0) <= 1e-9 &&
                std::abs(square.dim1[0].death - std::sqrt(2.0)) <= 1e-9,
            "unit square is not (1, sqrt 2)");

  EmbeddedCloud circle(3);
  for (int i = 0; i < 12; ++i) {
    const double a = 2 * std::numbers::pi * i / 12;
    circle.push(std::array<double, 3>{2 * std::cos(a), 2 * std::sin(a), 0.0});
  }
  const auto c = compute_persistence(build_vr_filtration(circle, 5.0));
  o.require(std::count_if(c.dim1.begin(), c.dim1.end(), [](const PersistencePair& p) { return p.persistence() > 1.0; }) == 1,
            "circle does not have exactly one prominent pair");

  const auto line = compute_signature(support::line(10, 0.3), Config{});
  o.require(line.pd1.empty(), "collinear cloud keeps pairs after filtering");
  if (o.ok) o.detail = "square, circle, line";
  return o;
}

Outcome wasserstein() {
  Outcome o;
  std::mt19937_64 rng(5);
  auto dyadic = [&](std::size_t max_points) {
    std::uniform_int_distribution<int> b(0, 24), len(1, 16);
    std::vector<PersistencePair> d(rng() % (max_points + 1));
    for (auto& p : d) {
      p.birth = b(rng) / 8.0;
      p.death = p.birth + len(rng) / 8.0;
    }
    return d;
  };
  for (int i = 0; i < 200 && o.ok; ++i) {
    const auto a = dyadic(4), b = dyadic(4);
    o.require(wasserstein2(a, b) == oracle::exhaustive_w2(a, b), "oracle disagreement on pair " + std::to_string(i));
  }
  const std::vector<PersistencePair> one{{1, 2}};
  o.require(std::abs(wasserstein2(one, {}) - 1.0 / std::sqrt(2.0)) <= 1e-12, "W2({(1,2)}, empty) != 1/sqrt 2");
  std::uniform_real_distribution<double> u(0, 3), len(0.01, 2);
  auto real = [&] {
    std::vector<PersistencePair> d(rng() % 7);
    for (auto& p : d) {
      p.birth = u(rng);
      p.death = p.birth + len(rng);
    }
    return d;
  };
  for (int i = 0; i < 100 && o.ok; ++i) {
    const auto a = real(), b = real(), c = real();
    o.require(wasserstein2(a, b) == wasserstein2(b, a), "asymmetric on triple " + std::to_string(i));
    o.require(wasserstein2(a, c) <= wasserstein2(a, b) + wasserstein2(b, c) + 1e-9, "triangle violated on triple " + std::to_string(i));
  }
  if (o.ok) o.detail = "200 oracle pairs, 100 triples";
  return o;
}

Outcome algorithm_contract() {
  Outcome o;
  const Config cfg;
  SignatureStore store;
  const auto nine = check_loop(store, support::line(9, 0.3), cfg);
  o.require(!nine.detected && !nine.matched_index && nine.confidence == 0.0 && store.size() == 0,
            "length-9 trajectory did not give the null result");

  const auto loop = support::circle(20, 2.0, true);
  check_loop(store, loop, cfg);
  Trajectory again;
  for (const auto& p : loop.points()) again.append(p.timestep + 100, p.pose);
  const auto det = check_loop(store, again, cfg);
  o.require(det.detected && det.confidence > 0.9, "re-traversed loop not detected with confidence > 0.9");

  SignatureStore far;
  auto poison = compute_signature(loop, cfg);
  poison.anchor[0] += 50.0;
  far.append(poison);
  const auto gated = check_loop(far, again, cfg);
  o.require(!gated.detected && gated.comparisons == 0, "far-anchored signature was compared");

  o.require(std::abs(loop_confidence(cfg.theta_w, cfg.theta_w) - std::exp(-1.0)) <= 1e-12, "confidence at theta_w != 1/e");
  if (o.ok) o.detail = "null result, re-traversal " + fmt("%.4f", det.confidence) + ", gate, 1/e";
  return o;
}

Outcome term_contract() {
  Outcome o;
  Config cfg;
  TemporalMemory mem(cfg);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3), f(-1, 1);
  const char* labels[] = {"chair", "table", "bed"};
  for (Timestep t = 0; t < 1000; ++t) {
    SceneGraphSnapshot g;
    g.timestep = t;
    for (int i = 0; i < static_cast<int>(rng() % 4); ++i)
      g.nodes.push_back({"n" + std::to_string(i), {u(rng), u(rng), 0}, {f(rng), f(rng), f(rng)}, labels[rng() % 3]});
    mem.push_snapshot(g);
    o.require(mem.window().size() <= 100, "window exceeded K");
  }
  for (const auto& e : mem.temporal_edges()) {
    const SceneNode* a = nullptr;
    const SceneNode* b = nullptr;
    for (const auto& g : mem.window()) {
      if (g.timestep == e.from.timestep) a = g.find(e.from.id);
      if (g.timestep == e.to.timestep) b = g.find(e.to.id);
    }
    o.require(a && b, "edge references an evicted snapshot");
    if (!a || !b) break;
    const double w = cfg.gamma * std::exp(-cfg.lambda * euclidean(a->features, b->features));
    o.require(std::abs(e.weight - w) <= 1e-12 * w, "edge weight does not recompute");
  }

  TemporalMemory lin(cfg);
  const Vec3 v{0.25, -0.15, 0.0};
  for (Timestep t = 0; t < 30; ++t) {
    const Vec3 p = static_cast<double>(t) * v;
    SceneGraphSnapshot g;
    g.timestep = t;
    g.nodes.push_back({"c", p, {1, 0, 0}, "chair"});
    lin.push_snapshot(g);
    if (t == 0) continue;
    for (Timestep k = 1; k <= 5; ++k) {
      const Vec3 pred = lin.predict_position(g.nodes[0], k);
      const Vec3 truth = static_cast<double>(t + k) * v;
      for (int i = 0; i < 3; ++i) o.require(std::abs(pred[i] - truth[i]) <= 1e-9, "constant-velocity prediction off");
    }
  }

  for (int i = 0; i < 1000; ++i) {
    const SceneNode a{"a", {u(rng), u(rng), u(rng)}, {1}, labels[rng() % 3]};
    const SceneNode b{"b", {u(rng), u(rng), u(rng)}, {1}, labels[rng() % 3]};
    o.require(similarity(a, b, 0.5, 1.0) == similarity(b, a, 0.5, 1.0), "similarity asymmetric");
  }
  if (o.ok) o.detail = std::to_string(mem.temporal_edges().size()) + " edges checked, window " + std::to_string(mem.window().size());
  return o;
}

struct SweepRun {
  bool ok = false;
  double seconds = 0.0;
  std::string bytes;
  std::string error;
};

SweepRun sweep(const std::string& out) {
  SweepRun r;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = support::run(kCli + " sweep --worlds " + kRoot + "/worlds/suite --seeds 1-10 --jobs 0 --out " + out);
  r.seconds = seconds_since(t0);
  r.ok = res.code == 0;
  if (!r.ok) r.error = "sweep exited " + std::to_string(res.code);
  r.bytes = support::slurp(out);
  return r;
}

Outcome directional(const SweepRun& a, const SweepRun& b) {
  Outcome o;
  o.require(a.ok && b.ok, a.ok ? b.error : a.error);
  if (!o.ok) return o;
  std::map<Ablation, std::vector<EpisodeResult>> by;
  std::istringstream in(a.bytes);
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.value("summary", false)) continue;
    const auto r = episode_from_json(j);
    by[r.ablation].push_back(r);
  }
  std::size_t total = 0;
  for (const auto& [k, v] : by) total += v.size();
  o.require(total == 800, "expected 800 episodes, got " + std::to_string(total));
  if (!o.ok) return o;
  auto spl = [&](Ablation x) { return compute_metrics(by[x]).spl; };
  auto revisits = [&](Ablation x) {
    double s = 0.0;
    for (const auto& r : by[x]) s += r.revisited_cells;
    return s / static_cast<double>(by[x].size());
  };
  const double full = spl(Ablation::Full), base = spl(Ablation::Baseline), notslc = spl(Ablation::NoTslc);
  const double rev_full = revisits(Ablation::Full), rev_notslc = revisits(Ablation::NoTslc);
  o.require(full >= base, "SPL(full) " + fmt("%.3f", full) + " < SPL(baseline) " + fmt("%.3f", base));
  o.require(full >= notslc, "SPL(full) " + fmt("%.3f", full) + " < SPL(no-tslc) " + fmt("%.3f", notslc));
  o.require(rev_notslc >= rev_full,
            "revisits(no-tslc) " + fmt("%.3f", rev_notslc) + " < revisits(full) " + fmt("%.3f", rev_full));
  o.require(a.bytes == b.bytes, "sweep output not byte-reproducible");
  o.require(a.seconds < 600.0, "sweep took " + fmt("%.0f", a.seconds) + " s");
  if (o.ok)
    o.detail = "SPL full " + fmt("%.3f", full) + " / baseline " + fmt("%.3f", base) + " / no-tslc " + fmt("%.3f", notslc) +
               ", revisits no-tslc " + fmt("%.3f", rev_notslc) + " >= full " + fmt("%.3f", rev_full) + ", " +
               fmt("%.0f", a.seconds) + " s";
  return o;
}

Outcome metrics_sanity(const SweepRun& a) {
  Outcome o;
  o.require(a.ok, a.error);
  int summaries = 0;
  std::istringstream in(a.bytes);
  std::string line;
  while (o.ok && std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (!j.value("summary", false)) continue;
    ++summaries;
    o.require(j.at("SPL").get<double>() <= j.at("SR").get<double>(), "SPL > SR for " + j.at("ablation").get<std::string>());
  }
  o.require(summaries == 4, "expected 4 summaries");
  EpisodeResult r;
  r.success = 1;
  r.shortest_length = 6.5;
  r.path_length = 13.0;
  o.require(std::abs(spl_term(r) - 0.5) <= 1e-12, "p = 2l does not give 0.5");
  if (o.ok) o.detail = "4 summaries, p=2l -> 0.5";
  return o;
}

Outcome determinism(const SweepRun& a, const SweepRun& b) {
  Outcome o;
  o.require(a.ok && b.ok, a.ok ? b.error : a.error);
  o.require(!a.bytes.empty() && a.bytes == b.bytes, "results files differ");
  if (o.ok) o.detail = std::to_string(a.bytes.size()) + " identical bytes";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failures;
    std::printf("%s  %-28s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("topology-oracle", topology_oracle);
  report("boundary-euler", boundary_and_euler);
  report("canonical-shapes", canonical_shapes);
  report("wasserstein", wasserstein);
  report("loop-check-contract", algorithm_contract);
  report("temporal-memory-contract", term_contract);

  const auto dir = support::scratch_dir("acceptance");
  const SweepRun first = sweep((dir / "first.jsonl").string());
  const SweepRun second = sweep((dir / "second.jsonl").string());
  report("directional-ablation", [&] { return directional(first, second); });
  report("metrics-sanity", [&] { return metrics_sanity(first); });
  report("sweep-determinism", [&] { return determinism(first, second); });
  return failures == 0 ? 0 : 1;
}
