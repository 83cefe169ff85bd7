#pragma once

// Loop-closure detection from topological signatures of recent trajectory segments.

#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/diagram_metrics.hpp"
#include "t2nav/topology.hpp"

namespace t2nav {

/// Per-point visual descriptors and the basis that projects them to 3-D.
struct VisualContext {
  std::span<const std::vector<double>> features;
  const ProjectionBasis* basis = nullptr;
};

inline DistanceWeights distance_weights(const Config& cfg) { return {cfg.w_wasserstein, cfg.w_landscape}; }

inline TopologicalSignature compute_signature(const Trajectory& segment, const Config& cfg,
                                              std::optional<VisualContext> visual = std::nullopt) {
  if (segment.size() < static_cast<std::size_t>(cfg.min_traj_len))
    throw PreconditionError("trajectory segment shorter than min_traj_len (" + std::to_string(cfg.min_traj_len) + ")");

  EmbeddedCloud cloud = [&] {
    if (!visual) return embed_trajectory(segment, cfg.r);
    if (visual->basis == nullptr || visual->features.size() != segment.size())
      throw ValidationError("visual features must align with trajectory points");
    EmbeddedCloud c(6);
    for (std::size_t i = 0; i < segment.size(); ++i) {
      const auto z = embed_enhanced(segment[i].pose, visual->features[i], *visual->basis, cfg.r, cfg.alpha_vis);
      c.push(z);
    }
    return c;
  }();

  const PersistenceDiagram pd = filter_diagram(compute_persistence(build_vr_filtration(cloud, cfg.eps_max)), cfg.tau_p);
  TopologicalSignature sig;
  sig.pd1 = pd.dim1;
  sig.landscape = landscape(sig.pd1, cfg.landscape_grid, cfg.eps_max);
  sig.anchor = segment.back().pose.position();
  sig.created_at = segment.back().timestep;
  return sig;
}

/// Append-only signature history.
class SignatureStore {
 public:
  void append(TopologicalSignature sig) {
    if (!entries_.empty() && sig.created_at < entries_.back().created_at)
      throw OrderingError("signature created_at must be nondecreasing");
    entries_.push_back(std::move(sig));
  }

  std::span<const TopologicalSignature> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const TopologicalSignature& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<TopologicalSignature> entries_;
};

struct LoopDetection {
  bool detected = false;
  std::optional<std::size_t> matched_index;
  double confidence = 0.0;
  double d_min = std::numeric_limits<double>::infinity();  // infinite when nothing was compared
  std::size_t comparisons = 0;
};

/// Confidence reported for a best combined distance `d_min`.
inline double loop_confidence(double d_min, double theta_w) { return std::exp(-d_min / theta_w); }

/// Signature of the most recent `cfg.segment_window` points, matched against
/// stored signatures anchored within `cfg.R_search`. The new signature is
/// always appended once the trajectory is long enough.
inline LoopDetection check_loop(SignatureStore& store, const Trajectory& traj, const Config& cfg,
                                std::optional<VisualContext> visual = std::nullopt) {
  LoopDetection out;
  if (traj.size() < static_cast<std::size_t>(cfg.min_traj_len)) return out;
  const Trajectory segment = traj.tail(static_cast<std::size_t>(cfg.segment_window));
  if (visual && visual->features.size() > segment.size())
    visual->features = visual->features.subspan(visual->features.size() - segment.size());
  TopologicalSignature current = compute_signature(segment, cfg, visual);

  const DistanceWeights weights = distance_weights(cfg);
  for (std::size_t j = 0; j < store.size(); ++j) {
    if (distance(current.anchor, store[j].anchor) > cfg.R_search) continue;
    ++out.comparisons;
    const double d = combined_distance(current, store[j], weights);
    if (d < out.d_min) {
      out.d_min = d;
      out.matched_index = j;
    }
  }
  if (out.matched_index) {
    out.detected = out.d_min < cfg.theta_w;
    out.confidence = loop_confidence(out.d_min, cfg.theta_w);
  }
  store.append(std::move(current));
  return out;
}

inline bool cadence_gate(Timestep t, const Config& cfg) { return t % cfg.cadence == 0; }

// Line-delimited JSON, one signature per line.

inline nlohmann::json to_json(const TopologicalSignature& s) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : s.pd1) pairs.push_back({p.birth, p.death});
  return {{"anchor", {s.anchor[0], s.anchor[1]}},
          {"created_at", s.created_at},
          {"eps_max", s.landscape.eps_max},
          {"pd1", pairs},
          {"landscape", s.landscape.values}};
}

inline TopologicalSignature signature_from_json(const nlohmann::json& j) {
  try {
    TopologicalSignature s;
    s.anchor = {j.at("anchor").at(0).get<double>(), j.at("anchor").at(1).get<double>()};
    s.created_at = j.at("created_at").get<Timestep>();
    for (const auto& p : j.at("pd1")) s.pd1.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    s.landscape.eps_max = j.at("eps_max").get<double>();
    s.landscape.values = j.at("landscape").get<std::vector<double>>();
    if (s.landscape.values.size() < 2) throw ParseError("signature landscape needs at least 2 samples");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("signature record: ") + e.what());
  }
}

inline void save_store(const SignatureStore& store, std::ostream& out) {
  for (const auto& s : store.entries()) out << to_json(s).dump() << '\n';
}

inline SignatureStore load_store(std::istream& in) {
  SignatureStore store;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      store.append(signature_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("signature store: ") + e.what());
    }
  }
  return store;
}

}  // namespace t2nav
