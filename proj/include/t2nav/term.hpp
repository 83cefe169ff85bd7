#pragma once

// Temporal reasoning memory: a bounded window of scene-graph snapshots linked
// across consecutive timesteps, with per-label velocity estimates.

#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"

namespace t2nav {

/// Label agreement blended with spatial closeness, in [0,1].
inline double similarity(const SceneNode& a, const SceneNode& b, double alpha_sim, double sigma_p) {
  if (!(sigma_p > 0.0)) throw ValidationError("sigma_p must be > 0");
  if (!is_finite(a.position) || !is_finite(b.position)) throw ValidationError("node position must be finite");
  const double same = a.label == b.label ? 1.0 : 0.0;
  return alpha_sim * same + (1.0 - alpha_sim) * std::exp(-distance(a.position, b.position) / sigma_p);
}

struct NodeRef {
  Timestep timestep = 0;
  std::string id;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct TemporalEdge {
  NodeRef from;
  NodeRef to;
  double weight = 0.0;
  Timestep dt = 0;
};

struct TemporalMemoryParams {
  std::size_t capacity = 100;
  double gamma = 0.95;
  double lambda = 1.0;
  double tau = 0.5;
  double alpha_sim = 0.5;
  double sigma_p = 1.0;

  static TemporalMemoryParams from(const Config& c) {
    return {static_cast<std::size_t>(c.K), c.gamma, c.lambda, c.tau, c.alpha_sim, c.sigma_p};
  }
};

class TemporalMemory {
 public:
  TemporalMemory() = default;
  explicit TemporalMemory(const TemporalMemoryParams& p) : params_(p) {
    if (p.capacity < 1) throw ValidationError("memory capacity must be >= 1");
    if (!(p.sigma_p > 0.0)) throw ValidationError("sigma_p must be > 0");
  }
  explicit TemporalMemory(const Config& cfg) : TemporalMemory(TemporalMemoryParams::from(cfg)) {}

  const TemporalMemoryParams& params() const { return params_; }
  const std::deque<SceneGraphSnapshot>& window() const { return window_; }
  const std::vector<TemporalEdge>& temporal_edges() const { return edges_; }
  const std::map<std::string, Vec3>& velocities() const { return velocities_; }
  bool empty() const { return window_.empty(); }

  /// Links `g` to the newest retained snapshot and returns how many temporal
  /// edges were created.
  std::size_t push_snapshot(SceneGraphSnapshot g) {
    validate(g, feature_dim_);
    if (!window_.empty() && g.timestep <= window_.back().timestep)
      throw OrderingError("snapshot timestep " + std::to_string(g.timestep) + " not after newest retained " +
                          std::to_string(window_.back().timestep));
    if (feature_dim_ == 0 && !g.nodes.empty()) feature_dim_ = g.nodes.front().features.size();

    std::size_t created = 0;
    if (!window_.empty()) {
      const SceneGraphSnapshot& prev = window_.back();
      const Timestep dt = g.timestep - prev.timestep;
      for (const auto& v : prev.nodes) {
        for (const auto& u : g.nodes) {
          if (similarity(v, u, params_.alpha_sim, params_.sigma_p) > params_.tau) {
            const double w = params_.gamma * std::exp(-params_.lambda * euclidean(v.features, u.features));
            edges_.push_back({{prev.timestep, v.id}, {g.timestep, u.id}, w, dt});
            ++created;
          }
        }
      }
    }
    window_.push_back(std::move(g));
    while (window_.size() > params_.capacity) evict_oldest();
    for (const auto& label : labels_in(window_.back())) {
      if (auto v = estimate_velocity(label)) velocities_[label] = *v;
    }
    return created;
  }

  /// Displacement per timestep of `label` across the two newest snapshots, when
  /// a temporal edge links same-label nodes there.
  std::optional<Vec3> estimate_velocity(const std::string& label) const {
    if (window_.size() < 2) return std::nullopt;
    const auto& prev = window_[window_.size() - 2];
    const auto& curr = window_.back();
    const TemporalEdge* best = nullptr;
    const SceneNode* best_from = nullptr;
    const SceneNode* best_to = nullptr;
    for (const auto& e : edges_) {
      if (e.from.timestep != prev.timestep || e.to.timestep != curr.timestep) continue;
      const SceneNode* a = prev.find(e.from.id);
      const SceneNode* b = curr.find(e.to.id);
      if (a == nullptr || b == nullptr || a->label != label || b->label != label) continue;
      const bool better =
          best == nullptr || e.weight > best->weight ||
          (e.weight == best->weight && std::tie(e.to.id, e.from.id) < std::tie(best->to.id, best->from.id));
      if (better) {
        best = &e;
        best_from = a;
        best_to = b;
      }
    }
    if (best == nullptr) return std::nullopt;
    return (1.0 / static_cast<double>(best->dt)) * (best_to->position - best_from->position);
  }

  /// Linear extrapolation `k` steps ahead; nodes without a recorded velocity stay put.
  Vec3 predict_position(const SceneNode& node, Timestep k) const {
    if (k < 1) throw PreconditionError("prediction horizon must be >= 1");
    const auto it = velocities_.find(node.label);
    if (it == velocities_.end()) return node.position;
    return node.position + static_cast<double>(k) * it->second;
  }

  /// Observations of `label` with timestep in [first, last], ascending, ties by node id.
  std::vector<std::pair<Timestep, Vec3>> query_history(const std::string& label, Timestep first,
                                                       Timestep last) const {
    if (first > last) throw PreconditionError("query interval endpoints out of order");
    std::vector<std::pair<Timestep, Vec3>> out;
    for (const auto& g : window_) {
      if (g.timestep < first || g.timestep > last) continue;
      std::vector<const SceneNode*> hits;
      for (const auto& n : g.nodes)
        if (n.label == label) hits.push_back(&n);
      std::sort(hits.begin(), hits.end(), [](const SceneNode* a, const SceneNode* b) { return a->id < b->id; });
      for (const auto* n : hits) out.emplace_back(g.timestep, n->position);
    }
    return out;
  }

  /// Newest retained observation of a node carrying `label`, with the snapshot timestep.
  std::vector<std::pair<Timestep, const SceneNode*>> latest_with_label(const std::string& label) const {
    std::vector<std::pair<Timestep, const SceneNode*>> out;
    std::map<std::string, std::size_t> seen;
    for (auto g = window_.rbegin(); g != window_.rend(); ++g) {
      for (const auto& n : g->nodes) {
        if (n.label != label || seen.contains(n.id)) continue;
        seen.emplace(n.id, out.size());
        out.emplace_back(g->timestep, &n);
      }
    }
    return out;
  }

 private:
  static std::vector<std::string> labels_in(const SceneGraphSnapshot& g) {
    std::vector<std::string> labels;
    for (const auto& n : g.nodes) labels.push_back(n.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
  }

  void evict_oldest() {
    const Timestep t = window_.front().timestep;
    window_.pop_front();
    std::erase_if(edges_, [t](const TemporalEdge& e) { return e.from.timestep == t || e.to.timestep == t; });
  }

  TemporalMemoryParams params_;
  std::size_t feature_dim_ = 0;
  std::deque<SceneGraphSnapshot> window_;
  std::vector<TemporalEdge> edges_;
  std::map<std::string, Vec3> velocities_;
};

}  // namespace t2nav
