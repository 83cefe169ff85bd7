#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/navsim/agent.hpp"
#include "t2nav/navsim/sensing.hpp"
#include "t2nav/navsim/world.hpp"

namespace t2nav::navsim {

/// Known-free cells with at least one unknown 4-neighbour, in row-major order.
inline std::vector<Cell> find_frontiers(const OccupancyBelief& b) {
  std::vector<Cell> out;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x) {
      const Cell c{x, y};
      if (!b.is_free(c)) continue;
      for (const Cell n : neighbors4(c))
        if (b.in_bounds(n) && b.at(n) == Occupancy::Unknown) {
          out.push_back(c);
          break;
        }
    }
  return out;
}

inline bool is_frontier(const OccupancyBelief& b, Cell c) {
  if (!b.is_free(c)) return false;
  for (const Cell n : neighbors4(c))
    if (b.in_bounds(n) && b.at(n) == Occupancy::Unknown) return true;
  return false;
}

/// Velocities below the sensing-noise floor or above any object's top speed
/// (usually a link between two same-label instances) are not extrapolated.
inline bool plausible_velocity(const TemporalMemory& mem, const std::string& label, const Config& cfg) {
  const auto it = mem.velocities().find(label);
  if (it == mem.velocities().end()) return false;
  const double speed = norm(it->second);
  return speed >= cfg.min_track_speed && speed <= cfg.max_track_speed;
}

/// Walks from `from` towards `to` and stops before the first cell the belief
/// knows to be blocked (or that leaves the map).
inline Vec3 clamp_to_free(const GridWorld& w, const OccupancyBelief& b, const Vec3& from, const Vec3& to) {
  const double len = distance(Vec2{from[0], from[1]}, Vec2{to[0], to[1]});
  const double step = 0.1 * w.resolution;
  const int n = static_cast<int>(std::ceil(len / step));
  Vec3 last = from;
  for (int i = 1; i <= n; ++i) {
    const double u = std::min(1.0, i * step / len);
    const Vec3 p{from[0] + u * (to[0] - from[0]), from[1] + u * (to[1] - from[1]), from[2] + u * (to[2] - from[2])};
    const Cell c = w.cell_of(p[0], p[1]);
    if (!b.in_bounds(c) || b.at(c) == Occupancy::Blocked) break;
    last = p;
  }
  return last;
}

/// Where the memory expects goal-like instances to be now: the newest
/// observation of each goal-labelled node whose descriptor matches the goal,
/// extrapolated to `now` and, given a belief, stopped at known walls.
inline std::vector<Vec3> predicted_goal_positions(const TemporalMemory& mem, const GoalSpec& goal, Timestep now,
                                                  const Config& cfg, const GridWorld* w = nullptr,
                                                  const OccupancyBelief* belief = nullptr) {
  std::vector<Vec3> out;
  const bool moving = plausible_velocity(mem, goal.label, cfg);
  for (const auto& [t, node] : mem.latest_with_label(goal.label)) {
    if (cosine_similarity(node->features, goal.features) <= cfg.goal_match) continue;
    const Timestep k = std::clamp<Timestep>(now - t, 1, cfg.max_extrapolation);
    Vec3 p = moving ? mem.predict_position(*node, k) : node->position;
    if (moving && w != nullptr && belief != nullptr) p = clamp_to_free(*w, *belief, node->position, p);
    out.push_back(p);
  }
  return out;
}

/// Reward for heading towards a frontier near a predicted goal position.
inline double goal_bias(const Vec2& frontier, const std::vector<Vec3>& targets, const Config& cfg) {
  double best = 0.0;
  for (const auto& p : targets)
    best = std::max(best, cfg.goal_bias_weight * std::max(0.0, cfg.goal_bias_radius - distance(frontier, Vec2{p[0], p[1]})));
  return best;
}

struct FrontierChoice {
  Cell cell;
  double score = 0.0;
};

/// Frontier minimising path cost minus goal bias; ties go to the first cell
/// in row-major order. Blacklisted frontiers are skipped unless
/// `ignore_blacklist` is set.
inline std::optional<FrontierChoice> select_frontier(const GridWorld& w, const AgentState& s, const GoalSpec& goal,
                                                     const Config& cfg, bool ignore_blacklist = false) {
  const Cell here = w.cell_of(s.pose.position());
  const auto dist = bfs_distances(w.width, w.height, here, [&](Cell c) { return s.belief.is_free(c); });
  const auto targets = predicted_goal_positions(s.memory, goal, s.t, cfg, &w, &s.belief);
  std::optional<FrontierChoice> best;
  for (const Cell f : find_frontiers(s.belief)) {
    const int d = dist[w.index(f)];
    if (d < 0) continue;
    const Vec2 c = w.center(f);
    if (!ignore_blacklist && s.blacklisted(c)) continue;
    const double score = d * w.resolution - goal_bias(c, targets, cfg);
    if (!best || score < best->score) best = FrontierChoice{f, score};
  }
  return best;
}

}  // namespace t2nav::navsim
