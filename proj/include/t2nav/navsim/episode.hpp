#pragma once

// Episode runner: sense -> memory -> loop check -> goal/frontier choice -> move.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/diagram_metrics.hpp"
#include "t2nav/navsim/agent.hpp"
#include "t2nav/navsim/frontier.hpp"
#include "t2nav/navsim/sensing.hpp"
#include "t2nav/navsim/world.hpp"
#include "t2nav/term.hpp"
#include "t2nav/tslc.hpp"

namespace t2nav::navsim {

enum class Ablation { Full, NoTerm, NoTslc, Baseline };

inline constexpr Ablation kAllAblations[] = {Ablation::Full, Ablation::NoTerm, Ablation::NoTslc, Ablation::Baseline};

inline std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::Full: return "full";
    case Ablation::NoTerm: return "no-term";
    case Ablation::NoTslc: return "no-tslc";
    case Ablation::Baseline: return "baseline";
  }
  return "?";
}

inline Ablation parse_ablation(std::string_view s) {
  for (Ablation a : kAllAblations)
    if (to_string(a) == s) return a;
  throw ValidationError("unknown ablation '" + std::string(s) + "' (expected full, no-term, no-tslc or baseline)");
}

inline bool uses_term(Ablation a) { return a == Ablation::Full || a == Ablation::NoTslc; }
inline bool uses_tslc(Ablation a) { return a == Ablation::Full || a == Ablation::NoTerm; }

struct EpisodeResult {
  std::string world;
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::Full;
  int success = 0;
  double path_length = 0.0;
  double shortest_length = 0.0;
  int steps = 0;
  int loop_detections = 0;
  int revisited_cells = 0;
  int collisions = 0;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

struct LoopEvent {
  Timestep t = 0;
  std::size_t matched_index = 0;
  double confidence = 0.0;
  Vec2 anchor{};
};

/// Everything needed to draw an episode afterwards.
struct EpisodeTrace {
  Trajectory trajectory;
  std::vector<BlacklistRegion> blacklist;
  std::vector<LoopEvent> loops;
  Vec3 goal_final{};
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t t) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (t + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 4-connected BFS path from `from` to `to` (inclusive) over `passable` cells.
template <class Passable>
std::optional<std::vector<Cell>> plan_path(const GridWorld& w, Cell from, Cell to, Passable&& passable) {
  if (!w.in_bounds(from) || !w.in_bounds(to)) return std::nullopt;
  const auto dist = bfs_distances(w.width, w.height, from, passable);
  if (dist[w.index(to)] < 0) return std::nullopt;
  std::vector<Cell> path{to};
  Cell c = to;
  while (c != from) {
    for (const Cell n : neighbors4(c)) {
      if (w.in_bounds(n) && dist[w.index(n)] == dist[w.index(c)] - 1) {
        c = n;
        break;
      }
    }
    path.push_back(c);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Turn towards `target` when the bearing error exceeds half a turn increment, else move forward.
inline Action heading_action(const Pose& pose, const Vec2& target, const Config& cfg) {
  const double bearing = std::atan2(target[1] - pose.y(), target[0] - pose.x());
  const double diff = normalize_angle(bearing - pose.theta());
  const double half = 0.5 * cfg.turn_deg * std::numbers::pi / 180.0 + 1e-9;
  if (diff > half) return Action::TurnLeft;
  if (diff < -half) return Action::TurnRight;
  return Action::Forward;
}

/// Pure pursuit along the polyline through the path's cell centres.
inline Action follow_path(const GridWorld& w, const Pose& pose, const std::vector<Cell>& path,
                          std::optional<Vec2> final_point, const Config& cfg) {
  std::vector<Vec2> line;
  for (const Cell c : path) line.push_back(w.center(c));
  if (final_point) line.back() = *final_point;
  if (line.size() == 1) return heading_action(pose, line.front(), cfg);

  const Vec2 p = pose.position();
  std::size_t seg = 0;
  double seg_t = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < std::min<std::size_t>(line.size(), 3); ++i) {
    const Vec2 a = line[i], b = line[i + 1];
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double len2 = vx * vx + vy * vy;
    const double u = len2 > 0 ? std::clamp(((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2, 0.0, 1.0) : 0.0;
    const double d = distance(p, Vec2{a[0] + u * vx, a[1] + u * vy});
    if (d < best) {
      best = d;
      seg = i;
      seg_t = u;
    }
  }
  double ahead = 0.6 * w.resolution;
  Vec2 carrot = line.back();
  for (std::size_t i = seg; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i], b = line[i + 1];
    const double len = distance(a, b);
    const double from = i == seg ? seg_t * len : 0.0;
    if (len - from >= ahead) {
      const double u = (from + ahead) / len;
      carrot = {a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])};
      break;
    }
    ahead -= len - from;
  }
  return heading_action(pose, carrot, cfg);
}

namespace detail {

struct GoalEstimate {
  Timestep observed = 0;
  Vec3 position{};  // where the goal was last recognised, led by one step when tracked
};

class Policy {
 public:
  Policy(const GridWorld& w, const Config& cfg, Ablation ab) : w_(w), cfg_(cfg), ablation_(ab) {}

  Action decide(AgentState& s, const SceneGraphSnapshot& snap) {
    const Cell here = w_.cell_of(s.pose.position());

    // Goal recognition on the current view.
    const SceneNode* seen = nullptr;
    double best_cos = cfg_.goal_match;
    for (const auto& n : snap.nodes) {
      if (n.label != w_.goal.label) continue;
      const double c = cosine_similarity(n.features, w_.goal.features);
      if (c > best_cos) {
        best_cos = c;
        seen = &n;
      }
    }
    if (seen != nullptr) {
      goal_ = GoalEstimate{s.t, lead(s, *seen)};
      last_seen_ = goal_;
      scans_ = 0;
      if (distance(Vec2{seen->position[0], seen->position[1]}, s.pose.position()) <= cfg_.stop_radius) return Action::Stop;
    }

    if (recenter_) {
      const Vec2 c = w_.center(here);
      if (distance(c, s.pose.position()) > 0.15 * w_.resolution) return heading_action(s.pose, c, cfg_);
      recenter_ = false;
    }

    if (goal_) {
      const Vec2 target{goal_->position[0], goal_->position[1]};
      if (distance(target, s.pose.position()) <= cfg_.stop_radius) {
        if (++scans_ <= 12) return Action::TurnLeft;
        goal_.reset();
      } else {
        const Cell tc = w_.in_bounds(w_.cell_of(target)) ? w_.cell_of(target) : here;
        auto path = plan_path(w_, here, tc, [&](Cell c) { return s.belief.at(c) != Occupancy::Blocked; });
        if (path) return follow_path(w_, s.pose, *path, target, cfg_);
        goal_.reset();
      }
    }

    if (!frontier_valid(s, here)) {
      frontier_.reset();
      auto choice = select_frontier(w_, s, w_.goal, cfg_);
      if (!choice) choice = select_frontier(w_, s, w_.goal, cfg_, /*ignore_blacklist=*/true);
      if (!choice) {
        if (last_seen_) {
          // Everything explored: go back to where the goal was last seen.
          goal_ = last_seen_;
          scans_ = 0;
          return Action::TurnLeft;
        }
        return Action::Stop;
      }
      frontier_ = choice->cell;
    }
    if (*frontier_ == here) return Action::TurnLeft;  // look around before leaving
    auto path = plan_path(w_, here, *frontier_, [&](Cell c) { return s.belief.is_free(c); });
    if (!path) {
      frontier_.reset();
      return Action::TurnLeft;
    }
    return follow_path(w_, s.pose, *path, std::nullopt, cfg_);
  }

  void on_collision() { recenter_ = true; }

 private:
  // One step ahead of a visible goal when the memory tracks a plausible velocity.
  Vec3 lead(const AgentState& s, const SceneNode& node) const {
    if (!uses_term(ablation_) || !plausible_velocity(s.memory, node.label, cfg_)) return node.position;
    return clamp_to_free(w_, s.belief, node.position, s.memory.predict_position(node, 1));
  }

  bool frontier_valid(const AgentState& s, Cell here) const {
    if (!frontier_ || *frontier_ == here) return false;
    if (!is_frontier(s.belief, *frontier_)) return false;
    if (s.blacklisted(w_.center(*frontier_))) {
      // Keep a blacklisted target only while nothing else is left.
      return !select_frontier(w_, s, w_.goal, cfg_).has_value();
    }
    return true;
  }

  const GridWorld& w_;
  const Config& cfg_;
  Ablation ablation_;
  std::optional<GoalEstimate> goal_;
  std::optional<GoalEstimate> last_seen_;
  std::optional<Cell> frontier_;
  int scans_ = 0;
  bool recenter_ = false;
};

}  // namespace detail

/// Runs one episode. All randomness derives from `seed`.
inline EpisodeResult run_episode(const GridWorld& w, const Config& cfg, std::uint64_t seed, Ablation ablation,
                                 EpisodeTrace* trace = nullptr) {
  validate(w);
  AgentState s = AgentState::start(w, cfg);
  detail::Policy policy(w, cfg, ablation);
  const double fov = cfg.fov_deg * std::numbers::pi / 180.0;
  const SenseNoise noise = SenseNoise::from(cfg);

  EpisodeResult r;
  r.world = w.name;
  r.seed = seed;
  r.ablation = ablation;
  r.shortest_length = shortest_path_length(w);

  for (int k = 0; k < cfg.step_budget && !s.stopped; ++k) {
    const SceneGraphSnapshot snap = sense(w, s.pose, fov, cfg.sense_range, mix_seed(seed, static_cast<std::uint64_t>(s.t)), s.t, noise);
    update_belief(w, s.belief, s.pose, fov, cfg.sense_range);
    if (uses_term(ablation)) s.memory.push_snapshot(snap);
    if (uses_tslc(ablation) && s.t > 0 && cadence_gate(s.t, cfg)) {
      const LoopDetection det = check_loop(s.sig_store, s.trajectory, cfg);
      if (det.detected) {
        ++r.loop_detections;
      }
      // Only a segment that itself contains a loop marks a place to avoid.
      if (det.detected && !s.sig_store.entries().back().pd1.empty()) {
        const BlacklistRegion region{s.sig_store[*det.matched_index].anchor, cfg.blacklist_radius};
        if (std::find(s.blacklist.begin(), s.blacklist.end(), region) == s.blacklist.end()) s.blacklist.push_back(region);
        if (trace) trace->loops.push_back({s.t, *det.matched_index, det.confidence, region.center});
      }
    }
    const Action a = policy.decide(s, snap);
    const int before = s.collisions;
    step(w, s, a, cfg);
    if (s.collisions != before) policy.on_collision();
  }

  const Vec3 goal = w.goal_position(s.t);
  r.success = s.stopped && distance(Vec2{goal[0], goal[1]}, s.pose.position()) <= cfg.success_radius ? 1 : 0;
  r.path_length = s.path_length;
  r.steps = static_cast<int>(s.t);
  r.revisited_cells = s.revisited_cells;
  r.collisions = s.collisions;
  if (trace) {
    trace->trajectory = s.trajectory;
    trace->blacklist = s.blacklist;
    trace->goal_final = goal;
  }
  return r;
}

struct Metrics {
  double sr = 0.0;   // percent
  double spl = 0.0;  // percent
};

/// Success weighted by the ratio of shortest to travelled path length.
inline double spl_term(const EpisodeResult& r) {
  if (!(r.shortest_length > 0.0)) throw ValidationError("episode shortest_length must be > 0");
  return r.success * r.shortest_length / std::max(r.path_length, r.shortest_length);
}

inline Metrics compute_metrics(std::span<const EpisodeResult> results) {
  if (results.empty()) throw ValidationError("compute_metrics needs at least one episode");
  double s = 0.0;
  std::vector<double> terms;
  terms.reserve(results.size());
  for (const auto& r : results) {
    s += r.success;
    terms.push_back(spl_term(r));
  }
  const double n = static_cast<double>(results.size());
  return {100.0 * s / n, 100.0 * canonical_sum(std::move(terms)) / n};
}

inline nlohmann::json to_json(const EpisodeResult& r) {
  return {{"world", r.world},
          {"seed", r.seed},
          {"ablation", std::string(to_string(r.ablation))},
          {"success", r.success},
          {"path_length", r.path_length},
          {"shortest_length", r.shortest_length},
          {"steps", r.steps},
          {"loop_detections", r.loop_detections},
          {"revisited_cells", r.revisited_cells},
          {"collisions", r.collisions}};
}

inline EpisodeResult episode_from_json(const nlohmann::json& j) {
  try {
    EpisodeResult r;
    r.world = j.at("world").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ablation = parse_ablation(j.at("ablation").get<std::string>());
    r.success = j.at("success").get<int>();
    r.path_length = j.at("path_length").get<double>();
    r.shortest_length = j.at("shortest_length").get<double>();
    r.steps = j.at("steps").get<int>();
    r.loop_detections = j.at("loop_detections").get<int>();
    r.revisited_cells = j.at("revisited_cells").get<int>();
    r.collisions = j.value("collisions", 0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("episode record: ") + e.what());
  }
}

inline nlohmann::json to_json(const EpisodeTrace& t, const GridWorld& w) {
  nlohmann::json pts = nlohmann::json::array(), bl = nlohmann::json::array(), loops = nlohmann::json::array();
  for (const auto& p : t.trajectory.points()) pts.push_back({p.timestep, p.pose.x(), p.pose.y(), p.pose.theta()});
  for (const auto& b : t.blacklist) bl.push_back({{"center", {b.center[0], b.center[1]}}, {"radius", b.radius}});
  for (const auto& l : t.loops)
    loops.push_back({{"t", l.t}, {"matched_index", l.matched_index}, {"confidence", l.confidence}, {"anchor", {l.anchor[0], l.anchor[1]}}});
  std::vector<std::string> rows;
  for (int y = 0; y < w.height; ++y) {
    std::string row;
    for (int x = 0; x < w.width; ++x) row += w.is_blocked({x, y}) ? '#' : '.';
    rows.push_back(row);
  }
  return {{"kind", "trace"},
          {"resolution", w.resolution},
          {"grid", rows},
          {"trajectory", pts},
          {"blacklist", bl},
          {"loops", loops},
          {"goal", {t.goal_final[0], t.goal_final[1]}}};
}

}  // namespace t2nav::navsim
