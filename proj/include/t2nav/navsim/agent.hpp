#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/navsim/sensing.hpp"
#include "t2nav/navsim/world.hpp"
#include "t2nav/term.hpp"
#include "t2nav/tslc.hpp"

namespace t2nav::navsim {

enum class Action { Forward, TurnLeft, TurnRight, Stop };

inline const char* to_string(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::TurnLeft: return "turn-left";
    case Action::TurnRight: return "turn-right";
    case Action::Stop: return "stop";
  }
  return "?";
}

struct BlacklistRegion {
  Vec2 center{};
  double radius = 0.0;

  bool contains(const Vec2& p) const { return distance(center, p) <= radius; }
  friend bool operator==(const BlacklistRegion&, const BlacklistRegion&) = default;
};

struct AgentState {
  Pose pose;
  Timestep t = 0;
  Trajectory trajectory;
  TemporalMemory memory;
  SignatureStore sig_store;
  std::vector<BlacklistRegion> blacklist;
  OccupancyBelief belief;

  bool stopped = false;
  double path_length = 0.0;
  int collisions = 0;
  int revisited_cells = 0;
  std::vector<int> visits;  // forward arrivals per cell

  static AgentState start(const GridWorld& w, const Config& cfg) {
    AgentState s;
    const Vec2 c = w.center(w.start);
    s.pose = Pose(c[0], c[1], w.start_heading);
    s.trajectory.append(0, s.pose);
    s.memory = TemporalMemory(cfg);
    s.belief = OccupancyBelief(w.width, w.height);
    s.visits.assign(static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height), 0);
    s.visits[w.index(w.start)] = 1;
    return s;
  }

  bool blacklisted(const Vec2& p) const {
    for (const auto& r : blacklist)
      if (r.contains(p)) return true;
    return false;
  }
};

/// Applies one action. Forward moves `cfg.forward_step` along the heading
/// unless the destination cell is blocked; turns rotate by `cfg.turn_deg`.
/// Every action on a running episode appends to the trajectory.
inline void step(const GridWorld& w, AgentState& s, Action a, const Config& cfg) {
  if (s.stopped) return;
  const double turn = cfg.turn_deg * std::numbers::pi / 180.0;
  switch (a) {
    case Action::Forward: {
      const double nx = s.pose.x() + cfg.forward_step * std::cos(s.pose.theta());
      const double ny = s.pose.y() + cfg.forward_step * std::sin(s.pose.theta());
      const Cell from = w.cell_of(s.pose.position());
      const Cell to = w.cell_of(nx, ny);
      if (w.is_blocked(to)) {
        ++s.collisions;
        break;
      }
      s.pose = Pose(nx, ny, s.pose.theta());
      s.path_length += cfg.forward_step;
      if (to != from) {
        if (s.visits[w.index(to)] > 0) ++s.revisited_cells;
        ++s.visits[w.index(to)];
      }
      break;
    }
    case Action::TurnLeft: s.pose = Pose(s.pose.x(), s.pose.y(), s.pose.theta() + turn); break;
    case Action::TurnRight: s.pose = Pose(s.pose.x(), s.pose.y(), s.pose.theta() - turn); break;
    case Action::Stop: s.stopped = true; break;
  }
  ++s.t;
  s.trajectory.append(s.t, s.pose);
}

}  // namespace t2nav::navsim
