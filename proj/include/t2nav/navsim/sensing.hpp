#pragma once

// Simulated perception: object detections with seeded noise, and the agent's
// occupancy belief.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "t2nav/config.hpp"
#include "t2nav/core.hpp"
#include "t2nav/navsim/world.hpp"

namespace t2nav::navsim {

/// True when the open segment a-b crosses no blocked cell other than the cell
/// containing `b`. Sampled at 1/20 of the grid resolution.
inline bool line_of_sight(const GridWorld& w, const Vec2& a, const Vec2& b) {
  const Cell target = w.cell_of(b);
  const double len = distance(a, b);
  const int samples = std::max(1, static_cast<int>(std::ceil(len / (0.05 * w.resolution))));
  for (int i = 1; i < samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    const Cell c = w.cell_of(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]));
    if (c != target && w.is_blocked(c)) return false;
  }
  return true;
}

/// Whether `p` lies within range and inside the horizontal field of view of `pose`.
inline bool in_view(const Pose& pose, const Vec2& p, double fov, double range) {
  const double dx = p[0] - pose.x(), dy = p[1] - pose.y();
  const double d = std::hypot(dx, dy);
  if (d > range) return false;
  if (d == 0.0 || fov >= 2.0 * std::numbers::pi) return true;
  return std::abs(normalize_angle(std::atan2(dy, dx) - pose.theta())) <= 0.5 * fov + 1e-12;
}

struct SenseNoise {
  double position = 0.05;        // metres, Gaussian sigma
  double feature = 0.05;         // per-component sigma at zero range
  double feature_per_m = 0.04;   // added sigma per metre of range

  static SenseNoise from(const Config& c) { return {c.position_noise, c.feature_noise, c.feature_noise_per_m}; }
};

/// Snapshot of every object in range and view with line of sight, at timestep `t`.
inline SceneGraphSnapshot sense(const GridWorld& w, const Pose& pose, double fov, double range,
                                std::uint64_t noise_seed, Timestep t = 0, const SenseNoise& noise = {}) {
  if (!w.in_bounds(w.cell_of(pose.position()))) throw PreconditionError("pose outside world bounds");
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SceneGraphSnapshot g;
  g.timestep = t;
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    const Vec3 p = w.object_position(i, t);
    const Vec2 p2{p[0], p[1]};
    if (!in_view(pose, p2, fov, range) || !line_of_sight(w, pose.position(), p2)) continue;
    const WorldObject& o = w.objects[i];
    SceneNode n;
    n.id = o.id;
    n.label = o.label;
    n.position = p;
    n.position[0] += noise.position * gauss(rng);
    n.position[1] += noise.position * gauss(rng);
    const double sigma = noise.feature + noise.feature_per_m * distance(pose.position(), p2);
    n.features = o.features;
    for (auto& f : n.features) f += sigma * gauss(rng);
    g.nodes.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j)
      if (distance(g.nodes[i].position, g.nodes[j].position) < 2.0)
        g.spatial_edges.push_back({g.nodes[i].id, g.nodes[j].id, "near"});
  return g;
}

enum class Occupancy : std::uint8_t { Unknown = 0, Free = 1, Blocked = 2 };

class OccupancyBelief {
 public:
  OccupancyBelief() = default;
  OccupancyBelief(int width, int height)
      : width_(width), height_(height), cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Occupancy::Unknown) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  Occupancy at(Cell c) const { return in_bounds(c) ? cells_[index(c)] : Occupancy::Blocked; }
  void set(Cell c, Occupancy o) { cells_[index(c)] = o; }
  bool is_free(Cell c) const { return at(c) == Occupancy::Free; }
  std::size_t known_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](Occupancy o) { return o != Occupancy::Unknown; }));
  }

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x); }

  int width_ = 0;
  int height_ = 0;
  std::vector<Occupancy> cells_;
};

/// Reveals cells whose centre is in view with line of sight, plus the 8 cells
/// around the agent.
inline void update_belief(const GridWorld& w, OccupancyBelief& belief, const Pose& pose, double fov, double range) {
  const Cell here = w.cell_of(pose.position());
  auto reveal = [&](Cell c) {
    if (w.in_bounds(c)) belief.set(c, w.is_blocked(c) ? Occupancy::Blocked : Occupancy::Free);
  };
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) reveal({here.x + dx, here.y + dy});
  const int reach = static_cast<int>(std::ceil(range / w.resolution)) + 1;
  for (int y = here.y - reach; y <= here.y + reach; ++y) {
    for (int x = here.x - reach; x <= here.x + reach; ++x) {
      const Cell c{x, y};
      if (!w.in_bounds(c) || belief.at(c) != Occupancy::Unknown) continue;
      const Vec2 ctr = w.center(c);
      if (in_view(pose, ctr, fov, range) && line_of_sight(w, pose.position(), ctr)) reveal(c);
    }
  }
}

}  // namespace t2nav::navsim
