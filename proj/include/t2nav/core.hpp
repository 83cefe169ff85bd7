#pragma once

// Shared domain types: poses, trajectories, scene graphs and goals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace t2nav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range or inconsistent value.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Timesteps fed out of order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Filtration or complex violates a face relation.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

using Vec3 = std::array<double, 3>;
using Vec2 = std::array<double, 2>;
using Timestep = std::int64_t;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double distance(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("feature dimensionality mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("feature dimensionality mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

/// Maps an angle onto [-pi, pi).
inline double normalize_angle(double theta) {
  if (!std::isfinite(theta)) throw ValidationError("angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  double out = r - std::numbers::pi;
  if (out >= std::numbers::pi) out -= two_pi;
  if (out < -std::numbers::pi) out = -std::numbers::pi;
  return out;
}

/// Planar agent state. Heading is kept normalized.
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw ValidationError("pose position must be finite");
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

struct TrajectoryPoint {
  Timestep timestep = 0;
  Pose pose;
  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Append-only pose history with strictly increasing timesteps.
class Trajectory {
 public:
  Trajectory() = default;

  void append(Timestep t, const Pose& pose) {
    if (t < 0) throw ValidationError("timestep must be non-negative");
    if (!points_.empty() && t <= points_.back().timestep)
      throw OrderingError("trajectory timesteps must be strictly increasing (got " + std::to_string(t) +
                          " after " + std::to_string(points_.back().timestep) + ")");
    points_.push_back({t, pose});
  }

  std::span<const TrajectoryPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const TrajectoryPoint& back() const { return points_.back(); }
  const TrajectoryPoint& operator[](std::size_t i) const { return points_[i]; }

  /// The most recent `n` points (or all of them when shorter).
  Trajectory tail(std::size_t n) const {
    Trajectory out;
    const std::size_t first = points_.size() > n ? points_.size() - n : 0;
    out.points_.assign(points_.begin() + static_cast<std::ptrdiff_t>(first), points_.end());
    return out;
  }

 private:
  std::vector<TrajectoryPoint> points_;
};

struct SceneNode {
  std::string id;
  Vec3 position{};
  std::vector<double> features;
  std::string label;
};

struct SpatialEdge {
  std::string a;
  std::string b;
  std::string relation;
};

struct SceneGraphSnapshot {
  Timestep timestep = 0;
  std::vector<SceneNode> nodes;
  std::vector<SpatialEdge> spatial_edges;

  const SceneNode* find(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
};

/// Throws ValidationError when ids collide, edges dangle or values are not finite.
/// `feature_dim` of 0 accepts any (consistent) dimensionality.
inline void validate(const SceneGraphSnapshot& g, std::size_t feature_dim = 0) {
  if (g.timestep < 0) throw ValidationError("snapshot timestep must be non-negative");
  std::unordered_set<std::string> ids;
  std::size_t dim = feature_dim;
  for (const auto& n : g.nodes) {
    if (!ids.insert(n.id).second) throw ValidationError("duplicate node id '" + n.id + "'");
    if (!is_finite(n.position)) throw ValidationError("node '" + n.id + "' has non-finite position");
    if (n.features.empty()) throw ValidationError("node '" + n.id + "' has empty feature vector");
    if (dim == 0) dim = n.features.size();
    if (n.features.size() != dim) throw ValidationError("node '" + n.id + "' feature dimensionality mismatch");
  }
  for (const auto& e : g.spatial_edges) {
    if (!ids.contains(e.a) || !ids.contains(e.b))
      throw ValidationError("spatial edge references unknown node '" + (ids.contains(e.a) ? e.b : e.a) + "'");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GoalSpec {
  std::string label;
  std::vector<double> features;
  std::optional<Vec3> true_position;  // simulator ground truth, never shown to the agent
};

}  // namespace t2nav
