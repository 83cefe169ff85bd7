#pragma once

// Occupancy-grid worlds: a text grid ('#' blocked, '.' free, 'S' start, 'G'
// goal) plus a JSON sidecar describing resolution, start heading, the goal
// object and other objects.

#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2nav/core.hpp"

namespace t2nav::navsim {

inline constexpr std::size_t kFeatureDim = 16;

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Unit-norm synthetic descriptor derived from a seed.
inline std::vector<double> feature_from_seed(std::uint64_t seed, std::size_t dim = kFeatureDim) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x51ED27);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> f(dim);
  double n2 = 0.0;
  for (auto& x : f) {
    x = gauss(rng);
    n2 += x * x;
  }
  const double n = std::sqrt(n2);
  for (auto& x : f) x /= n;
  return f;
}

/// Unit descriptor with cosine exactly `similarity` to the unit vector `to`.
inline std::vector<double> lookalike_feature(const std::vector<double>& to, std::uint64_t seed, double similarity) {
  std::vector<double> u = feature_from_seed(seed, to.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * to[i];
  double n2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] -= dot * to[i];
    n2 += u[i] * u[i];
  }
  const double n = std::sqrt(n2), s = std::sqrt(1.0 - similarity * similarity);
  std::vector<double> f(to.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = similarity * to[i] + s * u[i] / n;
  return f;
}

enum class Motion { PingPong, Once };

struct WorldObject {
  std::string id;
  std::string label;
  std::vector<double> features;
  std::vector<Cell> waypoints;  // first entry is the initial cell
  int steps_per_cell = 4;
  Motion motion = Motion::PingPong;

  bool moving() const { return waypoints.size() > 1; }
};

class GridWorld {
 public:
  std::string name;
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  std::vector<std::uint8_t> blocked;  // row-major
  Cell start;
  double start_heading = 0.0;
  std::vector<WorldObject> objects;
  std::size_t goal_object = 0;
  GoalSpec goal;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x); }
  bool is_blocked(Cell c) const { return !in_bounds(c) || blocked[index(c)] != 0; }

  Cell cell_of(double x, double y) const {
    return {static_cast<int>(std::floor(x / resolution)), static_cast<int>(std::floor(y / resolution))};
  }
  Cell cell_of(const Vec2& p) const { return cell_of(p[0], p[1]); }
  Vec2 center(Cell c) const { return {(c.x + 0.5) * resolution, (c.y + 0.5) * resolution}; }

  /// Object position at timestep `t`: linear interpolation along its waypoints,
  /// walking back and forth, or once and then staying at the last one.
  Vec3 object_position(std::size_t i, Timestep t) const {
    const WorldObject& o = objects[i];
    if (!o.moving()) {
      const Vec2 c = center(o.waypoints.front());
      return {c[0], c[1], 0.0};
    }
    const std::int64_t legs = static_cast<std::int64_t>(o.waypoints.size()) - 1;
    if (o.motion == Motion::Once && t >= legs * o.steps_per_cell) {
      const Vec2 c = center(o.waypoints.back());
      return {c[0], c[1], 0.0};
    }
    const std::int64_t period = 2 * legs * o.steps_per_cell;
    const std::int64_t phase = t % period;
    const std::int64_t leg = phase / o.steps_per_cell;
    const double frac = static_cast<double>(phase % o.steps_per_cell) / o.steps_per_cell;
    auto at = [&](std::int64_t k) { return k <= legs ? o.waypoints[k] : o.waypoints[2 * legs - k]; };
    const Vec2 a = center(at(leg)), b = center(at(leg + 1));
    return {a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1]), 0.0};
  }

  Vec3 goal_position(Timestep t) const { return object_position(goal_object, t); }
};

inline std::vector<Cell> neighbors4(Cell c) { return {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}}; }

/// BFS distances (in cells, 4-connected) over cells accepted by `passable`; -1 when unreached.
template <class Passable>
std::vector<int> bfs_distances(int width, int height, Cell from, Passable&& passable) {
  std::vector<int> dist(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), -1);
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x); };
  if (from.x < 0 || from.y < 0 || from.x >= width || from.y >= height) return dist;
  std::deque<Cell> queue{from};
  dist[idx(from)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (const Cell n : neighbors4(c)) {
      if (n.x < 0 || n.y < 0 || n.x >= width || n.y >= height) continue;
      if (dist[idx(n)] >= 0 || !passable(n)) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

/// Grid shortest-path length in metres between two free cells, if connected.
/// Moves go to the 8 neighbours; a diagonal step needs both side cells free.
inline std::optional<double> shortest_path_length(const GridWorld& w, Cell from, Cell to) {
  if (!w.in_bounds(from) || !w.in_bounds(to) || w.is_blocked(from) || w.is_blocked(to)) return std::nullopt;
  std::vector<double> dist(w.blocked.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[w.index(from)] = 0.0;
  queue.push({0.0, w.index(from)});
  while (!queue.empty()) {
    const auto [d, i] = queue.top();
    queue.pop();
    if (d > dist[i]) continue;
    const Cell c{static_cast<int>(i % static_cast<std::size_t>(w.width)), static_cast<int>(i / static_cast<std::size_t>(w.width))};
    if (c == to) return d * w.resolution;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell n{c.x + dx, c.y + dy};
        if (w.is_blocked(n)) continue;
        if (dx != 0 && dy != 0 && (w.is_blocked({c.x + dx, c.y}) || w.is_blocked({c.x, c.y + dy}))) continue;
        const double nd = d + (dx != 0 && dy != 0 ? std::numbers::sqrt2 : 1.0);
        if (nd < dist[w.index(n)]) {
          dist[w.index(n)] = nd;
          queue.push({nd, w.index(n)});
        }
      }
    }
  }
  return std::nullopt;
}

inline void validate(const GridWorld& w) {
  auto fail = [&](const std::string& what) { throw ValidationError("world '" + w.name + "': " + what); };
  if (w.width <= 0 || w.height <= 0) fail("grid must be non-empty");
  if (!(w.resolution > 0.0)) fail("resolution must be > 0");
  if (w.blocked.size() != static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height)) fail("grid size mismatch");
  if (w.is_blocked(w.start)) fail("start cell must be free");
  if (w.goal_object >= w.objects.size()) fail("goal object missing");
  const auto reach = bfs_distances(w.width, w.height, w.start, [&](Cell c) { return !w.is_blocked(c); });
  for (const auto& o : w.objects) {
    if (o.waypoints.empty()) fail("object '" + o.id + "' has no cell");
    if (o.features.size() != w.goal.features.size()) fail("object '" + o.id + "' feature dimensionality mismatch");
    for (std::size_t k = 0; k < o.waypoints.size(); ++k) {
      const Cell c = o.waypoints[k];
      if (w.is_blocked(c)) fail("object '" + o.id + "' must sit on free cells");
      if (k > 0 && std::abs(c.x - o.waypoints[k - 1].x) + std::abs(c.y - o.waypoints[k - 1].y) != 1)
        fail("object '" + o.id + "' waypoints must be 4-adjacent");
    }
    if (o.steps_per_cell < 1) fail("object '" + o.id + "' steps_per_cell must be >= 1");
  }
  for (const Cell c : w.objects[w.goal_object].waypoints)
    if (reach[w.index(c)] < 0) fail("no free path from start to goal");
  if (w.objects[w.goal_object].waypoints.front() == w.start) fail("goal must differ from start");
}

inline Motion parse_motion(const std::string& s) {
  if (s == "pingpong") return Motion::PingPong;
  if (s == "once") return Motion::Once;
  throw ValidationError("unknown motion '" + s + "' (expected pingpong or once)");
}

inline GridWorld parse_world(std::string_view grid_text, const nlohmann::json& sidecar, std::string name = "world") {
  GridWorld w;
  w.name = std::move(name);
  std::vector<std::string> rows;
  std::size_t pos = 0;
  while (pos <= grid_text.size()) {
    auto nl = grid_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = grid_text.size();
    std::string row(grid_text.substr(pos, nl - pos));
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (!row.empty()) rows.push_back(row);
    pos = nl + 1;
  }
  if (rows.empty()) throw ValidationError("world '" + w.name + "': grid must be non-empty");
  w.height = static_cast<int>(rows.size());
  w.width = static_cast<int>(rows.front().size());
  w.blocked.assign(static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height), 0);
  std::optional<Cell> start, goal;
  for (int y = 0; y < w.height; ++y) {
    if (static_cast<int>(rows[y].size()) != w.width)
      throw ValidationError("world '" + w.name + "': grid must be rectangular (row " + std::to_string(y) + ")");
    for (int x = 0; x < w.width; ++x) {
      const char ch = rows[y][x];
      const Cell c{x, y};
      switch (ch) {
        case '#': w.blocked[w.index(c)] = 1; break;
        case '.': break;
        case 'S':
          if (start) throw ValidationError("world '" + w.name + "': more than one start cell");
          start = c;
          break;
        case 'G':
          if (goal) throw ValidationError("world '" + w.name + "': more than one goal cell");
          goal = c;
          break;
        default:
          throw ValidationError("world '" + w.name + "': unexpected character '" + std::string(1, ch) + "'");
      }
    }
  }
  if (!start) throw ValidationError("world '" + w.name + "': missing start cell 'S'");
  if (!goal) throw ValidationError("world '" + w.name + "': missing goal cell 'G'");
  w.start = *start;

  auto cells_of = [](const nlohmann::json& arr) {
    std::vector<Cell> out;
    for (const auto& c : arr) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    return out;
  };
  try {
    w.resolution = sidecar.value("resolution", 1.0);
    w.start_heading = normalize_angle(sidecar.value("start_heading_deg", 0.0) * std::numbers::pi / 180.0);
    const auto& g = sidecar.at("goal");
    WorldObject goal_obj;
    goal_obj.id = g.value("id", std::string("goal"));
    goal_obj.label = g.at("label").get<std::string>();
    goal_obj.features = feature_from_seed(g.at("feature_seed").get<std::uint64_t>());
    goal_obj.waypoints = {*goal};
    if (g.contains("waypoints")) {
      auto more = cells_of(g.at("waypoints"));
      goal_obj.waypoints.insert(goal_obj.waypoints.end(), more.begin(), more.end());
    }
    goal_obj.steps_per_cell = g.value("steps_per_cell", 4);
    goal_obj.motion = parse_motion(g.value("motion", std::string("pingpong")));
    w.goal.label = goal_obj.label;
    w.goal.features = goal_obj.features;
    w.objects.push_back(goal_obj);
    w.goal_object = 0;
    if (sidecar.contains("objects")) {
      int k = 0;
      for (const auto& o : sidecar.at("objects")) {
        WorldObject obj;
        obj.id = o.value("id", "obj" + std::to_string(k++));
        obj.label = o.at("label").get<std::string>();
        const auto fseed = o.at("feature_seed").get<std::uint64_t>();
        if (o.contains("lookalike")) {
          const double c = o.at("lookalike").get<double>();
          if (!(c > -1.0 && c < 1.0)) throw ValidationError("world '" + w.name + "': lookalike must lie in (-1, 1)");
          obj.features = lookalike_feature(goal_obj.features, fseed, c);
        } else {
          obj.features = feature_from_seed(fseed);
        }
        obj.waypoints = {Cell{o.at("cell").at(0).get<int>(), o.at("cell").at(1).get<int>()}};
        if (o.contains("waypoints")) {
          auto more = cells_of(o.at("waypoints"));
          obj.waypoints.insert(obj.waypoints.end(), more.begin(), more.end());
        }
        obj.steps_per_cell = o.value("steps_per_cell", 4);
        obj.motion = parse_motion(o.value("motion", std::string("pingpong")));
        w.objects.push_back(std::move(obj));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("world '" + w.name + "' sidecar: " + e.what());
  }
  const Vec2 gc = w.center(*goal);
  w.goal.true_position = Vec3{gc[0], gc[1], 0.0};
  validate(w);
  return w;
}

/// Sidecar path for a world file: `maze.world` -> `maze.objects.json`.
inline std::filesystem::path sidecar_path(const std::filesystem::path& world_path) {
  auto p = world_path;
  p.replace_extension(".objects.json");
  return p;
}

inline GridWorld load_world(const std::filesystem::path& path) {
  const std::string grid = read_text_file(path.string());
  const auto side = sidecar_path(path);
  nlohmann::json sidecar = nlohmann::json::object();
  if (std::filesystem::exists(side)) {
    try {
      sidecar = nlohmann::json::parse(read_text_file(side.string()));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("world sidecar '" + side.string() + "': " + e.what());
    }
  } else {
    throw ValidationError("world '" + path.stem().string() + "': missing sidecar " + side.filename().string());
  }
  return parse_world(grid, sidecar, path.stem().string());
}

inline double shortest_path_length(const GridWorld& w) {
  const auto l = shortest_path_length(w, w.start, w.objects[w.goal_object].waypoints.front());
  if (!l) throw ValidationError("world '" + w.name + "': no free path from start to goal");
  return *l;
}

/// Random world for property tests: a bordered room with rectangular pillars
/// and a handful of objects. The start/goal pair is always connected.
inline GridWorld generate_world(std::uint64_t seed, int width = 16, int height = 12) {
  std::mt19937_64 rng(seed);
  for (;;) {
    std::string grid;
    std::vector<std::string> rows(static_cast<std::size_t>(height), std::string(static_cast<std::size_t>(width), '.'));
    for (int x = 0; x < width; ++x) rows[0][x] = rows[height - 1][x] = '#';
    for (int y = 0; y < height; ++y) rows[y][0] = rows[y][width - 1] = '#';
    std::uniform_int_distribution<int> px(2, width - 4), py(2, height - 4), size(1, 2), count(2, 5);
    const int pillars = count(rng);
    for (int k = 0; k < pillars; ++k) {
      const int x0 = px(rng), y0 = py(rng), sx = size(rng), sy = size(rng);
      for (int y = y0; y < std::min(height - 1, y0 + sy); ++y)
        for (int x = x0; x < std::min(width - 1, x0 + sx); ++x) rows[y][x] = '#';
    }
    std::uniform_int_distribution<int> fx(1, width - 2), fy(1, height - 2);
    auto free_cell = [&] {
      for (;;) {
        const int x = fx(rng), y = fy(rng);
        if (rows[y][x] == '.') return Cell{x, y};
      }
    };
    const Cell s = free_cell();
    rows[s.y][s.x] = 'S';
    const Cell g = free_cell();
    rows[g.y][g.x] = 'G';
    for (const auto& r : rows) grid += r + "\n";
    nlohmann::json side = {{"resolution", 1.0},
                           {"start_heading_deg", 30.0 * static_cast<int>(rng() % 12)},
                           {"goal", {{"label", "chair"}, {"feature_seed", rng() % 1000}}},
                           {"objects", nlohmann::json::array()}};
    const int objects = count(rng);
    const char* labels[] = {"sofa", "table", "plant", "chair", "bed"};
    for (int k = 0; k < objects; ++k) {
      Cell c = free_cell();
      side["objects"].push_back({{"label", labels[rng() % 5]}, {"cell", {c.x, c.y}}, {"feature_seed", 1000 + rng() % 1000}});
    }
    try {
      return parse_world(grid, side, "generated-" + std::to_string(seed));
    } catch (const ValidationError&) {
      continue;  // disconnected layout, draw again
    }
  }
}

}  // namespace t2nav::navsim
