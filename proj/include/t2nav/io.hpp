#pragma once

// Text formats: trajectory CSV, snapshot JSON, diagram and landscape CSV.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2nav/core.hpp"
#include "t2nav/diagram_metrics.hpp"
#include "t2nav/topology.hpp"

namespace t2nav {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  std::string s(buf, res.ptr);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s.erase(0, s[0] == '-' ? 1 : 0);
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Reads CSV rows of `width` numeric fields. A first line that does not parse
// as numbers is treated as a header.
inline std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::size_t width, const char* what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_csv(t);
    std::vector<double> row;
    bool ok = fields.size() == width;
    for (std::size_t i = 0; ok && i < fields.size(); ++i) {
      double v = 0.0;
      ok = parse_number(fields[i], v);
      row.push_back(v);
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;
      }
      throw ParseError(std::string(what) + ": malformed line " + std::to_string(lineno));
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Trajectory: `t,x,y,theta` per line, optional header.

inline Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  for (const auto& row : detail::read_numeric_csv(in, 4, "trajectory")) {
    const double t = row[0];
    if (t != std::floor(t) || t < 0) throw ParseError("trajectory: timestep must be a non-negative integer");
    traj.append(static_cast<Timestep>(t), Pose(row[1], row[2], row[3]));
  }
  return traj;
}

inline Trajectory read_trajectory_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return read_trajectory(in);
}

inline void write_trajectory(const Trajectory& traj, std::ostream& out) {
  out << "t,x,y,theta\n";
  for (const auto& p : traj.points())
    out << p.timestep << ',' << format_double(p.pose.x()) << ',' << format_double(p.pose.y()) << ','
        << format_double(p.pose.theta()) << '\n';
}

// Diagram: `dim,birth,death` per line after a header, sorted by (dim, birth, death).
// Dimension-0 essential classes are written with death = eps_max.

inline void write_diagram(const PersistenceDiagram& pd, std::ostream& out, bool include_dim0 = false) {
  out << "dim,birth,death\n";
  if (include_dim0) {
    for (const auto& p : pd.dim0)
      out << "0," << format_double(p.birth) << ',' << format_double(p.essential() ? pd.eps_max : p.death) << '\n';
  }
  for (const auto& p : pd.dim1) out << "1," << format_double(p.birth) << ',' << format_double(p.death) << '\n';
}

inline PersistenceDiagram read_diagram(std::istream& in) {
  PersistenceDiagram pd;
  for (const auto& row : detail::read_numeric_csv(in, 3, "diagram")) {
    if (!(row[2] >= row[1])) throw ParseError("diagram: death must not precede birth");
    if (row[0] == 0) pd.dim0.push_back({row[1], row[2]});
    else if (row[0] == 1) pd.dim1.push_back({row[1], row[2]});
    else throw ParseError("diagram: dimension must be 0 or 1");
    pd.eps_max = std::max(pd.eps_max, row[2]);
  }
  std::sort(pd.dim0.begin(), pd.dim0.end());
  std::sort(pd.dim1.begin(), pd.dim1.end());
  return pd;
}

inline PersistenceDiagram read_diagram_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return read_diagram(in);
}

// Landscape: `t,value` per line after a header.

inline void write_landscape(const Landscape& l, std::ostream& out) {
  out << "t,value\n";
  for (std::size_t i = 0; i < l.values.size(); ++i)
    out << format_double(l.position(i)) << ',' << format_double(l.values[i]) << '\n';
}

inline Landscape read_landscape(std::istream& in) {
  Landscape l;
  for (const auto& row : detail::read_numeric_csv(in, 2, "landscape")) {
    l.values.push_back(row[1]);
    l.eps_max = row[0];
  }
  if (l.values.size() < 2) throw ParseError("landscape: needs at least 2 samples");
  return l;
}

// Snapshot: {"timestep": t, "nodes": [{"id", "label", "position": [x,y,z],
// "features": [...]}], "edges": [{"a", "b", "relation"}]}.

inline nlohmann::json to_json(const SceneGraphSnapshot& g) {
  nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"id", n.id},
                     {"label", n.label},
                     {"position", {n.position[0], n.position[1], n.position[2]}},
                     {"features", n.features}});
  for (const auto& e : g.spatial_edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"relation", e.relation}});
  return {{"timestep", g.timestep}, {"nodes", nodes}, {"edges", edges}};
}

inline SceneGraphSnapshot snapshot_from_json(const nlohmann::json& j) {
  SceneGraphSnapshot g;
  try {
    g.timestep = j.at("timestep").get<Timestep>();
    for (const auto& n : j.at("nodes")) {
      SceneNode node;
      node.id = n.at("id").get<std::string>();
      node.label = n.at("label").get<std::string>();
      const auto& p = n.at("position");
      if (p.size() != 3) throw ParseError("snapshot: node position must have 3 components");
      node.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      node.features = n.at("features").get<std::vector<double>>();
      g.nodes.push_back(std::move(node));
    }
    if (j.contains("edges"))
      for (const auto& e : j.at("edges"))
        g.spatial_edges.push_back(
            {e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.value("relation", std::string("near"))});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("snapshot: ") + e.what());
  }
  validate(g);
  return g;
}

inline SceneGraphSnapshot parse_snapshot(std::string_view text) {
  try {
    return snapshot_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("snapshot: ") + e.what());
  }
}

}  // namespace t2nav
