#pragma once

// Trajectory embedding, Vietoris-Rips filtrations up to dimension 2 and
// persistent homology over F2 by boundary-matrix reduction.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "t2nav/core.hpp"

namespace t2nav {

/// Point cloud with uniform dimensionality, stored row-major.
class EmbeddedCloud {
 public:
  explicit EmbeddedCloud(std::size_t dim = 3) : dim_(dim) {}

  void push(std::span<const double> p) {
    if (p.size() != dim_) throw ValidationError("point dimensionality mismatch");
    for (double c : p)
      if (!std::isfinite(c)) throw ValidationError("point coordinates must be finite");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

  Timestep first_timestep = 0;
  Timestep last_timestep = 0;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

inline Vec3 embed_pose(const Pose& p, double r) { return {p.x(), p.y(), r * std::sin(p.theta())}; }

/// Three orthonormal rows spanning the dominant right-singular subspace of a
/// feature matrix.
struct ProjectionBasis {
  std::size_t dim = 0;
  std::array<std::vector<double>, 3> rows;
  bool degenerate = false;  // fewer than three nonzero singular values
  std::array<double, 3> singular_values{};

  Vec3 project(std::span<const double> f) const {
    if (f.size() != dim) throw ValidationError("feature dimension does not match projection basis");
    Vec3 out{};
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < dim; ++i) out[k] += rows[k][i] * f[i];
    return out;
  }
};

inline std::array<double, 6> embed_enhanced(const Pose& p, std::span<const double> f, const ProjectionBasis& basis,
                                            double r, double alpha_vis) {
  if (f.size() != basis.dim) throw ValidationError("feature dimension does not match projection basis");
  for (std::size_t k = 0; k < 3; ++k) {
    if (basis.rows[k].size() != basis.dim) throw ValidationError("projection basis row has wrong length");
  }
  const Vec3 spatial = embed_pose(p, r);
  const Vec3 visual = basis.project(f);
  return {spatial[0], spatial[1], spatial[2], alpha_vis * visual[0], alpha_vis * visual[1], alpha_vis * visual[2]};
}

namespace detail {

// Cyclic Jacobi eigen-decomposition of a symmetric matrix (row-major n*n).
// On return `a` holds eigenvalues on its diagonal and `v` the eigenvectors as columns.
inline void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::size_t n) {
  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i * n + j] * a[i * n + j];
        if (i != j) off += a[i * n + j] * a[i * n + j];
      }
    if (off <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace detail

/// Top-3 right singular vectors of the stacked feature rows, computed from the
/// eigen-decomposition of the Gram matrix. Each row's first nonzero entry is positive.
inline ProjectionBasis top3_basis(std::span<const std::vector<double>> features) {
  if (features.size() < 3) throw PreconditionError("top3_basis needs at least 3 feature rows");
  const std::size_t d = features.front().size();
  if (d < 3) throw PreconditionError("top3_basis needs feature dimension >= 3");
  for (const auto& row : features)
    if (row.size() != d) throw ValidationError("feature rows have inconsistent dimension");

  std::vector<double> gram(d * d, 0.0);
  for (const auto& row : features)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gram[i * d + j] += row[i] * row[j];

  std::vector<double> vecs;
  detail::jacobi_eigen(gram, vecs, d);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gram[a * d + a] > gram[b * d + b]; });

  ProjectionBasis basis;
  basis.dim = d;
  const double top = std::max(gram[order[0] * d + order[0]], 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t col = order[k];
    const double eig = std::max(gram[col * d + col], 0.0);
    basis.singular_values[k] = std::sqrt(eig);
    if (eig <= 1e-20 * top || top == 0.0) basis.degenerate = true;
    auto& row = basis.rows[k];
    row.resize(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = vecs[i * d + col];
    for (double x : row) {
      if (std::abs(x) > 1e-12) {
        if (x < 0)
          for (auto& y : row) y = -y;
        break;
      }
    }
  }
  return basis;
}

inline EmbeddedCloud embed_trajectory(const Trajectory& traj, double r) {
  EmbeddedCloud cloud(3);
  for (const auto& tp : traj.points()) {
    const Vec3 z = embed_pose(tp.pose, r);
    cloud.push(z);
  }
  if (!traj.empty()) {
    cloud.first_timestep = traj[0].timestep;
    cloud.last_timestep = traj.back().timestep;
  }
  return cloud;
}

struct Simplex {
  std::array<std::uint32_t, 3> vertices{};  // ascending; entries past `dim` are zero
  std::uint8_t dim = 0;
  double value = 0.0;

  friend bool operator==(const Simplex&, const Simplex&) = default;
};

inline bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.vertices < b.vertices;
}

/// Codimension-1 faces; empty for vertices.
inline std::vector<Simplex> boundary(const Simplex& s) {
  std::vector<Simplex> faces;
  if (s.dim == 0) return faces;
  for (std::uint8_t omit = 0; omit <= s.dim; ++omit) {
    Simplex f;
    f.dim = static_cast<std::uint8_t>(s.dim - 1);
    std::uint8_t k = 0;
    for (std::uint8_t i = 0; i <= s.dim; ++i)
      if (i != omit) f.vertices[k++] = s.vertices[i];
    faces.push_back(f);
  }
  return faces;
}

struct Filtration {
  std::size_t num_points = 0;
  double eps_max = 0.0;
  std::vector<Simplex> simplices;  // sorted by filtration_less
};

/// Vietoris-Rips filtration truncated at `eps_max`, with simplices up to dimension 2.
inline Filtration build_vr_filtration(const EmbeddedCloud& cloud, double eps_max) {
  const std::size_t n = cloud.size();
  if (n == 0) throw PreconditionError("filtration needs at least one point");
  Filtration filt;
  filt.num_points = n;
  filt.eps_max = eps_max;

  std::vector<double> dist(n * n, 0.0);
  std::vector<char> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean(cloud.point(i), cloud.point(j));
      dist[i * n + j] = dist[j * n + i] = d;
      adj[i * n + j] = adj[j * n + i] = d <= eps_max;
    }
  }

  auto& out = filt.simplices;
  out.reserve(n + n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) out.push_back({{static_cast<std::uint32_t>(i), 0, 0}, 0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!adj[i * n + j]) continue;
      out.push_back({{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0}, 1, dist[i * n + j]});
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!adj[i * n + k] || !adj[j * n + k]) continue;
        const double v = std::max({dist[i * n + j], dist[i * n + k], dist[j * n + k]});
        out.push_back({{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)},
                       2,
                       v});
      }
    }
  }
  std::sort(out.begin(), out.end(), filtration_less);
  return filt;
}

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;

  double persistence() const { return death - birth; }
  bool essential() const { return std::isinf(death); }

  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

/// Dimension-0 essential classes carry death = +infinity. Dimension-1 classes
/// still alive at eps_max are clamped to death = eps_max.
struct PersistenceDiagram {
  std::vector<PersistencePair> dim0;
  std::vector<PersistencePair> dim1;
  double eps_max = 0.0;
  std::size_t essential1 = 0;  // dimension-1 classes clamped at eps_max
  std::size_t betti2 = 0;      // unpaired triangles

  std::size_t essential0() const {
    return static_cast<std::size_t>(
        std::count_if(dim0.begin(), dim0.end(), [](const PersistencePair& p) { return p.essential(); }));
  }
};

namespace detail {

inline std::uint64_t face_key(const Simplex& s) {
  constexpr std::uint64_t kBits = 21;
  return (static_cast<std::uint64_t>(s.dim) << 63) | (static_cast<std::uint64_t>(s.vertices[0]) << (2 * kBits)) |
         (static_cast<std::uint64_t>(s.vertices[1]) << kBits) | s.vertices[2];
}

// Dense F2 working column. Reduced columns are kept sparse and XORed in.
class WorkColumn {
 public:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  explicit WorkColumn(std::size_t rows) : words_((rows + 63) / 64, 0) {}

  void toggle(std::size_t row) { words_[row >> 6] ^= std::uint64_t{1} << (row & 63); }

  // Highest set row at or below `from`.
  std::size_t low(std::size_t from) const {
    if (words_.empty()) return kNone;
    std::size_t w = std::min(from >> 6, words_.size() - 1);
    for (;;) {
      if (words_[w] != 0) return (w << 6) + 63 - static_cast<std::size_t>(std::countl_zero(words_[w]));
      if (w == 0) return kNone;
      --w;
    }
  }

  // Moves the set rows (ascending) into `out` and clears the column.
  void drain(std::size_t top, std::vector<std::uint32_t>& out) {
    out.clear();
    for (std::size_t w = 0; w <= (top >> 6); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        out.push_back(static_cast<std::uint32_t>((w << 6) + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
      words_[w] = 0;
    }
  }

  void clear(std::size_t top) {
    if (top == kNone) return;
    for (std::size_t w = 0; w <= (top >> 6); ++w) words_[w] = 0;
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

/// Standard left-to-right column reduction of the F2 boundary matrix.
///
/// Columns of different dimensions never interact, so each dimension is
/// reduced on its own. Rows are indexed by the position of the face among the
/// simplices of its dimension, which preserves filtration order.
inline PersistenceDiagram compute_persistence(const Filtration& filt) {
  const auto& simplices = filt.simplices;
  const std::size_t m = simplices.size();
  if (m >= (std::size_t{1} << 32)) throw StructuralError("filtration too large");
  if (filt.num_points >= (std::size_t{1} << 21)) throw StructuralError("too many points");

  std::array<std::vector<std::uint32_t>, 3> by_dim;  // global indices per dimension
  std::vector<std::uint32_t> local(m);
  std::vector<std::array<std::uint32_t, 3>> faces(m);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(std::min(m, filt.num_points + filt.num_points * (filt.num_points + 1) / 2));
  for (std::size_t j = 0; j < m; ++j) {
    const Simplex& s = simplices[j];
    if (s.dim > 2) throw StructuralError("simplex dimension above 2");
    if (s.value < 0.0 || s.value > filt.eps_max) throw StructuralError("simplex value outside [0, eps_max]");
    if (s.dim == 0 && s.value != 0.0) throw StructuralError("vertex with nonzero filtration value");
    if (j > 0 && filtration_less(s, simplices[j - 1])) throw StructuralError("filtration is not sorted");
    for (std::uint8_t omit = 0; s.dim > 0 && omit <= s.dim; ++omit) {
      Simplex f;
      f.dim = static_cast<std::uint8_t>(s.dim - 1);
      for (std::uint8_t i = 0, k = 0; i <= s.dim; ++i)
        if (i != omit) f.vertices[k++] = s.vertices[i];
      const auto it = index.find(detail::face_key(f));
      if (it == index.end()) throw StructuralError("simplex appears before one of its faces");
      if (simplices[it->second].value > s.value) throw StructuralError("face has larger filtration value");
      faces[j][omit] = local[it->second];
    }
    if (j > 0 && s.dim == simplices[j - 1].dim && s.vertices == simplices[j - 1].vertices)
      throw StructuralError("duplicate simplex in filtration");
    if (s.dim < 2 && !index.emplace(detail::face_key(s), static_cast<std::uint32_t>(j)).second)
      throw StructuralError("duplicate simplex in filtration");
    local[j] = static_cast<std::uint32_t>(by_dim[s.dim].size());
    by_dim[s.dim].push_back(static_cast<std::uint32_t>(j));
  }

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Reduction {
    std::vector<std::uint32_t> owner;  // row -> reduced column slot
    std::vector<std::uint32_t> entries;
    std::vector<std::size_t> offsets{0};
    std::vector<char> row_paired;

    std::span<const std::uint32_t> column(std::uint32_t slot) const {
      return {entries.data() + offsets[slot], offsets[slot + 1] - offsets[slot]};
    }
  };

  // Reduces the columns of dimension `dim`; `on_pair(row, column)` fires per
  // pivot. `stop` is polled before each column.
  auto reduce_dimension = [&](std::uint8_t dim, auto&& on_pair, auto&& stop) {
    const std::size_t rows = by_dim[dim - 1].size();
    Reduction red;
    red.owner.assign(rows, kNone);
    red.row_paired.assign(rows, 0);
    detail::WorkColumn work(rows);
    std::vector<std::uint32_t> sparse;
    for (std::uint32_t g : by_dim[dim]) {
      if (stop()) break;
      std::size_t top = 0;
      for (std::uint8_t k = 0; k <= dim; ++k) {
        work.toggle(faces[g][k]);
        top = std::max<std::size_t>(top, faces[g][k]);
      }
      std::size_t low = work.low(top);
      while (low != detail::WorkColumn::kNone && red.owner[low] != kNone) {
        for (std::uint32_t row : red.column(red.owner[low])) work.toggle(row);
        low = work.low(low);
      }
      if (low == detail::WorkColumn::kNone) continue;
      work.drain(low, sparse);
      red.owner[low] = static_cast<std::uint32_t>(red.offsets.size() - 1);
      red.entries.insert(red.entries.end(), sparse.begin(), sparse.end());
      red.offsets.push_back(red.entries.size());
      red.row_paired[low] = 1;
      on_pair(low, g);
    }
    return red;
  };

  PersistenceDiagram pd;
  pd.eps_max = filt.eps_max;

  std::vector<char> edge_negative(by_dim[1].size(), 0);
  const Reduction edges = reduce_dimension(
      1,
      [&](std::size_t, std::uint32_t g) {
        edge_negative[local[g]] = 1;
        pd.dim0.push_back({0.0, simplices[g].value});
      },
      [] { return false; });
  for (std::size_t v = 0; v < by_dim[0].size(); ++v)
    if (!edges.row_paired[v]) pd.dim0.push_back({0.0, std::numeric_limits<double>::infinity()});

  const std::size_t positive_edges =
      by_dim[1].size() - static_cast<std::size_t>(std::count(edge_negative.begin(), edge_negative.end(), 1));

  // Once every 1-cycle is dead, the remaining triangles can only reduce to zero.
  std::size_t killed = 0;
  const Reduction triangles = reduce_dimension(
      2,
      [&](std::size_t row, std::uint32_t g) {
        ++killed;
        pd.dim1.push_back({simplices[by_dim[1][row]].value, simplices[g].value});
      },
      [&] { return killed == positive_edges; });
  for (std::size_t e = 0; e < by_dim[1].size(); ++e) {
    if (edge_negative[e] || triangles.row_paired[e]) continue;
    pd.dim1.push_back({simplices[by_dim[1][e]].value, filt.eps_max});
    ++pd.essential1;
  }
  pd.betti2 = by_dim[2].size() - killed;
  std::sort(pd.dim0.begin(), pd.dim0.end());
  std::sort(pd.dim1.begin(), pd.dim1.end());
  return pd;
}

/// Drops dimension-1 pairs whose persistence is at most `tau_p`.
inline PersistenceDiagram filter_diagram(PersistenceDiagram pd, double tau_p) {
  if (tau_p < 0.0) throw PreconditionError("tau_p must be >= 0");
  std::erase_if(pd.dim1, [tau_p](const PersistencePair& p) { return !(p.death - p.birth > tau_p); });
  return pd;
}

/// Components of the eps-sublevel 1-skeleton, by disjoint-set union.
inline std::size_t connected_components(const Filtration& filt, double eps) {
  std::vector<std::size_t> parent(filt.num_points);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = filt.num_points;
  for (const auto& s : filt.simplices) {
    if (s.dim != 1 || s.value > eps) continue;
    const std::size_t a = find(s.vertices[0]), b = find(s.vertices[1]);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

}  // namespace t2nav
