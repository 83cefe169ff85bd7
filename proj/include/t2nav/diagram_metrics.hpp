#pragma once

// Distances and functional summaries on dimension-1 persistence diagrams.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "t2nav/core.hpp"
#include "t2nav/topology.hpp"

namespace t2nav {

/// Exact minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method with potentials, O(n^3)). Returns column assigned to each row.
template <class T>
std::vector<std::size_t> hungarian_assignment(const std::vector<std::vector<T>>& cost) {
  const std::size_t n = cost.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const T inf = std::numeric_limits<T>::max();
  std::vector<T> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = kNone;
      T delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const T cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

/// Squared distance from a diagram point to its orthogonal projection on the diagonal.
inline double diagonal_cost(const PersistencePair& p) {
  const double h = p.death - p.birth;
  return 0.5 * h * h;
}

inline double pair_cost(const PersistencePair& a, const PersistencePair& b) {
  const double db = a.birth - b.birth, dd = a.death - b.death;
  return db * db + dd * dd;
}

/// Sums nonnegative terms smallest-first, so equal multisets give equal totals.
inline double canonical_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

/// 2-Wasserstein distance between finite diagrams, with diagonal matching.
/// Rows are the points of `a` followed by diagonal slots for `b`; columns are
/// the points of `b` followed by diagonal slots for `a`.
inline double wasserstein2(std::span<const PersistencePair> a, std::span<const PersistencePair> b) {
  for (const auto* d : {&a, &b})
    for (const auto& p : *d)
      if (!std::isfinite(p.birth) || !std::isfinite(p.death))
        throw ValidationError("wasserstein2 needs finite diagram points");
  const std::size_t n = a.size(), m = b.size(), size = n + m;
  if (size == 0) return 0.0;
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) cost[i][j] = pair_cost(a[i], b[j]);
    for (std::size_t k = 0; k < n; ++k) cost[i][m + k] = diagonal_cost(a[i]);
  }
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t j = 0; j < m; ++j) cost[n + l][j] = diagonal_cost(b[j]);

  const auto assign = hungarian_assignment(cost);
  std::vector<double> terms;
  terms.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = assign[i];
    if (i < n)
      terms.push_back(j < m ? pair_cost(a[i], b[j]) : diagonal_cost(a[i]));
    else if (j < m)
      terms.push_back(diagonal_cost(b[j]));
  }
  return std::sqrt(canonical_sum(std::move(terms)));
}

inline double wasserstein2(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return wasserstein2(std::span<const PersistencePair>(a.dim1), std::span<const PersistencePair>(b.dim1));
}

/// First persistence landscape sampled at `values.size()` uniform points over [0, eps_max].
struct Landscape {
  double eps_max = 0.0;
  std::vector<double> values;

  std::size_t grid_count() const { return values.size(); }
  double spacing() const { return eps_max / static_cast<double>(values.size() - 1); }
  double position(std::size_t i) const {
    return i + 1 == values.size() ? eps_max : static_cast<double>(i) * spacing();
  }

  friend bool operator==(const Landscape&, const Landscape&) = default;
};

inline Landscape landscape(std::span<const PersistencePair> pairs, int grid_count, double eps_max) {
  if (grid_count < 2) throw PreconditionError("landscape needs at least 2 grid points");
  if (!(eps_max > 0.0)) throw PreconditionError("landscape needs eps_max > 0");
  Landscape out{eps_max, std::vector<double>(static_cast<std::size_t>(grid_count), 0.0)};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double t = out.position(i);
    double best = 0.0;
    for (const auto& p : pairs) best = std::max(best, std::min(t - p.birth, p.death - t));
    out.values[i] = best;
  }
  return out;
}

inline Landscape landscape(const PersistenceDiagram& pd, int grid_count, double eps_max) {
  return landscape(std::span<const PersistencePair>(pd.dim1), grid_count, eps_max);
}

/// L2 norm of the difference, integrated over the grid with the trapezoidal rule.
inline double landscape_distance(const Landscape& a, const Landscape& b) {
  if (a.values.size() != b.values.size() || a.eps_max != b.eps_max)
    throw ValidationError("landscapes sampled on different grids");
  const std::size_t g = a.values.size();
  const double h = a.spacing();
  double s = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double d = a.values[i] - b.values[i];
    const double w = (i == 0 || i + 1 == g) ? 0.5 * h : h;
    s += w * d * d;
  }
  return std::sqrt(s);
}

/// Loop fingerprint: filtered dimension-1 diagram, its landscape, and where it was taken.
struct TopologicalSignature {
  std::vector<PersistencePair> pd1;
  Landscape landscape;
  Vec2 anchor{};
  Timestep created_at = 0;

  friend bool operator==(const TopologicalSignature&, const TopologicalSignature&) = default;
};

struct DistanceWeights {
  double wasserstein = 0.7;
  double landscape = 0.3;
};

inline double combined_distance(const TopologicalSignature& a, const TopologicalSignature& b,
                                const DistanceWeights& w = {}) {
  const double lw = landscape_distance(a.landscape, b.landscape);
  return w.wasserstein * wasserstein2(a.pd1, b.pd1) + w.landscape * lw;
}

}  // namespace t2nav
