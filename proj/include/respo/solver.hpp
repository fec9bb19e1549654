#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "numeric.hpp"

namespace respo {

enum class Method { Series, Exact };

constexpr std::string_view to_string(Method m) {
  return m == Method::Series ? "series" : "exact";
}

/// Per-player allocation of the total impact, with the direct/indirect split
/// and the metadata of the computation that produced it.
///
/// The stored identity total[i] == direct[i] + indirect[i] holds bit-exactly:
/// the decomposition is computed once and the total recomposed from it.
struct ResponsibilityReport {
  PlayerSet players;
  double gamma;
  std::vector<double> total;
  std::vector<double> direct;    // gamma * iota(i)
  std::vector<double> indirect;  // total - direct
  Method method = Method::Series;
  std::optional<std::uint64_t> q_used;
  std::optional<double> certified_error;  // infinity-norm bound
  double impact_total = 0.0;              // iota(N), carried for reporting
};

/// Depth selection for the truncated series.
enum class DepthMode {
  Paper,   // smallest q with (1-gamma)^{q+1} <= iota(N) * epsilon
  Strict,  // smallest q with abs_total * (1-gamma)^{q+1} <= epsilon; certifies the epsilon guarantee
};

namespace detail {

/// y = A^T x, i.e. y[i] = sum_p A[p][i] * x[p]. Scans rows so the access
/// pattern stays contiguous.
inline void transpose_apply(const RowStochasticMatrix& a, std::span<const double> x,
                            std::vector<double>& y) {
  const std::size_t n = a.n();
  y.assign(n, 0.0);
  const double* data = a.data().data();
  for (std::size_t p = 0; p < n; ++p) {
    const double xp = x[p];
    if (xp == 0.0) continue;
    const double* row = data + p * n;
    for (std::size_t i = 0; i < n; ++i) y[i] += row[i] * xp;
  }
}

inline void require_same_players(const RowStochasticMatrix& a, const ImpactVector& iota) {
  if (a.players() != iota.players()) {
    fail(ErrorCode::DimensionMismatch, "matrix and impact vector refer to different player sets");
  }
}

/// C = L * R for dense row-major n x n grids.
inline void matmul(std::span<const double> lhs, std::span<const double> rhs,
                   std::vector<double>& out, std::size_t n) {
  out.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double l = lhs[i * n + k];
      if (l == 0.0) continue;
      const double* rrow = rhs.data() + k * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += l * rrow[j];
    }
  }
}

/// In-place LU with partial pivoting, then solve. The system matrix here is
/// strictly diagonally dominant by columns (margin gamma), so a vanishing
/// pivot signals an internal invariant breach, not bad input.
inline void lu_solve(std::vector<double>& m, std::vector<double>& x, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(m[perm[col] * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(m[perm[r] * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0 || !std::isfinite(best)) {
      fail(ErrorCode::SingularSystem, "resolvent system is singular at column " + std::to_string(col));
    }
    std::swap(perm[col], perm[pivot]);
    const double diag = m[perm[col] * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double* row = m.data() + perm[r] * n;
      const double factor = row[col] / diag;
      row[col] = factor;
      if (factor == 0.0) continue;
      const double* prow = m.data() + perm[col] * n;
      for (std::size_t j = col + 1; j < n; ++j) row[j] -= factor * prow[j];
    }
  }
  // forward substitution (unit lower), then back substitution
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[perm[i]];
    const double* row = m.data() + perm[i] * n;
    for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    const double* row = m.data() + perm[ii] * n;
    for (std::size_t j = ii + 1; j < n; ++j) s -= row[j] * x[j];
    x[ii] = s / row[ii];
  }
}

}  // namespace detail

/// direct[i] = gamma * iota(i), indirect[i] = total[i] - direct[i].
inline std::pair<std::vector<double>, std::vector<double>> decompose(std::span<const double> totals,
                                                                     const ImpactVector& iota,
                                                                     DiscountFactor gamma) {
  if (totals.size() != iota.size()) {
    fail(ErrorCode::DimensionMismatch, "totals length does not match the impact vector");
  }
  std::vector<double> direct(totals.size());
  std::vector<double> indirect(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    direct[i] = gamma.value() * iota.value(i);
    indirect[i] = totals[i] - direct[i];
  }
  return {std::move(direct), std::move(indirect)};
}

namespace detail {

inline ResponsibilityReport make_report(const ImpactVector& iota, DiscountFactor gamma,
                                        std::vector<double> totals, Method method,
                                        std::optional<std::uint64_t> q_used,
                                        std::optional<double> certified_error) {
  auto [direct, indirect] = decompose(totals, iota, gamma);
  // Recompose so the stored identity total = direct + indirect is bit-exact.
  for (std::size_t i = 0; i < totals.size(); ++i) totals[i] = direct[i] + indirect[i];
  ResponsibilityReport report{iota.players(), gamma.value(),      std::move(totals),
                              std::move(direct), std::move(indirect), method,
                              q_used,            certified_error,     iota.total()};
  return report;
}

}  // namespace detail

/// Infinity-norm bound on the series tail after q terms:
/// abs_total * (1-gamma)^{q+1}. Valid for signed impacts.
inline double truncation_error_bound(DiscountFactor gamma, double abs_total, std::uint64_t q) {
  if (!(abs_total >= 0.0)) {
    fail(ErrorCode::InvalidTolerance, "abs_total must be nonnegative, got " + format_real(abs_total));
  }
  return abs_total * discount_power(gamma.complement(), q + 1);
}

/// Partial sum of the walk series up to length q, by iterated vector
/// products: w <- (1-gamma) * A^T w, accumulating gamma * sum. Never
/// materializes a matrix power; cost O(q n^2).
inline ResponsibilityReport truncated_value(const RowStochasticMatrix& a, const ImpactVector& iota,
                                            DiscountFactor gamma, std::uint64_t q) {
  detail::require_same_players(a, iota);
  const std::size_t n = a.n();
  const double damping = gamma.complement();

  std::vector<KahanSum> acc(n);
  std::vector<double> walk(iota.values().begin(), iota.values().end());
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) acc[i].add(walk[i]);
  for (std::uint64_t k = 1; k <= q; ++k) {
    detail::transpose_apply(a, walk, next);
    for (std::size_t i = 0; i < n; ++i) next[i] *= damping;
    walk.swap(next);
    for (std::size_t i = 0; i < n; ++i) acc[i].add(walk[i]);
  }
  std::vector<double> totals(n);
  for (std::size_t i = 0; i < n; ++i) totals[i] = gamma.value() * acc[i].value();
  return detail::make_report(iota, gamma, std::move(totals), Method::Series, q,
                             truncation_error_bound(gamma, iota.abs_total(), q));
}

/// Smallest truncation depth meeting the requested accuracy. Decided by
/// integer iteration on the inequality itself, never by floating logarithms,
/// so boundary cases land exactly where the running product does.
inline std::uint64_t min_truncation_depth(DiscountFactor gamma, const ImpactVector& iota,
                                          double epsilon, DepthMode mode = DepthMode::Strict) {
  if (!(epsilon > 0.0)) {
    fail(ErrorCode::NonPositiveEpsilon, "epsilon must be positive, got " + format_real(epsilon));
  }
  const double base = gamma.complement();
  double scale = 1.0;
  double threshold = 0.0;
  if (mode == DepthMode::Paper) {
    const double mass = iota.total();
    if (!(mass > 0.0)) {
      fail(ErrorCode::DegenerateMass,
           "paper-mode depth selection requires a positive impact total, got " + format_real(mass));
    }
    threshold = mass * epsilon;
  } else {
    scale = iota.abs_total();
    threshold = epsilon;
  }

  // Invariant: power == base^{q+1}; every depth below q has failed the test.
  constexpr std::uint64_t kSequentialLimit = std::uint64_t{1} << 22;
  std::uint64_t q = 0;
  double power = base;
  while (scale * power > threshold) {
    ++q;
    power *= base;
    if (q > kSequentialLimit) {
      // Discount factor so close to 0 that counting one by one stops being
      // viable; bracket and bisect on the same inequality instead.
      const auto met = [&](std::uint64_t depth) {
        return scale * discount_power(base, depth + 1) <= threshold;
      };
      std::uint64_t lo = q - 1;  // known unmet
      std::uint64_t hi = q;
      while (!met(hi)) {
        lo = hi;
        hi *= 2;
      }
      while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (met(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
  }
  return q;
}

/// Sum of damped matrix powers sum_{k=0}^{q} ((1-gamma) A)^k, accumulated
/// with a running power: q-1 matrix multiplications for q >= 2.
inline std::vector<double> propagation_matrix(const RowStochasticMatrix& a, DiscountFactor gamma,
                                              std::uint64_t q) {
  const std::size_t n = a.n();
  std::vector<double> sum(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) sum[i * n + i] = 1.0;
  if (q == 0) return sum;

  std::vector<double> damped(a.data().begin(), a.data().end());
  const double damping = gamma.complement();
  for (double& e : damped) e *= damping;

  std::vector<double> power = damped;
  for (std::size_t i = 0; i < n * n; ++i) sum[i] += power[i];
  std::vector<double> next;
  for (std::uint64_t k = 2; k <= q; ++k) {
    detail::matmul(power, damped, next, n);
    power.swap(next);
    for (std::size_t i = 0; i < n * n; ++i) sum[i] += power[i];
  }
  return sum;
}

/// Same value as truncated_value at equal q, computed through the
/// propagation matrix: gamma * (iota-row-vector times the matrix). Kept as an
/// independent route for cross-validation and matrix dumps.
inline ResponsibilityReport value_via_propagation(const RowStochasticMatrix& a,
                                                  const ImpactVector& iota, DiscountFactor gamma,
                                                  std::uint64_t q) {
  detail::require_same_players(a, iota);
  const std::size_t n = a.n();
  const std::vector<double> prop = propagation_matrix(a, gamma, q);
  std::vector<double> totals(n);
  for (std::size_t i = 0; i < n; ++i) {
    KahanSum s;
    for (std::size_t p = 0; p < n; ++p) s.add(iota.value(p) * prop[p * n + i]);
    totals[i] = gamma.value() * s.value();
  }
  return detail::make_report(iota, gamma, std::move(totals), Method::Series, q,
                             truncation_error_bound(gamma, iota.abs_total(), q));
}

/// Full (untruncated) value. Summing the geometric matrix series gives
/// rho = gamma * x with (I - (1-gamma) A^T) x = iota; the system is solved by
/// dense LU up to dense_threshold players, and by the strict-mode series at
/// epsilon = 1e-12 above it. The exact route reports the linear residual as
/// its error bound.
inline ResponsibilityReport exact_value(const RowStochasticMatrix& a, const ImpactVector& iota,
                                        DiscountFactor gamma, std::size_t dense_threshold = 2000) {
  detail::require_same_players(a, iota);
  const std::size_t n = a.n();
  if (n > dense_threshold) {
    const std::uint64_t q = min_truncation_depth(gamma, iota, 1e-12, DepthMode::Strict);
    return truncated_value(a, iota, gamma, q);
  }

  const double damping = gamma.complement();
  std::vector<double> system(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      system[i * n + j] = (i == j ? 1.0 : 0.0) - damping * a.entry(j, i);
    }
  }
  std::vector<double> x(iota.values().begin(), iota.values().end());
  detail::lu_solve(system, x, n);

  std::vector<double> ax;
  detail::transpose_apply(a, x, ax);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residual = std::max(residual, std::abs(x[i] - damping * ax[i] - iota.value(i)));
  }

  std::vector<double> totals(n);
  for (std::size_t i = 0; i < n; ++i) totals[i] = gamma.value() * x[i];
  return detail::make_report(iota, gamma, std::move(totals), Method::Exact, std::nullopt, residual);
}

/// Grid of discount factors with per-row reports, for sensitivity analysis.
struct SweepTable {
  PlayerSet players;
  std::vector<double> gammas;
  std::vector<ResponsibilityReport> rows;
};

enum class SweepMethod { Series, Exact };

inline SweepTable gamma_sweep(const RowStochasticMatrix& a, const ImpactVector& iota,
                              const std::vector<DiscountFactor>& gammas, SweepMethod method,
                              double epsilon = 1e-9) {
  if (gammas.empty()) fail(ErrorCode::InvalidGammaGrid, "gamma grid is empty");
  for (std::size_t i = 1; i < gammas.size(); ++i) {
    if (!(gammas[i - 1].value() < gammas[i].value())) {
      fail(ErrorCode::InvalidGammaGrid, "gamma grid must be strictly increasing");
    }
  }
  SweepTable table{a.players(), {}, {}};
  table.gammas.reserve(gammas.size());
  table.rows.reserve(gammas.size());
  for (const DiscountFactor& g : gammas) {
    table.gammas.push_back(g.value());
    if (method == SweepMethod::Series) {
      const std::uint64_t q = min_truncation_depth(g, iota, epsilon, DepthMode::Strict);
      table.rows.push_back(truncated_value(a, iota, g, q));
    } else {
      table.rows.push_back(exact_value(a, iota, g));
    }
  }
  return table;
}

/// Evenly spaced grid over [lo, hi]. Endpoints that land on 0 or 1 are pulled
/// one grid step inward; 0 and 1 themselves are never emitted.
inline std::vector<DiscountFactor> gamma_grid(double lo, double hi, std::size_t steps) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
    fail(ErrorCode::InvalidGammaGrid,
         "grid range [" + format_real(lo) + "," + format_real(hi) + "] must satisfy 0 <= lo <= hi <= 1");
  }
  if (steps == 0) fail(ErrorCode::InvalidGammaGrid, "grid needs at least one step");
  if (lo == hi) {
    if (!(lo > 0.0 && lo < 1.0)) {
      fail(ErrorCode::InvalidGammaGrid, "single-point grid must lie strictly inside (0,1)");
    }
    return std::vector<DiscountFactor>(steps == 0 ? 0 : 1, DiscountFactor(lo));
  }
  if (steps < 2) {
    fail(ErrorCode::InvalidGammaGrid, "a grid over a nontrivial range needs at least two steps");
  }
  const double step = (hi - lo) / static_cast<double>(steps - 1);
  std::vector<DiscountFactor> grid;
  grid.reserve(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double g = (j + 1 == steps) ? hi : lo + static_cast<double>(j) * step;
    if (g <= 0.0 || g >= 1.0) continue;  // endpoint moves one step inward by omission
    if (!grid.empty() && !(grid.back().value() < g)) continue;
    grid.emplace_back(g);
  }
  if (grid.empty()) fail(ErrorCode::InvalidGammaGrid, "grid contains no points strictly inside (0,1)");
  return grid;
}

}  // namespace respo
