#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "numeric.hpp"
#include "solver.hpp"

namespace respo {

enum class Axiom {
  Efficiency,
  Additivity,
  Symmetry,
  IndependentPlayer,
  TruncatedMass,
  Bounds,
};

constexpr std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::Efficiency: return "efficiency";
    case Axiom::Additivity: return "additivity";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::IndependentPlayer: return "independent-player";
    case Axiom::TruncatedMass: return "truncated-mass";
    case Axiom::Bounds: return "bounds";
  }
  return "unknown";
}

enum class VerdictStatus { Pass, Fail, NotApplicable };

constexpr std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::NotApplicable: return "NOT-APPLICABLE";
  }
  return "unknown";
}

/// Machine-checkable verdict for one property on one concrete instance.
/// details enumerate every checked identity, not only failures; vacuous
/// passes say so explicitly.
struct AxiomVerdict {
  Axiom axiom;
  VerdictStatus status = VerdictStatus::Pass;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> details;

  bool passed() const noexcept { return status == VerdictStatus::Pass; }
  bool applicable() const noexcept { return status != VerdictStatus::NotApplicable; }
};

namespace detail {

inline void require_tolerance(double tol) {
  if (!(tol >= 0.0)) {
    fail(ErrorCode::InvalidTolerance, "checker tolerance must be nonnegative, got " + format_real(tol));
  }
}

inline AxiomVerdict finish(Axiom axiom, double max_violation, double tol,
                           std::vector<std::string> details) {
  details.push_back("tolerance = " + format_real(tol));
  AxiomVerdict v{axiom, max_violation <= tol ? VerdictStatus::Pass : VerdictStatus::Fail,
                 max_violation, tol, std::move(details)};
  return v;
}

}  // namespace detail

/// The allocation must sum to the total impact.
inline AxiomVerdict check_efficiency(const RowStochasticMatrix& a, const ImpactVector& iota,
                                     DiscountFactor gamma, double tol = 1e-8) {
  detail::require_tolerance(tol);
  const ResponsibilityReport report = exact_value(a, iota, gamma);
  const double sum = compensated_sum(report.total);
  const double violation = std::abs(sum - iota.total());
  std::vector<std::string> details;
  details.push_back("sum(total) = " + format_real(sum));
  details.push_back("impact_total = " + format_real(iota.total()));
  details.push_back("|sum(total) - impact_total| = " + format_real(violation));
  return detail::finish(Axiom::Efficiency, violation, tol, std::move(details));
}

/// Allocating two impact maps jointly must equal allocating them separately
/// and adding the results.
inline AxiomVerdict check_additivity(const RowStochasticMatrix& a, const ImpactVector& iota1,
                                     const ImpactVector& iota2, DiscountFactor gamma,
                                     double tol = 1e-8) {
  detail::require_tolerance(tol);
  if (iota1.players() != iota2.players()) {
    fail(ErrorCode::DimensionMismatch, "additivity check needs impact vectors over the same players");
  }
  std::vector<double> combined(iota1.size());
  for (std::size_t i = 0; i < combined.size(); ++i) combined[i] = iota1.value(i) + iota2.value(i);

  const ResponsibilityReport r1 = exact_value(a, iota1, gamma);
  const ResponsibilityReport r2 = exact_value(a, iota2, gamma);
  const ResponsibilityReport r12 = exact_value(a, ImpactVector(iota1.players(), combined), gamma);

  double max_violation = 0.0;
  std::vector<std::string> details;
  for (std::size_t i = 0; i < combined.size(); ++i) {
    const double gap = std::abs(r1.total[i] + r2.total[i] - r12.total[i]);
    max_violation = std::max(max_violation, gap);
    details.push_back("player '" + a.players().id(i) + "': |rho(i1)+rho(i2)-rho(i1+i2)| = " +
                      format_real(gap));
  }
  return detail::finish(Axiom::Additivity, max_violation, tol, std::move(details));
}

/// Players wired identically must carry equal indirect responsibility.
inline AxiomVerdict check_symmetry(const RowStochasticMatrix& a, const ImpactVector& iota,
                                   DiscountFactor gamma, double tol = 1e-8) {
  detail::require_tolerance(tol);
  const auto pairs = symmetric_pairs(a, 0.0);
  std::vector<std::string> details;
  if (pairs.empty()) {
    details.push_back("no symmetric pairs found; vacuous pass");
    return detail::finish(Axiom::Symmetry, 0.0, tol, std::move(details));
  }
  const ResponsibilityReport report = exact_value(a, iota, gamma);
  double max_violation = 0.0;
  for (const auto& [pi, pj] : pairs) {
    const std::size_t i = *a.players().index_of(pi);
    const std::size_t j = *a.players().index_of(pj);
    const double gap = std::abs(report.indirect[i] - report.indirect[j]);
    max_violation = std::max(max_violation, gap);
    details.push_back("pair {" + pi + "," + pj + "}: |indirect_i - indirect_j| = " + format_real(gap));
  }
  return detail::finish(Axiom::Symmetry, max_violation, tol, std::move(details));
}

/// Players with no incoming flow must receive exactly their direct share.
inline AxiomVerdict check_independent(const RowStochasticMatrix& a, const ImpactVector& iota,
                                      DiscountFactor gamma, double tol = 1e-8) {
  detail::require_tolerance(tol);
  const auto independents = independent_players(a);
  std::vector<std::string> details;
  if (independents.empty()) {
    details.push_back("no independent players found; vacuous pass");
    return detail::finish(Axiom::IndependentPlayer, 0.0, tol, std::move(details));
  }
  const ResponsibilityReport report = exact_value(a, iota, gamma);
  double max_violation = 0.0;
  for (const std::string& id : independents) {
    const std::size_t i = *a.players().index_of(id);
    const double gap = std::abs(report.total[i] - gamma.value() * iota.value(i));
    max_violation = std::max(max_violation, gap);
    details.push_back("player '" + id + "': |rho_i - gamma*iota(i)| = " + format_real(gap));
  }
  return detail::finish(Axiom::IndependentPlayer, max_violation, tol, std::move(details));
}

/// The truncated allocation must carry exactly the partial-geometric-series
/// share of the total mass: sum_i (rho|q)_i = (1 - (1-gamma)^{q+1}) * iota(N).
inline AxiomVerdict check_truncated_mass(const RowStochasticMatrix& a, const ImpactVector& iota,
                                         DiscountFactor gamma, std::uint64_t q, double tol = 1e-8) {
  detail::require_tolerance(tol);
  const ResponsibilityReport report = truncated_value(a, iota, gamma, q);
  const double sum = compensated_sum(report.total);
  const double target = (1.0 - discount_power(gamma.complement(), q + 1)) * iota.total();
  const double violation = std::abs(sum - target);
  std::vector<std::string> details;
  details.push_back("q = " + std::to_string(q));
  details.push_back("sum(truncated total) = " + format_real(sum));
  details.push_back("(1 - (1-gamma)^{q+1}) * impact_total = " + format_real(target));
  details.push_back("|sum - target| = " + format_real(violation));
  return detail::finish(Axiom::TruncatedMass, violation, tol, std::move(details));
}

/// For nonnegative impacts every responsibility lies in [0, iota(N)]. The
/// bound needs nonnegativity, so signed impacts yield a NotApplicable
/// verdict instead of a pass/fail.
inline AxiomVerdict check_bounds(const RowStochasticMatrix& a, const ImpactVector& iota,
                                 DiscountFactor gamma, double tol = 1e-8) {
  detail::require_tolerance(tol);
  for (std::size_t i = 0; i < iota.size(); ++i) {
    if (iota.value(i) < 0.0) {
      AxiomVerdict v{Axiom::Bounds, VerdictStatus::NotApplicable, 0.0, tol, {}};
      v.details.push_back("impact for player '" + iota.players().id(i) +
                          "' is negative; the bound requires nonnegative impacts");
      return v;
    }
  }
  const ResponsibilityReport report = exact_value(a, iota, gamma);
  double max_violation = 0.0;
  std::vector<std::string> details;
  for (std::size_t i = 0; i < iota.size(); ++i) {
    const double below = std::max(0.0, -report.total[i]);
    const double above = std::max(0.0, report.total[i] - iota.total());
    const double gap = std::max(below, above);
    max_violation = std::max(max_violation, gap);
    details.push_back("player '" + a.players().id(i) + "': rho_i = " + format_real(report.total[i]) +
                      ", out-of-range by " + format_real(gap));
  }
  return detail::finish(Axiom::Bounds, max_violation, tol, std::move(details));
}

}  // namespace respo
