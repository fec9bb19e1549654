#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace respo {

/// Ordered set of distinct player identifiers. Index order is fixed at
/// construction (first appearance in the input) and every vector in the
/// library is aligned to it.
class PlayerSet {
 public:
  explicit PlayerSet(std::vector<std::string> ids) : ids_(std::move(ids)) {
    if (ids_.empty()) fail(ErrorCode::EmptyPlayerSet, "player set must contain at least one player");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i].empty()) fail(ErrorCode::DuplicatePlayer, "player id at position " + std::to_string(i) + " is empty");
      auto [it, inserted] = index_.emplace(ids_[i], i);
      if (!inserted) fail(ErrorCode::DuplicatePlayer, "duplicate player id '" + ids_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

  bool operator==(const PlayerSet& other) const { return ids_ == other.ids_; }
  bool operator!=(const PlayerSet& other) const { return !(*this == other); }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Discount factor, strictly inside (0, 1). Construction is the only gate;
/// everything downstream can rely on the open interval.
class DiscountFactor {
 public:
  explicit DiscountFactor(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
      fail(ErrorCode::DiscountFactorOutOfRange,
           "discount factor must lie strictly inside (0,1), got " + format_real(gamma));
    }
  }

  double value() const noexcept { return gamma_; }
  /// 1 - gamma, the per-step damping of the walk series.
  double complement() const noexcept { return 1.0 - gamma_; }

 private:
  double gamma_;
};

/// Per-player impact quantities. Totals are fixed at construction; abs_total
/// backs the error bounds so they stay valid for signed impacts.
class ImpactVector {
 public:
  ImpactVector(PlayerSet players, std::vector<double> values)
      : players_(std::move(players)), values_(std::move(values)) {
    if (values_.size() != players_.size()) {
      fail(ErrorCode::DimensionMismatch,
           "impact vector has " + std::to_string(values_.size()) + " values for " +
               std::to_string(players_.size()) + " players");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        fail(ErrorCode::NonFiniteImpact, "impact for player '" + players_.id(i) + "' is not finite");
      }
    }
    total_ = compensated_sum(values_);
    abs_total_ = compensated_abs_sum(values_);
  }

  const PlayerSet& players() const noexcept { return players_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }
  std::size_t size() const noexcept { return values_.size(); }
  double total() const noexcept { return total_; }
  double abs_total() const noexcept { return abs_total_; }

 private:
  PlayerSet players_;
  std::vector<double> values_;
  double total_ = 0.0;
  double abs_total_ = 0.0;
};

/// Pre-normalization adjacency weights (sales volumes, trade flows, ...).
/// Nonnegative and finite; no row-sum constraint.
class RawWeightMatrix {
 public:
  RawWeightMatrix(PlayerSet players, std::vector<double> weights)
      : players_(std::move(players)), weights_(std::move(weights)) {
    const std::size_t n = players_.size();
    if (weights_.size() != n * n) {
      fail(ErrorCode::ShapeMismatch, "weight grid has " + std::to_string(weights_.size()) +
                                         " entries, expected " + std::to_string(n * n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = weights_[i * n + j];
        if (!(w >= 0.0) || !std::isfinite(w)) {
          fail(ErrorCode::NegativeWeight, "weight (" + players_.id(i) + "," + players_.id(j) +
                                              ") = " + format_real(w) +
                                              " must be finite and nonnegative");
        }
      }
    }
  }

  RawWeightMatrix(PlayerSet players, const std::vector<std::vector<double>>& rows)
      : RawWeightMatrix(std::move(players), flatten(rows)) {}

  const PlayerSet& players() const noexcept { return players_; }
  std::size_t n() const noexcept { return players_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double at(std::size_t i, std::size_t j) const { return weights_.at(i * n() + j); }

 private:
  static std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
  }

  PlayerSet players_;
  std::vector<double> weights_;
};

enum class ZeroRowPolicy {
  SelfLoop,  // a zero row becomes a self-loop row (modeling extension for terminal sellers)
  Reject,    // a zero row is an error (strict default)
};

/// Validated adjacency matrix: entries in [0,1], every row renormalized to
/// sum 1. Immutable; only constructible through validate() or normalize().
class RowStochasticMatrix {
 public:
  const PlayerSet& players() const noexcept { return players_; }
  std::size_t n() const noexcept { return players_.size(); }
  std::span<const double> data() const noexcept { return entries_; }
  double entry(std::size_t i, std::size_t j) const { return entries_.at(i * n() + j); }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(entries_).subspan(i * n(), n()); }
  double row_tolerance() const noexcept { return row_tolerance_; }

 private:
  RowStochasticMatrix(PlayerSet players, std::vector<double> entries, double row_tolerance)
      : players_(std::move(players)), entries_(std::move(entries)), row_tolerance_(row_tolerance) {}

  friend RowStochasticMatrix validate(std::vector<double>, PlayerSet, double);
  friend RowStochasticMatrix normalize(const RawWeightMatrix&, ZeroRowPolicy);

  PlayerSet players_;
  std::vector<double> entries_;
  double row_tolerance_;
};

/// Accept a grid as a row-stochastic matrix: every entry must lie in [0,1]
/// exactly, every row sum within row_tolerance of 1. Accepted rows are then
/// renormalized (divided by their sum) so downstream identities see row sums
/// of exactly 1 up to rounding.
inline RowStochasticMatrix validate(std::vector<double> entries, PlayerSet players,
                                    double row_tolerance = 1e-6) {
  const std::size_t n = players.size();
  if (entries.size() != n * n) {
    fail(ErrorCode::ShapeMismatch, "matrix has " + std::to_string(entries.size()) +
                                       " entries, expected " + std::to_string(n) + "x" +
                                       std::to_string(n));
  }
  if (!(row_tolerance >= 0.0)) {
    fail(ErrorCode::InvalidTolerance, "row tolerance must be nonnegative, got " + format_real(row_tolerance));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double e = entries[i * n + j];
      if (!(e >= 0.0 && e <= 1.0)) {
        fail(ErrorCode::EntryOutOfRange, "entry (" + players.id(i) + "," + players.id(j) + ") = " +
                                             format_real(e) + " lies outside [0,1]");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = compensated_sum(std::span<const double>(entries).subspan(i * n, n));
    if (!(std::abs(sum - 1.0) <= row_tolerance)) {
      fail(ErrorCode::RowSumViolation, "row '" + players.id(i) + "' sums to " + format_real(sum) +
                                           ", deviating from 1 by " + format_real(std::abs(sum - 1.0)) +
                                           " (tolerance " + format_real(row_tolerance) + ")");
    }
    if (sum != 1.0) {
      for (std::size_t j = 0; j < n; ++j) entries[i * n + j] /= sum;
    }
  }
  return RowStochasticMatrix(std::move(players), std::move(entries), row_tolerance);
}

inline RowStochasticMatrix validate(const std::vector<std::vector<double>>& rows, PlayerSet players,
                                    double row_tolerance = 1e-6) {
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) {
      fail(ErrorCode::ShapeMismatch, "matrix rows have inconsistent lengths");
    }
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return validate(std::move(flat), std::move(players), row_tolerance);
}

/// Turn raw volumes into row proportions: each row with positive sum is
/// divided by its sum; zero rows follow the policy.
inline RowStochasticMatrix normalize(const RawWeightMatrix& raw,
                                     ZeroRowPolicy policy = ZeroRowPolicy::Reject) {
  const std::size_t n = raw.n();
  std::vector<double> entries(raw.weights().begin(), raw.weights().end());
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = compensated_sum(std::span<const double>(entries).subspan(i * n, n));
    if (sum == 0.0) {
      if (policy == ZeroRowPolicy::Reject) {
        fail(ErrorCode::ZeroRow, "row '" + raw.players().id(i) + "' has zero total weight");
      }
      entries[i * n + i] = 1.0;
      continue;
    }
    if (sum != 1.0) {
      for (std::size_t j = 0; j < n; ++j) entries[i * n + j] /= sum;
    }
  }
  return RowStochasticMatrix(raw.players(), std::move(entries), 0.0);
}

/// Players whose column is identically zero: no incoming responsibility flow.
/// Exact zero test on the validated entries.
inline std::vector<std::string> independent_players(const RowStochasticMatrix& a) {
  const std::size_t n = a.n();
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) {
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.entry(i, j) != 0.0) {
        zero = false;
        break;
      }
    }
    if (zero) out.push_back(a.players().id(j));
  }
  return out;
}

/// Unordered pairs {i,j} whose rows and columns agree entrywise within
/// pair_tolerance. The definition is exact equality; the tolerance exists for
/// noisy inputs and defaults to 0.
inline std::vector<std::pair<std::string, std::string>> symmetric_pairs(
    const RowStochasticMatrix& a, double pair_tolerance = 0.0) {
  if (!(pair_tolerance >= 0.0)) {
    fail(ErrorCode::InvalidTolerance, "pair tolerance must be nonnegative, got " + format_real(pair_tolerance));
  }
  const std::size_t n = a.n();
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool match = true;
      for (std::size_t k = 0; k < n && match; ++k) {
        if (std::abs(a.entry(i, k) - a.entry(j, k)) > pair_tolerance) match = false;
        if (match && std::abs(a.entry(k, i) - a.entry(k, j)) > pair_tolerance) match = false;
      }
      if (match) out.emplace_back(a.players().id(i), a.players().id(j));
    }
  }
  return out;
}

}  // namespace respo
