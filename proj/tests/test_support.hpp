#pragma once

// Shared helpers for the unit and acceptance suites: canned instances,
// random instance generation, and brute-force oracles kept independent of
// the library's computation paths.

#include <respo/respo.hpp>

#include <cstddef>
#include <stdexcept>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testsupport {

inline respo::PlayerSet make_players(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
  return respo::PlayerSet(std::move(ids));
}

// Four-player supply network used throughout: player 2 sells to everyone but
// buys nothing (independent), players 1 and 3 are wired identically.
inline const std::vector<std::vector<double>>& supply4_rows() {
  static const std::vector<std::vector<double>> rows = {
      {0.1, 0.0, 0.1, 0.8},
      {0.2, 0.0, 0.2, 0.6},
      {0.1, 0.0, 0.1, 0.8},
      {0.5, 0.0, 0.5, 0.0},
  };
  return rows;
}

inline respo::RowStochasticMatrix supply4_matrix() {
  return respo::validate(supply4_rows(), make_players(4), 1e-9);
}

inline respo::ImpactVector supply4_impacts() {
  return respo::ImpactVector(make_players(4), {1.0, 2.0, 3.0, 4.0});
}

// Two-player chain: player 1 sells everything to player 2, who consumes her
// own output. Closed form: rho = (gamma, 1-gamma) for impacts (1, 0).
inline respo::RowStochasticMatrix chain2_matrix() {
  return respo::validate({{0.0, 1.0}, {0.0, 1.0}}, make_players(2), 1e-9);
}

inline respo::ImpactVector chain2_impacts() {
  return respo::ImpactVector(make_players(2), {1.0, 0.0});
}

struct InstanceOptions {
  bool nonnegative_impacts = false;
  bool force_independent = false;
  bool force_symmetric = false;
};

struct RandomInstance {
  respo::RowStochasticMatrix matrix;
  respo::ImpactVector impacts;
};

// Random row-stochastic instance. Entries are strictly positive before any
// forced structure, so no zero rows appear. force_independent zeroes the last
// column; force_symmetric makes players 1 and 2 identically wired by copying
// raw rows/columns bit-for-bit (identical raw vectors normalize to identical
// stochastic vectors).
inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t n,
                                      InstanceOptions opts = {}) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<double> w(n * n);
  for (double& x : w) x = weight(rng);

  if (opts.force_symmetric && n >= 2) {
    const std::size_t i = 0, j = 1;
    for (std::size_t k = 0; k < n; ++k) w[j * n + k] = w[i * n + k];
    for (std::size_t p = 0; p < n; ++p) w[p * n + j] = w[p * n + i];
  }
  if (opts.force_independent && n >= 2) {
    const std::size_t c = n - 1;
    for (std::size_t p = 0; p < n; ++p) w[p * n + c] = 0.0;
  }

  respo::RowStochasticMatrix a =
      respo::normalize(respo::RawWeightMatrix(make_players(n), std::move(w)));

  std::uniform_real_distribution<double> impact(opts.nonnegative_impacts ? 0.0 : -10.0, 10.0);
  std::vector<double> iota(n);
  for (double& x : iota) x = impact(rng);
  return RandomInstance{std::move(a), respo::ImpactVector(make_players(n), std::move(iota))};
}

// Naive dense power A^k, triple-loop multiplication; the oracle path shares
// no code with the library.
inline std::vector<double> matrix_power(std::span<const double> a, std::size_t n, unsigned k) {
  std::vector<double> result(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) result[i * n + i] = 1.0;
  for (unsigned step = 0; step < k; ++step) {
    std::vector<double> next(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) s += result[i * n + p] * a[p * n + j];
        next[i * n + j] = s;
      }
    }
    result.swap(next);
  }
  return result;
}

// Brute-force truncated value through explicit matrix powers:
// rho_i = gamma * sum_{k=0}^{q} (1-gamma)^k sum_p (A^k)_{p,i} iota(p).
inline std::vector<double> brute_truncated(const respo::RowStochasticMatrix& a,
                                           const respo::ImpactVector& iota, double gamma,
                                           unsigned q) {
  const std::size_t n = a.n();
  std::vector<double> totals(n, 0.0);
  double damp = 1.0;
  for (unsigned k = 0; k <= q; ++k) {
    const std::vector<double> pk = matrix_power(a.data(), n, k);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t p = 0; p < n; ++p) s += pk[p * n + i] * iota.value(p);
      totals[i] += damp * s;
    }
    damp *= 1.0 - gamma;
  }
  for (double& t : totals) t *= gamma;
  return totals;
}

// Runs fn, which must throw respo::Error, and returns the code it carried.
template <typename Fn>
respo::ErrorCode thrown_code(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const respo::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a respo::Error to be thrown");
}

}  // namespace testsupport
