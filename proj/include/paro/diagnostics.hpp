#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "paro/clustering.hpp"
#include "paro/dense_eig.hpp"
#include "paro/errors.hpp"
#include "paro/model_problems.hpp"
#include "paro/trace.hpp"

namespace paro {

inline constexpr double kFitWindowLo = 1e-12;
inline constexpr double kFitWindowHi = 1e-2;

// Structural constants of a clustered spectrum relative to a set of shifts.
struct GapStats {
  double g = 0.0;                   // smallest gap between consecutive clusters
  double gamma = 0.0;               // largest spread inside a cluster
  int D = 1;                        // largest multiplicity
  double delta0 = 0.0;              // max |lambda_ij - shift_i|
  std::vector<double> zeta;         // per-cluster |cluster mean - shift_i|
  double lambda_next = 0.0;         // first value beyond the layout
  bool delta0_ok = false;           // delta0 < g / 2
  double gamma_over_g = std::numeric_limits<double>::quiet_NaN();
  double zeta_over_g = std::numeric_limits<double>::quiet_NaN();
};

inline GapStats gap_stats(const EigDecomposition& oracle, const ClusterLayout& layout,
                          const std::vector<double>& shifts) {
  const int N = layout.total();
  if (oracle.values.size() < N + 1)
    throw InsufficientSpectrum("gap_stats: oracle must cover one value beyond the layout");
  if (static_cast<int>(shifts.size()) != layout.q())
    throw BadInput("gap_stats: one shift per cluster required");

  GapStats s;
  s.lambda_next = oracle.values[N];
  s.g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < layout.q(); ++i) {
    const int off = layout.offset(i), d = layout.d()[static_cast<size_t>(i)];
    s.D = std::max(s.D, d);
    s.gamma = std::max(s.gamma, oracle.values[off + d - 1] - oracle.values[off]);
    const double next_first = oracle.values[off + d];  // lambda_next when i = q-1
    s.g = std::min(s.g, next_first - oracle.values[off + d - 1]);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) {
      mean += oracle.values[off + j];
      s.delta0 = std::max(
          s.delta0, std::abs(oracle.values[off + j] - shifts[static_cast<size_t>(i)]));
    }
    mean /= d;
    s.zeta.push_back(std::abs(mean - shifts[static_cast<size_t>(i)]));
  }
  s.delta0_ok = s.delta0 < 0.5 * s.g;
  if (s.g > 0.0) {
    s.gamma_over_g = s.gamma / s.g;
    s.zeta_over_g = *std::max_element(s.zeta.begin(), s.zeta.end()) / s.g;
  }
  return s;
}

// Worst-case error sequence of an iteration together with its observed decay.
struct BoundSequence {
  std::vector<double> eps;           // eps_0 .. eps_n
  std::vector<double> ratios;        // eps_{k+1} / eps_k
  std::vector<double> cubic_ratios;  // eps_{k+1} / eps_k^3
  std::vector<double> zeta;          // value-error companions (shift-updating form)
  double limit_ratio = std::numeric_limits<double>::quiet_NaN();
  double limit_cubic = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void fill_ratios(BoundSequence& b) {
  for (size_t k = 0; k + 1 < b.eps.size(); ++k) {
    const double e = b.eps[k], en = b.eps[k + 1];
    b.ratios.push_back(e > 0.0 ? en / e
                               : std::numeric_limits<double>::quiet_NaN());
    b.cubic_ratios.push_back(e > 0.0 ? en / (e * e * e)
                                     : std::numeric_limits<double>::quiet_NaN());
  }
}

}  // namespace detail

// Error recurrence of the fixed-shift iteration. The contraction approaches
// delta0 / (g - delta0); the hypothesis delta0 < g/2 keeps that below one.
inline BoundSequence recurrence_simplified(double eps0, double delta0, double g,
                                           int steps) {
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw BadInput("recurrence_simplified: eps0 must lie in (0, 1)");
  if (!(delta0 > 0.0) || !(g > 0.0) || steps < 0)
    throw BadInput("recurrence_simplified: delta0, g must be positive");
  if (!(delta0 < 0.5 * g))
    throw HypothesisViolated("recurrence_simplified: delta0 >= g/2, no contraction");

  BoundSequence b;
  b.eps.push_back(eps0);
  for (int k = 0; k < steps; ++k) {
    const double e = b.eps.back();
    const double den = std::sqrt((g - delta0) * (g - delta0) * (1.0 - e * e) +
                                 delta0 * delta0 * e * e);
    const double next = delta0 * e / den;
    b.eps.push_back(std::clamp(next, 0.0, 1.0));
  }
  detail::fill_ratios(b);
  b.limit_ratio = delta0 / (g - delta0);
  return b;
}

// Error recurrence of the shift-updating iteration; the value error zeta is
// regenerated from the subspace error each step. With gamma = 0 the decay is
// cubic with factor sqrt(D N) lambda_next / (g c_tilde).
inline BoundSequence recurrence_shifted(double eps0, double zeta0, double gamma,
                                        double g, int D, int N, double c_tilde,
                                        double lambda_next, int steps) {
  if (!(eps0 >= 0.0 && eps0 < 1.0))
    throw BadInput("recurrence_shifted: eps0 must lie in [0, 1)");
  if (!(zeta0 >= 0.0) || !(gamma >= 0.0) || !(g > 0.0) || D < 1 || N < 1 ||
      !(c_tilde > 0.0) || !(lambda_next > 0.0) || steps < 0)
    throw BadInput("recurrence_shifted: invalid parameters");

  BoundSequence b;
  b.eps.push_back(eps0);
  b.zeta.push_back(zeta0);
  const double dn = std::sqrt(static_cast<double>(D) * N);
  for (int k = 0; k < steps; ++k) {
    const double e = b.eps.back();
    const double z = b.zeta.back();
    const double off = gamma + z;
    double next;
    if (off == 0.0 || e == 0.0) {
      next = 0.0;
    } else {
      const double den2 = (g - off) * (g - off) * (1.0 - D * e * e) +
                          static_cast<double>(D) * off * off * e * e;
      next = den2 > 0.0 ? std::clamp(c_tilde * dn * off * e / std::sqrt(den2), 0.0, 1.0)
                        : 1.0;
    }
    b.eps.push_back(next);
    b.zeta.push_back(lambda_next / (c_tilde * c_tilde) * next * next);
  }
  detail::fill_ratios(b);
  if (g > gamma) b.limit_ratio = c_tilde * dn * gamma / (g - gamma);
  b.limit_cubic = dn * lambda_next / (g * c_tilde);
  return b;
}

// Admissible initial error and stability constants for a clustered spectrum
// of lines (value, multiplicity); alpha is the safety factor in (0, 1).
struct KnyazevConstants {
  double eps_star = 0.0;
  double c_star = 0.0;
  double c_dstar = 0.0;
};

inline KnyazevConstants knyazev_constants(const std::vector<SpectralLine>& lines,
                                          double alpha, int q = -1) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw BadInput("knyazev_constants: alpha must lie in (0, 1)");
  if (lines.empty()) throw Empty("knyazev_constants: no spectral lines");
  if (q < 0) q = static_cast<int>(lines.size()) - 1;
  if (q < 1 || q + 1 > static_cast<int>(lines.size()))
    throw BadInput("knyazev_constants: need q >= 1 and q+1 spectral lines");
  auto lam = [&](int i) { return lines[static_cast<size_t>(i - 1)].value; };
  if (!(lam(1) > 0.0))
    throw BadInput("knyazev_constants: spectrum must be positive");
  for (int i = 1; i <= q + 1; ++i) {
    if (lines[static_cast<size_t>(i - 1)].multiplicity < 1)
      throw BadInput("knyazev_constants: multiplicities must be >= 1");
    if (i > 1 && !(lam(i) > lam(i - 1)))
      throw DegenerateGap("knyazev_constants: spectral lines must be strictly increasing");
  }

  KnyazevConstants k;
  double emin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= q + 1; ++i) {
    const double prev = i == 1 ? 0.0 : lam(i - 1);
    emin = std::min(emin, std::sqrt((lam(i) - prev) / lam(i)));
  }
  k.eps_star = alpha * emin;

  for (int i = 1; i <= q; ++i) {
    const double prev = i == 1 ? 0.0 : lam(i - 1);
    const double c = std::sqrt(2.0 * (lam(i + 1) - prev) * lam(i) /
                               ((1.0 - alpha * alpha) * (lam(i) - prev) *
                                (lam(i + 1) - lam(i))));
    k.c_star = std::max(k.c_star, c);
  }
  for (int i = 1; i <= q; ++i) {
    const double di = lines[static_cast<size_t>(i - 1)].multiplicity;
    k.c_dstar = std::max(
        k.c_dstar, 2.0 * (std::sqrt(di) + 1.0) / std::sqrt(lam(i)) * k.c_star);
  }
  return k;
}

// Observed decay of a traced run next to the model recurrences.
struct TraceReport {
  std::vector<double> eps_hat;
  std::vector<double> ratios;
  std::vector<double> cubic_ratios;
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  int window_pairs = 0;
  double gm_ratio = std::numeric_limits<double>::quiet_NaN();
  GapStats stats;
  BoundSequence theory_simplified;
  BoundSequence theory_shifted;
  double window_lo = kFitWindowLo;
  double window_hi = kFitWindowHi;
  double c_tilde = 1.0;
};

namespace detail {

// Least-squares slope of log eps_{k+1} against log eps_k over consecutive
// pairs with both entries inside the window. NaN with fewer than two pairs.
inline double order_fit(const std::vector<double>& eps, double lo, double hi,
                        int* pairs_out) {
  std::vector<double> x, y;
  for (size_t k = 0; k + 1 < eps.size(); ++k) {
    if (eps[k] >= lo && eps[k] <= hi && eps[k + 1] >= lo && eps[k + 1] <= hi) {
      x.push_back(std::log(eps[k]));
      y.push_back(std::log(eps[k + 1]));
    }
  }
  if (pairs_out) *pairs_out = static_cast<int>(x.size());
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

}  // namespace detail

inline TraceReport trace_analysis(const IterationTrace& trace,
                                  const EigDecomposition& oracle,
                                  const ClusterLayout& layout, double c_tilde = 1.0) {
  TraceReport rep;
  rep.c_tilde = c_tilde;
  rep.eps_hat = eps_hat_series(trace);
  if (rep.eps_hat.empty())
    throw BadInput("trace_analysis: trace is empty");
  for (double e : rep.eps_hat)
    if (std::isnan(e))
      throw BadInput("trace_analysis: trace carries no oracle distances");

  std::vector<double> shifts0(static_cast<size_t>(layout.q()),
                              std::numeric_limits<double>::quiet_NaN());
  for (const TraceRow& r : trace.rows)
    if (r.iter == 0 && r.cluster >= 0 && r.cluster < layout.q())
      shifts0[static_cast<size_t>(r.cluster)] = r.shift;
  for (double s : shifts0)
    if (std::isnan(s)) throw BadInput("trace_analysis: missing initial shifts");
  rep.stats = gap_stats(oracle, layout, shifts0);

  for (size_t k = 0; k + 1 < rep.eps_hat.size(); ++k) {
    const double e = rep.eps_hat[k], en = rep.eps_hat[k + 1];
    rep.ratios.push_back(e > 0.0 ? en / e : std::numeric_limits<double>::quiet_NaN());
    rep.cubic_ratios.push_back(e > 0.0 ? en / (e * e * e)
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  rep.fitted_order =
      detail::order_fit(rep.eps_hat, rep.window_lo, rep.window_hi, &rep.window_pairs);

  double lg = 0.0;
  int ng = 0;
  for (size_t k = 0; k + 1 < rep.eps_hat.size(); ++k) {
    const double e = rep.eps_hat[k], en = rep.eps_hat[k + 1];
    if (e >= rep.window_lo && e <= rep.window_hi && en >= rep.window_lo &&
        en <= rep.window_hi && e > 0.0) {
      lg += std::log(en / e);
      ++ng;
    }
  }
  if (ng > 0) rep.gm_ratio = std::exp(lg / ng);

  const int steps = static_cast<int>(rep.eps_hat.size()) - 1;
  const double e0 = rep.eps_hat[0];
  if (steps > 0 && e0 > 0.0 && e0 < 1.0) {
    try {
      rep.theory_simplified =
          recurrence_simplified(e0, rep.stats.delta0, rep.stats.g, steps);
    } catch (const Error&) {
      // Outside the fixed-shift hypothesis; leave the model sequence empty.
    }
    try {
      const double z0 =
          *std::max_element(rep.stats.zeta.begin(), rep.stats.zeta.end());
      rep.theory_shifted = recurrence_shifted(
          e0, z0, rep.stats.gamma, rep.stats.g, rep.stats.D, layout.total(),
          c_tilde, rep.stats.lambda_next, steps);
    } catch (const Error&) {
      // Same: parameters outside the model's range.
    }
  }
  return rep;
}

}  // namespace paro
