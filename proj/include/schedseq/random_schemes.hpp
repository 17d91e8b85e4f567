#pragma once

// Random-access baselines: per-slot success probabilities of the general and
// Assignment-T random schemes, their optimal transmit probabilities, and the
// coupon-collector frame length for the single-channel optimum.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace schedseq {

// ---------------------------------------------------------------------------
// 1-D maximization

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

struct Bracket {
  double lo = 0.0, hi = 0.0;
};

// Scans `grid` interior points of the open interval (lo, hi) and returns the
// neighbourhood of the best one.
template <class F>
Bracket grid_bracket(F&& f, double lo, double hi, int grid = 10'000) {
  const double step = (hi - lo) / (grid + 1);
  int best = 1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= grid; ++k) {
    const double v = f(lo + k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return {lo + (best - 1) * step, lo + (best + 1) * step};
}

template <class F>
double maximize_unimodal(F&& f, double lo, double hi, int grid = 10'000, double tol = 1e-12) {
  const auto br = grid_bracket(f, lo, hi, grid);
  return golden_section_maximize(f, br.lo, br.hi, tol);
}

namespace detail {
// Root of a decreasing function on [lo, hi] by bisection down to adjacent doubles.
template <class G>
double bisect_decreasing(G&& g, double lo, double hi) {
  if (g(lo) <= 0.0) return lo;
  if (g(hi) >= 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Success probabilities

// P_a = W p_a q_a (1 - p_a)^{K-2} with W (p_a + q_a) = 1.
inline double p_success_general(int W, int K, double p_a) {
  if (W < 1 || K < 2) throw std::invalid_argument("p_success_general: need W >= 1 and K >= 2");
  if (!(p_a > 0.0 && p_a < 1.0 / W)) throw std::invalid_argument("p_success_general: need 0 < p_a < 1/W");
  return p_a * (1.0 - W * p_a) * std::pow(1.0 - p_a, K - 2);
}

struct AssignTProbabilities {
  double P_beta = 0.0;
  double q1 = 0.0;  // receive on own channel
  double q2 = 0.0;  // receive on each other channel
};

// With P_alpha = P_beta and |G_m| = K/W (real exponent):
// P_beta = p_b (1 - p_b)^{K/W} / (W - p_b).
inline AssignTProbabilities p_success_assignT(int W, int K, double p_b) {
  if (W < 1 || K < 2) throw std::invalid_argument("p_success_assignT: need W >= 1 and K >= 2");
  if (!(p_b > 0.0 && p_b < 1.0)) throw std::invalid_argument("p_success_assignT: need 0 < p_b < 1");
  AssignTProbabilities r;
  r.q2 = (1.0 - p_b) / (W - p_b);
  r.q1 = (1.0 - p_b) * r.q2;
  r.P_beta = p_b * std::pow(1.0 - p_b, static_cast<double>(K) / W) / (W - p_b);
  return r;
}

enum class RandomScheme { General, AssignT };

struct RandomOptimum {
  double p_star = 0.0;
  double P_star = 0.0;
};

// Grid scan + golden-section search, then the maximizer is pinned down by
// bisecting the analytic derivative of the log-objective inside the bracket.
inline RandomOptimum optimize_random(int W, int K, RandomScheme scheme) {
  if (W < 1 || K < 2) throw std::invalid_argument("optimize_random: need W >= 1 and K >= 2");
  const double hi = scheme == RandomScheme::General ? 1.0 / W : 1.0;
  auto objective = [&](double p) {
    return scheme == RandomScheme::General ? p_success_general(W, K, p) : p_success_assignT(W, K, p).P_beta;
  };
  auto dlog = [&](double p) {
    if (scheme == RandomScheme::General) return 1.0 / p - W / (1.0 - W * p) - (K - 2) / (1.0 - p);
    return 1.0 / p - (static_cast<double>(K) / W) / (1.0 - p) + 1.0 / (W - p);
  };
  const auto br = grid_bracket(objective, 0.0, hi);
  double p = golden_section_maximize(objective, br.lo, br.hi);
  const double lo = std::max(br.lo, std::nextafter(0.0, 1.0));
  const double up = std::min(br.hi, std::nextafter(hi, 0.0));
  if (dlog(lo) > 0.0 && dlog(up) < 0.0) p = detail::bisect_decreasing(dlog, lo, up);
  return {p, objective(p)};
}

// ---------------------------------------------------------------------------
// Coupon-collector frame length

inline constexpr int kMaxCouponK = 40;

struct CouponModel {
  int K = 0;
  double P = 0.0;  // per-neighbour, per-slot success probability

  double null_prob() const { return 1.0 - (K - 1) * P; }

  // Single channel, p* = 1/K: P* = (K-1)^{K-1} / K^K.
  static CouponModel optimal(int K) {
    if (K < 2) throw std::invalid_argument("CouponModel: need K >= 2");
    return {K, std::pow(static_cast<double>(K - 1) / K, K - 1) / K};
  }

  void validate() const {
    if (K < 2) throw std::invalid_argument("CouponModel: need K >= 2");
    if (K > kMaxCouponK) throw std::domain_error("CouponModel: K beyond the precision guard (K <= 40)");
    if (!(P > 0.0) || (K - 1) * P > 1.0 + 1e-15) throw std::invalid_argument("CouponModel: need 0 < (K-1)P <= 1");
  }
};

// P(Y <= ell) for collecting all K-1 equiprobable coupons alongside a null coupon:
// 1 - sum_{i=0}^{K-2} (-1)^{K-2-i} C(K-1, i) [((K-1-i) p0 + i) / (K-1)]^ell.
inline double coupon_cdf(const CouponModel& model, std::int64_t ell) {
  model.validate();
  if (ell < 0) throw std::invalid_argument("coupon_cdf: need ell >= 0");
  const int K = model.K;
  if (ell < K - 1) return 0.0;
  const long double p0 = model.null_prob();
  long double sum = 0.0L, comp = 0.0L;
  long double binom = 1.0L;  // C(K-1, i)
  for (int i = 0; i <= K - 2; ++i) {
    const long double base = ((K - 1 - i) * p0 + i) / static_cast<long double>(K - 1);
    const long double sign = ((K - 2 - i) % 2 == 0) ? 1.0L : -1.0L;
    const long double term = sign * binom * std::pow(base, static_cast<long double>(ell));
    // Kahan summation
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    binom = binom * (K - 1 - i) / (i + 1);
  }
  const long double cdf = 1.0L - sum;
  if (cdf < 0.0L) return 0.0;
  if (cdf > 1.0L) return 1.0;
  return static_cast<double>(cdf);
}

// P(X <= ell) = P(X_i <= ell)^K, treating the K nodes as independent.
inline double group_cdf(const CouponModel& model, std::int64_t ell) {
  return std::pow(coupon_cdf(model, ell), model.K);
}

// Smallest ell with group_cdf(ell) >= target under the optimal single-channel model.
inline std::int64_t frame_length(const CouponModel& model, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("frame_length: need 0 < target < 1");
  model.validate();
  std::int64_t hi = 1;
  while (group_cdf(model, hi) < target) {
    if (hi > (std::int64_t{1} << 40)) throw std::runtime_error("frame_length: target not reached");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // group_cdf(lo) < target, or lo == 0
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (group_cdf(model, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

inline std::int64_t frame_length(int K, double target = 0.99999) {
  return frame_length(CouponModel::optimal(K), target);
}

}  // namespace schedseq
