#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "digitprime/bitconstraint.hpp"
#include "digitprime/numthy.hpp"
#include "digitprime/util.hpp"

namespace digitprime {

/*
 * Normalized Fourier transform of a digit pattern,
 *
 *   fhat(lambda) = 2^{-n} sum_{x<2^n} f(x) e(lambda x),
 *
 * evaluated by the closed-form product: a phase factor per fixed position
 * and an averaged-cosine factor (1 + e(lambda 2^j))/2 per free position.
 * |fhat(lambda)| = 2^{-#fixed} prod_{j free} |cos(pi lambda 2^j)|.
 */
inline cplx fhat(double lambda, const BitPattern& p) {
  cplx acc = std::ldexp(1.0, -p.fixed_count());
  for (int j = 0; j < p.n; ++j) {
    // lambda * 2^j is an exact double scaling, so the mod-1 reduction below
    // does not lose low bits of lambda.
    double t = std::ldexp(lambda, j);
    if (p.mask >> j & 1) {
      if (p.value >> j & 1) acc *= unit_angle(t);
    } else {
      acc *= 0.5 * (1.0 + unit_angle(t));
    }
  }
  return acc;
}

inline cplx fhat(double lambda, const DigitConstraint& c) {
  return fhat(lambda, BitPattern::of(c));
}

// fhat(a/q) with exact modular angle reduction: position j contributes the
// angle (a 2^j mod q)/q, tracked by integer doubling. Bit-reproducible and
// immune to the precision loss of lambda*2^j at large j.
inline cplx fhat_fraction(std::int64_t a, std::int64_t q, const BitPattern& p) {
  if (q <= 0) throw std::invalid_argument("fhat_fraction: q must be positive");
  a %= q;
  if (a < 0) a += q;
  cplx acc = std::ldexp(1.0, -p.fixed_count());
  std::int64_t t = a;
  for (int j = 0; j < p.n; ++j) {
    if (p.mask >> j & 1) {
      if (p.value >> j & 1) acc *= unit_root(t, q);
    } else {
      acc *= 0.5 * (1.0 + unit_root(t, q));
    }
    t <<= 1;
    if (t >= q) t -= q;
  }
  return acc;
}

inline cplx fhat_fraction(std::int64_t a, std::int64_t q, const DigitConstraint& c) {
  return fhat_fraction(a, q, BitPattern::of(c));
}

struct SpectralPoint {
  double lambda = 0.0;
  cplx value;
  double magnitude = 0.0;
};

/*
 * All 2^n dyadic samples fhat(k/2^n), k < 2^n, by shared-prefix doubling:
 * the factor for position j depends only on k mod 2^{n-j}, so the table for
 * k mod 2^m expands in place to k mod 2^{m+1}, one factor multiply per new
 * entry (O(2^n) total). Matches the direct product to ~1e-15.
 */
inline std::vector<cplx> fhat_dyadic_values(const BitPattern& p) {
  if (p.n > 24) throw std::length_error("fhat_dyadic_values: n exceeds 24");
  std::vector<cplx> v(std::size_t{1} << p.n);
  v[0] = std::ldexp(1.0, -p.fixed_count());
  for (int m = 1; m <= p.n; ++m) {
    int j = p.n - m;                       // position folded in at this level
    std::int64_t den = std::int64_t{1} << m;
    std::size_t half = std::size_t{1} << (m - 1);
    bool fixed = (p.mask >> j) & 1;
    bool bit = (p.value >> j) & 1;
    // each slot t < half is read once and feeds exactly t and t + half,
    // so the expansion is element-wise independent
    parallel_blocks(half, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        cplx src = v[t];
        std::int64_t t_lo = static_cast<std::int64_t>(t);
        std::int64_t t_hi = t_lo + den / 2;
        cplx f_lo, f_hi;
        if (fixed) {
          f_lo = bit ? unit_root(t_lo, den) : cplx{1.0, 0.0};
          f_hi = bit ? unit_root(t_hi, den) : cplx{1.0, 0.0};
        } else {
          f_lo = 0.5 * (1.0 + unit_root(t_lo, den));
          f_hi = 0.5 * (1.0 + unit_root(t_hi, den));
        }
        v[t] = src * f_lo;
        v[t + half] = src * f_hi;
      }
    });
  }
  return v;
}

inline std::vector<SpectralPoint> fhat_all_dyadic(const DigitConstraint& c) {
  auto v = fhat_dyadic_values(BitPattern::of(c));
  std::vector<SpectralPoint> out(v.size());
  double scale = std::ldexp(1.0, -c.n);
  for (std::size_t k = 0; k < v.size(); ++k)
    out[k] = {static_cast<double>(k) * scale, v[k], std::abs(v[k])};
  return out;
}

/*
 * Verification record for one of the four spectral lemma bounds. `computed`
 * is the exact finite sum on the lemma's left side, `bound` the right side
 * with the supplied constant C; `min_constant` is the smallest C that would
 * pass. All logs in the bounds are base 2.
 */
struct LemmaReport {
  int lemma = 0;
  int n = 0;
  double rho = 0.0;
  double C = 0.0;
  double computed = 0.0;
  double bound = 0.0;
  double min_constant = 0.0;
  bool pass = false;
  std::vector<std::string> flags;
  // lemma-specific parameters
  std::int64_t Q = 0;
  std::int64_t q = 0;
  std::int64_t a = 0;
  std::int64_t gridsize = 0;
};

namespace detail {

inline double log2_inv_rho(double rho) { return std::log2(1.0 / rho); }

// smallest C with computed <= 2^(C * unit): log2(computed) / unit
inline double min_c(double computed, double unit) {
  if (computed <= 0.0) return 0.0;
  if (unit <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(computed) / unit;
}

}  // namespace detail

// Lemma bound: 2^{r+1} sum_k |fhat(k/2^n)| < 2^{C rho log2(1/rho) n}.
inline LemmaReport lemma1_check(const DigitConstraint& c, double C = 4.0) {
  if (c.n > 24) throw std::length_error("lemma1_check: n exceeds 24");
  auto v = fhat_dyadic_values(BitPattern::of(c));
  KahanSum s;
  for (const cplx& z : v) s.add(std::abs(z));

  LemmaReport rep;
  rep.lemma = 1;
  rep.n = c.n;
  rep.rho = c.rho();
  rep.C = C;
  rep.computed = std::ldexp(s.value(), c.set_size());   // 2^{r+1} = 2^{|A|}
  double unit = rep.rho * detail::log2_inv_rho(rep.rho) * c.n;
  rep.bound = std::exp2(C * unit);
  rep.pass = rep.computed < rep.bound;
  rep.min_constant = detail::min_c(rep.computed, unit);
  if (rep.rho >= 0.5) rep.flags.push_back("vacuous:rho>=1/2");
  return rep;
}

// Lemma bound: 2^r int_0^1 |fhat| < 2^{C rho log2(1/rho) n - n}, by the
// periodic trapezoid rule (= uniform Riemann sum) at >= 4x oversampling.
inline LemmaReport lemma2_check(const DigitConstraint& c, double C = 4.0,
                                std::int64_t gridsize = 0) {
  if (c.n > 20) throw std::length_error("lemma2_check: n exceeds 20");
  std::int64_t nyquist = std::int64_t{1} << (c.n + 2);
  // default 16x oversampling: the trapezoid error is O(h^2) and a grid
  // doubling then moves the value by well under 1%
  if (gridsize == 0) gridsize = std::int64_t{1} << (c.n + 4);
  if (gridsize < nyquist)
    throw std::invalid_argument("lemma2_check: grid undersamples |fhat| (need >= 2^{n+2})");

  BitPattern p = BitPattern::of(c);
  KahanSum s;
  for (std::int64_t i = 0; i < gridsize; ++i)
    s.add(std::abs(fhat_fraction(i, gridsize, p)));
  double integral = s.value() / static_cast<double>(gridsize);

  LemmaReport rep;
  rep.lemma = 2;
  rep.n = c.n;
  rep.rho = c.rho();
  rep.C = C;
  rep.gridsize = gridsize;
  rep.computed = std::ldexp(integral, c.r());
  double unit = rep.rho * detail::log2_inv_rho(rep.rho) * c.n;
  rep.bound = std::exp2(C * unit - c.n);
  rep.pass = rep.computed < rep.bound;
  rep.min_constant = detail::min_c(std::ldexp(rep.computed, c.n), unit);
  if (rep.rho >= 0.5) rep.flags.push_back("vacuous:rho>=1/2");
  return rep;
}

// Lemma bound: 2^r sum_{q<Q odd} sum_{(a,q)=1} |fhat(a/q)| < Q^{C rho log2(1/rho)}.
inline LemmaReport lemma3_check(const DigitConstraint& c, std::int64_t Q,
                                double C = 4.0) {
  if (Q < 0) throw std::invalid_argument("lemma3_check: Q must be nonnegative");
  double artifact_cap = std::exp2(c.n / 4.0);
  if (static_cast<double>(Q) > artifact_cap + 1e-9)
    throw std::length_error("lemma3_check: Q beyond the artifact regime 2^{n/4}");

  BitPattern p = BitPattern::of(c);
  KahanSum s;
  for (std::int64_t q = 3; q < Q; q += 2)
    for (std::int64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1) s.add(std::abs(fhat_fraction(a, q, p)));

  LemmaReport rep;
  rep.lemma = 3;
  rep.n = c.n;
  rep.rho = c.rho();
  rep.C = C;
  rep.Q = Q;
  rep.computed = std::ldexp(s.value(), c.r());
  double unit = rep.rho * detail::log2_inv_rho(rep.rho) * std::log2(std::max<double>(Q, 2));
  rep.bound = std::pow(static_cast<double>(Q), C * rep.rho * detail::log2_inv_rho(rep.rho));
  rep.pass = rep.computed < rep.bound;
  rep.min_constant = detail::min_c(rep.computed, unit);
  if (static_cast<double>(Q) >= std::exp2(c.n / 100.0))
    rep.flags.push_back("out_of_regime:Q>=2^(n/100)");
  return rep;
}

// Individual bound for small odd q: 2^r |fhat(a/q)| < 2^{-sqrt n}.
inline LemmaReport lemma4_check(const DigitConstraint& c, std::int64_t q,
                                std::int64_t a) {
  if (q <= 1 || q % 2 == 0)
    throw std::invalid_argument("lemma4_check: q must be odd and > 1");
  if (std::gcd(((a % q) + q) % q, q) != 1)
    throw std::invalid_argument("lemma4_check: a must be coprime to q");

  LemmaReport rep;
  rep.lemma = 4;
  rep.n = c.n;
  rep.rho = c.rho();
  rep.q = q;
  rep.a = a;
  rep.computed = std::ldexp(std::abs(fhat_fraction(a, q, BitPattern::of(c))), c.r());
  rep.bound = std::exp2(-std::sqrt(static_cast<double>(c.n)));
  rep.pass = rep.computed < rep.bound;
  double regime_cap = std::pow(static_cast<double>(c.n), 1.0 / (10.0 * rep.rho));
  if (static_cast<double>(q) >= regime_cap)
    rep.flags.push_back("out_of_regime:q>=n^(1/(10rho))");
  return rep;
}

// Certified Assumption-A error bound: (2^r/q) sum_{a=1}^{q-1} |fhat(a/q)|.
inline double kappa_bound(const DigitConstraint& c, std::int64_t q) {
  if (q < 1) throw std::invalid_argument("kappa_bound: q must be positive");
  if (q % 2 == 0) throw std::invalid_argument("kappa_bound: q must be odd");
  if (q == 1) return 0.0;
  BitPattern p = BitPattern::of(c);
  KahanSum s;
  for (std::int64_t a = 1; a < q; ++a) s.add(std::abs(fhat_fraction(a, q, p)));
  return std::ldexp(s.value(), c.r()) / static_cast<double>(q);
}

// S(alpha; x) = sum_{k<=x} Lambda(k) e(k alpha), ascending k, compensated.
// Only prime powers contribute, so the loop walks lambda_p's support.
inline cplx exp_sum_lambda(double alpha, std::uint64_t x, const SieveTables& t) {
  if (x > t.limit) throw std::length_error("exp_sum_lambda: x beyond sieve limit");
  KahanCSum s;
  for (std::uint64_t k = 2; k <= x; ++k) {
    std::uint32_t p = t.lambda_p[k];
    if (!p) continue;
    s.add(std::log(static_cast<double>(p)) *
          unit_angle(alpha * static_cast<double>(k)));
  }
  return s.value();
}

// In-place radix-2 FFT, sign +1 for sum x_k e(+jk/N). Used by the discrete
// Parseval route, where S at all dyadic points is the transform of Lambda.
inline void fft_pow2(std::vector<cplx>& v, int sign) {
  std::size_t n = v.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of 2");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::vector<cplx> w(len / 2);
    for (std::size_t i = 0; i < len / 2; ++i)
      w[i] = unit_root(sign * static_cast<std::int64_t>(i), static_cast<std::int64_t>(len));
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = v[i + k];
        cplx t = v[i + k + len / 2] * w[k];
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
      }
  }
}

}  // namespace digitprime
