#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "digitprime/bitconstraint.hpp"
#include "digitprime/numthy.hpp"
#include "digitprime/spectra.hpp"
#include "digitprime/util.hpp"

namespace digitprime {

struct Arc {
  ReducedFraction center;
  double half_width = 0.0;
};

struct ArcDecomposition {
  std::uint64_t N = 0;
  std::uint64_t B = 0;
  std::vector<Arc> arcs;          // ascending by (q, a); the minor set is the complement
  bool disjoint = false;
  double major_measure = 0.0;     // sum of arc lengths (exact when disjoint)
  double minor_measure = 0.0;
};

// Major arcs M(q, a) = [|alpha - a/q| < B/(qN)] for q < B, gcd(a, q) = 1.
inline ArcDecomposition decompose_arcs(std::uint64_t N, std::uint64_t B) {
  if (B < 2) throw std::invalid_argument("decompose_arcs: B must be >= 2");
  ArcDecomposition d;
  d.N = N;
  d.B = B;
  d.arcs.push_back({{0, 1}, static_cast<double>(B) / static_cast<double>(N)});
  for (std::uint64_t q = 2; q < B; ++q)
    for (std::uint64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1)
        d.arcs.push_back({{static_cast<std::int64_t>(a), static_cast<std::int64_t>(q)},
                          static_cast<double>(B) / static_cast<double>(q * N)});

  KahanSum measure;
  for (const Arc& arc : d.arcs) measure.add(2.0 * arc.half_width);
  d.major_measure = measure.value();

  std::vector<std::pair<double, double>> spans;   // (center, half_width) sorted mod 1
  spans.reserve(d.arcs.size() + 1);
  for (const Arc& arc : d.arcs)
    spans.emplace_back(arc.center.value(), arc.half_width);
  std::sort(spans.begin(), spans.end());
  spans.emplace_back(spans.front().first + 1.0, spans.front().second);  // wraparound
  d.disjoint = true;
  for (std::size_t i = 0; i + 1 < spans.size(); ++i)
    if (spans[i].first + spans[i].second >= spans[i + 1].first - spans[i + 1].second) {
      d.disjoint = false;
      break;
    }
  d.minor_measure = d.disjoint ? 1.0 - d.major_measure : 0.0;
  return d;
}

/*
 * The two constraints on the arc cutoff B, as base-2 exponents:
 * log2 B > 3 C rho log2(1/rho) n (minor arcs) and log2 B < n/1000 (major
 * arcs). The window is empty for every desk-scale n; this helper exposes
 * the raw arithmetic so the feasible regime (n in the hundreds of
 * thousands) remains checkable.
 */
struct BWindow {
  double low_exp = 0.0;
  double high_exp = 0.0;
  bool feasible = false;
};

inline BWindow choose_b_window(double n, double rho, double C) {
  BWindow w;
  w.low_exp = 3.0 * C * rho * std::log2(1.0 / rho) * n;
  w.high_exp = n / 1000.0;
  w.feasible = w.low_exp < w.high_exp;
  return w;
}

struct BChoice {
  std::uint64_t B = 4;
  int exponent = 2;
  bool window_empty = false;
  bool clamped = false;
  BWindow window;
};

// B = 2^{ceil(low)+1} when the window allows it, else the geometric mean of
// the two bounds; always a power of two clamped to [4, 2^{n/4}].
inline BChoice choose_B(const DigitConstraint& c, double C = 4.0) {
  BChoice out;
  out.window = choose_b_window(c.n, c.rho(), C);
  double e;
  if (out.window.feasible) {
    e = std::ceil(out.window.low_exp) + 1.0;
    if (e >= out.window.high_exp) out.clamped = true;
  } else {
    out.window_empty = true;
    e = 0.5 * (out.window.low_exp + out.window.high_exp);
  }
  int ei = static_cast<int>(std::llround(e));
  int cap = std::max(2, c.n / 4);
  if (ei < 2 || ei > cap) out.clamped = true;
  ei = std::clamp(ei, 2, cap);
  out.exponent = ei;
  out.B = std::uint64_t{1} << ei;
  return out;
}

struct VinogradovSample {
  double alpha = 0.0;
  std::int64_t a = 0;
  std::int64_t q = 1;
  double s_abs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

// |S(alpha)| against (q^{1/2} N^{1/2} + q^{-1/2} N + N^{4/5}) (ln N)^3,
// with a/q the continued-fraction approximation of alpha, q < qmax.
inline VinogradovSample vinogradov_at(double alpha, std::uint64_t N,
                                      std::uint64_t qmax, const SieveTables& t) {
  VinogradovSample s;
  s.alpha = alpha;

  // best rational approximation with denominator < qmax
  std::int64_t p_prev = 1, q_prev = 0, p_cur = 0, q_cur = 1;
  double x = alpha - std::floor(alpha);
  double frac = x;
  for (int it = 0; it < 64 && frac > 1e-15; ++it) {
    double inv = 1.0 / frac;
    auto digit = static_cast<std::int64_t>(std::floor(inv));
    frac = inv - std::floor(inv);
    std::int64_t p_next = digit * p_cur + p_prev;
    std::int64_t q_next = digit * q_cur + q_prev;
    if (q_next >= static_cast<std::int64_t>(qmax)) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
  }
  auto rf = reduce_fraction(p_cur, q_cur);
  s.a = rf.num;
  s.q = rf.den;

  double Nd = static_cast<double>(N);
  double qd = static_cast<double>(s.q);
  double logN = std::log(Nd);
  s.bound = (std::sqrt(qd) * std::sqrt(Nd) + Nd / std::sqrt(qd) + std::pow(Nd, 0.8)) *
            logN * logN * logN;
  s.s_abs = std::abs(exp_sum_lambda(alpha, N, t));
  s.ratio = s.s_abs / s.bound;
  return s;
}

struct VinogradovReport {
  std::uint64_t N = 0;
  std::uint64_t B = 0;
  std::uint64_t seed = 0;
  std::vector<VinogradovSample> samples;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
};

inline VinogradovReport vinogradov_diagnostic(std::uint64_t N, std::uint64_t B,
                                              int samples, const SieveTables& t,
                                              std::uint64_t seed = 12345) {
  if (N > t.limit) throw std::length_error("vinogradov_diagnostic: N beyond sieve limit");
  if (B < 2 || B >= N) throw std::invalid_argument("vinogradov_diagnostic: need 2 <= B < N");
  VinogradovReport rep;
  rep.N = N;
  rep.B = B;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uint64_t qmax = N / B;
  std::vector<double> ratios;
  for (int i = 0; i < samples; ++i) {
    VinogradovSample s = vinogradov_at(uni(rng), N, qmax, t);
    ratios.push_back(s.ratio);
    rep.samples.push_back(s);
  }
  if (!ratios.empty()) {
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    rep.max_ratio = sorted.back();
    rep.median_ratio = sorted[sorted.size() / 2];
  }
  return rep;
}

struct AssumptionAReport {
  std::int64_t q0 = 1;
  std::uint64_t count = 0;       // #{k < N : q0 | k, f(k) = 1}
  double expected = 0.0;         // E[f] N / q0
  double actual = 0.0;           // |count - expected|
  double kappa = 0.0;            // Fourier bound on kappa(q0)
  double bound = 0.0;            // kappa N 2^{-r} + 1
  bool pass = false;
};

/*
 * Deviation of the divisibility-constrained count from its expected value,
 * against the certified kappa bound. The exact chain is
 *   actual = (N/q0) |sum_{a=1}^{q0-1} fhat(a/q0)|
 *          <= (N/q0) sum |fhat(a/q0)| = kappa N 2^{-r},
 * so the bound normalizes kappa by N 2^{-r} = 2 N E[f] (the same
 * normalization the error terms around the main term carry), plus one unit
 * of slack.
 */
inline AssumptionAReport assumption_a_check(const DigitConstraint& c, std::int64_t q0,
                                            const SieveTables& t) {
  if (q0 < 1 || q0 % 2 == 0)
    throw std::invalid_argument("assumption_a_check: q0 must be odd and positive");
  if (static_cast<std::uint64_t>(q0) <= t.limit && !t.is_squarefree(q0))
    throw std::invalid_argument("assumption_a_check: q0 must be squarefree");

  AssumptionAReport rep;
  rep.q0 = q0;
  for (std::uint64_t k : enumerate_constrained(c))
    if (k % static_cast<std::uint64_t>(q0) == 0) ++rep.count;
  double N = std::ldexp(1.0, c.n);
  double ef = expectation(c);
  rep.expected = ef * N / static_cast<double>(q0);
  rep.actual = std::abs(static_cast<double>(rep.count) - rep.expected);
  rep.kappa = kappa_bound(c, q0);
  rep.bound = rep.kappa * std::ldexp(N, -c.r()) + 1.0;
  rep.pass = rep.actual <= rep.bound;
  return rep;
}

struct PipelineReport {
  int n = 0;
  int r = 0;
  std::string constraint;
  std::uint64_t B = 4;
  double direct = 0.0;           // sum_{k<N} Lambda(k) f(k)
  double main_term = 0.0;        // 2 E[f] N
  double residual = 0.0;
  double rel_residual = 0.0;
  double kappa_sum = 0.0;        // sum_{q<B sf odd} kappa bound
  double major_arc_measure = 0.0;
  bool arcs_disjoint = false;
  bool b_window_empty = false;
  bool b_clamped = false;
};

inline PipelineReport main_term_pipeline(const DigitConstraint& c, const SieveTables& t,
                                         double C = 4.0) {
  if (c.n > 24) throw std::length_error("main_term_pipeline: n exceeds 24");
  std::uint64_t N = c.domain_size();
  if (N > t.limit + 1) throw std::length_error("main_term_pipeline: sieve too small for N");

  PipelineReport rep;
  rep.n = c.n;
  rep.r = c.r();
  rep.constraint = format_constraint(c);

  std::uint64_t mask = c.fixed_mask(), value = c.fixed_value();
  KahanSum direct;
  for (std::uint64_t k = 2; k < N; ++k) {
    std::uint32_t p = t.lambda_p[k];
    if (!p) continue;
    if ((k & mask) == value) direct.add(std::log(static_cast<double>(p)));
  }
  rep.direct = direct.value();
  rep.main_term = 2.0 * expectation(c) * static_cast<double>(N);
  rep.residual = rep.direct - rep.main_term;
  rep.rel_residual = rep.residual / rep.main_term;

  BChoice b = choose_B(c, C);
  rep.B = b.B;
  rep.b_window_empty = b.window_empty;
  rep.b_clamped = b.clamped;
  KahanSum ks;
  for (std::uint64_t q = 3; q < b.B; q += 2)
    if (t.is_squarefree(q)) ks.add(kappa_bound(c, static_cast<std::int64_t>(q)));
  rep.kappa_sum = ks.value();

  ArcDecomposition arcs = decompose_arcs(N, b.B);
  rep.major_arc_measure = arcs.major_measure;
  rep.arcs_disjoint = arcs.disjoint;
  return rep;
}

struct TheoremReport {
  int n = 0;
  int r = 0;
  std::string constraint;
  std::uint64_t exact_count = 0;   // primes p < 2^n with all prescribed digits
  double asymptotic = 0.0;         // 2^{-r} N / ln N
  double ratio = 0.0;
};

inline TheoremReport theorem_check(const DigitConstraint& c, const SieveTables& t) {
  if (c.n > 24) throw std::length_error("theorem_check: n exceeds 24");
  std::uint64_t N = c.domain_size();
  if (N > t.limit + 1) throw std::length_error("theorem_check: sieve too small for N");

  TheoremReport rep;
  rep.n = c.n;
  rep.r = c.r();
  rep.constraint = format_constraint(c);
  std::uint64_t mask = c.fixed_mask(), value = c.fixed_value();
  for (std::uint32_t p : t.primes) {
    if (p >= N) break;
    if ((p & mask) == value) ++rep.exact_count;
  }
  double Nd = static_cast<double>(N);
  rep.asymptotic = std::ldexp(Nd, -rep.r) / std::log(Nd);
  rep.ratio = static_cast<double>(rep.exact_count) / rep.asymptotic;
  return rep;
}

struct ParsevalCheck {
  double direct = 0.0;
  double spectral = 0.0;        // real part of the dyadic inner product
  double spectral_imag = 0.0;   // should be ~0
  double rel_err = 0.0;
};

/*
 * Desk-scale replacement for the circle-method integral: with both S and
 * S_f generated by frequencies below N = 2^n,
 *   sum_{k<N} Lambda(k) f(k) = (1/N) sum_{j<N} S(j/N) conj(S_f(j/N))
 * exactly. S comes from an FFT of the Lambda vector, S_f = N fhat from the
 * product formula, the left side from the sieve directly.
 */
inline ParsevalCheck discrete_parseval_check(const DigitConstraint& c,
                                             const SieveTables& t) {
  if (c.n > 16) throw std::length_error("discrete_parseval_check: n exceeds 16");
  std::uint64_t N = c.domain_size();
  if (N > t.limit + 1) throw std::length_error("discrete_parseval_check: sieve too small");

  std::vector<cplx> lam(N);
  for (std::uint64_t k = 2; k < N; ++k)
    if (t.lambda_p[k]) lam[k] = std::log(static_cast<double>(t.lambda_p[k]));
  fft_pow2(lam, +1);                       // lam[j] = S(j/N) over k < N

  auto fh = fhat_dyadic_values(BitPattern::of(c));
  KahanCSum inner;                         // (1/N) S conj(S_f) = S conj(fhat)
  for (std::uint64_t j = 0; j < N; ++j) inner.add(lam[j] * std::conj(fh[j]));

  ParsevalCheck out;
  std::uint64_t mask = c.fixed_mask(), value = c.fixed_value();
  KahanSum direct;
  for (std::uint64_t k = 2; k < N; ++k)
    if (t.lambda_p[k] && (k & mask) == value)
      direct.add(std::log(static_cast<double>(t.lambda_p[k])));
  out.direct = direct.value();
  out.spectral = inner.value().real();
  out.spectral_imag = inner.value().imag();
  out.rel_err = std::abs(out.direct - out.spectral) / std::max(out.direct, 1.0);
  return out;
}

}  // namespace digitprime
