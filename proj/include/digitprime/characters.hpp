#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "digitprime/bitconstraint.hpp"
#include "digitprime/numthy.hpp"
#include "digitprime/spectra.hpp"
#include "digitprime/util.hpp"

namespace digitprime {

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

inline std::int64_t inv_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r0 = m, r1 = ((a % m) + m) % m, s0 = 0, s1 = 1;
  while (r1) {
    std::int64_t q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1) throw std::invalid_argument("inv_mod: arguments not coprime");
  return ((s0 % m) + m) % m;
}

/*
 * Structure of (Z/q)^* as a product of cyclic factors: one per odd prime
 * power (generated by a primitive root chosen to stay primitive at every
 * level of that prime), none for 2, one of order 2 for 4, and the pair
 * <-1> x <5> for 2^nu with nu >= 3. Each factor carries a discrete-log
 * table over its prime-power component, and character values reduce to
 * index arithmetic into one shared root-of-unity table of order
 * L = lcm of the factor orders.
 */
struct UnitGroup {
  enum class Kind { single, minus_one, five };

  struct Factor {
    std::uint64_t prime = 2;
    Kind kind = Kind::single;
    std::uint64_t prime_power = 1;
    std::uint64_t generator = 1;
    std::uint64_t order = 1;
    std::vector<std::int32_t> dlog;   // residue mod prime_power -> exponent, -1 off units
  };

  std::uint64_t modulus = 1;
  std::vector<std::pair<std::uint64_t, int>> factorization;
  std::vector<Factor> factors;
  std::uint64_t phase_order = 1;      // L
  std::vector<cplx> roots;            // roots[t] = e(t/L)
};

// Smallest primitive root mod p that stays primitive mod every p^e (odd p).
inline std::uint64_t primitive_root_odd(std::uint64_t p) {
  std::uint64_t m = p - 1;
  auto pf = factorize(m);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto& [q, e] : pf)
      if (pow_mod(g, m / q, p) == 1) {
        ok = false;
        break;
      }
    if (!ok) continue;
    return pow_mod(g, m, p * p) == 1 ? g + p : g;
  }
  throw std::logic_error("primitive_root_odd: no generator found");
}

inline std::shared_ptr<const UnitGroup> make_unit_group(std::uint64_t q) {
  if (q < 1) throw std::invalid_argument("make_unit_group: modulus must be positive");
  auto g = std::make_shared<UnitGroup>();
  g->modulus = q;
  g->factorization = factorize(q);

  for (auto& [p, e] : g->factorization) {
    std::uint64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
      if (e == 1) continue;                     // trivial unit group mod 2
      UnitGroup::Factor fm;
      fm.prime = 2;
      fm.kind = UnitGroup::Kind::minus_one;
      fm.prime_power = pe;
      fm.generator = pe - 1;
      fm.order = 2;
      fm.dlog.assign(pe, -1);
      if (e == 2) {
        fm.dlog[1] = 0;
        fm.dlog[3] = 1;
        g->factors.push_back(std::move(fm));
        continue;
      }
      UnitGroup::Factor ff;
      ff.prime = 2;
      ff.kind = UnitGroup::Kind::five;
      ff.prime_power = pe;
      ff.generator = 5;
      ff.order = pe / 4;
      ff.dlog.assign(pe, -1);
      std::uint64_t pw = 1;
      for (std::uint64_t x = 0; x < ff.order; ++x) {
        fm.dlog[pw] = 0;
        ff.dlog[pw] = static_cast<std::int32_t>(x);
        fm.dlog[pe - pw] = 1;
        ff.dlog[pe - pw] = static_cast<std::int32_t>(x);
        pw = pw * 5 % pe;
      }
      g->factors.push_back(std::move(fm));
      g->factors.push_back(std::move(ff));
      continue;
    }
    UnitGroup::Factor f;
    f.prime = p;
    f.kind = UnitGroup::Kind::single;
    f.prime_power = pe;
    f.generator = primitive_root_odd(p) % pe;
    f.order = pe / p * (p - 1);
    f.dlog.assign(pe, -1);
    std::uint64_t pw = 1;
    for (std::uint64_t x = 0; x < f.order; ++x) {
      f.dlog[pw] = static_cast<std::int32_t>(x);
      pw = pw * f.generator % pe;
    }
    g->factors.push_back(std::move(f));
  }

  std::uint64_t L = 1;
  for (auto& f : g->factors) L = std::lcm(L, f.order);
  g->phase_order = L;
  g->roots.resize(L);
  for (std::uint64_t t = 0; t < L; ++t)
    g->roots[t] = unit_root(static_cast<std::int64_t>(t), static_cast<std::int64_t>(L));
  return g;
}

/*
 * A Dirichlet character mod q: one exponent per cyclic factor, with
 * chi(gen_i) = e(exps[i] / order_i). Values derive on demand from the
 * shared group tables; nothing stored per character is O(q).
 */
class DirichletCharacter {
 public:
  DirichletCharacter() : group_(make_unit_group(1)) { init(); }
  DirichletCharacter(std::shared_ptr<const UnitGroup> group,
                     std::vector<std::uint64_t> exps)
      : group_(std::move(group)), exps_(std::move(exps)) {
    if (exps_.size() != group_->factors.size())
      throw std::invalid_argument("DirichletCharacter: exponent count mismatch");
    init();
  }

  std::uint64_t modulus() const { return group_->modulus; }
  std::uint64_t conductor() const { return conductor_; }
  bool primitive() const { return conductor_ == group_->modulus; }
  bool principal() const { return conductor_ == 1; }
  const std::vector<std::uint64_t>& exponents() const { return exps_; }
  const UnitGroup& group() const { return *group_; }
  std::shared_ptr<const UnitGroup> group_ptr() const { return group_; }

  // index into the shared root table, or -1 when gcd(a, q) > 1
  std::int64_t phase_index(std::int64_t a) const {
    auto q = static_cast<std::int64_t>(group_->modulus);
    std::uint64_t r = static_cast<std::uint64_t>(((a % q) + q) % q);
    if (std::gcd(r, group_->modulus) != 1) return -1;
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const auto& f = group_->factors[i];
      auto x = static_cast<std::uint64_t>(f.dlog[r % f.prime_power]);
      idx = (idx + weights_[i] * x) % group_->phase_order;
    }
    return static_cast<std::int64_t>(idx);
  }

  cplx eval(std::int64_t a) const {
    std::int64_t idx = phase_index(a);
    return idx < 0 ? cplx{0.0, 0.0} : group_->roots[static_cast<std::size_t>(idx)];
  }

  std::vector<cplx> value_table() const {
    std::vector<cplx> v(group_->modulus);
    for (std::uint64_t a = 0; a < group_->modulus; ++a)
      v[a] = eval(static_cast<std::int64_t>(a));
    return v;
  }

  DirichletCharacter conjugate() const {
    std::vector<std::uint64_t> e(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i)
      e[i] = (group_->factors[i].order - exps_[i]) % group_->factors[i].order;
    return {group_, std::move(e)};
  }

 private:
  void init() {
    weights_.resize(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      const auto& f = group_->factors[i];
      exps_[i] %= f.order;
      weights_[i] = exps_[i] * (group_->phase_order / f.order) % group_->phase_order;
    }
    conductor_ = compute_conductor();
  }

  std::uint64_t compute_conductor() const {
    std::uint64_t cond = 1;
    std::uint64_t c_minus = 0, d_five = 1;
    bool has_two_part = false;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      const auto& f = group_->factors[i];
      std::uint64_t c = exps_[i];
      if (f.prime == 2) {
        has_two_part = true;
        if (f.kind == UnitGroup::Kind::five)
          d_five = f.order / std::gcd(c, f.order);   // gcd(0, m) = m
        else
          c_minus = c;
        continue;
      }
      std::uint64_t d = f.order / std::gcd(c, f.order);
      if (d == 1) continue;
      // smallest p^t with d | phi(p^t)
      std::uint64_t pt = f.prime, phi_pt = f.prime - 1;
      while (phi_pt % d != 0) {
        pt *= f.prime;
        phi_pt *= f.prime;
      }
      cond *= pt;
    }
    if (has_two_part) cond *= (d_five == 1) ? (c_minus ? 4 : 1) : 4 * d_five;
    return cond;
  }

  std::shared_ptr<const UnitGroup> group_;
  std::vector<std::uint64_t> exps_;
  std::vector<std::uint64_t> weights_;
  std::uint64_t conductor_ = 1;
};

constexpr std::uint64_t kMaxCharacterModulus = 10000;

// All phi(q) characters mod q, lexicographic in the exponent vector.
inline std::vector<DirichletCharacter> character_group(std::uint64_t q) {
  if (q > kMaxCharacterModulus)
    throw std::length_error("character_group: modulus exceeds 10^4");
  auto g = make_unit_group(q);
  std::vector<DirichletCharacter> out;
  std::vector<std::uint64_t> exps(g->factors.size(), 0);
  for (;;) {
    out.emplace_back(g, exps);
    if (exps.empty()) return out;
    std::size_t i = exps.size();
    for (;;) {
      --i;
      if (++exps[i] < g->factors[i].order) break;
      exps[i] = 0;
      if (i == 0) return out;
    }
  }
}

/*
 * The primitive character mod q1 = conductor(chi) that induces chi.
 * Generators are chosen consistently across levels of each prime, so an
 * exponent transfers as c * order'/order (an integer, by the conductor
 * condition).
 */
struct InducedBy {
  std::uint64_t conductor = 1;
  DirichletCharacter primitive;
};

inline InducedBy conductor_and_primitive(const DirichletCharacter& chi) {
  std::uint64_t q1 = chi.conductor();
  auto g1 = make_unit_group(q1);
  const UnitGroup& g = chi.group();
  std::vector<std::uint64_t> e1(g1->factors.size(), 0);
  for (std::size_t ti = 0; ti < g1->factors.size(); ++ti) {
    const auto& tf = g1->factors[ti];
    for (std::size_t si = 0; si < g.factors.size(); ++si) {
      const auto& sf = g.factors[si];
      if (sf.prime == tf.prime && sf.kind == tf.kind) {
        e1[ti] = chi.exponents()[si] * tf.order / sf.order;   // exact by conductor condition
        break;
      }
    }
  }
  DirichletCharacter chi1(g1, std::move(e1));
  return {q1, std::move(chi1)};
}

// tau(chi) = sum_{m=1..q} chi(m) e(m/q)
inline cplx gauss_sum(const DirichletCharacter& chi) {
  auto q = static_cast<std::int64_t>(chi.modulus());
  KahanCSum s;
  for (std::int64_t m = 1; m <= q; ++m) {
    cplx v = chi.eval(m);
    if (v != cplx{0.0, 0.0}) s.add(v * unit_root(m, q));
  }
  return s.value();
}

struct TwistReport {
  std::string identity;
  std::uint64_t q = 1;
  std::uint64_t q1 = 1;
  std::uint64_t q2 = 1;
  std::int64_t k = -1;              // -1: swept over k
  bool vanishing_case = false;      // gcd(q1,q2) > 1: direct side checked against 0
  double max_discrepancy = 0.0;
};

/*
 * Gauss-sum factorization:
 *   tau(conj chi) = mu(q2) conj(chi1)(q2) tau(conj chi1),  q2 = q/q1.
 * The right side is identically zero exactly where the sum must vanish
 * (q2 not squarefree, or (q1, q2) > 1), so one formula covers all cases.
 */
inline TwistReport verify_gauss_factorization(const DirichletCharacter& chi) {
  auto ind = conductor_and_primitive(chi);
  std::uint64_t q = chi.modulus(), q1 = ind.conductor, q2 = q / q1;
  cplx lhs = gauss_sum(chi.conjugate());
  cplx rhs = static_cast<double>(moebius_small(q2)) *
             std::conj(ind.primitive.eval(static_cast<std::int64_t>(q2))) *
             gauss_sum(ind.primitive.conjugate());
  TwistReport rep;
  rep.identity = "gauss_factorization";
  rep.q = q;
  rep.q1 = q1;
  rep.q2 = q2;
  rep.max_discrepancy = std::abs(lhs - rhs);
  return rep;
}

// Ramanujan sum by the closed form, standalone (no sieve tables).
inline std::int64_t ramanujan_closed(std::uint64_t q2, std::int64_t k) {
  if (q2 == 1) return 1;
  auto q2s = static_cast<std::int64_t>(q2);
  std::uint64_t ka = static_cast<std::uint64_t>(((k % q2s) + q2s) % q2s);
  std::uint64_t d = q2 / std::gcd(q2, ka);
  return moebius_small(d) * static_cast<std::int64_t>(phi_small(q2) / phi_small(d));
}

namespace detail {

// sum_{a=1}^{q} chi(a) e(+-ak/q)
inline cplx twist_direct(const DirichletCharacter& chi, std::int64_t k, bool negate_k) {
  auto q = static_cast<std::int64_t>(chi.modulus());
  KahanCSum s;
  for (std::int64_t a = 1; a <= q; ++a) {
    cplx v = chi.eval(a);
    if (v == cplx{0.0, 0.0}) continue;
    s.add(v * unit_root(negate_k ? -a * k : a * k, q));
  }
  return s.value();
}

}  // namespace detail

/*
 * Twist identity at one k, valid for (q1, q2) coprime:
 *   sum_a chi(a) e(ak/q) = conj(chi1)(k) tau(chi1) c_{q2}(k) chi1(q2)
 * together with the combined-coefficient form
 *   tau(conj chi)/phi(q) * sum_a chi(a) e(-ak/q)
 *     = q1/phi(q1) * mu((q2,k)) / phi(q2/(q2,k)) * conj(chi1)(k).
 * When (q1, q2) > 1 both right sides are structurally zero; the direct sum
 * provably vanishes for k = 0 and k coprime to q (not for arbitrary k), and
 * those are the cases this check accepts.
 */
inline TwistReport verify_twist_identity(const DirichletCharacter& chi, std::int64_t k) {
  auto ind = conductor_and_primitive(chi);
  std::uint64_t q = chi.modulus(), q1 = ind.conductor, q2 = q / q1;
  const DirichletCharacter& chi1 = ind.primitive;

  TwistReport rep;
  rep.identity = "twist_identity";
  rep.q = q;
  rep.q1 = q1;
  rep.q2 = q2;
  rep.k = k;

  cplx direct = detail::twist_direct(chi, k, false);

  if (std::gcd(q1, q2) != 1) {
    rep.vanishing_case = true;
    auto qs = static_cast<std::int64_t>(q);
    std::uint64_t kr = static_cast<std::uint64_t>(((k % qs) + qs) % qs);
    if (kr != 0 && std::gcd(kr, q) != 1)
      throw std::invalid_argument(
          "verify_twist_identity: (q1,q2) not coprime; vanishing is only asserted "
          "for k = 0 or k coprime to q");
    rep.max_discrepancy = std::abs(direct);
    return rep;
  }

  cplx rhs = std::conj(chi1.eval(k)) * gauss_sum(chi1) *
             static_cast<double>(ramanujan_closed(q2, k)) *
             chi1.eval(static_cast<std::int64_t>(q2));
  double d35 = std::abs(direct - rhs);

  // Combined coefficient. The printed form needs q2 squarefree (it folds
  // mu(q2) mu(q2/(q2,k)) into mu((q2,k))); for non-squarefree q2 the left
  // side vanishes with tau(conj chi) and is checked against zero.
  cplx lhs_combined = gauss_sum(chi.conjugate()) / static_cast<double>(phi_small(q)) *
                      detail::twist_direct(chi, k, true);
  cplx rhs_combined = 0.0;
  if (moebius_small(q2) != 0) {
    std::uint64_t g2 = 1;
    if (q2 > 1) {
      auto q2s = static_cast<std::int64_t>(q2);
      g2 = std::gcd(q2, static_cast<std::uint64_t>(((k % q2s) + q2s) % q2s));
    }
    rhs_combined = static_cast<double>(q1) / static_cast<double>(phi_small(q1)) *
                   (static_cast<double>(moebius_small(g2)) /
                    static_cast<double>(phi_small(q2 / g2))) *
                   std::conj(chi1.eval(k));
  }
  double d37 = std::abs(lhs_combined - rhs_combined);

  rep.max_discrepancy = std::max(d35, d37);
  return rep;
}

// Worst discrepancy over k: all k < q in the coprime case, k = 0 and units
// otherwise.
inline TwistReport verify_twist_identity_sweep(const DirichletCharacter& chi) {
  auto ind = conductor_and_primitive(chi);
  std::uint64_t q = chi.modulus(), q2 = q / ind.conductor;
  bool coprime = std::gcd(ind.conductor, q2) == 1;
  TwistReport worst;
  bool first = true;
  for (std::uint64_t k = 0; k < q; ++k) {
    if (!coprime && k != 0 && std::gcd(k, q) != 1) continue;
    TwistReport r = verify_twist_identity(chi, static_cast<std::int64_t>(k));
    if (first || r.max_discrepancy > worst.max_discrepancy) worst = r;
    first = false;
  }
  worst.k = -1;
  return worst;
}

// psi(x, chi) = sum_{k<=x} Lambda(k) chi(k)
inline cplx psi_chi(std::uint64_t x, const DirichletCharacter& chi, const SieveTables& t) {
  if (x > t.limit) throw std::length_error("psi_chi: x beyond sieve limit");
  KahanCSum s;
  for (std::uint64_t k = 2; k <= x; ++k) {
    std::uint32_t p = t.lambda_p[k];
    if (!p) continue;
    cplx v = chi.eval(static_cast<std::int64_t>(k));
    if (v != cplx{0.0, 0.0}) s.add(std::log(static_cast<double>(p)) * v);
  }
  return s.value();
}

// max over a partition of [1, N] into `pieces` intervals of |sum chi Lambda|
inline double interval_twisted_lambda_max(const DirichletCharacter& chi,
                                          std::uint64_t N, std::uint64_t pieces,
                                          const SieveTables& t) {
  if (N > t.limit)
    throw std::length_error("interval_twisted_lambda_max: N beyond sieve limit");
  if (pieces < 1)
    throw std::invalid_argument("interval_twisted_lambda_max: pieces must be >= 1");
  double best = 0.0;
  std::uint64_t lo = 0;
  for (std::uint64_t i = 1; i <= pieces; ++i) {
    std::uint64_t hi = N * i / pieces;
    KahanCSum s;
    for (std::uint64_t k = lo + 1; k <= hi; ++k) {
      std::uint32_t p = t.lambda_p[k];
      if (!p) continue;
      cplx v = chi.eval(static_cast<std::int64_t>(k));
      if (v != cplx{0.0, 0.0}) s.add(std::log(static_cast<double>(p)) * v);
    }
    best = std::max(best, std::abs(s.value()));
    lo = hi;
  }
  return best;
}

/*
 * Twisted digit sum (the Assumption-B building block):
 *   sum over k < 2^n, f(k) = 1, k + b = 0 (mod q0), of chi1(k + b),
 * by direct enumeration of the pattern.
 */
inline cplx twisted_digit_sum(const BitPattern& p, const DirichletCharacter& chi1,
                              std::int64_t q0, std::int64_t b) {
  if (q0 < 1) throw std::invalid_argument("twisted_digit_sum: q0 must be positive");
  if (std::gcd(static_cast<std::uint64_t>(q0), chi1.modulus()) != 1)
    throw std::invalid_argument("twisted_digit_sum: q0 must be coprime to the modulus");
  KahanCSum s;
  for (std::uint64_t k : enumerate_pattern(p)) {
    std::int64_t m = static_cast<std::int64_t>(k) + b;
    if (((m % q0) + q0) % q0 != 0) continue;
    cplx v = chi1.eval(m);
    if (v != cplx{0.0, 0.0}) s.add(v);
  }
  return s.value();
}

inline cplx twisted_digit_sum(const DigitConstraint& c, const DirichletCharacter& chi1,
                              std::int64_t q0, std::int64_t b) {
  return twisted_digit_sum(BitPattern::of(c), chi1, q0, b);
}

/*
 * The same sum through the spectral side:
 *   (N/q0) sum_{a0<q0} sum_{(a1,q1)=1} chihat1(a1) e(b(a0/q0 + a1/q1))
 *                                       fhat(a0/q0 + a1/q1)
 * with chihat1(a1) = (1/q1) sum_x chi1(x) e(-x a1/q1). Needs chi1 primitive
 * with odd modulus q1 > 1 (exactly then is chihat1 supported on units).
 */
inline cplx twisted_digit_sum_fourier(const BitPattern& p, const DirichletCharacter& chi1,
                                      std::int64_t q0, std::int64_t b) {
  auto q1 = static_cast<std::int64_t>(chi1.modulus());
  if (q1 <= 1 || q1 % 2 == 0)
    throw std::invalid_argument("twisted_digit_sum_fourier: modulus must be odd and > 1");
  if (!chi1.primitive())
    throw std::invalid_argument("twisted_digit_sum_fourier: character must be primitive");
  if (q0 < 1 || std::gcd(q0, q1) != 1)
    throw std::invalid_argument(
        "twisted_digit_sum_fourier: q0 must be positive and coprime to q1");

  std::vector<cplx> chihat(static_cast<std::size_t>(q1));
  for (std::int64_t a1 = 1; a1 < q1; ++a1) {
    if (std::gcd(a1, q1) != 1) continue;
    KahanCSum s;
    for (std::int64_t x = 0; x < q1; ++x) {
      cplx v = chi1.eval(x);
      if (v != cplx{0.0, 0.0}) s.add(v * unit_root(-x * a1, q1));
    }
    chihat[static_cast<std::size_t>(a1)] = s.value() / static_cast<double>(q1);
  }

  std::int64_t den = q0 * q1;
  std::int64_t br = ((b % den) + den) % den;
  KahanCSum total;
  for (std::int64_t a0 = 0; a0 < q0; ++a0)
    for (std::int64_t a1 = 1; a1 < q1; ++a1) {
      if (std::gcd(a1, q1) != 1) continue;
      std::int64_t num = (a0 * q1 + a1 * q0) % den;
      total.add(chihat[static_cast<std::size_t>(a1)] * unit_root(br * num, den) *
                fhat_fraction(num, den, p));
    }
  return std::ldexp(1.0, p.n) / static_cast<double>(q0) * total.value();
}

inline cplx twisted_digit_sum_fourier(const DigitConstraint& c,
                                      const DirichletCharacter& chi1,
                                      std::int64_t q0, std::int64_t b) {
  return twisted_digit_sum_fourier(BitPattern::of(c), chi1, q0, b);
}

// chi's CRT component on the 2-part / odd part of its modulus.
inline DirichletCharacter two_part_character(const DirichletCharacter& chi) {
  const UnitGroup& g = chi.group();
  std::uint64_t pe = 1;
  for (auto& [p, e] : g.factorization)
    if (p == 2)
      for (int i = 0; i < e; ++i) pe *= 2;
  auto g2 = make_unit_group(pe);
  std::vector<std::uint64_t> exps(g2->factors.size());
  std::size_t dst = 0;
  for (std::size_t i = 0; i < g.factors.size(); ++i)
    if (g.factors[i].prime == 2) exps[dst++] = chi.exponents()[i];
  return {g2, std::move(exps)};
}

inline DirichletCharacter odd_part_character(const DirichletCharacter& chi) {
  std::uint64_t q = chi.modulus();
  while (q % 2 == 0) q /= 2;
  auto godd = make_unit_group(q);
  const UnitGroup& g = chi.group();
  std::vector<std::uint64_t> exps(godd->factors.size());
  std::size_t dst = 0;
  for (std::size_t i = 0; i < g.factors.size(); ++i)
    if (g.factors[i].prime != 2) exps[dst++] = chi.exponents()[i];
  return {godd, std::move(exps)};
}

/*
 * Even-modulus route for the twisted digit sum, via the low-bit split.
 * For chi mod 2^nu * q1' (q1' > 1 odd, odd component primitive) and
 * k = z + 2^nu x:
 *
 *   sum = sum_{z<2^nu} chi0(b+z) chi1'(2^nu)
 *         * [ sum_{x<2^{n-nu}, x+b' = 0 (q0)} f_z(x) chi1'(x + b') ]
 *
 * where f_z is the pattern restricted past the low nu bits and b' solves
 * b' = (b+z) 2^{-nu} modulo both q0 and q1'. Inner sums go through the
 * odd-modulus spectral route, so this path shares nothing with the direct
 * enumeration it is tested against.
 */
inline cplx twisted_digit_sum_even_split(const BitPattern& p, const DirichletCharacter& chi,
                                         std::int64_t q0, std::int64_t b) {
  std::uint64_t q = chi.modulus();
  if (q % 2 != 0)
    throw std::invalid_argument("twisted_digit_sum_even_split: modulus must be even");
  int nu = std::countr_zero(q);
  std::uint64_t q1p = q >> nu;
  if (q1p == 1)
    throw std::invalid_argument(
        "twisted_digit_sum_even_split: modulus must not be a power of two");
  if (q0 < 1 || std::gcd(static_cast<std::uint64_t>(q0), q) != 1)
    throw std::invalid_argument(
        "twisted_digit_sum_even_split: q0 must be positive and coprime to the modulus");
  if (p.n - nu < 1)
    throw std::invalid_argument("twisted_digit_sum_even_split: nu leaves no high bits");

  DirichletCharacter chi0 = two_part_character(chi);
  DirichletCharacter chi1p = odd_part_character(chi);
  if (!chi1p.primitive())
    throw std::invalid_argument(
        "twisted_digit_sum_even_split: odd-part component must be primitive");

  std::int64_t pw2 = std::int64_t{1} << nu;
  auto q1s = static_cast<std::int64_t>(q1p);
  std::int64_t inv2_q0 = (q0 == 1) ? 0 : inv_mod(pw2, q0);
  std::int64_t inv2_q1 = inv_mod(pw2, q1s);
  cplx chi1p_at_2nu = chi1p.eval(pw2);

  KahanCSum total;
  for (std::int64_t z = 0; z < pw2; ++z) {
    cplx w0 = chi0.eval(b + z);
    if (w0 == cplx{0.0, 0.0}) continue;
    auto restricted = restrict_low(p, nu, static_cast<std::uint64_t>(z));
    if (restricted.empty) continue;
    std::int64_t u1 = ((b + z) % q1s + q1s) % q1s * inv2_q1 % q1s;
    std::int64_t bp;
    if (q0 == 1) {
      bp = u1;
    } else {
      std::int64_t u0 = ((b + z) % q0 + q0) % q0 * inv2_q0 % q0;
      std::int64_t m = q0 * q1s;
      bp = (u0 * q1s % m * inv_mod(q1s, q0) % m +
            u1 * q0 % m * inv_mod(q0, q1s) % m) % m;
    }
    total.add(w0 * chi1p_at_2nu *
              twisted_digit_sum_fourier(restricted.pattern, chi1p, q0, bp));
  }
  return total.value();
}

inline cplx twisted_digit_sum_even_split(const DigitConstraint& c,
                                         const DirichletCharacter& chi,
                                         std::int64_t q0, std::int64_t b) {
  return twisted_digit_sum_even_split(BitPattern::of(c), chi, q0, b);
}

}  // namespace digitprime
