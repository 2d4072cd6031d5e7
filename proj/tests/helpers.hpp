#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "digitprime/bitconstraint.hpp"
#include "digitprime/util.hpp"

namespace digitprime::testing {

// Long-double direct transform over the pattern's support: the brute-force
// oracle the product formula is checked against. Deliberately shares
// nothing with fhat()'s factorized evaluation.
inline cplx dft_oracle(double lambda, const BitPattern& p) {
  constexpr long double two_pi_l = 6.283185307179586476925286766559005768L;
  long double re = 0.0L, im = 0.0L;
  for (std::uint64_t x = 0; x < p.domain_size(); ++x) {
    if (!p.matches(x)) continue;
    long double t = static_cast<long double>(lambda) * static_cast<long double>(x);
    t -= std::floor(static_cast<double>(t));
    re += std::cos(static_cast<double>(two_pi_l * t));
    im += std::sin(static_cast<double>(two_pi_l * t));
  }
  long double scale = std::ldexp(1.0L, -p.n);
  return {static_cast<double>(re * scale), static_cast<double>(im * scale)};
}

inline cplx dft_oracle(double lambda, const DigitConstraint& c) {
  return dft_oracle(lambda, BitPattern::of(c));
}

// Same oracle at an exact rational a/q (integer angle reduction).
inline cplx dft_oracle_fraction(std::int64_t a, std::int64_t q, const BitPattern& p) {
  constexpr long double two_pi_l = 6.283185307179586476925286766559005768L;
  a = ((a % q) + q) % q;
  long double re = 0.0L, im = 0.0L;
  for (std::uint64_t x = 0; x < p.domain_size(); ++x) {
    if (!p.matches(x)) continue;
    std::int64_t t = static_cast<std::int64_t>(x % static_cast<std::uint64_t>(q)) * a % q;
    long double ang = two_pi_l * static_cast<long double>(t) / static_cast<long double>(q);
    re += std::cos(static_cast<double>(ang));
    im += std::sin(static_cast<double>(ang));
  }
  long double scale = std::ldexp(1.0L, -p.n);
  return {static_cast<double>(re * scale), static_cast<double>(im * scale)};
}

inline cplx dft_oracle_fraction(std::int64_t a, std::int64_t q, const DigitConstraint& c) {
  return dft_oracle_fraction(a, q, BitPattern::of(c));
}

// Random constraint with |A| = 1 + extra positions, position 0 always fixed.
inline DigitConstraint random_constraint(std::mt19937_64& rng, int n, int extra) {
  std::vector<int> pos{0}, asg{1};
  while (static_cast<int>(pos.size()) < 1 + extra) {
    int j = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    bool dup = false;
    for (int p : pos) dup |= (p == j);
    if (!dup) {
      pos.push_back(j);
      asg.push_back(static_cast<int>(rng() % 2));
    }
  }
  return make_constraint(n, pos, asg);
}

}  // namespace digitprime::testing
