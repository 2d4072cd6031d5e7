#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "digitprime/util.hpp"

namespace digitprime {

/*
 * Arithmetic-function tables up to a limit, built by a linear sieve.
 * Lambda is stored combinatorially: lambda_p[k] = p when k is a power of the
 * prime p, else 0; log p enters in double precision only at summation time.
 */
struct SieveTables {
  std::uint64_t limit = 0;
  std::vector<std::uint32_t> spf;        // smallest prime factor, spf[1] = 1
  std::vector<std::uint32_t> lambda_p;   // p if k = p^m, else 0
  std::vector<std::int8_t> mu;
  std::vector<std::uint32_t> phi;
  std::vector<std::uint32_t> primes;

  double lambda(std::uint64_t k) const {
    std::uint32_t p = lambda_p[k];
    return p ? std::log(static_cast<double>(p)) : 0.0;
  }
  bool is_prime(std::uint64_t k) const { return k >= 2 && spf[k] == k; }
  bool is_squarefree(std::uint64_t k) const { return mu[k] != 0; }
};

inline SieveTables build_sieve(std::uint64_t limit) {
  if (limit > (std::uint64_t{1} << 30))
    throw std::length_error("build_sieve: limit exceeds 2^30");
  if (limit < 1) limit = 1;

  SieveTables t;
  t.limit = limit;
  t.spf.assign(limit + 1, 0);
  t.lambda_p.assign(limit + 1, 0);
  t.mu.assign(limit + 1, 0);
  t.phi.assign(limit + 1, 0);
  t.spf[1] = 1;
  t.mu[1] = 1;
  t.phi[1] = 1;

  for (std::uint64_t k = 2; k <= limit; ++k) {
    if (t.spf[k] == 0) {
      t.spf[k] = static_cast<std::uint32_t>(k);
      t.mu[k] = -1;
      t.phi[k] = static_cast<std::uint32_t>(k - 1);
      t.primes.push_back(static_cast<std::uint32_t>(k));
    }
    for (std::uint32_t p : t.primes) {
      if (p > t.spf[k] || p * k > limit) break;
      std::uint64_t kp = p * k;
      t.spf[kp] = p;
      if (k % p == 0) {
        t.mu[kp] = 0;
        t.phi[kp] = t.phi[k] * p;
        break;   // keep the loop at p <= spf(k)
      }
      t.mu[kp] = static_cast<std::int8_t>(-t.mu[k]);
      t.phi[kp] = t.phi[k] * (p - 1);
    }
  }

  for (std::uint32_t p : t.primes)
    for (std::uint64_t q = p; q <= limit; q *= p) {
      t.lambda_p[q] = p;
      if (q > limit / p) break;
    }
  return t;
}

// psi(x) = sum_{k<=x} Lambda(k), ascending k, compensated.
inline double chebyshev_psi(std::uint64_t x, const SieveTables& t) {
  if (x > t.limit) throw std::length_error("chebyshev_psi: x beyond sieve limit");
  KahanSum s;
  for (std::uint64_t k = 2; k <= x; ++k)
    if (t.lambda_p[k]) s.add(std::log(static_cast<double>(t.lambda_p[k])));
  return s.value();
}

/*
 * Ramanujan sum c_q(k) by the closed form mu(q/(q,k)) * phi(q) / phi(q/(q,k)).
 * Integer-exact; the exponential-sum definition is kept in tests as oracle.
 */
inline std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t k, const SieveTables& t) {
  if (q < 1 || q > t.limit)
    throw std::length_error("ramanujan_sum: q beyond sieve limit");
  std::uint64_t ka = static_cast<std::uint64_t>(std::llabs(k)) % q;
  std::uint64_t g = std::gcd(q, ka);   // gcd(q, 0) = q handles k = 0
  std::uint64_t d = q / g;
  return static_cast<std::int64_t>(t.mu[d]) *
         static_cast<std::int64_t>(t.phi[q] / t.phi[d]);
}

// Point a/q on the unit circle, canonical representative in [0, 1).
struct ReducedFraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const ReducedFraction&, const ReducedFraction&) = default;
};

inline ReducedFraction reduce_fraction(std::int64_t a, std::int64_t q) {
  if (q <= 0) throw std::invalid_argument("reduce_fraction: q must be positive");
  a %= q;
  if (a < 0) a += q;
  std::int64_t g = std::gcd(a, q);
  if (g == 0) g = q;          // a == 0
  return {a / g, q / g};
}

// All a/q with q < Q, q odd (and squarefree when asked), 1 <= a < q,
// gcd(a,q) = 1, ascending by (q, a).
inline std::vector<ReducedFraction> farey_odd_squarefree(
    std::uint64_t Q, const SieveTables& t, bool require_squarefree = true) {
  if (Q > t.limit + 1)
    throw std::length_error("farey_odd_squarefree: Q beyond sieve limit");
  std::vector<ReducedFraction> out;
  for (std::uint64_t q = 3; q < Q; q += 2) {
    if (require_squarefree && !t.is_squarefree(q)) continue;
    for (std::uint64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1)
        out.push_back({static_cast<std::int64_t>(a), static_cast<std::int64_t>(q)});
  }
  return out;
}

// Trial-division factorization for small moduli (character machinery).
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t m) {
  std::vector<std::pair<std::uint64_t, int>> f;
  for (std::uint64_t p = 2; p * p <= m; p == 2 ? p = 3 : p += 2) {
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) m /= p, ++e;
    f.emplace_back(p, e);
  }
  if (m > 1) f.emplace_back(m, 1);
  return f;
}

inline std::int64_t moebius_small(std::uint64_t m) {
  std::int64_t mu = 1;
  for (auto& [p, e] : factorize(m)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline std::uint64_t phi_small(std::uint64_t m) {
  std::uint64_t r = m;
  for (auto& [p, e] : factorize(m)) r -= r / p;
  return r;
}

}  // namespace digitprime
