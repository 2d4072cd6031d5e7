#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "digitprime/numthy.hpp"
#include "digitprime/spectra.hpp"
#include "helpers.hpp"

using namespace digitprime;
using digitprime::testing::dft_oracle;
using digitprime::testing::dft_oracle_fraction;
using digitprime::testing::random_constraint;

TEST_CASE("fhat closed form: fixed points") {
  auto c = make_constraint(8, {0, 3}, {1, 1});
  CHECK(fhat(0.0, c) == cplx{expectation(c), 0.0});

  // odd indicator at 1/4: the j = 1 cosine factor vanishes exactly
  auto codd = make_constraint(3, {0}, {1});
  CHECK(fhat(0.25, codd) == cplx{0.0, 0.0});
}

TEST_CASE("fhat equals the direct transform at random points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 6 + static_cast<int>(rng() % 9);   // up to 14
    auto c = random_constraint(rng, n, 1 + static_cast<int>(rng() % 3));
    double scale = expectation(c);
    for (int i = 0; i < 200; ++i) {
      double lam = uni(rng);
      CHECK(std::abs(fhat(lam, c) - dft_oracle(lam, c)) < 1e-10 * scale);
      // conjugate symmetry
      CHECK(std::abs(fhat(1.0 - lam, c) - std::conj(fhat(lam, c))) < 1e-12);
      // sup-norm bound
      CHECK(std::abs(fhat(lam, c)) <= scale * (1 + 1e-12));
    }
  }
}

TEST_CASE("fhat_fraction matches fhat and the rational oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_constraint(rng, 12, 2);
    for (std::int64_t q : {3, 5, 7, 64, 255})
      for (std::int64_t a = 0; a < q; ++a) {
        cplx exact = fhat_fraction(a, q, c);
        CHECK(std::abs(exact - dft_oracle_fraction(a, q, c)) < 1e-12);
        CHECK(std::abs(exact - fhat(static_cast<double>(a) / q, c)) < 1e-9);
      }
  }
}

TEST_CASE("dyadic grid: recursion equals the product formula") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    int n = 8 + static_cast<int>(rng() % 5);
    auto c = random_constraint(rng, n, 2);
    auto v = fhat_dyadic_values(BitPattern::of(c));
    auto q = static_cast<std::int64_t>(c.domain_size());
    for (std::int64_t k = 0; k < q; ++k)
      CHECK(std::abs(v[static_cast<std::size_t>(k)] - fhat_fraction(k, q, c)) < 1e-12);
  }
}

TEST_CASE("dyadic grid: odd-indicator support is exactly {0, 1/2}") {
  auto pts = fhat_all_dyadic(make_constraint(5, {0}, {1}));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == 0 || k == 16) {
      CHECK(pts[k].magnitude == 0.5);
    } else {
      CHECK(pts[k].magnitude == 0.0);
    }
    CHECK(pts[k].magnitude == std::abs(pts[k].value));
  }
}

TEST_CASE("dyadic grid: Parseval") {
  std::mt19937_64 rng(6);
  for (int n : {8, 12, 16}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto c = random_constraint(rng, n, 1 + static_cast<int>(rng() % 3));
      auto v = fhat_dyadic_values(BitPattern::of(c));
      KahanSum s;
      for (const cplx& z : v) s.add(std::norm(z));
      CHECK(std::abs(s.value() - expectation(c)) < 1e-10);
    }
  }
}

TEST_CASE("lemma 1: odd indicator evaluates to exactly 2") {
  auto rep = lemma1_check(make_constraint(10, {0}, {1}), 4.0);
  CHECK(rep.computed == 2.0);
  CHECK(rep.pass);
}

TEST_CASE("lemma 1: lower bound, oracle agreement, calibration") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    int n = 10 + static_cast<int>(rng() % 3);
    auto c = random_constraint(rng, n, 2);
    auto rep = lemma1_check(c, 4.0);
    CHECK(rep.computed >= 1.0);   // the k = 0 term alone contributes 1

    // independent direct-DFT oracle for the whole sum
    KahanSum oracle;
    auto q = static_cast<std::int64_t>(c.domain_size());
    for (std::int64_t k = 0; k < q; ++k)
      oracle.add(std::abs(dft_oracle_fraction(k, q, c)));
    CHECK(std::abs(rep.computed - std::ldexp(oracle.value(), c.set_size())) < 1e-9);
  }

  // random |A| = 4 constraints at n = 16 pass with C = 4 and report min C
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_constraint(rng, 16, 3);
    auto rep = lemma1_check(c, 4.0);
    CHECK(rep.pass);
    CHECK(rep.min_constant < 4.0);

    // summation stability: plain reversed-order accumulation agrees
    auto v = fhat_dyadic_values(BitPattern::of(c));
    double reversed = 0.0;
    for (std::size_t k = v.size(); k-- > 0;) reversed += std::abs(v[k]);
    CHECK(std::abs(rep.computed - std::ldexp(reversed, c.set_size())) < 1e-9);
  }

  auto vac = lemma1_check(make_constraint(6, {0, 1, 2, 3}, {1, 0, 1, 0}), 4.0);
  CHECK(!vac.flags.empty());
}

TEST_CASE("lemma 2: quadrature floor, convergence, summation stability") {
  auto c = make_constraint(8, {0}, {1});
  auto rep = lemma2_check(c, 4.0);
  CHECK(rep.gridsize == (1 << 12));
  double integral = std::ldexp(rep.computed, -c.r());
  CHECK(integral >= expectation(c) / static_cast<double>(rep.gridsize));

  auto doubled = lemma2_check(c, 4.0, 2 * rep.gridsize);
  CHECK(std::abs(doubled.computed - rep.computed) / rep.computed < 0.01);

  // fine grid as independent reference
  auto fine = lemma2_check(c, 4.0, 1 << 16);
  CHECK(std::abs(fine.computed - rep.computed) / fine.computed < 0.01);

  CHECK_THROWS_AS(lemma2_check(c, 4.0, 1 << 9), std::invalid_argument);
}

TEST_CASE("lemma 3: empty sum, monotonicity, oracle agreement") {
  auto c16 = make_constraint(16, {0}, {1});
  auto empty = lemma3_check(c16, 2, 4.0);
  CHECK(empty.computed == 0.0);
  CHECK(empty.pass);

  double prev = -1.0;
  for (std::int64_t Q = 2; Q <= 12; ++Q) {
    auto rep = lemma3_check(c16, Q, 4.0);
    CHECK(rep.computed >= prev);
    prev = rep.computed;
  }

  auto rep = lemma3_check(c16, 8, 4.0);
  KahanSum oracle;
  for (std::int64_t q = 3; q < 8; q += 2)
    for (std::int64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1) oracle.add(std::abs(dft_oracle_fraction(a, q, c16)));
  CHECK(std::abs(rep.computed - std::ldexp(oracle.value(), c16.r())) < 1e-9);
  CHECK(!rep.flags.empty());   // Q = 8 is far outside 2^{n/100}

  CHECK_THROWS_AS(lemma3_check(c16, 1 << 8, 4.0), std::length_error);
}

TEST_CASE("lemma 3: reversed-order recomputation agrees") {
  auto c = make_constraint(14, {0, 5}, {1, 1});
  auto rep = lemma3_check(c, 10, 4.0);
  double reversed = 0.0;   // plain reversed-order accumulation
  for (std::int64_t q = 9; q >= 3; q -= 2)
    for (std::int64_t a = q - 1; a >= 1; --a)
      if (std::gcd(a, q) == 1) reversed += std::abs(fhat_fraction(a, q, c));
  CHECK(std::abs(rep.computed - std::ldexp(reversed, c.r())) < 1e-9);
}

TEST_CASE("lemma 4: frozen value, symmetry, regime flag") {
  auto c25 = make_constraint(25, {0}, {1});
  auto rep = lemma4_check(c25, 3, 1);
  // 2^r |fhat(1/3)| = 2^{r-|A|} prod_{j=1}^{24} |cos(pi 2^j/3)| = 2^{-1} 2^{-24}
  CHECK(rep.computed == doctest::Approx(std::ldexp(1.0, -25)).epsilon(1e-12));
  CHECK(rep.pass);
  CHECK(rep.flags.empty());   // q = 3 < 25^{2.5}

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_constraint(rng, 12, 2);
    for (std::int64_t q : {3, 5, 9, 15}) {
      auto a = static_cast<std::int64_t>(1 + rng() % (q - 1));
      if (std::gcd(a, q) != 1) continue;
      auto r1 = lemma4_check(c, q, a);
      auto r2 = lemma4_check(c, q, q - a);
      CHECK(r1.computed == doctest::Approx(r2.computed).epsilon(1e-12));
      CHECK(r1.computed <= 1.0);
    }
  }

  CHECK_THROWS_AS(lemma4_check(c25, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(lemma4_check(c25, 9, 3), std::invalid_argument);
}

TEST_CASE("kappa bound: base cases and certification at n = 6") {
  auto c6 = make_constraint(6, {0}, {1});
  CHECK(kappa_bound(c6, 1) == 0.0);
  CHECK_THROWS_AS(kappa_bound(c6, 6), std::invalid_argument);

  // 11 odd multiples of 3 below 64; deviation vs expected 32/3
  std::uint64_t count = 0;
  for (std::uint64_t k = 0; k < 64; k += 3)
    if (f_eval(k, c6)) ++count;
  CHECK(count == 11);
  double actual = std::abs(static_cast<double>(count) - expectation(c6) * 64 / 3.0);
  double normalized = actual / (64 * expectation(c6));
  CHECK(kappa_bound(c6, 3) >= normalized - 1e-12);
}

TEST_CASE("exponential sum over Lambda") {
  auto t = build_sieve(1 << 14);
  CHECK(std::abs(exp_sum_lambda(0.0, 1000, t) - cplx{chebyshev_psi(1000, t), 0.0}) < 1e-9);

  double expected = 3 * std::log(2.0) - (2 * std::log(3.0) + std::log(5.0) + std::log(7.0));
  cplx s_half = exp_sum_lambda(0.5, 10, t);
  CHECK(s_half.real() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s_half.imag() == doctest::Approx(0.0));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double psi = chebyshev_psi(10000, t);
  for (int i = 0; i < 20; ++i) {
    double alpha = uni(rng);
    CHECK(std::abs(exp_sum_lambda(alpha, 10000, t)) <= psi + 1e-9);
    CHECK(std::abs(exp_sum_lambda(alpha, 10000, t) -
                   std::conj(exp_sum_lambda(1.0 - alpha, 10000, t))) < 1e-6);
  }
  CHECK_THROWS_AS(exp_sum_lambda(0.1, t.limit + 1, t), std::length_error);
}

TEST_CASE("dyadic grid is bit-identical for any worker count") {
  // n = 17 so the top expansion levels actually cross the parallel threshold
  auto c = make_constraint(17, {0, 4, 9}, {1, 0, 1});
  setenv("DIGITPRIME_THREADS", "1", 1);
  auto serial = fhat_dyadic_values(BitPattern::of(c));
  setenv("DIGITPRIME_THREADS", "4", 1);
  auto threaded = fhat_dyadic_values(BitPattern::of(c));
  unsetenv("DIGITPRIME_THREADS");
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t k = 0; k < serial.size(); ++k) CHECK(serial[k] == threaded[k]);
}

TEST_CASE("power-of-two FFT against the direct transform") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<cplx> v(64);
  for (auto& z : v) z = {uni(rng), uni(rng)};
  auto w = v;
  fft_pow2(w, +1);
  for (std::size_t j = 0; j < v.size(); ++j) {
    KahanCSum direct;
    for (std::size_t k = 0; k < v.size(); ++k)
      direct.add(v[k] * unit_root(static_cast<std::int64_t>(j * k), 64));
    CHECK(std::abs(w[j] - direct.value()) < 1e-10);
  }
  std::vector<cplx> bad(63);
  CHECK_THROWS_AS(fft_pow2(bad, +1), std::invalid_argument);
}
