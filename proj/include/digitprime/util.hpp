#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace digitprime {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/*
 * Compensated (Kahan) accumulator. All long oscillatory sums in this
 * library are accumulated in a fixed (ascending-index) order through one
 * of these, so results are deterministic and stable to ~1 ulp per term.
 */
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct KahanCSum {
  KahanSum re, im;

  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

/*
 * e(num/den) = exp(2*pi*i*num/den) for an exact rational angle.
 * Quarter-circle values come out bit-exact ({1,-1,+-i}); this is what makes
 * structurally-zero spectrum samples compute to exactly zero.
 */
inline cplx unit_root(std::int64_t num, std::int64_t den) {
  num %= den;
  if (num < 0) num += den;
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  switch (den) {
    case 1: return {1.0, 0.0};
    case 2: return {-1.0, 0.0};
    case 4: return num == 1 ? cplx{0.0, 1.0} : cplx{0.0, -1.0};
    default: break;
  }
  double theta = two_pi * (static_cast<double>(num) / static_cast<double>(den));
  return {std::cos(theta), std::sin(theta)};
}

// e(t) for real t, reduced mod 1 first so large arguments keep full precision.
inline cplx unit_angle(double t) {
  double f = t - std::floor(t);
  if (f == 0.0) return {1.0, 0.0};
  if (f == 0.5) return {-1.0, 0.0};
  if (f == 0.25) return {0.0, 1.0};
  if (f == 0.75) return {0.0, -1.0};
  double theta = two_pi * f;
  return {std::cos(theta), std::sin(theta)};
}

inline bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

// Worker count for data-parallel loops: hardware concurrency capped by the
// DIGITPRIME_THREADS environment variable (<=0 or unset means no cap).
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("DIGITPRIME_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return hw;
}

/*
 * Runs fn(begin, end) over a fixed partition of [0, total). The partition
 * depends only on `total`, never on the thread count, and each block is a
 * pure element-wise job, so results are identical for any DIGITPRIME_THREADS.
 */
template <typename Fn>
void parallel_blocks(std::size_t total, Fn&& fn) {
  constexpr std::size_t kBlock = 1u << 14;
  unsigned workers = worker_count();
  if (workers <= 1 || total <= kBlock) {
    fn(std::size_t{0}, total);
    return;
  }
  std::size_t nblocks = (total + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      std::size_t lo = b * kBlock;
      std::size_t hi = std::min(total, lo + kBlock);
      fn(lo, hi);
    }
  };
  std::vector<std::thread> pool;
  unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, nblocks));
  pool.reserve(spawn);
  for (unsigned i = 1; i < spawn; ++i) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace digitprime
