#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "digitprime/util.hpp"

namespace digitprime {

/*
 * A set of prescribed binary digits: bit positions j_0 < j_1 < ... < j_r
 * inside [0, n) together with the bit value assigned at each position.
 * Position 0 is always present with value 1 (the indicator only ever has to
 * capture odd numbers), inserted silently when the caller omits it.
 *
 * Conventions used throughout: N = 2^n, |A| = r + 1, rho = |A|/n,
 * E[f] = 2^{-|A|}.
 */
struct DigitConstraint {
  int n = 0;
  std::vector<int> positions;     // strictly increasing, positions[0] == 0
  std::vector<int> assignments;   // aligned with positions, values in {0,1}

  std::uint64_t domain_size() const { return std::uint64_t{1} << n; }
  int set_size() const { return static_cast<int>(positions.size()); }   // |A|
  int r() const { return set_size() - 1; }
  double rho() const { return static_cast<double>(set_size()) / n; }

  std::uint64_t fixed_mask() const {
    std::uint64_t m = 0;
    for (int j : positions) m |= std::uint64_t{1} << j;
    return m;
  }
  std::uint64_t fixed_value() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
      if (assignments[i]) v |= std::uint64_t{1} << positions[i];
    return v;
  }
};

constexpr int kMaxConstraintBits = 30;   // keeps N = 2^n and all sums in 64 bits
constexpr int kMaxFreeBits = 26;         // enumeration size guard

inline DigitConstraint make_constraint(int n, std::vector<int> positions,
                                       std::vector<int> assignments) {
  if (n < 1) throw std::invalid_argument("make_constraint: n must be positive");
  if (n > kMaxConstraintBits)
    throw std::length_error("make_constraint: n exceeds the desk-scale cap of 30");
  if (positions.size() != assignments.size())
    throw std::invalid_argument("make_constraint: positions/assignments length mismatch");

  std::vector<std::pair<int, int>> entries;
  entries.reserve(positions.size() + 1);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    int j = positions[i], a = assignments[i];
    if (j < 0 || j >= n)
      throw std::invalid_argument("make_constraint: position out of [0, n)");
    if (a != 0 && a != 1)
      throw std::invalid_argument("make_constraint: assignments must be bits");
    entries.emplace_back(j, a);
  }
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].first == entries[i - 1].first)
      throw std::invalid_argument("make_constraint: duplicate position");

  if (entries.empty() || entries.front().first != 0)
    entries.insert(entries.begin(), {0, 1});
  else if (entries.front().second != 1)
    throw std::invalid_argument(
        "make_constraint: position 0 must be assigned 1 (odd numbers only)");

  DigitConstraint c;
  c.n = n;
  for (auto& [j, a] : entries) {
    c.positions.push_back(j);
    c.assignments.push_back(a);
  }
  return c;
}

inline int f_eval(std::uint64_t x, const DigitConstraint& c) {
  if (x >= c.domain_size())
    throw std::invalid_argument("f_eval: x out of [0, 2^n)");
  return (x & c.fixed_mask()) == c.fixed_value() ? 1 : 0;
}

// |{x < 2^n : f(x) = 1}| = 2^{n - |A|}
inline std::uint64_t count_constrained(const DigitConstraint& c) {
  return std::uint64_t{1} << (c.n - c.set_size());
}

// E[f] = 2^{-|A|}
inline double expectation(const DigitConstraint& c) {
  return std::ldexp(1.0, -c.set_size());
}

// Ascending list of all constrained integers, built by spreading a free-bit
// counter over the unconstrained positions.
inline std::vector<std::uint64_t> enumerate_constrained(const DigitConstraint& c) {
  int free_bits = c.n - c.set_size();
  if (free_bits > kMaxFreeBits)
    throw std::length_error("enumerate_constrained: more than 26 free bits");

  std::vector<int> free_pos;
  free_pos.reserve(free_bits);
  std::uint64_t mask = c.fixed_mask();
  for (int j = 0; j < c.n; ++j)
    if (!(mask >> j & 1)) free_pos.push_back(j);

  std::uint64_t base = c.fixed_value();
  std::vector<std::uint64_t> out;
  out.reserve(std::uint64_t{1} << free_bits);
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << free_bits); ++t) {
    std::uint64_t x = base;
    for (int b = 0; b < free_bits; ++b)
      if (t >> b & 1) x |= std::uint64_t{1} << free_pos[b];
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/*
 * Generalized digit pattern: fix the bits under `mask` to `value`, with no
 * forced-oddness normalization. DigitConstraint is the special case with
 * bit 0 fixed to 1. The spectral product formula and the twisted-sum
 * machinery operate on this shape; restricting a constraint to the high
 * bits (the z-split of an even-modulus twist) lands outside DigitConstraint
 * but stays inside BitPattern.
 */
struct BitPattern {
  int n = 0;
  std::uint64_t mask = 0;
  std::uint64_t value = 0;

  std::uint64_t domain_size() const { return std::uint64_t{1} << n; }
  int fixed_count() const { return std::popcount(mask); }
  bool matches(std::uint64_t x) const { return (x & mask) == value; }
  std::uint64_t count() const { return std::uint64_t{1} << (n - fixed_count()); }
  double density() const { return std::ldexp(1.0, -fixed_count()); }

  static BitPattern of(const DigitConstraint& c) {
    return {c.n, c.fixed_mask(), c.fixed_value()};
  }
};

// Restriction x -> f(z + 2^shift x), an (n - shift)-bit pattern. Empty
// (identically zero) iff z contradicts a fixed low bit.
struct PatternRestriction {
  BitPattern pattern;
  bool empty = false;
};

inline PatternRestriction restrict_low(const BitPattern& p, int shift, std::uint64_t z) {
  std::uint64_t low = (std::uint64_t{1} << shift) - 1;
  if (((z ^ p.value) & p.mask & low) != 0) return {{}, true};
  return {{p.n - shift, p.mask >> shift, p.value >> shift}, false};
}

inline std::vector<std::uint64_t> enumerate_pattern(const BitPattern& p) {
  int free_bits = p.n - p.fixed_count();
  if (free_bits > kMaxFreeBits)
    throw std::length_error("enumerate_pattern: more than 26 free bits");
  std::vector<int> free_pos;
  for (int j = 0; j < p.n; ++j)
    if (!(p.mask >> j & 1)) free_pos.push_back(j);
  std::vector<std::uint64_t> out;
  out.reserve(std::uint64_t{1} << free_bits);
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << free_bits); ++t) {
    std::uint64_t x = p.value;
    for (int b = 0; b < free_bits; ++b)
      if (t >> b & 1) x |= std::uint64_t{1} << free_pos[b];
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Text form "n=<int>;A=<j:alpha,j:alpha,...>" used by the CLI and reports.
inline std::string format_constraint(const DigitConstraint& c) {
  std::ostringstream os;
  os << "n=" << c.n << ";A=";
  for (std::size_t i = 0; i < c.positions.size(); ++i) {
    if (i) os << ',';
    os << c.positions[i] << ':' << c.assignments[i];
  }
  return os.str();
}

// Parses the "j:alpha,j:alpha,..." list (the part after "A=").
inline DigitConstraint parse_constraint_list(int n, const std::string& list) {
  std::vector<int> pos, asg;
  if (!list.empty()) {
    std::istringstream is(list);
    std::string item;
    while (std::getline(is, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("constraint list: expected j:alpha entries");
      try {
        pos.push_back(std::stoi(item.substr(0, colon)));
        asg.push_back(std::stoi(item.substr(colon + 1)));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("constraint list: malformed integer in \"" + item + "\"");
      }
    }
  }
  return make_constraint(n, std::move(pos), std::move(asg));
}

inline DigitConstraint parse_constraint(const std::string& text) {
  auto semi = text.find(';');
  if (text.rfind("n=", 0) != 0 || semi == std::string::npos ||
      text.compare(semi + 1, 2, "A=") != 0)
    throw std::invalid_argument("constraint: expected \"n=<int>;A=<j:alpha,...>\"");
  int n = 0;
  try {
    n = std::stoi(text.substr(2, semi - 2));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("constraint: bad n field");
  }
  return parse_constraint_list(n, text.substr(semi + 3));
}

}  // namespace digitprime
