#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geomprod/errors.hpp"

namespace geomprod {

/// A finite, non-empty set of distinct positive integers, stored sorted.
/// Each element is a component order k; the set picks one geometric sequence.
class IndexSet {
 public:
  /// Largest base we are willing to expand into 2^n - 1 subsets.
  static constexpr std::size_t max_base_size = 20;

  explicit IndexSet(std::vector<int> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw InvalidArgument("index set must be non-empty");
    std::sort(elements_.begin(), elements_.end());
    if (elements_.front() < 1) throw InvalidArgument("index set elements must be >= 1");
    if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
      throw InvalidArgument("index set elements must be distinct");
  }

  IndexSet(std::initializer_list<int> elements) : IndexSet(std::vector<int>(elements)) {}

  /// Parses "2,4" (whitespace around items tolerated).
  static IndexSet parse(std::string_view text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      auto item = text.substr(pos, comma - pos);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      int value = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
        throw InvalidArgument("cannot parse index set '" + std::string(text) + "'");
      out.push_back(value);
      pos = comma + 1;
    }
    return IndexSet(std::move(out));
  }

  std::span<const int> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  int max() const noexcept { return elements_.back(); }

  bool contains(int k) const {
    return std::binary_search(elements_.begin(), elements_.end(), k);
  }

  bool all_even() const {
    return std::all_of(elements_.begin(), elements_.end(), [](int k) { return k % 2 == 0; });
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(elements_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

  /// Cardinality first, then lexicographic: the family order used everywhere.
  friend std::strong_ordering operator<=>(const IndexSet& a, const IndexSet& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.elements_.begin(), a.elements_.end(),
                                                  b.elements_.begin(), b.elements_.end());
  }

 private:
  std::vector<int> elements_;
};

/// All non-empty subsets of a base set, cardinality-major then lexicographic.
struct SubsetFamily {
  IndexSet base;
  std::vector<IndexSet> members;
};

inline SubsetFamily enumerate_subsets(const IndexSet& base) {
  const auto n = base.size();
  if (n > IndexSet::max_base_size)
    throw InvalidArgument("base set too large to enumerate (" + std::to_string(n) + " elements)");
  const auto elems = base.elements();

  std::vector<IndexSet> members;
  members.reserve((std::size_t{1} << n) - 1);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i)) subset.push_back(elems[i]);
    members.emplace_back(std::move(subset));
  }
  std::sort(members.begin(), members.end());
  return {base, std::move(members)};
}

/// Exact binomial coefficient C(n, k); throws Overflow past 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; reduce by the gcd first
    // so the intermediate product overflows only when the result itself would.
    std::uint64_t numerator = n - k + i;
    std::uint64_t divisor = i;
    const std::uint64_t g1 = std::gcd(result, divisor);
    result /= g1;
    divisor /= g1;
    numerator /= divisor;
    if (__builtin_mul_overflow(result, numerator, &result))
      throw Overflow("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                     ") exceeds 64-bit range");
  }
  return result;
}

/// Exponent of the n-th factor of a product over an m-element index set:
/// the number of compositions of n into m positive parts, C(n-1, m-1).
inline std::uint64_t multiplicity(int n, int m) {
  if (n < 1 || m < 1) throw InvalidArgument("multiplicity requires n >= 1 and m >= 1");
  if (n < m) return 0;
  return binomial(static_cast<std::uint64_t>(n - 1), static_cast<std::uint64_t>(m - 1));
}

/// ln C(n-1, m-1) through log-gamma; usable far beyond the exact range.
inline double log_multiplicity(int n, int m) {
  if (n < 1 || m < 1) throw InvalidArgument("multiplicity requires n >= 1 and m >= 1");
  if (n < m) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n)) - std::lgamma(static_cast<double>(m)) -
         std::lgamma(static_cast<double>(n - m + 1));
}

/// Weight carried into log-space accumulation. When the exact count fits in
/// 64 bits, `value` holds it; otherwise only `log_value` is meaningful.
struct MultiplicityWeight {
  bool exact;
  double value;
  double log_value;
};

inline MultiplicityWeight multiplicity_weight(int n, int m) {
  try {
    const auto w = multiplicity(n, m);
    return {true, static_cast<double>(w), std::log(static_cast<double>(w))};
  } catch (const Overflow&) {
    return {false, std::numeric_limits<double>::infinity(), log_multiplicity(n, m)};
  }
}

/// Independent oracle for multiplicity(): walks every m-tuple of positive
/// integers with partial sums below n and counts those summing to n.
inline std::uint64_t compositions_bruteforce(int n, int m) {
  if (n < 1 || m < 1) throw InvalidArgument("compositions_bruteforce requires n, m >= 1");
  if (n > 30 || m > 6)
    throw InvalidArgument("compositions_bruteforce limited to n <= 30, m <= 6");

  std::uint64_t count = 0;
  std::function<void(int, int)> walk = [&](int parts_left, int remaining) {
    if (parts_left == 0) {
      if (remaining == 0) ++count;
      return;
    }
    for (int part = 1; part <= remaining; ++part) walk(parts_left - 1, remaining - part);
  };
  walk(m, n);
  return count;
}

/// Multiplicity-weighted number of f-factors over the given members, for
/// product index n running from |S| to n_max.
inline std::uint64_t factor_count(std::span<const IndexSet> members, int n_max) {
  std::uint64_t total = 0;
  for (const auto& s : members) {
    const int m = static_cast<int>(s.size());
    if (n_max < m)
      throw InvalidArgument("n_max = " + std::to_string(n_max) + " is below |S| = " +
                            std::to_string(m) + " for S = " + s.to_string());
    for (int n = m; n <= n_max; ++n) {
      if (__builtin_add_overflow(total, multiplicity(n, m), &total))
        throw Overflow("factor count exceeds 64-bit range");
    }
  }
  return total;
}

inline std::uint64_t factor_count(const IndexSet& base, int n_max) {
  const auto family = enumerate_subsets(base);
  return factor_count(family.members, n_max);
}

}  // namespace geomprod
