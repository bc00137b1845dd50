#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string_view>
#include <string>
#include <vector>

#include "geomprod/combinatorics.hpp"
#include "geomprod/compensated_sum.hpp"
#include "geomprod/errors.hpp"

namespace geomprod {

/// Anything that can be sampled: f(x) -> double, normalized so f(0) = 1.
template <typename F>
concept FunctionSource = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

/// A source that knows ln f directly. Lets the estimator skip the exp/log
/// round trip, which costs relative precision on small exponents.
template <typename F>
concept LogFunctionSource = FunctionSource<F> && requires(const F& f, double x) {
  { f.log(x) } -> std::convertible_to<double>;
};

/// A source defined only on [domain_min(), domain_max()], e.g. sampled data.
template <typename F>
concept BoundedFunctionSource = FunctionSource<F> && requires(const F& f) {
  { f.domain_min() } -> std::convertible_to<double>;
  { f.domain_max() } -> std::convertible_to<double>;
};

enum class Parity { all, even_only };

inline const char* to_string(Parity p) { return p == Parity::all ? "all" : "even"; }

inline Parity parse_parity(std::string_view text) {
  if (text == "all") return Parity::all;
  if (text == "even" || text == "even-only" || text == "even_only") return Parity::even_only;
  throw InvalidArgument("unknown parity '" + std::string(text) + "' (expected all|even)");
}

/// Estimator parameters: ratio r > 1, truncation n_max of the product index,
/// the base set whose non-empty subsets form the family, and parity mode.
struct GmpConfig {
  double r;
  int n_max;
  IndexSet base;
  Parity parity = Parity::all;

  void validate() const {
    if (!(r > 1.0) || !std::isfinite(r))
      throw InvalidArgument("ratio r must be finite and > 1, got " + format_double(r));
    if (n_max < static_cast<int>(base.size()))
      throw InvalidArgument("n_max = " + std::to_string(n_max) + " must be >= |base| = " +
                            std::to_string(base.size()));
    if (parity == Parity::even_only && !base.all_even())
      throw InvalidArgument("even parity requires an all-even base, got " + base.to_string());
  }
};

/// Truncation coupled to the ratio so that r^n_max ~ cutoff: the last sample
/// of every sequence sits a factor `cutoff` closer to the origin than the first.
inline int cutoff_n_max(double r, double cutoff, int min_n_max = 1) {
  if (!(r > 1.0)) throw InvalidArgument("ratio r must be > 1");
  if (!(cutoff >= 2.0)) throw InvalidArgument("cutoff K must be >= 2");
  const double q = std::log(cutoff) / std::log(r);
  if (q > 1e7) throw InvalidArgument("cutoff coupling gives an impractical n_max");
  return std::max(min_n_max, static_cast<int>(std::ceil(q - 1e-9)));
}

/// ln of one truncated weighted partial product.
struct LogProduct {
  double log_value;
  int term_count;
  double min_point;  ///< sample closest to the origin (signed like x)
};

struct Estimate {
  double value;
  double log_value;
  GmpConfig config;
  double x;
  std::uint64_t factor_count;
};

/// prod_{k in S} (r^k - 1)^{1/k}
inline double coefficient(const IndexSet& s, double r) {
  if (!(r > 1.0)) throw InvalidArgument("ratio r must be > 1, got " + format_double(r));
  double c = 1.0;
  for (int k : s.elements()) c *= std::pow(std::pow(r, k) - 1.0, 1.0 / k);
  return c;
}

inline double sequence_point(const IndexSet& s, double r, double x, int n) {
  if (n < 1) throw InvalidArgument("sequence index n must be >= 1");
  return coefficient(s, r) * x / std::pow(r, n);
}

/// (r^k - 1)^{j/k} / (r^j - 1): the factor multiplying c_j x^j when the
/// j-th component is sampled on the order-k sequence (untruncated).
inline double pollution_exponent(int j, int k, double r) {
  if (!(r > 1.0)) throw InvalidArgument("ratio r must be > 1, got " + format_double(r));
  if (j < 1 || k < 1) throw InvalidArgument("orders j, k must be >= 1");
  return std::pow(std::pow(r, k) - 1.0, static_cast<double>(j) / k) / (std::pow(r, j) - 1.0);
}

namespace detail {

template <FunctionSource F>
double log_sample(const F& f, double p, const IndexSet& s) {
  if constexpr (BoundedFunctionSource<F>) {
    const double lo = f.domain_min();
    const double hi = f.domain_max();
    if (p < lo || p > hi) throw DomainCoverage(p, lo, hi, "subset " + s.to_string());
  }
  double lv;
  if constexpr (LogFunctionSource<F>) {
    lv = static_cast<double>(f.log(p));
  } else {
    const double v = static_cast<double>(f(p));
    if (!(v > 0.0)) {
      if (std::isnan(v)) throw NonFiniteResult("f(" + format_double(p) + ") is NaN");
      throw NonPositiveSample(p, v, "subset " + s.to_string());
    }
    lv = std::log(v);
  }
  if (!std::isfinite(lv)) {
    const double v = static_cast<double>(f(p));
    if (!(v > 0.0) && !std::isnan(v)) throw NonPositiveSample(p, v, "subset " + s.to_string());
    throw NonFiniteResult("ln f(" + format_double(p) + ") is not finite (subset " +
                          s.to_string() + ")");
  }
  return lv;
}

inline double weighted_term(int n, int m, double log_f) {
  if (log_f == 0.0) return 0.0;
  const auto w = multiplicity_weight(n, m);
  if (w.exact) return w.value * log_f;
  const double magnitude = std::exp(w.log_value + std::log(std::abs(log_f)));
  return std::copysign(magnitude, log_f);
}

template <typename Pred>
std::vector<IndexSet> family_members(const IndexSet& base, Parity parity, Pred keep) {
  auto family = enumerate_subsets(base);
  std::vector<IndexSet> out;
  for (auto& s : family.members) {
    if (parity == Parity::even_only && !s.all_even()) continue;
    if (keep(s)) out.push_back(std::move(s));
  }
  return out;
}

inline Estimate finish(double log_value, const GmpConfig& cfg, double x, std::uint64_t count) {
  if (!std::isfinite(log_value)) throw NonFiniteResult("accumulated log product is not finite");
  const double value = std::exp(log_value);
  if (!(value > 0.0) || !std::isfinite(value))
    throw NonFiniteResult("exp(" + format_double(log_value) + ") leaves double range");
  return {value, log_value, cfg, x, count};
}

}  // namespace detail

/// ln of the truncated weighted product of f over the sequence for S:
///   sum_{n=|S|}^{n_max} C(n-1, |S|-1) * ln f(coefficient(S,r) x / r^n)
template <FunctionSource F>
LogProduct log_partial_product(const F& f, const IndexSet& s, double r, double x, int n_max) {
  const int m = static_cast<int>(s.size());
  if (n_max < m)
    throw InvalidArgument("n_max = " + std::to_string(n_max) + " is below |S| = " +
                          std::to_string(m) + " for S = " + s.to_string());
  const double c = coefficient(s, r);

  CompensatedSum<double> sum;
  double min_point = c * x / std::pow(r, m);
  for (int n = m; n <= n_max; ++n) {
    const double p = c * x / std::pow(r, n);
    min_point = p;
    sum += detail::weighted_term(n, m, detail::log_sample(f, p, s));
  }
  const double lv = sum.value();
  if (!std::isfinite(lv))
    throw NonFiniteResult("partial product for " + s.to_string() + " overflowed in log space");
  return {lv, n_max - m + 1, min_point};
}

namespace detail {

struct QuotientLog {
  double log_value;
  std::uint64_t factor_count;
};

template <FunctionSource F>
QuotientLog quotient_log(const F& f, double x, const GmpConfig& cfg,
                         const std::vector<IndexSet>& members) {
  const auto count = factor_count(members, cfg.n_max);
  if (x == 0.0) return {0.0, count};

  CompensatedSum<double> total;
  for (const auto& s : members) {
    const double lp = log_partial_product(f, s, cfg.r, x, cfg.n_max).log_value;
    if (s.size() % 2 == 1) {
      total += lp;
    } else {
      total -= lp;
    }
  }
  return {total.value(), count};
}

template <FunctionSource F>
QuotientLog component_log(const F& f, int k, double x, const GmpConfig& cfg) {
  if (!cfg.base.contains(k))
    throw InvalidArgument("component order " + std::to_string(k) + " is not in base " +
                          cfg.base.to_string());
  const auto members = family_members(cfg.base, cfg.parity, [k](const IndexSet& s) {
    return s.max() == k;
  });
  return quotient_log(f, x, cfg, members);
}

}  // namespace detail

/// Odd-cardinality partial products divided by even-cardinality ones, over
/// every non-empty subset of cfg.base (restricted to even sets in even mode).
template <FunctionSource F>
Estimate estimate(const F& f, double x, const GmpConfig& cfg) {
  cfg.validate();
  const auto members = detail::family_members(cfg.base, cfg.parity, [](const IndexSet&) {
    return true;
  });
  const auto q = detail::quotient_log(f, x, cfg, members);
  return detail::finish(q.log_value, cfg, x, q.factor_count);
}

/// The k-th component f_k(x) = exp(c_k x^k): same quotient, restricted to
/// subsets whose largest element is k.
template <FunctionSource F>
Estimate component_estimate(const F& f, int k, double x, const GmpConfig& cfg) {
  cfg.validate();
  const auto q = detail::component_log(f, k, x, cfg);
  return detail::finish(q.log_value, cfg, x, q.factor_count);
}

template <FunctionSource F>
Estimate component_estimate(const F& f, int k, double x, double r, int n_max,
                            const IndexSet& base, Parity parity = Parity::all) {
  return component_estimate(f, k, x, GmpConfig{r, n_max, base, parity});
}

/// Product of every component estimate; regroups the factors of estimate()
/// by the largest element of each subset.
template <FunctionSource F>
Estimate reconstruct_from_components(const F& f, double x, const GmpConfig& cfg) {
  cfg.validate();
  CompensatedSum<double> total;
  std::uint64_t count = 0;
  for (int k : cfg.base.elements()) {
    const auto part = detail::component_log(f, k, x, cfg);
    total += part.log_value;
    count += part.factor_count;
  }
  return detail::finish(total.value(), cfg, x, count);
}

}  // namespace geomprod
