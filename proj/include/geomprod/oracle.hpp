#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "geomprod/combinatorics.hpp"
#include "geomprod/compensated_sum.hpp"
#include "geomprod/errors.hpp"
#include "geomprod/multiproduct.hpp"

namespace geomprod {

enum class BuiltinTag { one, cos, exp_scaled, half_sin_shifted, monomial_exp };

/// Closed-form test functions, all normalized to f(0) = 1:
///   one              1
///   cos              cos x
///   exp_scaled(c)    exp(c x)
///   half_sin_shifted 1 + sin(x)/2
///   monomial_exp(c,k) exp(c x^k)
class BuiltinFunction {
 public:
  static BuiltinFunction one() { return {BuiltinTag::one, 0.0, 0}; }
  static BuiltinFunction cos() { return {BuiltinTag::cos, 0.0, 0}; }
  static BuiltinFunction exp_scaled(double c) { return {BuiltinTag::exp_scaled, c, 1}; }
  static BuiltinFunction half_sin_shifted() { return {BuiltinTag::half_sin_shifted, 0.0, 0}; }
  static BuiltinFunction monomial_exp(double c, int k) {
    if (k < 1) throw InvalidArgument("monomial_exp power must be >= 1");
    return {BuiltinTag::monomial_exp, c, k};
  }

  /// Accepts the CLI spellings: one, cos, exp, half-sin, monomial-exp.
  static BuiltinFunction parse(std::string_view name, double c = 1.0, int k = 1) {
    if (name == "one") return one();
    if (name == "cos") return cos();
    if (name == "exp" || name == "exp_scaled" || name == "exp-scaled") return exp_scaled(c);
    if (name == "half-sin" || name == "half_sin_shifted" || name == "half-sin-shifted")
      return half_sin_shifted();
    if (name == "monomial-exp" || name == "monomial_exp") return monomial_exp(c, k);
    throw InvalidArgument("unknown function '" + std::string(name) +
                          "' (expected one|cos|exp|half-sin|monomial-exp)");
  }

  BuiltinTag tag() const noexcept { return tag_; }
  double c() const noexcept { return c_; }
  int power() const noexcept { return k_; }

  std::string name() const {
    switch (tag_) {
      case BuiltinTag::one: return "one";
      case BuiltinTag::cos: return "cos";
      case BuiltinTag::exp_scaled: return "exp";
      case BuiltinTag::half_sin_shifted: return "half-sin";
      case BuiltinTag::monomial_exp: return "monomial-exp";
    }
    return "?";
  }

  bool is_even() const noexcept {
    return tag_ == BuiltinTag::one || tag_ == BuiltinTag::cos ||
           (tag_ == BuiltinTag::monomial_exp && k_ % 2 == 0);
  }

  double operator()(double x) const {
    switch (tag_) {
      case BuiltinTag::one: return 1.0;
      case BuiltinTag::cos: return std::cos(x);
      case BuiltinTag::exp_scaled: return std::exp(c_ * x);
      case BuiltinTag::half_sin_shifted: return 1.0 + 0.5 * std::sin(x);
      case BuiltinTag::monomial_exp: return std::exp(c_ * ipow(x, k_));
    }
    return 0.0;
  }

  /// ln f(x); NaN or -inf where f(x) <= 0.
  double log(double x) const {
    switch (tag_) {
      case BuiltinTag::one: return 0.0;
      case BuiltinTag::cos: return std::log(std::cos(x));
      case BuiltinTag::exp_scaled: return c_ * x;
      case BuiltinTag::half_sin_shifted: return std::log1p(0.5 * std::sin(x));
      case BuiltinTag::monomial_exp: return c_ * ipow(x, k_);
    }
    return 0.0;
  }

 private:
  BuiltinFunction(BuiltinTag tag, double c, int k) : tag_(tag), c_(c), k_(k) {}

  // Repeated multiplication keeps (-x)^k bit-identical to x^k for even k.
  static double ipow(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
  }

  BuiltinTag tag_;
  double c_;
  int k_;
};

/// Power-series coefficients c_1..c_K of ln f, so f(x) = exp(sum c_k x^k).
struct ComponentSeries {
  BuiltinTag tag;
  std::vector<double> coefficients;  ///< coefficients[k-1] = c_k

  double c(int k) const {
    return k >= 1 && static_cast<std::size_t>(k) <= coefficients.size() ? coefficients[k - 1]
                                                                         : 0.0;
  }

  double log_value(double x) const {
    // Horner on x * (c_1 + x (c_2 + ...))
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc * x;
  }

  double value(double x) const { return std::exp(log_value(x)); }
};

namespace series {

/// Truncated power series a[0] + a[1] x + ... + a[K] x^K.
using Poly = std::vector<double>;

inline Poly multiply(const Poly& a, const Poly& b, std::size_t order) {
  Poly out(order + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= order; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// ln(1 + u) for a series u with u[0] = 0, truncated at `order`.
inline Poly log1p(const Poly& u, std::size_t order) {
  Poly out(order + 1, 0.0);
  Poly power = u;
  power.resize(order + 1, 0.0);
  for (std::size_t i = 1; i <= order; ++i) {
    const double sign = (i % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t d = 0; d <= order; ++d) out[d] += sign * power[d] / static_cast<double>(i);
    power = multiply(power, u, order);
  }
  return out;
}

inline Poly sin(std::size_t order) {
  Poly out(order + 1, 0.0);
  double term = 1.0;  // x^d / d!
  for (std::size_t d = 1; d <= order; ++d) {
    term /= static_cast<double>(d);
    if (d % 2 == 1) out[d] = ((d / 2) % 2 == 0) ? term : -term;
  }
  return out;
}

inline Poly cos(std::size_t order) {
  Poly out(order + 1, 0.0);
  double term = 1.0;
  out[0] = 1.0;
  for (std::size_t d = 1; d <= order; ++d) {
    term /= static_cast<double>(d);
    if (d % 2 == 0) out[d] = ((d / 2) % 2 == 0) ? term : -term;
  }
  return out;
}

}  // namespace series

/// Coefficients of ln f for a builtin, derived by series arithmetic rather
/// than from tables.
inline ComponentSeries log_series_components(const BuiltinFunction& f, int k_max) {
  if (k_max < 1 || k_max > 12) throw InvalidArgument("log_series_components requires 1 <= K <= 12");
  const auto order = static_cast<std::size_t>(k_max);
  std::vector<double> c(order, 0.0);

  switch (f.tag()) {
    case BuiltinTag::one:
      break;
    case BuiltinTag::exp_scaled:
      c[0] = f.c();
      break;
    case BuiltinTag::monomial_exp:
      if (f.power() <= k_max) c[f.power() - 1] = f.c();
      break;
    case BuiltinTag::cos: {
      auto u = series::cos(order);
      u[0] = 0.0;  // cos = 1 + u
      const auto l = series::log1p(u, order);
      for (std::size_t k = 1; k <= order; ++k) c[k - 1] = l[k];
      break;
    }
    case BuiltinTag::half_sin_shifted: {
      auto u = series::sin(order);
      for (auto& v : u) v *= 0.5;
      const auto l = series::log1p(u, order);
      for (std::size_t k = 1; k <= order; ++k) c[k - 1] = l[k];
      break;
    }
  }
  return {f.tag(), std::move(c)};
}

/// prod_{n=1}^{N} cos(x / 2^n)
inline double euler_partial_product(double x, int n) {
  if (n < 1) throw InvalidArgument("euler_partial_product requires N >= 1");
  double product = 1.0;
  double arg = x;
  for (int i = 1; i <= n; ++i) {
    arg *= 0.5;
    product *= std::cos(arg);
  }
  return product;
}

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// Exact log of the N-truncated order-k product of exp(c x^k):
/// c x^k (r^k - 1) sum_{n=1}^N r^{-nk} = c x^k (1 - r^{-kN}).
inline double truncated_invariance_closed_form(double c, int k, double r, double x, int n) {
  if (!(r > 1.0)) throw InvalidArgument("ratio r must be > 1");
  return c * std::pow(x, k) * (1.0 - std::pow(r, -static_cast<double>(k) * n));
}

/// ln of the unconsolidated product over all index tuples (n_j)_{j in S},
/// n_j >= 1, sum n_j <= N, of f(x * prod_j (r^j - 1)^{1/j} / r^{n_j}).
template <FunctionSource F>
double multiindex_bruteforce(const F& f, const IndexSet& s, double r, double x, int n) {
  if (s.size() > 3 || n > 10)
    throw InvalidArgument("multiindex_bruteforce limited to |S| <= 3, N <= 10");
  if (!(r > 1.0)) throw InvalidArgument("ratio r must be > 1");
  const auto orders = s.elements();
  const std::size_t m = orders.size();

  CompensatedSum<double> sum;
  std::vector<int> tuple(m, 1);
  std::function<void(std::size_t, int)> walk = [&](std::size_t slot, int used) {
    if (slot == m) {
      double p = x;
      for (std::size_t i = 0; i < m; ++i)
        p *= std::pow(std::pow(r, orders[i]) - 1.0, 1.0 / orders[i]) / std::pow(r, tuple[i]);
      const double v = static_cast<double>(f(p));
      if (!(v > 0.0)) throw NonPositiveSample(p, v, "multi-index oracle " + s.to_string());
      sum += std::log(v);
      return;
    }
    const int slots_after = static_cast<int>(m - slot - 1);
    for (int nj = 1; used + nj + slots_after <= n; ++nj) {
      tuple[slot] = nj;
      walk(slot + 1, used + nj);
    }
  };
  walk(0, 0);
  return sum.value();
}

}  // namespace geomprod
