#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Boost 1.74's pchip calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include "geomprod/combinatorics.hpp"
#include "geomprod/errors.hpp"
#include "geomprod/multiproduct.hpp"

namespace geomprod {

/// (t, value) pairs as read from disk, sorted by t.
struct RawSeries {
  std::vector<double> t;
  std::vector<double> value;

  std::size_t size() const noexcept { return t.size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads two comma-separated numeric columns. A first line that does not
/// parse as numbers is treated as a header; blank lines are ignored.
inline RawSeries parse_csv(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    std::optional<double> t, v;
    if (comma != std::string_view::npos && text.find(',', comma + 1) == std::string_view::npos) {
      t = detail::parse_double(text.substr(0, comma));
      v = detail::parse_double(text.substr(comma + 1));
    }
    if (!t || !v) {
      if (!seen_content) {
        seen_content = true;
        continue;
      }
      throw CsvError("CsvParse", "expected two numeric columns 't,value', got '" +
                                     std::string(text) + "'",
                     line_no);
    }
    seen_content = true;
    rows.emplace_back(*t, *v);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first)
      throw CsvError("DuplicateAbscissa",
                     "duplicate abscissa t = " + format_double(rows[i].first), 0);
  }
  if (rows.size() < 4)
    throw CsvError("FewPoints",
                   "need at least 4 samples for interpolation, got " + std::to_string(rows.size()),
                   0);

  RawSeries out;
  out.t.reserve(rows.size());
  out.value.reserve(rows.size());
  for (const auto& [t, v] : rows) {
    out.t.push_back(t);
    out.value.push_back(v);
  }
  return out;
}

inline RawSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(in);
}

/// stored = offset + scale * raw
struct Normalization {
  double offset = 0.0;
  double scale = 1.0;

  double apply(double raw) const { return offset + scale * raw; }
  double invert(double stored) const { return (stored - offset) / scale; }
};

struct NormalizationMode {
  enum class Kind { divide_by_first, affine, none };
  Kind kind = Kind::divide_by_first;
  double offset = 0.0;
  double scale = 1.0;

  static NormalizationMode divide_by_first() { return {Kind::divide_by_first, 0.0, 1.0}; }
  static NormalizationMode affine(double a, double b) { return {Kind::affine, a, b}; }
  static NormalizationMode none() { return {Kind::none, 0.0, 1.0}; }

  /// "first", "none", or "affine:a,b".
  static NormalizationMode parse(std::string_view text) {
    if (text == "first" || text == "divide-by-first" || text == "divide_by_first")
      return divide_by_first();
    if (text == "none") return none();
    if (text.substr(0, 7) == "affine:") {
      const auto args = text.substr(7);
      const auto comma = args.find(',');
      if (comma != std::string_view::npos) {
        const auto a = detail::parse_double(args.substr(0, comma));
        const auto b = detail::parse_double(args.substr(comma + 1));
        if (a && b) return affine(*a, *b);
      }
    }
    throw InvalidArgument("unknown normalization '" + std::string(text) +
                          "' (expected first|none|affine:a,b)");
  }
};

/// A sampled signal shifted so its first abscissa is 0, normalized so the
/// value there is exactly 1, with a shape-preserving cubic interpolant.
/// Immutable once built; safe to share across threads.
class SampledSignal {
 public:
  SampledSignal(std::vector<double> abscissas, std::vector<double> values,
                Normalization normalization, double time_origin)
      : abscissas_(std::move(abscissas)),
        values_(std::move(values)),
        normalization_(normalization),
        time_origin_(time_origin),
        interpolant_(std::vector<double>(abscissas_), std::vector<double>(values_)) {}

  double operator()(double t) const {
    if (t < 0.0 || t > domain_max())
      throw DomainCoverage(t, 0.0, domain_max(), "signal interpolant");
    return interpolant_(t);
  }

  double domain_min() const noexcept { return 0.0; }
  double domain_max() const noexcept { return abscissas_.back(); }

  const std::vector<double>& abscissas() const noexcept { return abscissas_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const Normalization& normalization() const noexcept { return normalization_; }
  /// Raw-time abscissa that maps to t = 0.
  double time_origin() const noexcept { return time_origin_; }

 private:
  std::vector<double> abscissas_;
  std::vector<double> values_;
  Normalization normalization_;
  double time_origin_;
  boost::math::interpolators::pchip<std::vector<double>> interpolant_;
};

inline SampledSignal normalize(const RawSeries& raw, NormalizationMode mode) {
  if (raw.size() < 4)
    throw CsvError("FewPoints",
                   "need at least 4 samples for interpolation, got " + std::to_string(raw.size()), 0);
  Normalization norm;
  switch (mode.kind) {
    case NormalizationMode::Kind::divide_by_first:
      if (raw.value.front() == 0.0)
        throw NormalizationError("ZeroFirstValue", "first sample is 0; cannot divide by it");
      norm = {0.0, 1.0 / raw.value.front()};
      break;
    case NormalizationMode::Kind::affine:
      if (mode.scale == 0.0) throw InvalidArgument("affine scale must be nonzero");
      norm = {mode.offset, mode.scale};
      break;
    case NormalizationMode::Kind::none:
      break;
  }

  const double origin = raw.t.front();
  std::vector<double> t(raw.size()), v(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    t[i] = raw.t[i] - origin;
    v[i] = mode.kind == NormalizationMode::Kind::divide_by_first
               ? raw.value[i] / raw.value.front()
               : norm.apply(raw.value[i]);
    if (!(v[i] > 0.0))
      throw NormalizationError("NonPositiveAfterNormalization",
                               "sample at t = " + format_double(raw.t[i]) + " (raw " +
                                   format_double(raw.value[i]) + ") normalizes to " +
                                   format_double(v[i]));
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw CsvError("DuplicateAbscissa", "abscissas collapse after shifting to the origin", 0);
  }
  // f(0) = 1 is a hypothesis of the estimator; allow a few ulps of rounding.
  if (std::abs(v.front() - 1.0) > 4 * std::numeric_limits<double>::epsilon())
    throw NormalizationError("OriginNotUnity",
                             "normalized value at the first sample is " + format_double(v.front()) +
                                 ", expected 1");
  v.front() = 1.0;
  return SampledSignal(std::move(t), std::move(v), norm, origin);
}

struct CoverageReport {
  bool pass;
  double largest_point;  ///< furthest sample abscissa the estimate needs
  double domain_max;     ///< last sampled abscissa
  double max_horizon;    ///< largest feasible forecast x under the same config
};

/// Checks that every geometric sample point for a forecast at x lies in
/// [0, last sample]. The furthest point of each sequence is its first,
/// coefficient(S, r) x / r^{|S|}.
inline CoverageReport coverage_check(const SampledSignal& sig, const GmpConfig& cfg, double x) {
  cfg.validate();
  const auto family = enumerate_subsets(cfg.base);
  double reach = 0.0;  // max over S of coefficient(S,r) / r^{|S|}
  for (const auto& s : family.members) {
    if (cfg.parity == Parity::even_only && !s.all_even()) continue;
    reach = std::max(reach, coefficient(s, cfg.r) / std::pow(cfg.r, static_cast<double>(s.size())));
  }
  const double largest = reach * x;
  const double horizon = sig.domain_max() / reach;
  const bool pass = x >= 0.0 && largest <= sig.domain_max();
  return {pass, largest, sig.domain_max(), horizon};
}

struct Forecast {
  Estimate estimate;  ///< in normalized units
  double raw_value;   ///< estimate mapped back through the normalization
  CoverageReport coverage;
};

/// Extrapolates the signal to horizon x (measured from the first sample).
inline Forecast forecast(const SampledSignal& sig, double x, const GmpConfig& cfg) {
  const auto report = coverage_check(sig, cfg, x);
  if (!report.pass) {
    throw DomainCoverage(report.largest_point, 0.0, sig.domain_max(),
                         "forecast horizon x = " + format_double(x) +
                             " infeasible; max feasible horizon " +
                             format_double(report.max_horizon));
  }
  const auto est = estimate(sig, x, cfg);
  return {est, sig.normalization().invert(est.value), report};
}

}  // namespace geomprod
