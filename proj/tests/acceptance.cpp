// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "geomprod/geomprod.hpp"

using namespace geomprod;

namespace {

// Pinned thresholds. Grid-level values come from an independent float64
// evaluation of the same configurations.
constexpr double kEulerTol = 1e-10;
constexpr double kInvarianceRelTol = 1e-12;
constexpr double kConsolidationTol = 1e-12;
constexpr double kTau1 = 0.102;      // oracle max error 0.10140 on the 34 feasible rows
constexpr double kTau1Ceiling = 0.15;
constexpr int kCosineFeasibleRows = 34;
constexpr double kTau2 = 1.2e-3;     // oracle max error 1.1977e-3 at x = 3
constexpr double kTau2Ceiling = 0.2;
constexpr std::uint64_t kHalfSineFactors = 135750;
constexpr std::uint64_t kFactorFloor = 75000;
constexpr double kNoiseBand = 2.0;
constexpr double kComponentTol = 2.3e-3;  // oracle error 2.2341e-3 at n_max = 72
constexpr double kPartitionTol = 1e-12;
constexpr double kPollutionFloor = 1e-3;  // (4,2) at t = 12 is 2.44e-4
constexpr double kPollutionBlowup = 1e3;
constexpr double kRoundTripFactor = 10.0;

constexpr double kBudgetMs[] = {0, 1, 1000, 1000, 1000, 100, 5000, 10000, 5000, 1, 5000};

const double sqrt2 = std::numbers::sqrt2;

GmpConfig cosine_config() { return {sqrt2, 10, IndexSet{2, 4}, Parity::even_only}; }
GmpConfig half_sine_config() { return {2.0, 40, IndexSet{1, 2, 3, 4}, Parity::all}; }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("unexpected exception: ") + e.what()};
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = ms < kBudgetMs[id];
  const bool pass = o.pass && in_budget;
  if (!pass) ++failures;
  std::printf("criterion %2d %s  %-28s %s; %.3f ms (budget %.0f ms%s)\n", id, pass ? "PASS" : "FAIL",
              name, o.detail.c_str(), ms, kBudgetMs[id], in_budget ? "" : ", exceeded");
  std::fflush(stdout);
}

Outcome euler_identity() {
  double worst = 0.0;
  for (double x : {0.5, 1.0, std::numbers::pi / 2, 2.0, 3.0})
    worst = std::max(worst, std::abs(euler_partial_product(x, 40) - sinc(x)));
  return {worst < kEulerTol, "max |P_40 - sinc| = " + fmt("%.3e", worst)};
}

Outcome truncated_invariance() {
  double worst = 0.0;
  int cases = 0;
  for (double c : {-1.0, 0.3})
    for (int k = 1; k <= 6; ++k)
      for (double r : {1.05, 1.5, 2.0})
        for (int n : {5, 20, 60})
          for (int i = -12; i <= 12; ++i) {
            const double x = 0.25 * i;
            const auto f = BuiltinFunction::monomial_exp(c, k);
            const double got = log_partial_product(f, IndexSet{k}, r, x, n).log_value;
            const double want = truncated_invariance_closed_form(c, k, r, x, n);
            const double err = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
            worst = std::max(worst, err);
            ++cases;
          }
  return {worst <= kInvarianceRelTol,
          std::to_string(cases) + " cases, max rel err " + fmt("%.3e", worst)};
}

Outcome consolidation() {
  const std::vector<BuiltinFunction> fs{BuiltinFunction::exp_scaled(1.0), BuiltinFunction::cos(),
                                        BuiltinFunction::half_sin_shifted()};
  double worst = 0.0;
  int cases = 0;
  for (const auto& f : fs)
    for (const auto& s : enumerate_subsets(IndexSet{1, 2, 3}).members)
      for (double r : {1.2, 2.0})
        for (double x : {0.5, 1.5})
          for (int n = static_cast<int>(s.size()); n <= 10; ++n) {
            const double single = log_partial_product(f, s, r, x, n).log_value;
            worst = std::max(worst, std::abs(single - multiindex_bruteforce(f, s, r, x, n)));
            ++cases;
          }
  return {worst <= kConsolidationTol,
          std::to_string(cases) + " cases, max |diff| " + fmt("%.3e", worst)};
}

Outcome composition_count() {
  int mismatches = 0;
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 30; ++n)
      if (multiplicity(n, m) != compositions_bruteforce(n, m)) ++mismatches;
  for (int m = 1; m <= 6; ++m)
    for (int big_n = m; big_n <= 60; ++big_n) {
      std::uint64_t sum = 0;
      for (int n = m; n <= big_n; ++n) sum += multiplicity(n, m);
      if (sum != binomial(big_n, m)) ++mismatches;
    }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches"};
}

Outcome figure_one() {
  SweepSpec spec{BuiltinFunction::cos(), Grid{0.0, 3.0, 0.05}, {sqrt2}, FixedNMax{10},
                 IndexSet{2, 4}, Parity::even_only};
  const auto rows = grid_eval(spec);
  double worst = 0.0;
  int feasible = 0;
  for (const auto& row : rows) {
    if (row.status != "ok") continue;
    ++feasible;
    worst = std::max(worst, *row.abs_error);
  }
  const bool pass = rows.size() == 61 && feasible == kCosineFeasibleRows && worst <= kTau1 &&
                    kTau1 <= kTau1Ceiling;
  return {pass, std::to_string(rows.size()) + " rows, " + std::to_string(feasible) +
                    " feasible, max err " + fmt("%.5f", worst) + " (tau1 " + fmt("%.3f", kTau1) +
                    ")"};
}

Outcome figure_two() {
  SweepSpec spec{BuiltinFunction::half_sin_shifted(), Grid{0.0, 4.0, 0.05}, {2.0}, FixedNMax{40},
                 IndexSet{1, 2, 3, 4}, Parity::all};
  const auto rows = grid_eval(spec);
  double worst = 0.0;
  bool all_ok = true;
  for (const auto& row : rows) {
    if (row.status != "ok" || !std::isfinite(*row.abs_error)) {
      all_ok = false;
      continue;
    }
    worst = std::max(worst, *row.abs_error);
  }
  const auto count = factor_count(IndexSet{1, 2, 3, 4}, 40);
  const bool pass = all_ok && rows.size() == 81 && worst <= kTau2 && kTau2 <= kTau2Ceiling &&
                    count == kHalfSineFactors && count > kFactorFloor;
  return {pass, std::to_string(rows.size()) + " rows, max err " + fmt("%.4e", worst) + " (tau2 " +
                    fmt("%.1e", kTau2) + "), factors " + std::to_string(count)};
}

Outcome r_schedule() {
  const auto rows = r_sweep(BuiltinFunction::cos(), 2.0, halving_schedule(8), FixedCutoff{32.0},
                            IndexSet{2, 4});
  std::string trace;
  bool pass = true;
  double prev = std::nan("");
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& row = rows[t];
    if (!trace.empty()) trace += ' ';
    if (row.status != "ok") {
      trace += row.status;
      pass = false;
      prev = std::nan("");
      continue;
    }
    trace += fmt("%.4f", *row.abs_error);
    if (*row.abs_error > kNoiseBand * prev) pass = false;
    prev = *row.abs_error;
  }
  const auto& first = rows.front();
  const auto& last = rows.back();
  if (first.status != "ok" || last.status != "ok" || !(*last.abs_error < *first.abs_error))
    pass = false;
  return {pass, "abs_error t=1..8: " + trace};
}

Outcome component_extraction() {
  const double r = 1.05;
  const IndexSet base{2, 4};
  const GmpConfig cfg{r, cutoff_n_max(r, 32.0, static_cast<int>(base.size())), base, Parity::all};
  const auto f2 = component_estimate(BuiltinFunction::cos(), 2, 1.0, cfg);
  const double err = std::abs(f2.value - std::exp(-0.5));

  struct Config {
    BuiltinFunction f;
    GmpConfig cfg;
    std::vector<double> xs;
  };
  std::vector<double> cosine_xs, half_sine_xs;
  for (int i = 0; i < kCosineFeasibleRows; ++i) cosine_xs.push_back(0.05 * i);
  for (int i = 0; i <= 80; ++i) half_sine_xs.push_back(0.05 * i);
  std::vector<Config> configs{
      {BuiltinFunction::cos(), cosine_config(), cosine_xs},
      {BuiltinFunction::half_sin_shifted(), half_sine_config(), half_sine_xs},
      {BuiltinFunction::cos(), cfg, {1.0}},
  };
  for (double rt : halving_schedule(8)) {
    const GmpConfig c{rt, cutoff_n_max(rt, 32.0, 2), base, Parity::all};
    try {
      estimate(BuiltinFunction::cos(), 2.0, c);
      configs.push_back({BuiltinFunction::cos(), c, {2.0}});
    } catch (const DomainError&) {
    }
  }
  double worst = 0.0;
  int checked = 0;
  for (const auto& c : configs)
    for (double x : c.xs) {
      const double whole = estimate(c.f, x, c.cfg).log_value;
      const double parts = reconstruct_from_components(c.f, x, c.cfg).log_value;
      worst = std::max(worst, std::abs(whole - parts));
      ++checked;
    }
  return {err <= kComponentTol && worst <= kPartitionTol,
          "n_max " + std::to_string(cfg.n_max) + ", |f_2 - e^-1/2| " + fmt("%.4e", err) +
              " (tol " + fmt("%.1e", kComponentTol) + "), partition max |dlog| " +
              fmt("%.2e", worst) + " over " + std::to_string(checked) + " evals"};
}

Outcome pollution() {
  bool decreasing = true;
  bool unity = true;
  double prev = pollution_exponent(4, 2, 1.5);
  double last_42 = prev;
  for (int t = 1; t <= 12; ++t) {
    const double r = 1.0 + std::ldexp(1.0, -t);
    const double p = pollution_exponent(4, 2, r);
    if (t > 1 && !(p < prev)) decreasing = false;
    prev = p;
    last_42 = p;
    for (int k = 1; k <= 6; ++k)
      if (pollution_exponent(k, k, r) != 1.0) unity = false;
  }
  const double p12 = pollution_exponent(1, 2, 1.0 + std::ldexp(1.0, -12));
  const bool toward_zero = decreasing && last_42 < kPollutionFloor;
  const bool blowup = p12 > kPollutionBlowup;
  return {toward_zero && unity && blowup,
          std::string("(4,2) decreasing to ") + fmt("%.3e", last_42) +
              (toward_zero ? " ok" : " NO") + "; (k,k)=1 " + (unity ? "ok" : "NO") +
              "; (1,2) at t=12 = " + fmt("%.2f", p12) + (blowup ? " > 1e3 ok" : " <= 1e3 NO")};
}

Outcome forecast_round_trip() {
  const auto path = std::filesystem::temp_directory_path() / "geomprod_acceptance_halfsin.csv";
  {
    std::ofstream out(path);
    out << "t,value\n";
    for (int i = 0; i <= 80; ++i) {
      const double t = 0.05 * i;
      out << format_double(t) << ',' << format_double(1.0 + 0.5 * std::sin(t)) << '\n';
    }
  }
  const auto sig = normalize(load_csv(path), NormalizationMode::divide_by_first());
  std::filesystem::remove(path);

  const auto f = BuiltinFunction::half_sin_shifted();
  double interp = 0.0;
  for (int i = 0; i <= 40000; ++i) {
    const double t = sig.domain_max() * i / 40000;
    interp = std::max(interp, std::abs(sig(t) - f(t)));
  }
  const auto cfg = half_sine_config();
  const auto fc = forecast(sig, 3.0, cfg);
  const auto direct = estimate(f, 3.0, cfg);
  const double diff = std::abs(fc.raw_value - direct.value);
  const bool consistent = fc.coverage.pass && fc.coverage.largest_point <= fc.coverage.domain_max;
  return {diff <= kRoundTripFactor * interp && consistent,
          "|forecast - analytic| " + fmt("%.3e", diff) + ", interp err " + fmt("%.3e", interp) +
              " (ratio " + fmt("%.2f", diff / interp) + "), coverage " +
              (consistent ? "pass" : "FAIL") + " at largest point " +
              fmt("%.4f", fc.coverage.largest_point)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  report(1, "Euler identity", euler_identity);
  report(2, "Truncated invariance", truncated_invariance);
  report(3, "Consolidation", consolidation);
  report(4, "Composition count", composition_count);
  report(5, "Cosine even-mode grid", figure_one);
  report(6, "Half-sine four-subset grid", figure_two);
  report(7, "r-schedule convergence", r_schedule);
  report(8, "Component extraction", component_extraction);
  report(9, "Pollution exponents", pollution);
  report(10, "Forecast round trip", forecast_round_trip);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 10 criteria passed in %.2f s\n", 10 - failures, total);
  return failures == 0 ? 0 : 1;
}
