#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "geomprod/combinatorics.hpp"
#include "geomprod/errors.hpp"
#include "geomprod/format.hpp"
#include "geomprod/multiproduct.hpp"
#include "geomprod/oracle.hpp"

namespace geomprod {

struct FixedNMax {
  int n_max;
};

/// n_max = ceil(ln K / ln r), so r^n_max ~ K at every r.
struct FixedCutoff {
  double cutoff;
};

using Coupling = std::variant<FixedNMax, FixedCutoff>;

inline int resolve_n_max(const Coupling& coupling, double r, const IndexSet& base) {
  const int floor_n = static_cast<int>(base.size());
  if (const auto* fixed = std::get_if<FixedNMax>(&coupling)) return fixed->n_max;
  return cutoff_n_max(r, std::get<FixedCutoff>(coupling).cutoff, floor_n);
}

struct Grid {
  double start;
  double stop;
  double step;

  std::vector<double> points() const {
    if (!(step > 0.0)) throw InvalidArgument("grid step must be > 0");
    if (stop < start) throw InvalidArgument("grid stop must be >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
  }
};

/// r_t = 1 + 2^{-t}, t = 1..t_max
inline std::vector<double> halving_schedule(int t_max) {
  std::vector<double> out;
  for (int t = 1; t <= t_max; ++t) out.push_back(1.0 + std::ldexp(1.0, -t));
  return out;
}

struct SweepSpec {
  BuiltinFunction function;
  Grid grid;
  std::vector<double> schedule;
  Coupling coupling;
  IndexSet base;
  Parity parity = Parity::all;

  void validate() const {
    if (schedule.empty()) throw InvalidArgument("r schedule must not be empty");
    for (double r : schedule)
      if (!(r > 1.0)) throw InvalidArgument("every r in the schedule must be > 1");
    if (const auto* c = std::get_if<FixedCutoff>(&coupling); c && !(c->cutoff >= 2.0))
      throw InvalidArgument("cutoff K must be >= 2");
    (void)grid.points();
  }
};

struct SweepRow {
  double x;
  double r;
  int n_max;
  std::optional<double> estimate;  ///< empty when status != "ok"
  double reference;
  std::optional<double> abs_error;
  std::uint64_t factor_count;
  std::string status;  ///< "ok" or the error code
};

namespace detail {

inline SweepRow evaluate_row(const BuiltinFunction& f, double x, double r, const Coupling& coupling,
                             const IndexSet& base, Parity parity) {
  SweepRow row{x, r, 0, std::nullopt, f(x), std::nullopt, 0, "ok"};
  try {
    row.n_max = resolve_n_max(coupling, r, base);
    const GmpConfig cfg{r, row.n_max, base, parity};
    cfg.validate();
    const auto members = family_members(base, parity, [](const IndexSet&) { return true; });
    row.factor_count = factor_count(members, row.n_max);
    const auto est = geomprod::estimate(f, x, cfg);
    row.estimate = est.value;
    row.abs_error = std::abs(est.value - row.reference);
  } catch (const DomainError& e) {
    row.status = e.code();
  } catch (const Overflow& e) {
    row.status = e.code();
  }
  return row;
}

inline unsigned effective_threads(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

template <typename Job>
void run_parallel(std::size_t jobs, unsigned threads, Job job) {
  threads = effective_threads(threads, jobs);
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) job(i);
    });
}

}  // namespace detail

/// One row per (x, r), ordered by x then by schedule position. Estimator
/// failures land in the row's status instead of aborting the sweep.
/// threads = 0 picks the hardware concurrency.
inline std::vector<SweepRow> grid_eval(const SweepSpec& spec, unsigned threads = 1) {
  spec.validate();
  const auto xs = spec.grid.points();
  const std::size_t per_x = spec.schedule.size();
  std::vector<SweepRow> rows(xs.size() * per_x);
  detail::run_parallel(rows.size(), threads, [&](std::size_t i) {
    rows[i] = detail::evaluate_row(spec.function, xs[i / per_x], spec.schedule[i % per_x],
                                   spec.coupling, spec.base, spec.parity);
  });
  return rows;
}

/// One row per r at a fixed x.
inline std::vector<SweepRow> r_sweep(const BuiltinFunction& f, double x,
                                     const std::vector<double>& schedule, const Coupling& coupling,
                                     const IndexSet& base, Parity parity = Parity::all) {
  SweepSpec spec{f, Grid{x, x, 1.0}, schedule, coupling, base, parity};
  return grid_eval(spec);
}

inline constexpr const char* sweep_csv_header =
    "x,r,n_max,estimate,reference,abs_error,factor_count,status";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << sweep_csv_header << '\n';
  for (const auto& row : rows) {
    out << format_double(row.x) << ',' << format_double(row.r) << ',' << row.n_max << ','
        << (row.estimate ? format_double(*row.estimate) : "") << ','
        << format_double(row.reference) << ','
        << (row.abs_error ? format_double(*row.abs_error) : "") << ',' << row.factor_count << ','
        << row.status << '\n';
  }
}

}  // namespace geomprod
