#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomprod/geomprod.hpp"

namespace geomprod::cli {

enum ExitCode : int { ok = 0, usage = 2, domain = 3, io = 4 };

/// Parses a ratio written either as a decimal or as sqrt:<v>.
inline double parse_ratio(std::string_view text) {
  const bool root = text.substr(0, 5) == "sqrt:";
  const auto body = root ? text.substr(5) : text;
  const auto v = detail::parse_double(body);
  if (!v) throw InvalidArgument("cannot parse ratio '" + std::string(text) + "'");
  return root ? std::sqrt(*v) : *v;
}

inline std::vector<double> parse_ratio_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(parse_ratio(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

namespace detail {

using nlohmann::json;

struct GmpFlags {
  std::string r;
  std::optional<int> n_max;
  std::optional<double> cutoff;
  std::string base;
  std::string parity = "all";

  void add_to(CLI::App& app, bool need_r = true) {
    auto* ropt = app.add_option("--r", r, "ratio r > 1 (decimal or sqrt:v)");
    if (need_r) ropt->required();
    auto* n = app.add_option("--n-max", n_max, "truncation of the product index");
    auto* k = app.add_option("--cutoff", cutoff, "couple n_max = ceil(ln K / ln r) (default K = 32)");
    n->excludes(k);
    app.add_option("--base", base, "base index set, e.g. 2,4")->required();
    app.add_option("--parity", parity, "all | even")->capture_default_str();
  }

  Coupling coupling() const {
    if (n_max) return FixedNMax{*n_max};
    return FixedCutoff{cutoff.value_or(32.0)};
  }

  GmpConfig resolve() const {
    const double ratio = parse_ratio(r);
    const auto set = IndexSet::parse(base);
    const int n = n_max ? *n_max : cutoff_n_max(ratio, cutoff.value_or(32.0),
                                                static_cast<int>(set.size()));
    GmpConfig cfg{ratio, n, set, parse_parity(parity)};
    cfg.validate();
    return cfg;
  }

  json coupling_json() const {
    if (n_max) return {{"n_max", *n_max}};
    return {{"cutoff", cutoff.value_or(32.0)}};
  }
};

struct FunctionFlags {
  std::string name;
  double c = 1.0;
  int power = 2;

  void add_to(CLI::App& app) {
    app.add_option("--function", name, "one | cos | exp | half-sin | monomial-exp")->required();
    app.add_option("--c", c, "coefficient for exp / monomial-exp")->capture_default_str();
    app.add_option("--power", power, "power k for monomial-exp")->capture_default_str();
  }

  BuiltinFunction resolve() const { return BuiltinFunction::parse(name, c, power); }
};

inline json base_json(const IndexSet& s) {
  return json(std::vector<int>(s.elements().begin(), s.elements().end()));
}

inline json config_json(const GmpConfig& cfg, const GmpFlags& flags) {
  return {{"r", cfg.r},
          {"n_max", cfg.n_max},
          {"base", base_json(cfg.base)},
          {"parity", to_string(cfg.parity)},
          {"coupling", flags.coupling_json()}};
}

inline json function_json(const BuiltinFunction& f) {
  json j{{"name", f.name()}};
  if (f.tag() == BuiltinTag::exp_scaled || f.tag() == BuiltinTag::monomial_exp) j["c"] = f.c();
  if (f.tag() == BuiltinTag::monomial_exp) j["power"] = f.power();
  return j;
}

inline json estimate_json(const Estimate& e, const GmpFlags& flags) {
  return {{"x", e.x},
          {"value", e.value},
          {"log_value", e.log_value},
          {"factor_count", e.factor_count},
          {"config", config_json(e.config, flags)}};
}

inline json row_json(const SweepRow& row) {
  json j{{"x", row.x},         {"r", row.r},
         {"n_max", row.n_max}, {"reference", row.reference},
         {"factor_count", row.factor_count}, {"status", row.status}};
  j["estimate"] = row.estimate ? json(*row.estimate) : json(nullptr);
  j["abs_error"] = row.abs_error ? json(*row.abs_error) : json(nullptr);
  return j;
}

inline bool wants_json_errors(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--format=json") return true;
    if (a == "--format" && i + 1 < argc && std::string_view(argv[i + 1]) == "json") return true;
  }
  return false;
}

inline unsigned threads_from_env() {
  const char* env = std::getenv("GEOMPROD_THREADS");
  if (!env || !*env) return 1;
  const auto v = geomprod::detail::parse_double(env);
  if (!v || *v < 0) throw InvalidArgument("GEOMPROD_THREADS must be a non-negative integer");
  return static_cast<unsigned>(*v);
}

inline std::string single_line(std::string s) {
  for (auto& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace detail

/// Entry point behind the geomprod executable. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using detail::json;
  const bool json_errors = detail::wants_json_errors(argc, argv);

  auto fail = [&](int code, const std::string& reason, const std::string& message) {
    if (json_errors) {
      err << json{{"error", reason}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    } else {
      err << "geomprod: " << reason << ": " << detail::single_line(message) << '\n';
    }
    return code;
  };

  CLI::App app{"Geometric multiproduct extrapolation"};
  app.require_subcommand(1);
  std::optional<std::string> format_flag;
  std::string output;

  auto add_common = [&](CLI::App* sub, const char* default_format) {
    sub->add_option("--format", format_flag,
                    std::string("csv | json (default ") + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", output, "write to PATH instead of stdout");
  };

  detail::FunctionFlags fn;
  detail::GmpFlags gmp;
  double x = 0.0;

  auto* est = app.add_subcommand("estimate", "estimate f(x) for a builtin function");
  fn.add_to(*est);
  est->add_option("--x", x, "target abscissa")->required();
  gmp.add_to(*est);
  add_common(est, "json");

  int k = 0;
  auto* comp = app.add_subcommand("component", "estimate the k-th component exp(c_k x^k)");
  fn.add_to(*comp);
  comp->add_option("--x", x, "target abscissa")->required();
  comp->add_option("--k", k, "component order (must be in the base)")->required();
  gmp.add_to(*comp);
  add_common(comp, "json");

  int euler_n = 40;
  auto* eul = app.add_subcommand("euler", "Euler's cosine product against sin(x)/x");
  eul->add_option("--x", x, "abscissa")->required();
  eul->add_option("--n", euler_n, "number of factors")->capture_default_str();
  add_common(eul, "json");

  std::optional<double> x_start, x_stop, x_step, x_single;
  std::optional<int> t_max;
  auto* swp = app.add_subcommand("sweep", "error table over an x grid and an r schedule");
  fn.add_to(*swp);
  auto* xs = swp->add_option("--x-start", x_start, "grid start");
  auto* xe = swp->add_option("--x-stop", x_stop, "grid stop");
  auto* xd = swp->add_option("--x-step", x_step, "grid step");
  auto* x1 = swp->add_option("--x", x_single, "single abscissa (r sweep)");
  x1->excludes(xs)->excludes(xe)->excludes(xd);
  auto* tm = swp->add_option("--t-max", t_max, "schedule r = 1 + 2^-t, t = 1..T (default 8)");
  gmp.add_to(*swp, false);
  tm->excludes(swp->get_option("--r"));
  add_common(swp, "csv");

  auto* cnt = app.add_subcommand("count-factors", "multiplicity-weighted factor count");
  cnt->add_option("--n-max", gmp.n_max, "truncation of the product index")->required();
  cnt->add_option("--base", gmp.base, "base index set")->required();
  cnt->add_option("--parity", gmp.parity, "all | even")->capture_default_str();
  add_common(cnt, "csv");

  std::string input;
  std::string normalize_mode = "first";
  auto* fc = app.add_subcommand("forecast", "extrapolate a sampled signal from CSV");
  fc->add_option("--input", input, "CSV with columns t,value")->required();
  fc->add_option("--normalize", normalize_mode, "first | none | affine:a,b")->capture_default_str();
  fc->add_option("--x", x, "forecast horizon from the first sample")->required();
  gmp.add_to(*fc);
  add_common(fc, "json");

  for (auto* sub : {est, comp, eul, swp, cnt, fc}) sub->callback([] {});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return ExitCode::ok;
    }
    return fail(ExitCode::usage, "UsageError", e.what());
  }

  const std::string format = format_flag.value_or((*swp || *cnt) ? "csv" : "json");
  std::ostringstream buffer;
  try {
    if (*est || *comp) {
      const auto f = fn.resolve();
      const auto cfg = gmp.resolve();
      const auto e = *est ? estimate(f, x, cfg) : component_estimate(f, k, x, cfg);
      const double reference = f(x);
      if (format == "json") {
        auto j = detail::estimate_json(e, gmp);
        j["function"] = detail::function_json(f);
        if (*comp) {
          j["k"] = k;
        } else {
          j["reference"] = reference;
          j["abs_error"] = std::abs(e.value - reference);
        }
        buffer << j.dump(2) << '\n';
      } else {
        buffer << "x,value,log_value,r,n_max,factor_count\n"
               << format_double(e.x) << ',' << format_double(e.value) << ','
               << format_double(e.log_value) << ',' << format_double(cfg.r) << ',' << cfg.n_max
               << ',' << e.factor_count << '\n';
      }
    } else if (*eul) {
      const double product = euler_partial_product(x, euler_n);
      const double reference = sinc(x);
      if (format == "json") {
        buffer << json{{"x", x},
                       {"n", euler_n},
                       {"product", product},
                       {"sinc", reference},
                       {"abs_diff", std::abs(product - reference)}}
                      .dump(2)
               << '\n';
      } else {
        buffer << "x,n,product,sinc,abs_diff\n"
               << format_double(x) << ',' << euler_n << ',' << format_double(product) << ','
               << format_double(reference) << ',' << format_double(std::abs(product - reference))
               << '\n';
      }
    } else if (*swp) {
      const auto f = fn.resolve();
      Grid grid{0.0, 0.0, 1.0};
      if (x_single) {
        grid = {*x_single, *x_single, 1.0};
      } else if (x_start && x_stop && x_step) {
        grid = {*x_start, *x_stop, *x_step};
      } else {
        throw InvalidArgument("sweep needs either --x or all of --x-start, --x-stop, --x-step");
      }
      const auto schedule = gmp.r.empty() ? halving_schedule(t_max.value_or(8))
                                          : parse_ratio_list(gmp.r);
      SweepSpec spec{f, grid, schedule, gmp.coupling(), IndexSet::parse(gmp.base),
                     parse_parity(gmp.parity)};
      const auto rows = grid_eval(spec, detail::threads_from_env());
      if (format == "json") {
        json arr = json::array();
        for (const auto& row : rows) arr.push_back(detail::row_json(row));
        buffer << arr.dump(2) << '\n';
      } else {
        write_sweep_csv(buffer, rows);
      }
    } else if (*cnt) {
      const auto base = IndexSet::parse(gmp.base);
      const auto parity = parse_parity(gmp.parity);
      GmpConfig{2.0, *gmp.n_max, base, parity}.validate();
      const auto members =
          geomprod::detail::family_members(base, parity, [](const IndexSet&) { return true; });
      const auto count = factor_count(members, *gmp.n_max);
      if (format == "json") {
        buffer << json{{"base", detail::base_json(base)},
                       {"n_max", *gmp.n_max},
                       {"parity", to_string(parity)},
                       {"factor_count", count}}
                      .dump(2)
               << '\n';
      } else {
        buffer << count << '\n';
      }
    } else if (*fc) {
      const auto cfg = gmp.resolve();
      const auto mode = NormalizationMode::parse(normalize_mode);
      const auto sig = normalize(load_csv(input), mode);
      const auto report = coverage_check(sig, cfg, x);
      json coverage{{"pass", report.pass},
                    {"largest_point", report.largest_point},
                    {"domain_max", report.domain_max},
                    {"max_horizon", report.max_horizon}};
      json norm{{"offset", sig.normalization().offset}, {"scale", sig.normalization().scale}};
      if (!report.pass) {
        if (format == "json") {
          out << json{{"x", x},
                      {"coverage", coverage},
                      {"config", detail::config_json(cfg, gmp)}}
                     .dump(2)
              << '\n';
        }
        throw DomainCoverage(report.largest_point, 0.0, report.domain_max,
                             "max feasible horizon " + format_double(report.max_horizon));
      }
      const auto result = forecast(sig, x, cfg);
      if (format == "json") {
        auto j = detail::estimate_json(result.estimate, gmp);
        j["raw_value"] = result.raw_value;
        j["coverage"] = coverage;
        j["normalization"] = norm;
        j["time_origin"] = sig.time_origin();
        buffer << j.dump(2) << '\n';
      } else {
        buffer << "x,value,raw_value,log_value,r,n_max,factor_count,largest_point,domain_max\n"
               << format_double(x) << ',' << format_double(result.estimate.value) << ','
               << format_double(result.raw_value) << ','
               << format_double(result.estimate.log_value) << ',' << format_double(cfg.r) << ','
               << cfg.n_max << ',' << result.estimate.factor_count << ','
               << format_double(report.largest_point) << ',' << format_double(report.domain_max)
               << '\n';
      }
    }
  } catch (const InvalidArgument& e) {
    return fail(ExitCode::usage, e.code(), e.what());
  } catch (const DomainError& e) {
    return fail(ExitCode::domain, e.code(), e.what());
  } catch (const Overflow& e) {
    return fail(ExitCode::domain, e.code(), e.what());
  } catch (const IoError& e) {
    return fail(ExitCode::io, e.code(), e.what());
  }

  if (output.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) return fail(ExitCode::io, "IoError", "cannot open '" + output + "' for writing");
    file << buffer.str();
    if (!file) return fail(ExitCode::io, "IoError", "failed writing '" + output + "'");
  }
  return ExitCode::ok;
}

}  // namespace geomprod::cli
