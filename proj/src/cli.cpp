// SPDX-License-Identifier: Apache-2.0

#include "bmdf/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bmdf/errors.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/sweeps.hpp"
#include "bmdf/two_layer.hpp"

namespace bmdf {
namespace {

// Missing or contradictory arguments that CLI11 cannot detect on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::optional<double> ps_db, pr_db, q_db, alpha, beta, rho1, rho2, r1, r2;
  std::optional<int> layers, grid;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 100'000;
  unsigned workers = 1;
  double tol = 1e-7;
  std::string out = "-";
  std::optional<std::string> axis;
  std::optional<std::string> range;

  std::string figure;
  std::string check;

  std::map<std::string, double> fixed() const {
    std::map<std::string, double> m;
    const auto put = [&](const char* key, const auto& v) {
      if (v) m[key] = static_cast<double>(*v);
    };
    put("ps_db", ps_db);
    put("pr_db", pr_db);
    put("q_db", q_db);
    put("alpha", alpha);
    put("beta", beta);
    put("rho1", rho1);
    put("rho2", rho2);
    put("r1", r1);
    put("r2", r2);
    put("layers", layers);
    put("grid", grid);
    return m;
  }

  SweepOptions sweep_options() const { return {seed, samples, workers, tol}; }
  McConfig mc() const { return {seed, samples, workers, kDefaultSeMultiplier}; }

  void validate() const {
    if (!(tol > 0.0)) throw InvalidSpec("--tol must be > 0");
    if (samples < 1) throw InvalidSpec("--samples must be >= 1");
    if (workers < 1) throw InvalidSpec("--workers must be >= 1");
    if (layers && *layers < 1) throw InvalidSpec("--layers must be >= 1");
  }
};

double Require(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required parameter ") + flag);
  return *v;
}

ChannelParams ParamsFrom(const Flags& f, double default_q_db = 10.0) {
  const double ps_db = Require(f.ps_db, "--ps-db");
  ChannelParams p{db_to_linear(ps_db), db_to_linear(f.pr_db.value_or(ps_db)),
                  db_to_linear(f.q_db.value_or(default_q_db))};
  p.validate();
  return p;
}

std::vector<double> ParseRange(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("malformed --range '" + text + "' (start:stop:step)");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw UsageError("malformed --range '" + text + "' (start:stop:step)");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidSpec("--range needs start <= stop and step > 0");
  const long n = std::lround((hi - lo) / step);
  std::vector<double> grid;
  for (long i = 0; i <= n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

Table RunFigure(const Flags& f) {
  const FigureId id = parse_figure(f.figure);
  SweepSpec spec = preset(id);
  for (const auto& [k, v] : f.fixed()) spec.fixed[k] = v;
  spec.axis = default_axis(id, spec.fixed);
  const auto it = spec.fixed.find(spec.axis.name);
  if (it != spec.fixed.end()) spec.axis.grid = {it->second};
  spec.output_columns = figure_columns(id, spec.axis.name);
  return run_sweep(spec, f.sweep_options());
}

Table RunSweep(const Flags& f) {
  SweepSpec spec = preset(FigureId::Custom);
  spec.fixed = f.fixed();
  if (f.axis) {
    spec.axis.name = *f.axis;
    if (!f.range && *f.axis != "ps_db") throw UsageError("missing required parameter --range for axis " + *f.axis);
  }
  if (f.range) spec.axis.grid = ParseRange(*f.range);
  spec.fixed.erase(spec.axis.name);
  spec.output_columns = figure_columns(FigureId::Custom, spec.axis.name);
  return run_sweep(spec, f.sweep_options());
}

void Row(std::ostream& os, const std::string& name, double value) {
  os << name << ',' << format_number(value) << '\n';
}

std::string RunThresholds(const Flags& f) {
  std::ostringstream os;
  os << "name,value\n";
  Row(os, "gamma0", gamma0());
  Row(os, "x0", crossover_x0());
  if (f.q_db) Row(os, "p_s_star", p_s_star(db_to_linear(*f.q_db)));
  if (f.ps_db) {
    const ChannelParams params = ParamsFrom(f);
    Row(os, "oblivious_rate", oblivious_su_rate(params.p_s));
    Row(os, "direct_throughput", direct_throughput(params.p_s));
    const int n = f.layers.value_or(1);
    Row(os, "layers", n);
    Row(os, "q_min", n == 1 ? q_min_single(params.p_s) : q_min_layers(params.p_s, optimize_siso_layering(params.p_s, n)));
    const RhoRegion region = classify_rho_region(0.0, params);
    Row(os, "r_low", region.r_low);
    Row(os, "r_high", region.r_high);
  }
  return os.str();
}

const char* Verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void Check(std::ostream& os, const std::string& name, double value, const char* result) {
  os << name << ',' << format_number(value) << ',' << result << '\n';
}

std::string RunAudit(const Flags& f) {
  std::ostringstream os;
  os << "check,value,result\n";
  if (f.check == "conjecture1") {
    Require(f.pr_db, "--pr-db");
    Require(f.q_db, "--q-db");
    const ChannelParams params = ParamsFrom(f);
    const double s = params.total_power() * params.q / (2.0 * params.p_r);
    std::vector<double> alphas;
    constexpr int kAlphas = 100;
    if (0.5 * s > 1.0) {
      for (int i = 1; i <= kAlphas; ++i) alphas.push_back(1.0 + (0.5 * s - 1.0) * i / kAlphas);
    }
    const Conjecture1Audit a = audit_conjecture1(params, alphas);
    Check(os, "r0", a.r0, a.r0_decodable ? "DECODABLE" : "SKIP");
    if (a.r0_decodable) {
      Check(os, "derivative_at_r0", a.derivative_at_r0, Verdict(a.derivative_negative));
      Check(os, "slope_lhs_minus_rhs", a.slope_lhs - a.slope_rhs, Verdict(a.slope_inequality));
      Check(os, "sum_power_margin", params.total_power() - a.slope_lhs,
            params.p_s > params.p_r ? Verdict(a.sum_power_bound) : "SKIP");
      double min_margin = std::numeric_limits<double>::infinity();
      bool alphas_ok = true;
      for (const AlphaCheck& c : a.alpha_checks) {
        min_margin = std::min(min_margin, c.k1 - c.alpha_k_alpha);
        alphas_ok = alphas_ok && c.pass;
      }
      Check(os, "s", a.s, "INFO");
      Check(os, "alpha_points", static_cast<double>(a.alpha_checks.size()), "INFO");
      if (!a.alpha_checks.empty()) Check(os, "min_k1_minus_alpha_k_alpha", min_margin, Verdict(alphas_ok));
    }
    Check(os, "overall", a.pass ? 1.0 : 0.0, Verdict(a.pass));
  } else {
    const ChannelParams params = ParamsFrom(f);
    const int changes = count_derivative_sign_changes(params);
    Check(os, "sign_changes", changes, Verdict(changes == 1));
    Check(os, "overall", changes == 1 ? 1.0 : 0.0, Verdict(changes == 1));
  }
  return os.str();
}

std::string RunOracleCheck(const Flags& f) {
  const ChannelParams params = ParamsFrom(f);
  const McConfig cfg = f.mc();
  const PowerSplit split(f.alpha.value_or(0.8), f.beta.value_or(0.8));
  const CorrelationPair corr{f.rho1.value_or(0.0), f.rho2.value_or(0.0)};
  corr.validate();
  const LayerRates rates{f.r1.value_or(1.0), f.r2.value_or(0.5)};

  std::ostringstream os;
  os << "quantity,analytic,mc,half_width,result\n";
  bool all = true;
  const auto report = [&](const std::string& name, double analytic, const ThroughputEstimate& mc) {
    const bool ok = mc.covers(analytic);
    all = all && ok;
    os << name << ',' << format_number(analytic) << ',' << format_number(mc.value) << ','
       << format_number(mc.half_width) << ',' << Verdict(ok) << '\n';
  };

  const double r = rates.r1;
  report("single_layer_rho_zero", throughput(r, params, RhoMode::RhoZero), estimate([&](const FadingDraw& d) {
           return df_rate_single(params, d, 0.0).rate > r ? r : 0.0;
         }, cfg));
  if (std::expm1(r) <= params.p_s * params.q) {
    const double rho = rho_max(r, params);
    // At rho_max the relay decodes r exactly, so only the MISO term is random.
    report("single_layer_rho_max", throughput(r, params, RhoMode::RhoMax), estimate([&](const FadingDraw& d) {
             return df_rate_single(params, d, rho).rate_miso > r ? r : 0.0;
           }, cfg));
  }
  const TwoLayerCounts counts = simulate_two_layer(params, split, corr, rates, cfg);
  try {
    report("p_layer1", p_layer1_miso_analytic(params, split, corr, rates.r1, f.tol),
           estimate([&](const FadingDraw& d) {
             const LayerMutualInfos mi = two_layer_mutual_infos(params, d, split, corr);
             return rates.r1 <= 0.0 || mi.i1_miso > rates.r1 ? 1.0 : 0.0;
           }, cfg));
  } catch (const DomainError&) {
    // Outside the closed form's domain; the MC value alone is not a check.
  }
  report("p_layer2", p_layer2_miso_analytic(params, split, corr.rho2, rates.r2, f.tol),
         estimate([&](const FadingDraw& d) {
           const LayerMutualInfos mi = two_layer_mutual_infos(params, d, split, corr);
           return rates.r2 <= 0.0 || mi.i2_miso > rates.r2 ? 1.0 : 0.0;
         }, cfg));
  if (corr.rho1 == 0.0 && corr.rho2 == 0.0) {
    report("two_layer_throughput", average_throughput_uncorrelated(params, split, rates, f.tol).value,
           counts.throughput_estimate(rates, cfg.se_multiplier));
  }
  os << "overall,,,," << Verdict(all) << '\n';
  return os.str();
}

std::filesystem::path ResolveOut(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
  }
  return p;
}

void Emit(const Flags& f, const std::string& text, std::ostream& out) {
  if (f.out == "-") {
    out << text;
    out.flush();
    return;
  }
  const std::filesystem::path path = ResolveOut(f.out);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file " + path.string());
  file << text;
  if (!file.flush()) throw std::runtime_error("cannot write output file " + path.string());
}

void AddParameterFlags(CLI::App& app, Flags& f) {
  app.add_option("--ps-db", f.ps_db, "Source power (dB)");
  app.add_option("--pr-db", f.pr_db, "Relay power (dB); defaults to the source power");
  app.add_option("--q-db", f.q_db, "Source-relay collocation gain (dB)");
  app.add_option("--alpha", f.alpha, "Source layer-1 power fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--beta", f.beta, "Relay layer-1 power fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--rho1", f.rho1, "Layer-1 source/relay correlation")->check(CLI::Range(0.0, 1.0));
  app.add_option("--rho2", f.rho2, "Layer-2 source/relay correlation")->check(CLI::Range(0.0, 1.0));
  app.add_option("--r1", f.r1, "Layer-1 rate (nats)");
  app.add_option("--r2", f.r2, "Layer-2 rate (nats)");
  app.add_option("--layers", f.layers, "Number of broadcast layers");
  app.add_option("--grid", f.grid, "Points per side of the fig7 correlation grid");
  app.add_option("--seed", f.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--samples", f.samples, "Monte Carlo draws")->capture_default_str();
  app.add_option("--workers", f.workers, "Worker threads (results do not depend on it)")->capture_default_str();
  app.add_option("--tol", f.tol, "Quadrature / optimizer tolerance")->capture_default_str();
  app.add_option("--out", f.out, "Output CSV path, '-' for stdout")->capture_default_str();
  app.add_option("--axis", f.axis, "Sweep axis parameter (sweep command)")
      ->check(CLI::IsMember({"ps_db", "pr_db", "q_db", "alpha", "beta", "rho1", "rho2", "r1", "r2"}));
  app.add_option("--range", f.range, "Sweep grid start:stop:step (sweep command)");
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-Markov decode-and-forward relay channel rates, throughput and figure sweeps", "bmdf"};
  Flags f;
  AddParameterFlags(app, f);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  auto* figure = app.add_subcommand("figure", "Emit a figure preset as CSV")->fallthrough();
  figure->add_option("name", f.figure, "fig2 .. fig8")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}));
  auto* sweep = app.add_subcommand("sweep", "Custom two-layer sweep along one parameter")->fallthrough();
  auto* thresholds = app.add_subcommand("thresholds", "Closed-form thresholds")->fallthrough();
  auto* audit = app.add_subcommand("audit", "Numeric audits of the rho = 0 optimality argument")->fallthrough();
  audit->add_option("check", f.check, "conjecture1 | unimodality")
      ->required()
      ->check(CLI::IsMember({"conjecture1", "unimodality"}));
  auto* oracle = app.add_subcommand("oracle-check", "Analytic values against Monte Carlo")->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    f.validate();
    std::string text;
    if (figure->parsed()) {
      text = to_csv(RunFigure(f));
    } else if (sweep->parsed()) {
      text = to_csv(RunSweep(f));
    } else if (thresholds->parsed()) {
      text = RunThresholds(f);
    } else if (audit->parsed()) {
      text = RunAudit(f);
    } else if (oracle->parsed()) {
      text = RunOracleCheck(f);
    }
    Emit(f, text, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bmdf
