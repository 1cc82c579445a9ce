// SPDX-License-Identifier: Apache-2.0

#include "bmdf/sweeps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/single_layer.hpp"
#include "bmdf/two_layer.hpp"

namespace bmdf {
namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys{"ps_db", "pr_db", "q_db", "alpha", "beta", "rho1",
                                          "rho2",  "r1",    "r2",   "layers", "grid"};
  return keys;
}

std::vector<double> Range(double lo, double hi, double step) {
  std::vector<double> out;
  const long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

struct Point {
  std::map<std::string, double> values;

  double get(const std::string& k, double fallback) const {
    const auto it = values.find(k);
    return it == values.end() ? fallback : it->second;
  }
  ChannelParams params() const {
    const double ps_db = get("ps_db", 10.0);
    return {db_to_linear(ps_db), db_to_linear(get("pr_db", ps_db)), db_to_linear(get("q_db", 10.0))};
  }
};

Point PointAt(const SweepSpec& spec, double x) {
  Point p{spec.fixed};
  p.values[spec.axis.name] = x;
  return p;
}

// Power (dB) at which the increasing curve `f` reaches `target`.
double SolveForPowerDb(const ScalarFn& f, double target, double near_db) {
  double lo = near_db - 30.0, hi = near_db + 30.0;
  while (f(lo) > target) lo -= 30.0;
  while (f(hi) < target) hi += 30.0;
  return bisect_root([&](double db) { return f(db) - target; }, lo, hi, 1e-12);
}

int RegionCode(RhoRegionKind k) {
  switch (k) {
    case RhoRegionKind::ZeroOptimal:
      return 0;
    case RhoRegionKind::Ambiguous:
      return 1;
    case RhoRegionKind::MaxOptimal:
      return 2;
  }
  return -1;
}

Table SweepFig2(const SweepSpec& spec) {
  Table t{spec.output_columns, {}};
  for (const double rate : spec.axis.grid) {
    const ChannelParams params = PointAt(spec, rate).params();
    const double cap = std::log1p(params.p_s * params.q);
    const double tp_max = rate <= cap ? throughput(rate, params, RhoMode::RhoMax)
                                      : std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({rate, throughput(rate, params, RhoMode::RhoZero), tp_max,
                      static_cast<double>(RegionCode(classify_rho_region(rate, params).kind))});
  }
  return t;
}

Table SweepFig3(const SweepSpec& spec) {
  Table t{spec.output_columns, {}};
  for (const double ps_db : spec.axis.grid) {
    const ChannelParams params = PointAt(spec, ps_db).params();
    const double direct = direct_throughput(params.p_s);
    const double bm = oblivious_bm_throughput(params);
    const double matched = SolveForPowerDb([](double db) { return direct_throughput(db_to_linear(db)); }, bm, ps_db);
    t.rows.push_back({ps_db, direct, bm, matched - ps_db});
  }
  return t;
}

Table SweepFig4(const SweepSpec& spec) {
  Table t{spec.output_columns, {}};
  std::vector<int> layers{1, 2, 4, 8};
  if (spec.has("layers")) layers = {static_cast<int>(spec.get("layers"))};
  for (const double ps_db : spec.axis.grid) {
    const double ps = db_to_linear(ps_db);
    for (const int n : layers) {
      t.rows.push_back({ps_db, static_cast<double>(n), q_min_layers(ps, optimize_siso_layering(ps, n))});
    }
  }
  return t;
}

Table SweepTwoLayerOblivious(const SweepSpec& spec, const SweepOptions& opt) {
  Table t{spec.output_columns, {}};
  const auto direct_at = [](double db) { return optimize_siso_layering(db_to_linear(db), 2).objective; };
  for (const double ps_db : spec.axis.grid) {
    const ChannelParams params = PointAt(spec, ps_db).params();
    const ObliviousTwoLayer ob = oblivious_two_layer(params, true, opt.tol);
    const double single = oblivious_bm_throughput(params);
    const double matched = SolveForPowerDb(direct_at, ob.bm, ps_db);
    t.rows.push_back({ps_db, ob.direct, ob.bm, single, matched - ps_db});
  }
  return t;
}

Table SweepFig7(const SweepSpec& spec, const SweepOptions& opt) {
  Table t{spec.output_columns, {}};
  const ChannelParams params = Point{spec.fixed}.params();
  const ObliviousTwoLayer ob = oblivious_two_layer(params, false, opt.tol);
  const std::vector<FadingDraw> draws = generate_draws(RngStream(opt.seed), opt.samples, opt.workers);
  for (const double rho1 : spec.axis.grid) {
    for (const double rho2 : spec.axis.grid) {
      const CorrelationPair corr{rho1, rho2};
      const TwoLayerCounts counts = simulate_two_layer_over(draws, params, ob.split, corr, ob.rates, opt.workers);
      const bool feasible = *classify_conic(params, ob.split, ob.rates, corr).probe_feasible;
      t.rows.push_back({rho1, rho2, counts.throughput(ob.rates), feasible ? 1.0 : 0.0});
    }
  }
  return t;
}

Table SweepFig8(const SweepSpec& spec) {
  Table t{spec.output_columns, {}};
  const ChannelParams params = Point{spec.fixed}.params();
  const double s = params.total_power() * params.q / (2.0 * params.p_r);
  const double k1 = k_alpha(1.0, s);
  for (const double alpha : spec.axis.grid) t.rows.push_back({alpha, k1, alpha * k_alpha(alpha, s)});
  return t;
}

Table SweepCustom(const SweepSpec& spec, const SweepOptions& opt) {
  Table t{spec.output_columns, {}};
  McConfig cfg{opt.seed, opt.samples, opt.workers, kDefaultSeMultiplier};
  for (const double x : spec.axis.grid) {
    const Point pt = PointAt(spec, x);
    const ChannelParams params = pt.params();
    params.validate();
    const PowerSplit split(pt.get("alpha", 0.8), pt.get("beta", 0.8));
    const CorrelationPair corr{pt.get("rho1", 0.0), pt.get("rho2", 0.0)};
    corr.validate();
    const LayerRates rates{pt.get("r1", 1.0), pt.get("r2", 0.5)};
    const ThroughputEstimate tp = average_throughput_mc(params, split, corr, rates, cfg);
    const ThroughputEstimate p1 = p_layer1_miso(params, split, corr, rates.r1, cfg, opt.tol);
    const double p2 = p_layer2_miso_analytic(params, split, corr.rho2, rates.r2, opt.tol);
    t.rows.push_back({x, tp.value, tp.half_width, p1.value, p2});
  }
  return t;
}

}  // namespace

const char* to_string(FigureId id) {
  switch (id) {
    case FigureId::Fig2:
      return "fig2";
    case FigureId::Fig3:
      return "fig3";
    case FigureId::Fig4:
      return "fig4";
    case FigureId::Fig5:
      return "fig5";
    case FigureId::Fig6:
      return "fig6";
    case FigureId::Fig7:
      return "fig7";
    case FigureId::Fig8:
      return "fig8";
    case FigureId::Custom:
      return "custom";
  }
  return "unknown";
}

FigureId parse_figure(std::string_view name) {
  for (const FigureId id : {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6,
                            FigureId::Fig7, FigureId::Fig8, FigureId::Custom}) {
    if (name == to_string(id)) return id;
  }
  throw InvalidSpec("unknown figure '" + std::string(name) + "' (expected fig2..fig8 or custom)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double SweepSpec::get(const std::string& key) const {
  const auto it = fixed.find(key);
  if (it == fixed.end()) throw InvalidSpec("sweep parameter '" + key + "' is not set");
  return it->second;
}

std::vector<std::string> figure_columns(FigureId id, const std::string& axis_name) {
  switch (id) {
    case FigureId::Fig2:
      return {"rate", "tp_rho_zero", "tp_rho_max", "region"};
    case FigureId::Fig3:
      return {"ps_db", "direct_throughput", "bm_throughput", "gain_db"};
    case FigureId::Fig4:
      return {"ps_db", "n_layers", "q_min"};
    case FigureId::Fig5:
    case FigureId::Fig6:
      return {"ps_db", "direct_throughput", "bm_throughput", "bm_single_layer_throughput", "gain_db"};
    case FigureId::Fig7:
      return {"rho1", "rho2", "throughput", "feasible_flag"};
    case FigureId::Fig8:
      return {"alpha", "k1", "alpha_k_alpha"};
    case FigureId::Custom:
      return {axis_name, "throughput_mc", "throughput_mc_half_width", "p_layer1", "p_layer2_bound"};
  }
  return {};
}

void SweepSpec::validate() const {
  if (axis.grid.empty()) throw InvalidSpec("sweep grid is empty");
  for (std::size_t i = 0; i + 1 < axis.grid.size(); ++i) {
    if (!(axis.grid[i] < axis.grid[i + 1])) throw InvalidSpec("sweep grid must be strictly increasing");
  }
  for (const double x : axis.grid) {
    if (!std::isfinite(x)) throw InvalidSpec("sweep grid values must be finite");
  }
  for (const auto& [k, v] : fixed) {
    if (!KnownKeys().count(k)) throw InvalidSpec("unknown sweep parameter '" + k + "'");
    if (!std::isfinite(v)) throw InvalidSpec("sweep parameter '" + k + "' must be finite");
  }
  if (figure == FigureId::Custom) {
    if (!KnownKeys().count(axis.name) || axis.name == "layers" || axis.name == "grid") {
      throw InvalidSpec("unknown sweep axis '" + axis.name + "'");
    }
  }
  if (output_columns != figure_columns(figure, axis.name)) {
    throw InvalidSpec(std::string("output columns do not match the ") + to_string(figure) + " contract");
  }
}

Axis default_axis(FigureId id, const std::map<std::string, double>& fixed) {
  const auto get = [&](const char* k, double fallback) {
    const auto it = fixed.find(k);
    return it == fixed.end() ? fallback : it->second;
  };
  switch (id) {
    case FigureId::Fig2: {
      const double ps = db_to_linear(get("ps_db", 10.0));
      const double cap = std::log1p(ps * db_to_linear(get("q_db", 10.0)));
      Axis axis{"rate", {}};
      for (long k = 1; 1e-3 * static_cast<double>(k) <= cap; ++k) axis.grid.push_back(1e-3 * static_cast<double>(k));
      return axis;
    }
    case FigureId::Fig3:
    case FigureId::Fig5:
    case FigureId::Fig6:
      return {"ps_db", Range(0.0, 40.0, 2.0)};
    case FigureId::Fig4:
      return {"ps_db", Range(0.0, 40.0, 1.0)};
    case FigureId::Fig7: {
      const long n = std::lround(get("grid", 41.0));
      if (n < 2) throw InvalidSpec("fig7 grid needs at least 2 points per side");
      return {"rho", Range(0.0, 1.0, 1.0 / static_cast<double>(n - 1))};
    }
    case FigureId::Fig8: {
      const double ps_db = get("ps_db", 10.0);
      const double ps = db_to_linear(ps_db), pr = db_to_linear(get("pr_db", ps_db));
      const double s = (ps + pr) * db_to_linear(get("q_db", 20.0)) / (2.0 * pr);
      if (!(s > 2.0)) throw InvalidSpec("fig8 needs s = P q / (2 p_r) > 2");
      Axis axis{"alpha", {}};
      for (int i = 1; i <= 200; ++i) axis.grid.push_back(1.0 + (0.5 * s - 1.0) * i / 200.0);
      return axis;
    }
    case FigureId::Custom:
      return {"ps_db", Range(0.0, 40.0, 5.0)};
  }
  throw InvalidSpec("unhandled figure");
}

SweepSpec preset(FigureId id) {
  SweepSpec spec;
  spec.figure = id;
  switch (id) {
    case FigureId::Fig2:
      spec.fixed = {{"ps_db", 8.0}, {"pr_db", 8.0}, {"q_db", 10.0}};
      break;
    case FigureId::Fig3:
    case FigureId::Fig5:
      spec.fixed = {{"q_db", 10.0}};
      break;
    case FigureId::Fig6:
      spec.fixed = {{"pr_db", 20.0}, {"q_db", 10.0}};
      break;
    case FigureId::Fig7:
      spec.fixed = {{"ps_db", 22.0}, {"pr_db", 30.0}, {"q_db", 40.0}};
      break;
    case FigureId::Fig8:
      spec.fixed = {{"q_db", 20.0}};
      break;
    case FigureId::Fig4:
    case FigureId::Custom:
      break;
  }
  spec.axis = default_axis(id, spec.fixed);
  spec.output_columns = figure_columns(id, spec.axis.name);
  return spec;
}

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidSpec("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

Table run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  switch (spec.figure) {
    case FigureId::Fig2:
      return SweepFig2(spec);
    case FigureId::Fig3:
      return SweepFig3(spec);
    case FigureId::Fig4:
      return SweepFig4(spec);
    case FigureId::Fig5:
    case FigureId::Fig6:
      return SweepTwoLayerOblivious(spec, options);
    case FigureId::Fig7:
      return SweepFig7(spec, options);
    case FigureId::Fig8:
      return SweepFig8(spec);
    case FigureId::Custom:
      return SweepCustom(spec, options);
  }
  throw InvalidSpec("unhandled figure");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) os << (j ? "," : "") << table.columns[j];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_number(row[j]);
    os << '\n';
  }
}

std::string to_csv(const Table& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseNumber(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidSpec("malformed CSV number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Table parse_csv(std::string_view text) {
  Table t;
  bool header = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (header) {
      for (const auto f : fields) t.columns.emplace_back(f);
      header = false;
      continue;
    }
    if (fields.size() != t.columns.size()) throw InvalidSpec("CSV row width does not match header");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) row.push_back(ParseNumber(f));
    t.rows.push_back(std::move(row));
  }
  if (header) throw InvalidSpec("CSV has no header");
  return t;
}

namespace {

// Abscissa at which the piecewise-linear curve (x, y) first reaches `level`.
double CrossingAt(const std::vector<double>& x, const std::vector<double>& y, double level, const char* what) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double y0 = y[i], y1 = y[i + 1];
    if ((y0 <= level && level <= y1) || (y1 <= level && level <= y0)) {
      if (y1 == y0) return x[i];
      return x[i] + (level - y0) * (x[i + 1] - x[i]) / (y1 - y0);
    }
  }
  std::ostringstream os;
  os << "throughput " << level << " is outside the " << what << " curve's range";
  throw DomainError(os.str());
}

}  // namespace

double gain_over_direct(const Table& table, double at_throughput, const std::string& power_column,
                        const std::string& direct_column, const std::string& bm_column) {
  const std::vector<double> p = table.column(power_column);
  const double p_direct = CrossingAt(p, table.column(direct_column), at_throughput, "direct");
  const double p_bm = CrossingAt(p, table.column(bm_column), at_throughput, "BM");
  return p_direct - p_bm;
}

}  // namespace bmdf
