// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "bmdf/errors.hpp"
#include "bmdf/sweeps.hpp"
#include "doctest.h"

using namespace bmdf;

namespace {

SweepSpec Shrunk(FigureId id, std::vector<double> grid) {
  SweepSpec spec = preset(id);
  spec.axis.grid = std::move(grid);
  return spec;
}

void CheckRoundTrip(const Table& t) {
  const Table back = parse_csv(to_csv(t));
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      const double a = t.rows[i][j], b = back.rows[i][j];
      if (std::isnan(a)) {
        CHECK(std::isnan(b));
      } else {
        CHECK(a == b);
      }
    }
  }
}

}  // namespace

TEST_CASE("figure names") {
  for (FigureId id : {FigureId::Fig2, FigureId::Fig5, FigureId::Fig8, FigureId::Custom}) {
    CHECK(parse_figure(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_figure("fig9"), InvalidSpec);
}

TEST_CASE("presets satisfy their column contracts") {
  for (FigureId id : {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7,
                      FigureId::Fig8, FigureId::Custom}) {
    CHECK_NOTHROW(preset(id).validate());
  }
  CHECK(preset(FigureId::Fig4).output_columns == std::vector<std::string>{"ps_db", "n_layers", "q_min"});
  CHECK(preset(FigureId::Fig7).axis.grid.size() == 41);
  CHECK(preset(FigureId::Fig8).axis.grid.size() == 200);
  CHECK(preset(FigureId::Fig8).axis.grid.back() == doctest::Approx(50.0));
}

TEST_CASE("spec validation") {
  SweepSpec spec = preset(FigureId::Fig3);
  spec.axis.grid = {2.0, 1.0};
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = preset(FigureId::Fig3);
  spec.axis.grid.clear();
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = preset(FigureId::Fig3);
  spec.fixed["snr"] = 3.0;
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = preset(FigureId::Fig3);
  spec.output_columns.pop_back();
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
  spec = preset(FigureId::Custom);
  spec.axis.name = "layers";
  spec.output_columns = figure_columns(FigureId::Custom, "layers");
  CHECK_THROWS_AS(spec.validate(), InvalidSpec);
}

TEST_CASE("every figure sweep round-trips through CSV") {
  SweepOptions opt;
  opt.samples = 2000;
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig2, {0.1, 1.0, 3.0, 3.5}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig3, {0.0, 20.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig4, {0.0, 10.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig5, {10.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig6, {10.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig7, {0.0, 0.5, 1.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Fig8, {1.5, 10.0}), opt));
  CheckRoundTrip(run_sweep(Shrunk(FigureId::Custom, {5.0, 15.0}), opt));
}

TEST_CASE("fig4 rows per layer count") {
  const Table t = run_sweep(Shrunk(FigureId::Fig4, {0.0, 10.0, 20.0}));
  CHECK(t.rows.size() == 12);
  const auto q = t.column("q_min");
  for (double v : q) CHECK(v < 1.0);
}

TEST_CASE("fig8 upper curve is k(1)") {
  SweepSpec spec = preset(FigureId::Fig8);
  const Table t = run_sweep(spec);
  for (const auto& row : t.rows) CHECK(row[1] >= row[2]);
}

TEST_CASE("fig7 reports both throughput and feasibility per cell") {
  SweepOptions opt;
  opt.samples = 4000;
  const Table t = run_sweep(Shrunk(FigureId::Fig7, {0.0, 1.0}), opt);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0][0] == 0.0);
  CHECK(t.rows[1][1] == 1.0);
  for (const auto& row : t.rows) CHECK((row[3] == 0.0 || row[3] == 1.0));
}

TEST_CASE("sweeps are deterministic across worker counts") {
  SweepOptions one;
  one.samples = 50'000;
  SweepOptions four = one;
  four.workers = 4;
  const SweepSpec spec = Shrunk(FigureId::Custom, {5.0, 10.0});
  CHECK(to_csv(run_sweep(spec, one)) == to_csv(run_sweep(spec, four)));
  const SweepSpec fig7 = Shrunk(FigureId::Fig7, {0.0, 0.5});
  CHECK(to_csv(run_sweep(fig7, one)) == to_csv(run_sweep(fig7, four)));
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0}) CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("malformed CSV is rejected") {
  CHECK_THROWS_AS(parse_csv(""), InvalidSpec);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_csv("a\nx1\n"), InvalidSpec);
}

TEST_CASE("gain over direct transmission") {
  Table same{{"ps_db", "direct_throughput", "bm_throughput"}, {{0, 1, 1}, {10, 2, 2}, {20, 3, 3}}};
  CHECK(gain_over_direct(same, 1.7) == doctest::Approx(0.0));
  Table shifted{{"ps_db", "direct_throughput", "bm_throughput"}, {{0, 1, 1.4}, {10, 2, 2.4}, {20, 3, 3.4}}};
  CHECK(gain_over_direct(shifted, 2.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(gain_over_direct(shifted, 5.0), DomainError);
}
