// SPDX-License-Identifier: Apache-2.0

// Figure presets and parameter sweeps producing numeric tables, plus the
// CSV form those tables are exchanged in.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bmdf/montecarlo.hpp"

namespace bmdf {

enum class FigureId { Fig2, Fig3, Fig4, Fig5, Fig6, Fig7, Fig8, Custom };

const char* to_string(FigureId id);
/// Accepts "fig2".."fig8" and "custom"; throws InvalidSpec otherwise.
FigureId parse_figure(std::string_view name);

double db_to_linear(double db);
double linear_to_db(double linear);

struct Axis {
  std::string name;  // e.g. "ps_db", "rate", "alpha", "rho"
  std::vector<double> grid;
};

/// Fixed parameters use the CLI key names: ps_db, pr_db, q_db, alpha, beta,
/// rho1, rho2, r1, r2, layers, grid. When pr_db is absent the relay power
/// follows the source power.
struct SweepSpec {
  FigureId figure = FigureId::Custom;
  Axis axis;
  std::map<std::string, double> fixed;
  std::vector<std::string> output_columns;

  /// Throws InvalidSpec on an empty or non-increasing grid, an unknown
  /// parameter name, or columns that differ from the figure's contract.
  void validate() const;
  bool has(const std::string& key) const { return fixed.count(key) != 0; }
  double get(const std::string& key) const;
};

/// Default grids (reconstructed where the figure does not print them):
///   fig2  rate in [0.001, log(1 + p_s q)] step 0.001; ps = pr = 8 dB, q = 10 dB
///   fig3  ps_db 0..40 step 2; pr = ps; q = 10 dB
///   fig4  ps_db 0..40 step 1; layers 1, 2, 4, 8
///   fig5  ps_db 0..40 step 2; pr = ps; q = 10 dB
///   fig6  ps_db 0..40 step 2; pr = 20 dB; q = 10 dB
///   fig7  41 x 41 grid over [0,1]^2; ps = 22 dB, pr = 30 dB, q = 40 dB
///   fig8  alpha in (1, q/2], 200 points; ps = pr, q = 20 dB (s = q)
///   custom ps_db 0..40 step 5 with every other parameter fixed
SweepSpec preset(FigureId id);

/// Default axis for a figure given its fixed parameters (fig2's rate range
/// and fig8's alpha range depend on them; fig7 reads "grid" points per side).
Axis default_axis(FigureId id, const std::map<std::string, double>& fixed);

/// Column contract of each figure; Custom columns follow the axis name.
std::vector<std::string> figure_columns(FigureId id, const std::string& axis_name = "ps_db");

struct SweepOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 100'000;
  unsigned workers = 1;
  double tol = 1e-7;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

/// One row per grid point (Fig4: per grid point and layer count; Fig7: per
/// (rho1, rho2) cell in row-major rho1 order). Deterministic given the seed.
Table run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

void write_csv(std::ostream& os, const Table& table);
std::string to_csv(const Table& table);
/// Inverse of to_csv; throws InvalidSpec on malformed input.
Table parse_csv(std::string_view text);

/// Horizontal gap in dB (direct power minus BM power) at which both curves
/// reach `at_throughput`, by linear interpolation on monotone curves.
/// Throws DomainError when either curve does not span the value.
double gain_over_direct(const Table& table, double at_throughput, const std::string& power_column = "ps_db",
                        const std::string& direct_column = "direct_throughput",
                        const std::string& bm_column = "bm_throughput");

}  // namespace bmdf
