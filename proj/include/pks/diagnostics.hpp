#pragma once

// Functionals of a density snapshot and the identities and inequalities they
// are checked against. Every check returns InequalityReport rows whose slack
// is oriented so that slack >= -tolerance means the inequality holds.

#include <string>
#include <vector>

#include "pks/dynamics.hpp"
#include "pks/grid.hpp"
#include "pks/kernel.hpp"

namespace pks {

struct DiagnosticsRecord {
  double t = 0;
  double mass = 0;
  double upper_mass = 0;  // M+
  double second = 0;      // V
  double skew = 0;        // W
  double fourth = 0;      // V4
  double y_plus = 0;
  double v_plus = 0;
  double strip = 0;  // mass in |x2| <= 2 delta
  double entropy = 0;
  double energy = 0;
  double dissipation = 0;
  double max_n = 0;
  double outflow = 0;  // cumulative metered boundary outflow
  double sym_err = 0;
};

/// Column names of the diagnostics CSV, in DiagnosticsRecord order.
const std::vector<std::string>& record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

enum class Sense {
  at_most,   // lhs <= rhs, slack = rhs - lhs
  at_least,  // lhs >= rhs, slack = lhs - rhs
};

struct InequalityReport {
  std::string name;
  double t = 0;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  double tolerance = 0;
  bool pass = false;
};

InequalityReport make_report(std::string name, double t, double lhs, double rhs, Sense sense,
                             double tolerance);

bool all_pass(const std::vector<InequalityReport>& rows);
/// Row with the smallest slack relative to its tolerance.
const InequalityReport* worst(const std::vector<InequalityReport>& rows);

/// h^2 sum n log n over cells with n > 1e-300.
double entropy(const DensityField& n);

/// S - (1/2) h^2 sum c n - h^2 sum H n. chemo may be null (chemotaxis off);
/// otherwise chemo->c must hold the potential of n.
double free_energy(const DensityField& n, const ChemoSolution* chemo, const StrainField& strain);

/// h^2 sum n |grad log n - grad c - b|^2, with grad log n by central
/// differences of log max(n, floor), floor = 1e-12 max n; cells at or below
/// the floor contribute nothing.
double dissipation(const DensityField& n, const ChemoSolution* chemo, const StrainField& strain);

struct RecordOptions {
  double strip_half_width = 0.5;
  /// Include the chemotactic terms in E and D.
  bool chemotaxis = true;
  GradientMode gradient = GradientMode::kernel;
};

DiagnosticsRecord make_record(double t, const DensityField& n, const KernelTable& table,
                              const StrainField& strain, double outflow,
                              const RecordOptions& options);

struct VirialRow {
  double t = 0;
  double dv_dt = 0;
  double dv_predicted = 0;  // 4M(1 - M/8pi) + 2AW
  double dw_dt = 0;
  double dw_bound = 0;  // -M^2/2pi + 2AV
};

/// Central differences over interior records. Requires at least three
/// records at uniform spacing (relative tolerance 1e-6).
std::vector<VirialRow> virial_residuals(const std::vector<DiagnosticsRecord>& history,
                                        double amplitude);

/// Rows of the one-sided W relation with tolerance
/// rel_tol * (M^2/2pi + |2AV|).
std::vector<InequalityReport> virial_w_reports(const std::vector<VirialRow>& rows,
                                               const std::vector<DiagnosticsRecord>& history,
                                               double rel_tol);

/// C(M) = M (1 + log pi - log M).
double hls_constant(double mass);

/// Average of log|z| over z = x - y with x, y uniform in two cells whose
/// centers differ by (a, b) cells, for unit spacing.
double pair_average_log(int a, int b);

/// h^4 sum_ij n_i n_j log|x_i - x_j|, exact for the piecewise-constant density
/// up to a relative O(h^2/d^2) correction on offsets beyond two cells.
double log_interaction(const DensityField& n);

/// S[n] + (2/M) int int n n log|x - y| >= -C(M). Default tolerance 1e-3 M.
InequalityReport log_hls_check(const DensityField& n, double t = 0, double tolerance = -1);

/// int_{n<1} n (-log n) <= V/2 + M log(2 pi) + 1/e.
InequalityReport negative_entropy_bound(const DensityField& n, double t = 0,
                                        double tolerance = 1e-9);

/// R^2 = M+ y+(0)^2 / (2 V+(0)).
double r_squared(double upper_mass, double y_plus, double v_plus);

struct SplittingReport {
  double r2 = 0;
  double strip_bound = 0;  // (1 + eta)^2 M / (2 R^2)
  std::vector<InequalityReport> strip;
  double fitted_rate = 0;
  int fit_points = 0;
  bool rate_pass = false;
  double c_fit = 0;
  /// c_fit / (M+ delta), the prefactor C of the spread bound.
  double implied_c = 0;
  std::vector<InequalityReport> spread;  // V+ against (C_fit + V+(0)) e^{2At}
  bool pass = false;
};

/// History records must carry strip mass at half width 2 delta. The rate is a
/// least-squares fit of log y+ over records with y+ >= 2 y+(0) and t <= t_box,
/// accepted in [0.85 A, 1.1 A]. Throws when R^2 <= 1.
SplittingReport splitting_monitors(const std::vector<DiagnosticsRecord>& history, double delta,
                                   double eta, double amplitude, double t_box);

/// Least-squares slope of log y+ against t over the window above.
double fit_growth_rate(const std::vector<DiagnosticsRecord>& history, double t_box,
                       int* points = nullptr);

/// Growth envelopes integrated from the first record:
///  "second_moment": dV/dt <= 4M + 2A V, so V <= (V0 + 2M/A) e^{2At} - 2M/A
///                   (V0 + 4Mt when A = 0);
///  "second_moment_gronwall": V <= (V0 + 8M/A) e^{A^2 t/2}, only for A > 0;
///  "fourth_moment": dV4/dt <= 12 V + 4A V4 closed with the first envelope.
std::vector<InequalityReport> moment_growth_bounds(const std::vector<DiagnosticsRecord>& history,
                                                   double amplitude, double rel_tol = 1e-6);

}  // namespace pks
