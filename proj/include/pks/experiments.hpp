#pragma once

// Scenario descriptions, the presets, and the drivers that run them.

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pks/diagnostics.hpp"
#include "pks/dynamics.hpp"
#include "pks/kernel.hpp"

namespace pks {

enum class InitialKind { single_bump, two_bump, snapshot };
enum class AmplitudeMode { explicit_value, automatic };
/// Which existence statement a scenario claims to sit inside.
enum class Claim { none, thm1, thm2 };

std::string to_string(InitialKind k);
std::string to_string(AmplitudeMode m);
std::string to_string(Claim c);
InitialKind parse_initial_kind(const std::string& s);
AmplitudeMode parse_amplitude_mode(const std::string& s);
Claim parse_claim(const std::string& s);

struct InitialSpec {
  InitialKind kind = InitialKind::single_bump;
  double mass = 0;
  double sigma = 1;
  /// two_bump: bumps at (0, +-y0)
  double y0 = 4;
  /// single_bump center
  double x1 = 0;
  double x2 = 0;
  std::string snapshot_path;
};

/// Every check name accepted in ScenarioConfig::checks.
const std::vector<std::string>& check_names();

struct ScenarioConfig {
  std::string name = "custom";
  InitialSpec initial;

  AmplitudeMode amplitude_mode = AmplitudeMode::explicit_value;
  double amplitude = 0;
  double delta = 0.25;
  double eta = 0.1;

  /// Absolute epsilon; 0 selects epsilon_cells * h.
  double epsilon = 0;
  double epsilon_cells = 2;
  Bridge bridge = Bridge::truncated_log;
  GradientMode gradient = GradientMode::kernel;
  Transport transport = Transport::muscl;

  double half_width = 8;
  int cells = 256;
  double cfl = 0.4;
  double dt_max = std::numeric_limits<double>::infinity();
  double t_max = 10;
  /// Strained runs stop at min(t_max, T_box).
  bool stop_at_box = true;
  double output_interval = 0.02;
  bool diffusion = true;
  bool chemotaxis = true;
  bool assert_symmetry = false;

  BlowupThresholds thresholds;
  std::set<std::string> checks;
  Claim claim = Claim::none;

  /// Free-energy monotonicity slack per step: energy_rel_tol (|E(0)| + 1).
  double energy_rel_tol = 1e-6;
  /// log-HLS slack as a fraction of M.
  double hls_rel_tol = 1e-3;
  /// One-sided W relation slack as a fraction of M^2/2pi + |2AV|.
  double virial_w_rel_tol = 0.02;
};

std::vector<std::string> preset_names();
/// Throws on an unknown name.
ScenarioConfig preset(const std::string& name);

Grid2d make_grid(const ScenarioConfig& cfg);
double resolved_epsilon(const ScenarioConfig& cfg);
DensityField initial_density(const ScenarioConfig& cfg);
/// Analytic Gaussian mass outside the box, as a fraction of M.
double initial_tail_fraction(const ScenarioConfig& cfg);

struct HypothesisReport {
  double mass = 0;
  double upper_mass = 0;
  double y_plus = 0;
  double v_plus = 0;
  double r2 = 0;
  double symmetry_error = 0;
  bool symmetric = false;
  bool r2_pass = false;
  double second_moment = 0;  // finite on the box: the integrability hypothesis
  double tail_fraction = 0;
  bool tail_pass = false;  // < 1e-10
  double amplitude = 0;
  double amplitude_required = 0;  // M+ / delta^2
  bool thm2_pass = false;         // symmetric, R^2 > 1, M < 16 pi, A >= M+/delta^2
  double thm1_mass_limit = 0;     // 16 pi / (1 + (1 + eta)^2 / R^2)
  bool thm1_pass = false;
  std::vector<std::string> failures;
};

HypothesisReport validate_hypotheses(const ScenarioConfig& cfg, const DensityField& n0);

/// A resolved from the config: explicit, or M+/delta^2 of the discrete n0.
double resolved_amplitude(const ScenarioConfig& cfg, const DensityField& n0);

/// (1/A) log(0.5 L / y+(0)); infinite for A = 0.
double box_time(double amplitude, double half_width, double y_plus0);

struct StepTrace {
  long step = 0;
  double t = 0;
  double dt = 0;
  int halvings = 0;
  double mass = 0;
  double outflow = 0;  // cumulative
  double interior_drift = 0;
  double min_n = 0;
  double symmetry_ratio = 0;  // mirror error / max n
  double energy = std::numeric_limits<double>::quiet_NaN();
  double dissipation = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  ScenarioConfig config;
  double epsilon = 0;
  double amplitude = 0;
  double t_box = std::numeric_limits<double>::infinity();
  double t_end = 0;
  Verdict verdict = Verdict::healthy;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();
  double initial_max = 0;
  double kernel_max_gradient = 0;
  HypothesisReport hypotheses;

  /// Records on the uniform output grid.
  std::vector<DiagnosticsRecord> history;
  /// State at the stopping time when it is not on the output grid.
  std::optional<DiagnosticsRecord> final_record;
  std::vector<StepTrace> steps;
  std::vector<VirialRow> virial;
  std::optional<SplittingReport> splitting;
  /// Inequality rows per check name (CSV-ready).
  std::map<std::string, std::vector<InequalityReport>> reports;
  std::vector<std::string> failed_checks;
  bool checks_passed = true;
  std::vector<std::string> events;
  DensityField final_state;

  /// Largest per-step |interior drift| / M(0), and the conservation gap
  /// max |M(t) - M(0) + outflow(t)| / M(0).
  double worst_interior_drift = 0;
  double worst_conservation_gap = 0;
  double worst_symmetry_ratio = 0;
  double min_density = 0;
};

struct RunHooks {
  /// Called for every emitted record with the index on the output grid
  /// (the off-grid final record gets index -1).
  std::function<void(int, const DiagnosticsRecord&, const DensityField&)> on_record;
};

/// Steps cfg to t_max, T_box, or blow-up. Throws when the scenario claims a
/// regime its initial data does not satisfy.
RunResult run(const ScenarioConfig& cfg, const RunHooks& hooks = {});

/// Reports that decide RunResult::checks_passed; the virial equality and the
/// energy-dissipation balance are resolution-dependent and only recorded.
bool is_gating_report(const std::string& name);

struct SweepAxis {
  /// One of M, A, delta, y0, sigma, eta, N.
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  ScenarioConfig base;
  std::vector<SweepAxis> axes;
  int threads = 1;
};

struct SweepRow {
  std::vector<double> params;
  std::string verdict;  // healthy, suspected, blown_up or error
  double t_end = 0;
  double final_max_n = 0;
  double final_energy = 0;
  bool checks_passed = false;
  std::string error;
};

struct PhaseTable {
  std::vector<std::string> params;
  std::vector<SweepRow> rows;
};

void apply_parameter(ScenarioConfig& cfg, const std::string& name, double value);

/// Cartesian product of the axes, first axis slowest. Runs are independent;
/// a failing run is recorded as an "error" row.
PhaseTable sweep(const SweepSpec& spec,
                 const std::function<void(std::size_t, const SweepRow&)>& on_row = {});

}  // namespace pks
