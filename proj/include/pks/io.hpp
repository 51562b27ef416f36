#pragma once

// Plain-text formats: scenario config files, PKS-FIELD snapshots, the CSV
// tables and the run manifest.
//
// Config files are line oriented. Blank lines and lines starting with '#' are
// ignored; everything else is `key = value` or a `[section]` header. The only
// top-level keys are `preset` and `name`; `preset` loads a preset before any
// section is applied. Numbers accept a trailing `pi` factor ("12pi",
// "7.5*pi", "pi"). Booleans are true/false/on/off/yes/no/1/0.
//
//   preset = <name>                     (none: custom, all defaults below)
//   name = <string>                     (custom)
//   [initial]
//     kind = single_bump|two_bump|snapshot   (single_bump)
//     M = <mass>                        (required unless a preset sets it)
//     sigma = 1   y0 = 4   x1 = 0   x2 = 0
//     snapshot = <path>                 (kind = snapshot)
//   [numerics]
//     N = 256   L = 8   epsilon = 0 (0: epsilon_cells * h)   epsilon_cells = 2
//     bridge = truncated_log   gradient = kernel   transport = muscl
//     cfl = 0.4   dt_max = inf   T_max = 10   output_interval = 0.02
//     diffusion = true   chemotaxis = true   assert_symmetry = false
//   [strain]
//     A_mode = explicit|auto (explicit)   A = 0   delta = 0.25   eta = 0.1
//     claim = none|thm1|thm2 (none)   stop_at_box = true
//   [checks]
//     enabled = all|none|<comma list> (all)
//     energy_rel_tol = 1e-6   hls_rel_tol = 1e-3   virial_w_rel_tol = 0.02
//     blowup_ratio = 1e3   block_fraction = 0.25   block_ratio = 1e2
//     trend_window = 5
//   [output]
//     dir = <path> (run)   snapshot_every = 0 (records between snapshots)

#include <chrono>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pks/experiments.hpp"

namespace pks {

inline constexpr const char* kVersion = "1.0.0";

struct OutputOptions {
  std::string dir = "run";
  /// Write a snapshot every k-th record (0: none; the initial and final
  /// states are always written when k > 0).
  int snapshot_every = 0;
};

struct RunConfig {
  ScenarioConfig scenario;
  OutputOptions output;
};

/// Parses a number with an optional trailing pi factor.
double parse_number(const std::string& text);
bool parse_bool(const std::string& text);
/// "all", "none" or a comma-separated list of check names.
std::set<std::string> parse_checks(const std::string& text);

RunConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
/// Throws Error("<path>: cannot open") or Error("<path>:<line>: ...").
RunConfig parse_config(const std::string& path);

/// Every resolved key in the config format; parse_config_text reads it back
/// to the same config.
std::string format_config(const RunConfig& cfg);

/// Decimal form used by every writer: 17 significant digits.
std::string format_double(double v);

struct Snapshot {
  DensityField field;
  double t = 0;
};

void write_snapshot(std::ostream& os, const DensityField& n, double t);
void write_snapshot(const std::string& path, const DensityField& n, double t);
Snapshot read_snapshot(std::istream& is, const std::string& source = "<stream>");
Snapshot read_snapshot(const std::string& path);

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r);
void write_report_csv(std::ostream& os, const std::vector<InequalityReport>& rows);
void write_steps_csv(std::ostream& os, const std::vector<StepTrace>& steps);
void write_phase_header(std::ostream& os, const std::vector<std::string>& params);
void write_phase_row(std::ostream& os, const SweepRow& row);
void write_phase_table(std::ostream& os, const PhaseTable& table);

struct RunManifest {
  RunConfig config;
  std::string version = kVersion;
  std::chrono::system_clock::time_point start;
  std::chrono::system_clock::time_point end;
  double wall_seconds = 0;
  /// ok or error
  std::string status = "ok";
  std::string error;
  int exit_code = 0;
  /// Present when a run finished.
  const RunResult* result = nullptr;
  std::vector<std::string> files;
};

void write_manifest(std::ostream& os, const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

/// Streams records and snapshots of a run into cfg.output.dir and returns the
/// hooks; finish() writes the report CSVs and the step trace.
class RunWriter {
 public:
  explicit RunWriter(const RunConfig& cfg);
  RunHooks hooks();
  void finish(const RunResult& result);
  const std::vector<std::string>& files() const { return files_; }

 private:
  void note(const std::string& name);
  std::string path(const std::string& name) const;

  RunConfig cfg_;
  std::vector<std::string> files_;
  std::unique_ptr<std::ofstream> diagnostics_;
  int records_ = 0;
};

}  // namespace pks
