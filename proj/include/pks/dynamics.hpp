#pragma once

// Time stepping for dn/dt + div(n grad c) + b . grad n = lap n with the strain
// b = A(-x1, x2). One step is the Strang sequence
//
//   half diffusion -> transport with u = grad c + b -> half diffusion,
//
// where diffusion is the exact heat semigroup applied in Fourier space on the
// zero-padded doubled grid, and transport is a conservative finite-volume
// update (MC-limited MUSCL with SSP-RK2 by default, donor cell optional).
// Mass leaving the box is metered.

#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "pks/grid.hpp"
#include "pks/kernel.hpp"

namespace pks {

/// b(x) = A(-x1, x2), the gradient of H(x) = (A/2)(x2^2 - x1^2).
struct StrainField {
  double amplitude = 0;

  Point velocity(Point x) const { return {-amplitude * x.x1, amplitude * x.x2}; }
  double potential(Point x) const {
    return 0.5 * amplitude * (x.x2 * x.x2 - x.x1 * x.x1);
  }
  /// Exact characteristic map of dx/dt = b(x) over time t (t may be negative).
  Point flow(Point x, double t) const;
};

Point strain_eval(double amplitude, Point x);

/// A = M+ / delta^2.
double select_amplitude(double upper_mass, double delta);

enum class Transport {
  /// first-order donor cell, forward Euler
  upwind,
  /// MC-limited linear reconstruction, SSP-RK2 with the drift recomputed per stage
  muscl,
};

std::string to_string(Transport t);
Transport parse_transport(const std::string& name);

struct StepOptions {
  double cfl = 0.4;
  bool diffusion = true;
  bool chemotaxis = true;
  Transport transport = Transport::muscl;
  GradientMode gradient = GradientMode::kernel;
  double dt_max = std::numeric_limits<double>::infinity();
  /// Hard error when transport leaves values below -tolerance * max n.
  double positivity_tolerance = 1e-14;
  /// Throw when a mirror-symmetric state loses symmetry beyond 1e-12 max n.
  bool assert_symmetry = false;
};

void validate(const StepOptions& options);

struct StepStats {
  double dt = 0;
  int halvings = 0;
  /// Mass change of the transport update not explained by boundary fluxes.
  double interior_drift = 0;
  double transport_outflow = 0;
  double diffusion_outflow = 0;
  /// Negative mass removed (and redistributed) after the heat substeps.
  double clipped_mass = 0;
  double min_after_transport = 0;
  /// dt * (max over cells of summed outgoing face speed) / h.
  double courant = 0;
};

struct StepperState {
  DensityField n;
  double t = 0;
  /// Proposed size of the next step.
  double dt = 0;
  /// Drift used by the most recent transport substep.
  ChemoSolution chemo;
  long step_count = 0;
  double cfl_number = 0.4;
  double outflow = 0;
  double clipped = 0;
  StepStats last;
  std::vector<std::string> events;
};

/// Initial state: evaluates the drift of n0 to propose the first dt.
StepperState make_state(DensityField n0, const KernelTable& table, const StrainField& strain,
                        const StepOptions& options);

/// Advances one Strang step of size min(state.dt, dt_limit).
StepperState step(StepperState state, const KernelTable& table, const StrainField& strain,
                  const StepOptions& options,
                  double dt_limit = std::numeric_limits<double>::infinity());

/// Exact heat flow for time tau on the zero-padded doubled grid; mass that
/// leaves the box is added to *outflow. The result may carry rounding-level
/// negatives.
FieldXd heat_flow(const Grid2d& grid, const FieldXd& n, double tau, double* outflow = nullptr);

/// Sets negative entries to zero and rescales the rest so the mass is kept.
/// Returns the removed negative mass (>= 0).
double clip_negative(const Grid2d& grid, FieldXd& n);

/// Face-centered drift for the transport substep. ux is (N+1) x N over x1
/// faces, uy is N x (N+1) over x2 faces.
struct FaceVelocity {
  FieldXd ux;
  FieldXd uy;
};

FaceVelocity face_velocity(const Grid2d& grid, const VectorField* chemo_gradient,
                           const StrainField& strain);

/// Largest per-cell sum of outgoing face speeds, divided by h.
double outgoing_rate(const Grid2d& grid, const FaceVelocity& u);

/// dn/dt of the conservative transport operator; *outflow_rate receives the
/// total flux leaving through the box boundary.
FieldXd transport_rate(const Grid2d& grid, const FieldXd& n, const FaceVelocity& u,
                       Transport scheme, double* outflow_rate);

enum class Verdict { healthy, suspected, blown_up };
std::string to_string(Verdict v);

struct BlowupThresholds {
  double ratio = 1e3;
  double block_fraction = 0.25;
  double block_ratio = 1e2;
  /// Consecutive negative second-moment slopes needed for "suspected".
  int trend_window = 5;
};

/// Largest mass held by any 3 x 3 block of cells.
double max_block_mass(const Grid2d& grid, const FieldXd& n);

/// Pointwise part of the detector.
Verdict detect_blowup(const DensityField& n, double initial_max, const BlowupThresholds& cfg);

/// Adds the second-moment trend clause on top of detect_blowup.
class BlowupDetector {
 public:
  BlowupDetector(double initial_max, BlowupThresholds cfg, bool supercritical);

  void observe_second_moment(double t, double v);
  Verdict assess(const DensityField& n) const;
  bool trend_negative() const;

 private:
  double initial_max_;
  BlowupThresholds cfg_;
  bool supercritical_;
  std::deque<std::pair<double, double>> trail_;
};

}  // namespace pks
