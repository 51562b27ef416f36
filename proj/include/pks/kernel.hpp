#pragma once

// Regularized Newtonian kernel K^eps and free-space convolution c = K^eps * n.
//
// K^eps(z) = K1(|z|/eps) - log(eps)/(2 pi), with K1 = 0 for |z| <= 1 and
// K1 = -log|z|/(2 pi) for |z| >= 4. The bridge on 1 <= |z| <= 4 is selectable.
// Convolutions are evaluated exactly (to rounding) as discrete sums by
// zero-padded FFT on the 2N x 2N doubled grid, so no periodic images enter.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "pks/grid.hpp"

namespace pks {

enum class Bridge {
  /// K1(s) = min(0, -log(s)/(2 pi)). Satisfies |grad K| <= 1/(2 pi |z|) and
  /// K1(s) <= -log(s)/(2 pi) with equality on s >= 1.
  truncated_log,
  /// C2 quintic Hermite bridge in s on [1, 4]. Violates both bounds above.
  quintic,
};

std::string to_string(Bridge bridge);
Bridge parse_bridge(const std::string& name);

enum class GradientMode { kernel, central_difference };

std::string to_string(GradientMode mode);
GradientMode parse_gradient_mode(const std::string& name);

/// Radial profile of K^eps.
class RegularizedKernel {
 public:
  RegularizedKernel(double eps, Bridge bridge);

  double eps() const { return eps_; }
  Bridge bridge() const { return bridge_; }

  /// K1(s) and dK1/ds.
  double unit_value(double s) const;
  double unit_derivative(double s) const;

  /// K^eps at |z| = r and its radial derivative.
  double value(double r) const;
  double radial_derivative(double r) const;
  Point gradient(Point z) const;

 private:
  double eps_;
  Bridge bridge_;
  // 2 pi K1(s) = sum_k coeff[k] s^k on the bridge interval.
  std::array<double, 6> quintic_{};
};

/// Kernel values and gradient sampled at every doubled-grid offset, stored as
/// FFT spectra already scaled by h^2 / (2N)^2.
struct KernelTable {
  RegularizedKernel profile;
  Grid2d grid;
  int padded = 0;
  std::vector<std::complex<double>> value_hat;
  std::vector<std::complex<double>> grad1_hat;
  std::vector<std::complex<double>> grad2_hat;
  /// max |grad K^eps| over the sampled offsets (the constant C_eps).
  double max_gradient = 0;
};

/// Requires h <= eps < L/4.
KernelTable build_kernel(double eps, const Grid2d& grid, Bridge bridge = Bridge::truncated_log);

struct ChemoSolution {
  FieldXd c;  // empty when the potential was not requested
  VectorField grad;
  GradientMode mode = GradientMode::kernel;
};

/// c_ij = h^2 sum_kl K^eps(x_ij - x_kl) n_kl and its gradient. With
/// GradientMode::kernel the gradient is the direct convolution with grad K^eps;
/// central_difference differences c instead (one-sided at the box edge).
ChemoSolution convolve(const Grid2d& grid, const FieldXd& n, const KernelTable& table,
                       GradientMode mode = GradientMode::kernel, bool with_potential = true);

inline ChemoSolution convolve(const DensityField& n, const KernelTable& table,
                              GradientMode mode = GradientMode::kernel,
                              bool with_potential = true) {
  return convolve(n.grid, n.values, table, mode, with_potential);
}

/// Central differences in the interior, one-sided on the boundary rows.
VectorField central_gradient(const Grid2d& grid, const FieldXd& f);

struct KernelBoundsReport {
  int samples = 0;
  double tolerance = 0;
  /// min over samples of 1/(2 pi r) - |grad K^eps(r)|
  double gradient_slack = 0;
  double gradient_radius = 0;
  /// min over samples of -log(r)/(2 pi) - K^eps(r)
  double value_slack = 0;
  double value_radius = 0;
  /// max |grad K^eps| seen (C_eps)
  double max_gradient = 0;
  bool pass = false;
  std::string failure;
};

/// Evaluates both pointwise bounds on a geometric radial sample in
/// [eps/4, 8 eps]. Requires samples >= 1000.
KernelBoundsReport verify_kernel_bounds(const RegularizedKernel& kernel, int samples,
                                        double tolerance = 1e-12);

}  // namespace pks
