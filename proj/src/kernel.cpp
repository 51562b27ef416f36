#include "pks/kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pks/fft.hpp"

namespace pks {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Solves for the quintic matching value, first and second derivative of
// 2 pi K1 at s = 1 (flat) and s = 4 (-log s).
std::array<double, 6> quintic_bridge() {
  Eigen::Matrix<double, 6, 6> a;
  Eigen::Matrix<double, 6, 1> rhs;
  const double ends[2] = {1.0, 4.0};
  const double values[2][3] = {{0.0, 0.0, 0.0}, {-std::log(4.0), -0.25, 1.0 / 16.0}};
  for (int e = 0; e < 2; ++e) {
    const double s = ends[e];
    for (int k = 0; k < 6; ++k) {
      a(3 * e, k) = std::pow(s, k);
      a(3 * e + 1, k) = k > 0 ? k * std::pow(s, k - 1) : 0.0;
      a(3 * e + 2, k) = k > 1 ? k * (k - 1) * std::pow(s, k - 2) : 0.0;
    }
    for (int d = 0; d < 3; ++d) rhs(3 * e + d) = values[e][d];
  }
  Eigen::Matrix<double, 6, 1> c = a.fullPivLu().solve(rhs);
  return {c(0), c(1), c(2), c(3), c(4), c(5)};
}

double horner(const std::array<double, 6>& c, double s) {
  double v = 0;
  for (int k = 5; k >= 0; --k) v = v * s + c[k];
  return v;
}

double horner_derivative(const std::array<double, 6>& c, double s) {
  double v = 0;
  for (int k = 5; k >= 1; --k) v = v * s + k * c[k];
  return v;
}

}  // namespace

std::string to_string(Bridge bridge) {
  return bridge == Bridge::quintic ? "quintic" : "truncated_log";
}

Bridge parse_bridge(const std::string& name) {
  if (name == "truncated_log" || name == "log") return Bridge::truncated_log;
  if (name == "quintic") return Bridge::quintic;
  throw Error("unknown kernel bridge '" + name + "'");
}

std::string to_string(GradientMode mode) {
  return mode == GradientMode::kernel ? "kernel" : "central_difference";
}

GradientMode parse_gradient_mode(const std::string& name) {
  if (name == "kernel") return GradientMode::kernel;
  if (name == "central_difference" || name == "central") return GradientMode::central_difference;
  throw Error("unknown gradient mode '" + name + "'");
}

RegularizedKernel::RegularizedKernel(double eps, Bridge bridge) : eps_(eps), bridge_(bridge) {
  if (!(eps > 0)) throw Error("kernel epsilon must be positive");
  if (bridge == Bridge::quintic) quintic_ = quintic_bridge();
}

double RegularizedKernel::unit_value(double s) const {
  if (s <= 1) return 0.0;
  if (bridge_ == Bridge::truncated_log || s >= 4) return -std::log(s) / kTwoPi;
  return horner(quintic_, s) / kTwoPi;
}

double RegularizedKernel::unit_derivative(double s) const {
  if (s <= 1) return 0.0;
  if (bridge_ == Bridge::truncated_log || s >= 4) return -1.0 / (kTwoPi * s);
  return horner_derivative(quintic_, s) / kTwoPi;
}

double RegularizedKernel::value(double r) const {
  const double s = r / eps_;
  if (s <= 1) return -std::log(eps_) / kTwoPi;
  if (bridge_ == Bridge::truncated_log || s >= 4) return -std::log(r) / kTwoPi;
  return unit_value(s) - std::log(eps_) / kTwoPi;
}

double RegularizedKernel::radial_derivative(double r) const {
  const double s = r / eps_;
  if (s <= 1) return 0.0;
  if (bridge_ == Bridge::truncated_log || s >= 4) return -1.0 / (kTwoPi * r);
  return unit_derivative(s) / eps_;
}

Point RegularizedKernel::gradient(Point z) const {
  const double r = std::hypot(z.x1, z.x2);
  if (r == 0) return {0, 0};
  const double d = radial_derivative(r) / r;
  return {d * z.x1, d * z.x2};
}

KernelTable build_kernel(double eps, const Grid2d& grid, Bridge bridge) {
  const double h = grid.spacing();
  if (eps < h) throw Error("kernel under-resolved: epsilon < h");
  if (!(eps < grid.half_width() / 4)) throw Error("kernel epsilon must be below L/4");

  const int n = grid.cells();
  const int p = 2 * n;
  KernelTable table{RegularizedKernel(eps, bridge), grid, p, {}, {}, {}, 0.0};
  auto& fft = thread_fft(p);
  const double scale = h * h / (static_cast<double>(p) * p);
  auto offset = [&](int a) { return (a < n ? a : a - p) * h; };

  auto transform = [&](auto&& fill) {
    auto real = fft.real();
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) real[static_cast<std::size_t>(r) * p + c] = fill(offset(c), offset(r));
    }
    fft.forward();
    std::vector<std::complex<double>> out(fft.spectrum().begin(), fft.spectrum().end());
    for (auto& z : out) z *= scale;
    return out;
  };

  const auto& k = table.profile;
  table.value_hat = transform([&](double x, double y) { return k.value(std::hypot(x, y)); });
  table.grad1_hat = transform([&](double x, double y) { return k.gradient({x, y}).x1; });
  table.grad2_hat = transform([&](double x, double y) { return k.gradient({x, y}).x2; });

  for (int r = -(n - 1); r < n; ++r) {
    for (int c = -(n - 1); c < n; ++c) {
      const double rad = std::hypot(r * h, c * h);
      if (rad > 0) table.max_gradient = std::max(table.max_gradient, std::abs(k.radial_derivative(rad)));
    }
  }
  return table;
}

VectorField central_gradient(const Grid2d& grid, const FieldXd& f) {
  const int n = grid.cells();
  const double h = grid.spacing();
  VectorField g(grid);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int il = std::max(i - 1, 0), ir = std::min(i + 1, n - 1);
      const int jl = std::max(j - 1, 0), jr = std::min(j + 1, n - 1);
      g.x1(i, j) = (f(ir, j) - f(il, j)) / ((ir - il) * h);
      g.x2(i, j) = (f(i, jr) - f(i, jl)) / ((jr - jl) * h);
    }
  }
  return g;
}

ChemoSolution convolve(const Grid2d& grid, const FieldXd& n, const KernelTable& table,
                       GradientMode mode, bool with_potential) {
  if (!(grid == table.grid)) throw Error("kernel table built for a different grid");
  const int cells = grid.cells();
  const int p = table.padded;
  auto& fft = thread_fft(p);

  auto real = fft.real();
  std::fill(real.begin(), real.end(), 0.0);
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) real[static_cast<std::size_t>(j) * p + i] = n(i, j);
  }
  fft.forward();
  const std::vector<std::complex<double>> n_hat(fft.spectrum().begin(), fft.spectrum().end());

  auto apply = [&](const std::vector<std::complex<double>>& k_hat, FieldXd& out) {
    auto spec = fft.spectrum();
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] = n_hat[q] * k_hat[q];
    fft.inverse();
    auto re = fft.real();
    out.resize(cells, cells);
    for (int j = 0; j < cells; ++j) {
      for (int i = 0; i < cells; ++i) out(i, j) = re[static_cast<std::size_t>(j) * p + i];
    }
  };

  ChemoSolution sol;
  sol.mode = mode;
  sol.grad = VectorField(grid);
  if (with_potential || mode == GradientMode::central_difference) apply(table.value_hat, sol.c);
  if (mode == GradientMode::kernel) {
    apply(table.grad1_hat, sol.grad.x1);
    apply(table.grad2_hat, sol.grad.x2);
  } else {
    sol.grad = central_gradient(grid, sol.c);
  }
  return sol;
}

KernelBoundsReport verify_kernel_bounds(const RegularizedKernel& kernel, int samples,
                                        double tolerance) {
  if (samples < 1000) throw Error("verify_kernel_bounds needs at least 1000 samples");
  KernelBoundsReport rep;
  rep.samples = samples;
  rep.tolerance = tolerance;
  rep.gradient_slack = rep.value_slack = std::numeric_limits<double>::infinity();
  const double lo = kernel.eps() / 4, hi = 8 * kernel.eps();
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < samples; ++k) {
    const double r = lo * std::exp(ratio * k / (samples - 1));
    const double grad = std::abs(kernel.radial_derivative(r));
    rep.max_gradient = std::max(rep.max_gradient, grad);
    const double gslack = 1.0 / (kTwoPi * r) - grad;
    if (gslack < rep.gradient_slack) {
      rep.gradient_slack = gslack;
      rep.gradient_radius = r;
    }
    const double vslack = -std::log(r) / kTwoPi - kernel.value(r);
    if (vslack < rep.value_slack) {
      rep.value_slack = vslack;
      rep.value_radius = r;
    }
  }
  rep.pass = rep.gradient_slack >= -tolerance && rep.value_slack >= -tolerance;
  if (!rep.pass) {
    std::ostringstream os;
    os.precision(6);
    if (rep.gradient_slack < -tolerance)
      os << "gradient bound violated at r=" << rep.gradient_radius << " slack=" << rep.gradient_slack;
    if (rep.value_slack < -tolerance) {
      if (os.tellp() > 0) os << "; ";
      os << "value bound violated at r=" << rep.value_radius << " slack=" << rep.value_slack;
    }
    rep.failure = os.str();
  }
  return rep;
}

}  // namespace pks
