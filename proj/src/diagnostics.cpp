#include "pks/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "pks/fft.hpp"

namespace pks {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gauss-Legendre nodes and weights on [0, 1].
struct Rule {
  std::vector<double> x, w;
};

Rule gauss_legendre(int n) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1 - z);
    r.w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
  return r;
}

const Rule& rule() {
  static const Rule r = gauss_legendre(32);
  return r;
}

// Integral over the unit square [0,1]^2 (u, v) of f(u, v), where f may have a
// logarithmic singularity at the corner (cu, cv) in {0,1}^2. A Duffy split
// about that corner, graded with s = t^2, keeps the rule accurate.
template <typename Fn>
double square_with_corner(Fn&& f, int cu, int cv) {
  const auto& g = rule();
  double total = 0;
  for (std::size_t a = 0; a < g.x.size(); ++a) {
    const double t = g.x[a];
    const double s = t * t;
    for (std::size_t b = 0; b < g.x.size(); ++b) {
      const double w = g.x[b];
      const double weight = g.w[a] * g.w[b] * 2 * t * s;
      // Triangle 1: du = s, dv = s w; triangle 2: du = s w, dv = s.
      const double p[2][2] = {{s, s * w}, {s * w, s}};
      for (const auto& q : p) {
        const double u = cu == 0 ? q[0] : 1 - q[0];
        const double v = cv == 0 ? q[1] : 1 - q[1];
        total += weight * f(u, v);
      }
    }
  }
  return total;
}

template <typename Fn>
double square_plain(Fn&& f) {
  const auto& g = rule();
  double total = 0;
  for (std::size_t a = 0; a < g.x.size(); ++a) {
    for (std::size_t b = 0; b < g.x.size(); ++b) total += g.w[a] * g.w[b] * f(g.x[a], g.x[b]);
  }
  return total;
}

constexpr int kNearOffsets = 4;

// log-kernel spectrum for the doubled grid of `grid`, cached per thread.
const std::vector<std::complex<double>>& log_kernel_spectrum(const Grid2d& grid) {
  thread_local std::map<std::pair<double, int>, std::vector<std::complex<double>>> cache;
  auto& slot = cache[{grid.half_width(), grid.cells()}];
  if (!slot.empty()) return slot;

  const int n = grid.cells();
  const int p = 2 * n;
  const double h = grid.spacing();
  static const auto near = [] {
    std::array<std::array<double, 2 * kNearOffsets + 1>, 2 * kNearOffsets + 1> t{};
    for (int a = -kNearOffsets; a <= kNearOffsets; ++a) {
      for (int b = -kNearOffsets; b <= kNearOffsets; ++b)
        t[a + kNearOffsets][b + kNearOffsets] = pair_average_log(a, b);
    }
    return t;
  }();

  auto& fft = thread_fft(p);
  auto real = fft.real();
  const double logh = std::log(h);
  for (int r = 0; r < p; ++r) {
    const int b = r < n ? r : r - p;
    for (int c = 0; c < p; ++c) {
      const int a = c < n ? c : c - p;
      double v;
      if (std::abs(a) <= kNearOffsets && std::abs(b) <= kNearOffsets) {
        v = logh + near[a + kNearOffsets][b + kNearOffsets];
      } else {
        v = logh + 0.5 * std::log(static_cast<double>(a) * a + static_cast<double>(b) * b);
      }
      real[static_cast<std::size_t>(r) * p + c] = v;
    }
  }
  fft.forward();
  slot.assign(fft.spectrum().begin(), fft.spectrum().end());
  return slot;
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "t", "M", "M_plus", "V", "W", "V4", "y_plus", "V_plus",
      "strip_mass", "S", "E", "D", "max_n", "outflow", "sym_err"};
  return cols;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,     r.mass,    r.upper_mass, r.second, r.skew,   r.fourth,      r.y_plus, r.v_plus,
          r.strip, r.entropy, r.energy,     r.dissipation, r.max_n, r.outflow, r.sym_err};
}

InequalityReport make_report(std::string name, double t, double lhs, double rhs, Sense sense,
                             double tolerance) {
  InequalityReport r;
  r.name = std::move(name);
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = sense == Sense::at_most ? rhs - lhs : lhs - rhs;
  // rhs = +inf with finite lhs is a pass; NaN anywhere is a failure.
  if (std::isinf(rhs) && std::isfinite(lhs)) r.slack = std::numeric_limits<double>::infinity();
  r.tolerance = tolerance;
  r.pass = r.slack >= -tolerance;
  return r;
}

bool all_pass(const std::vector<InequalityReport>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

const InequalityReport* worst(const std::vector<InequalityReport>& rows) {
  const InequalityReport* w = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double score = r.tolerance > 0 ? r.slack / r.tolerance : r.slack;
    if (!w || score < best || std::isnan(score)) {
      w = &r;
      best = std::isnan(score) ? -std::numeric_limits<double>::infinity() : score;
    }
  }
  return w;
}

double entropy(const DensityField& n) {
  double s = 0;
  const auto& v = n.values;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double x = v.data()[k];
    if (x > 1e-300) s += x * std::log(x);
  }
  return n.grid.cell_area() * s;
}

double free_energy(const DensityField& n, const ChemoSolution* chemo, const StrainField& strain) {
  const auto& g = n.grid;
  double interaction = 0;
  if (chemo) {
    if (chemo->c.rows() != g.cells() || chemo->c.cols() != g.cells())
      throw Error("free_energy needs the chemoattractant potential");
    interaction = 0.5 * g.cell_area() * (chemo->c * n.values).sum();
  }
  const double strain_term = 0.5 * strain.amplitude * moment(n, weights::skew());
  return entropy(n) - interaction - strain_term;
}

double dissipation(const DensityField& n, const ChemoSolution* chemo, const StrainField& strain) {
  const auto& g = n.grid;
  const int cells = g.cells();
  const double h = g.spacing();
  const double peak = n.values.maxCoeff();
  if (!(peak > 0)) return 0.0;
  const double floor = 1e-12 * peak;
  const FieldXd logn = n.values.max(floor).log();
  double total = 0;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const double v = n.values(i, j);
      if (!(v > floor)) continue;
      const int il = std::max(i - 1, 0), ir = std::min(i + 1, cells - 1);
      const int jl = std::max(j - 1, 0), jr = std::min(j + 1, cells - 1);
      double gx = (logn(ir, j) - logn(il, j)) / ((ir - il) * h);
      double gy = (logn(i, jr) - logn(i, jl)) / ((jr - jl) * h);
      const Point b = strain.velocity(g.center(i, j));
      gx -= b.x1;
      gy -= b.x2;
      if (chemo) {
        gx -= chemo->grad.x1(i, j);
        gy -= chemo->grad.x2(i, j);
      }
      total += v * (gx * gx + gy * gy);
    }
  }
  return g.cell_area() * total;
}

DiagnosticsRecord make_record(double t, const DensityField& n, const KernelTable& table,
                              const StrainField& strain, double outflow,
                              const RecordOptions& options) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = integrate(n);
  r.second = moment(n, weights::second());
  r.skew = moment(n, weights::skew());
  r.fourth = moment(n, weights::fourth());
  r.upper_mass = 0;
  for (int j = n.grid.cells() / 2; j < n.grid.cells(); ++j) r.upper_mass += n.values.col(j).sum();
  r.upper_mass *= n.grid.cell_area();
  if (r.upper_mass > 0) {
    const auto hp = half_plane_stats(n, VarianceMode::vertical, false);
    r.y_plus = hp.center;
    r.v_plus = hp.variance;
  } else {
    r.y_plus = r.v_plus = kNaN;
  }
  r.strip = strip_mass(n, options.strip_half_width);
  r.entropy = entropy(n);
  if (options.chemotaxis) {
    const auto chemo = convolve(n, table, options.gradient, true);
    r.energy = free_energy(n, &chemo, strain);
    r.dissipation = dissipation(n, &chemo, strain);
  } else {
    r.energy = free_energy(n, nullptr, strain);
    r.dissipation = dissipation(n, nullptr, strain);
  }
  r.max_n = n.values.maxCoeff();
  r.outflow = outflow;
  r.sym_err = mirror_symmetry_error(n);
  return r;
}

std::vector<VirialRow> virial_residuals(const std::vector<DiagnosticsRecord>& history,
                                        double amplitude) {
  if (history.size() < 3) throw Error("virial_residuals needs at least 3 records");
  const double dt = history[1].t - history[0].t;
  if (!(dt > 0)) throw Error("virial_residuals: records must advance in time");
  for (std::size_t k = 1; k < history.size(); ++k) {
    const double step = history[k].t - history[k - 1].t;
    if (std::abs(step - dt) > 1e-6 * dt) {
      std::ostringstream os;
      os << "virial_residuals: non-uniform output spacing at t=" << history[k].t;
      throw Error(os.str());
    }
  }
  std::vector<VirialRow> rows;
  for (std::size_t k = 1; k + 1 < history.size(); ++k) {
    const auto& r = history[k];
    const double span = history[k + 1].t - history[k - 1].t;
    VirialRow row;
    row.t = r.t;
    row.dv_dt = (history[k + 1].second - history[k - 1].second) / span;
    row.dw_dt = (history[k + 1].skew - history[k - 1].skew) / span;
    row.dv_predicted = 4 * r.mass * (1 - r.mass / (8 * kPi)) + 2 * amplitude * r.skew;
    row.dw_bound = -r.mass * r.mass / (2 * kPi) + 2 * amplitude * r.second;
    rows.push_back(row);
  }
  return rows;
}

std::vector<InequalityReport> virial_w_reports(const std::vector<VirialRow>& rows,
                                               const std::vector<DiagnosticsRecord>& history,
                                               double rel_tol) {
  std::vector<InequalityReport> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double m = history[k + 1].mass;
    const double pair = m * m / (2 * kPi);
    const double scale = pair + std::abs(rows[k].dw_bound + pair);
    out.push_back(make_report("virial_w", rows[k].t, rows[k].dw_dt, rows[k].dw_bound,
                              Sense::at_least, rel_tol * scale));
  }
  return out;
}

double hls_constant(double mass) {
  if (!(mass > 0)) throw Error("log-HLS constant needs positive mass");
  return mass * (1 + std::log(kPi) - std::log(mass));
}

double pair_average_log(int a, int b) {
  // The difference of two uniform unit cells has density (1-|u|)(1-|v|) on
  // [-1,1]^2; integrate log|(a+u, b+v)| against it quadrant by quadrant.
  double total = 0;
  for (int su : {-1, 1}) {
    for (int sv : {-1, 1}) {
      auto f = [&](double u, double v) {
        const double x = a + su * u, y = b + sv * v;
        const double r2 = x * x + y * y;
        return r2 > 0 ? (1 - u) * (1 - v) * 0.5 * std::log(r2) : 0.0;
      };
      // Singularity inside this quadrant's closure, if any.
      int cu = -1, cv = -1;
      for (int iu = 0; iu <= 1; ++iu) {
        for (int iv = 0; iv <= 1; ++iv) {
          if (a + su * iu == 0 && b + sv * iv == 0) {
            cu = iu;
            cv = iv;
          }
        }
      }
      total += cu >= 0 ? square_with_corner(f, cu, cv) : square_plain(f);
    }
  }
  return total;
}

double log_interaction(const DensityField& n) {
  const auto& grid = n.grid;
  const int cells = grid.cells();
  const int p = 2 * cells;
  const auto& kernel = log_kernel_spectrum(grid);
  auto& fft = thread_fft(p);
  auto real = fft.real();
  std::fill(real.begin(), real.end(), 0.0);
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) real[static_cast<std::size_t>(j) * p + i] = n.values(i, j);
  }
  fft.forward();
  auto spec = fft.spectrum();
  const double norm = 1.0 / (static_cast<double>(p) * p);
  for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= kernel[q] * norm;
  fft.inverse();
  real = fft.real();
  double s = 0;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) s += n.values(i, j) * real[static_cast<std::size_t>(j) * p + i];
  }
  const double area = grid.cell_area();
  return area * area * s;
}

InequalityReport log_hls_check(const DensityField& n, double t, double tolerance) {
  const double mass = integrate(n);
  if (!(mass > 0)) throw Error("log-HLS check needs positive mass");
  const double lhs = entropy(n) + 2.0 / mass * log_interaction(n);
  const double rhs = -hls_constant(mass);
  return make_report("log_hls", t, lhs, rhs, Sense::at_least,
                     tolerance >= 0 ? tolerance : 1e-3 * mass);
}

InequalityReport negative_entropy_bound(const DensityField& n, double t, double tolerance) {
  double neg = 0;
  const auto& v = n.values;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double x = v.data()[k];
    if (x > 1e-300 && x < 1) neg -= x * std::log(x);
  }
  neg *= n.grid.cell_area();
  const double rhs =
      0.5 * moment(n, weights::second()) + integrate(n) * std::log(2 * kPi) + std::exp(-1.0);
  return make_report("negative_entropy", t, neg, rhs, Sense::at_most,
                     tolerance * (std::abs(rhs) + 1));
}

double r_squared(double upper_mass, double y_plus, double v_plus) {
  return upper_mass * y_plus * y_plus / (2 * v_plus);
}

double fit_growth_rate(const std::vector<DiagnosticsRecord>& history, double t_box, int* points) {
  if (history.empty()) throw Error("fit_growth_rate: empty history");
  const double y0 = history.front().y_plus;
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (const auto& r : history) {
    if (!(r.y_plus >= 2 * y0) || r.t > t_box) continue;
    const double ly = std::log(r.y_plus);
    st += r.t;
    sy += ly;
    stt += r.t * r.t;
    sty += r.t * ly;
    ++count;
  }
  if (points) *points = count;
  if (count < 2) return kNaN;
  const double den = count * stt - st * st;
  return (count * sty - st * sy) / den;
}

SplittingReport splitting_monitors(const std::vector<DiagnosticsRecord>& history, double delta,
                                   double eta, double amplitude, double t_box) {
  if (history.empty()) throw Error("splitting_monitors: empty history");
  if (!(amplitude > 0)) throw Error("splitting_monitors needs A > 0");
  const auto& first = history.front();
  SplittingReport rep;
  rep.r2 = r_squared(first.upper_mass, first.y_plus, first.v_plus);
  if (!(rep.r2 > 1)) {
    std::ostringstream os;
    os << "configuration rejected: R^2 = " << rep.r2
       << " <= 1 violates the hypothesis y+(0)^2 > (2/M+) V+(0)";
    throw Error(os.str());
  }
  const double factor = (1 + eta) * (1 + eta) / (2 * rep.r2);
  rep.strip_bound = factor * first.mass;
  for (const auto& r : history) {
    rep.strip.push_back(make_report("strip_mass", r.t, r.strip, factor * r.mass, Sense::at_most,
                                    1e-12 * r.mass));
  }

  rep.fitted_rate = fit_growth_rate(history, t_box, &rep.fit_points);
  rep.rate_pass = rep.fitted_rate >= 0.85 * amplitude && rep.fitted_rate <= 1.1 * amplitude;

  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& r : history) {
    if (r.t - first.t > t_box) continue;
    sup = std::max(sup, r.v_plus * std::exp(-2 * amplitude * (r.t - first.t)));
  }
  rep.c_fit = sup - first.v_plus;
  rep.implied_c = rep.c_fit / (first.upper_mass * delta);
  for (const auto& r : history) {
    if (r.t - first.t > t_box) continue;
    const double rhs = (rep.c_fit + first.v_plus) * std::exp(2 * amplitude * (r.t - first.t));
    rep.spread.push_back(
        make_report("v_plus_growth", r.t, r.v_plus, rhs, Sense::at_most, 1e-12 * std::abs(rhs)));
  }
  rep.pass = all_pass(rep.strip) && rep.rate_pass && all_pass(rep.spread) &&
             std::isfinite(rep.c_fit);
  return rep;
}

std::vector<InequalityReport> moment_growth_bounds(const std::vector<DiagnosticsRecord>& history,
                                                   double amplitude, double rel_tol) {
  std::vector<InequalityReport> out;
  if (history.empty()) return out;
  const auto& first = history.front();
  const double m = first.mass, v0 = first.second, v40 = first.fourth;
  const double a = amplitude;
  auto tol = [&](double rhs) { return rel_tol * std::max(std::abs(rhs), 1.0); };
  for (const auto& r : history) {
    const double t = r.t - first.t;
    double bound_v, bound_v4;
    if (a == 0) {
      bound_v = v0 + 4 * m * t;
      bound_v4 = v40 + 12 * (v0 * t + 2 * m * t * t);
    } else {
      bound_v = v0 * std::exp(2 * a * t) + 2 * m / a * std::expm1(2 * a * t);
      const double j = (v0 + 2 * m / a) * (-std::expm1(-2 * a * t)) / (2 * a) -
                       2 * m / a * (-std::expm1(-4 * a * t)) / (4 * a);
      bound_v4 = std::exp(4 * a * t) * (v40 + 12 * j);
    }
    out.push_back(make_report("second_moment", r.t, r.second, bound_v, Sense::at_most, tol(bound_v)));
    if (a > 0) {
      const double g = (v0 + 8 * m / a) * std::exp(0.5 * a * a * t);
      out.push_back(
          make_report("second_moment_gronwall", r.t, r.second, g, Sense::at_most, tol(g)));
    }
    out.push_back(make_report("fourth_moment", r.t, r.fourth, bound_v4, Sense::at_most, tol(bound_v4)));
  }
  return out;
}

}  // namespace pks
