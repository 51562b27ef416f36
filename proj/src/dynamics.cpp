#include "pks/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pks/fft.hpp"
#include "pks/log.hpp"

namespace pks {
namespace {

double minmod(double a, double b, double c) {
  if (a > 0 && b > 0 && c > 0) return std::min({a, b, c});
  if (a < 0 && b < 0 && c < 0) return std::max({a, b, c});
  return 0.0;
}

// MC-limited increment across a full cell; ghost cells outside the box are 0.
void limited_slopes(const FieldXd& n, FieldXd& sx, FieldXd& sy) {
  const Eigen::Index cells = n.rows();
  sx.resize(cells, cells);
  sy.resize(cells, cells);
  for (Eigen::Index j = 0; j < cells; ++j) {
    for (Eigen::Index i = 0; i < cells; ++i) {
      const double c = n(i, j);
      const double l = i > 0 ? n(i - 1, j) : 0.0;
      const double r = i + 1 < cells ? n(i + 1, j) : 0.0;
      const double d = j > 0 ? n(i, j - 1) : 0.0;
      const double u = j + 1 < cells ? n(i, j + 1) : 0.0;
      sx(i, j) = minmod(2 * (c - l), 0.5 * ((c - l) + (r - c)), 2 * (r - c));
      sy(i, j) = minmod(2 * (c - d), 0.5 * ((c - d) + (u - c)), 2 * (u - c));
    }
  }
}

bool nearly_symmetric(const FieldXd& n) {
  const double m = n.maxCoeff();
  return m > 0 && mirror_symmetry_error(n) <= 1e-12 * m;
}

}  // namespace

Point StrainField::flow(Point x, double t) const {
  return {x.x1 * std::exp(-amplitude * t), x.x2 * std::exp(amplitude * t)};
}

Point strain_eval(double amplitude, Point x) { return StrainField{amplitude}.velocity(x); }

double select_amplitude(double upper_mass, double delta) {
  if (!(delta > 0)) throw Error("delta must be positive");
  return upper_mass / (delta * delta);
}

std::string to_string(Transport t) { return t == Transport::upwind ? "upwind" : "muscl"; }

Transport parse_transport(const std::string& name) {
  if (name == "upwind") return Transport::upwind;
  if (name == "muscl") return Transport::muscl;
  throw Error("unknown transport scheme '" + name + "'");
}

void validate(const StepOptions& o) {
  if (!(o.cfl > 0 && o.cfl < 1)) throw Error("cfl must lie in (0, 1)");
  // Reconstructed face values reach twice the cell mean.
  if (o.transport == Transport::muscl && o.cfl > 0.5)
    throw Error("cfl must not exceed 0.5 with muscl transport");
  if (!(o.dt_max > 0)) throw Error("dt_max must be positive");
}

FieldXd heat_flow(const Grid2d& grid, const FieldXd& n, double tau, double* outflow) {
  const int cells = grid.cells();
  const int p = 2 * cells;
  const double h = grid.spacing();
  auto& fft = thread_fft(p);
  auto real = fft.real();
  std::fill(real.begin(), real.end(), 0.0);
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) real[static_cast<std::size_t>(j) * p + i] = n(i, j);
  }
  fft.forward();

  const int half = p / 2 + 1;
  const double dk = 2 * std::numbers::pi / (p * h);
  std::vector<double> decay(p);
  for (int a = 0; a < p; ++a) {
    const double k = dk * fft.frequency(a);
    decay[a] = std::exp(-k * k * tau);
  }
  const double norm = 1.0 / (static_cast<double>(p) * p);
  auto spec = fft.spectrum();
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < half; ++c) spec[static_cast<std::size_t>(r) * half + c] *= decay[r] * decay[c] * norm;
  }
  fft.inverse();

  FieldXd out(cells, cells);
  double padding = 0;
  real = fft.real();
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      const double v = real[static_cast<std::size_t>(r) * p + c];
      if (r < cells && c < cells) {
        out(c, r) = v;
      } else {
        padding += v;
      }
    }
  }
  if (outflow) *outflow += grid.cell_area() * padding;
  return out;
}

double clip_negative(const Grid2d& grid, FieldXd& n) {
  double neg = 0, pos = 0;
  for (Eigen::Index k = 0; k < n.size(); ++k) {
    const double v = n.data()[k];
    (v < 0 ? neg : pos) += v;
  }
  if (neg == 0) return 0.0;
  const double scale = pos > 0 ? (pos + neg) / pos : 0.0;
  n = n.max(0.0) * std::max(scale, 0.0);
  return -neg * grid.cell_area();
}

FaceVelocity face_velocity(const Grid2d& grid, const VectorField* g, const StrainField& strain) {
  const int cells = grid.cells();
  FaceVelocity u{FieldXd::Zero(cells + 1, cells), FieldXd::Zero(cells, cells + 1)};
  const double a = strain.amplitude;
  for (int j = 0; j < cells; ++j) {
    for (int f = 0; f <= cells; ++f) {
      double v = -a * grid.face(f);
      if (g) {
        const int l = std::max(f - 1, 0), r = std::min(f, cells - 1);
        v += 0.5 * (g->x1(l, j) + g->x1(r, j));
      }
      u.ux(f, j) = v;
    }
  }
  for (int f = 0; f <= cells; ++f) {
    const double strain_part = a * grid.face(f);
    const int d = std::max(f - 1, 0), up = std::min(f, cells - 1);
    for (int i = 0; i < cells; ++i) {
      double v = strain_part;
      if (g) v += 0.5 * (g->x2(i, d) + g->x2(i, up));
      u.uy(i, f) = v;
    }
  }
  return u;
}

double outgoing_rate(const Grid2d& grid, const FaceVelocity& u) {
  const int cells = grid.cells();
  double worst = 0;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const double s = std::max(u.ux(i + 1, j), 0.0) + std::max(-u.ux(i, j), 0.0) +
                       std::max(u.uy(i, j + 1), 0.0) + std::max(-u.uy(i, j), 0.0);
      worst = std::max(worst, s);
    }
  }
  return worst / grid.spacing();
}

FieldXd transport_rate(const Grid2d& grid, const FieldXd& n, const FaceVelocity& u,
                       Transport scheme, double* outflow_rate) {
  const int cells = grid.cells();
  const double h = grid.spacing();
  FieldXd sx, sy;
  if (scheme == Transport::muscl) {
    limited_slopes(n, sx, sy);
  } else {
    sx = sy = FieldXd::Zero(cells, cells);
  }

  // Face fluxes, positive along +x1 / +x2. Ghost cells carry no mass.
  FieldXd fx(cells + 1, cells), fy(cells, cells + 1);
  for (int j = 0; j < cells; ++j) {
    for (int f = 0; f <= cells; ++f) {
      const double v = u.ux(f, j);
      double face = 0;
      if (v > 0) {
        if (f > 0) face = n(f - 1, j) + 0.5 * sx(f - 1, j);
      } else if (f < cells) {
        face = n(f, j) - 0.5 * sx(f, j);
      }
      fx(f, j) = v * face;
    }
  }
  for (int f = 0; f <= cells; ++f) {
    for (int i = 0; i < cells; ++i) {
      const double v = u.uy(i, f);
      double face = 0;
      if (v > 0) {
        if (f > 0) face = n(i, f - 1) + 0.5 * sy(i, f - 1);
      } else if (f < cells) {
        face = n(i, f) - 0.5 * sy(i, f);
      }
      fy(i, f) = v * face;
    }
  }

  FieldXd rate(cells, cells);
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      rate(i, j) = -((fx(i + 1, j) - fx(i, j)) + (fy(i, j + 1) - fy(i, j))) / h;
    }
  }
  if (outflow_rate) {
    double out = 0;
    for (int j = 0; j < cells; ++j) out += fx(cells, j) - fx(0, j);
    for (int i = 0; i < cells; ++i) out += fy(i, cells) - fy(i, 0);
    *outflow_rate = h * out;
  }
  return rate;
}

StepperState make_state(DensityField n0, const KernelTable& table, const StrainField& strain,
                        const StepOptions& options) {
  validate(options);
  StepperState s;
  s.cfl_number = options.cfl;
  const auto& grid = n0.grid;
  const bool moving = options.chemotaxis || strain.amplitude != 0;
  s.dt = options.dt_max;
  if (moving) {
    if (options.chemotaxis) s.chemo = convolve(grid, n0.values, table, options.gradient, false);
    const auto u = face_velocity(grid, options.chemotaxis ? &s.chemo.grad : nullptr, strain);
    const double rate = outgoing_rate(grid, u);
    if (rate > 0) s.dt = std::min(s.dt, 0.95 * options.cfl / rate);
  }
  s.n = std::move(n0);
  return s;
}

StepperState step(StepperState state, const KernelTable& table, const StrainField& strain,
                  const StepOptions& options, double dt_limit) {
  validate(options);
  const auto grid = state.n.grid;
  const bool moving = options.chemotaxis || strain.amplitude != 0;
  const bool symmetric_in = options.assert_symmetry && nearly_symmetric(state.n.values);

  double dt = std::min({state.dt, dt_limit, options.dt_max});
  if (!(dt > 0) || !std::isfinite(dt)) throw Error("step size must be positive and finite");

  StepStats stats;
  FieldXd n;
  double rate = 0;
  int halvings = 0;
  for (;;) {
    stats = StepStats{};
    stats.dt = dt;
    n = state.n.values;
    if (options.diffusion) {
      n = heat_flow(grid, n, 0.5 * dt, &stats.diffusion_outflow);
      stats.clipped_mass += clip_negative(grid, n);
    }
    if (moving) {
      ChemoSolution chemo;
      if (options.chemotaxis) chemo = convolve(grid, n, table, options.gradient, false);
      const auto u = face_velocity(grid, options.chemotaxis ? &chemo.grad : nullptr, strain);
      rate = outgoing_rate(grid, u);
      stats.courant = dt * rate;
      if (stats.courant > options.cfl * (1 + 1e-12)) {
        std::ostringstream os;
        os << "t=" << state.t << ": CFL " << stats.courant << " > " << options.cfl
           << ", halving dt to " << 0.5 * dt;
        state.events.push_back(os.str());
        log::debug(os.str());
        dt *= 0.5;
        ++halvings;
        continue;
      }

      const double mass_before = n.sum();
      double out0 = 0, out1 = 0;
      if (options.transport == Transport::upwind) {
        n += dt * transport_rate(grid, n, u, Transport::upwind, &out0);
        stats.transport_outflow = dt * out0;
      } else {
        FieldXd stage = n + dt * transport_rate(grid, n, u, Transport::muscl, &out0);
        // Second stage uses the drift of the stage field.
        FaceVelocity u1;
        if (options.chemotaxis) {
          const auto stage_chemo = convolve(grid, stage, table, options.gradient, false);
          u1 = face_velocity(grid, &stage_chemo.grad, strain);
          const double rate1 = outgoing_rate(grid, u1);
          if (dt * rate1 > options.cfl * (1 + 1e-12)) {
            std::ostringstream os;
            os << "t=" << state.t << ": stage CFL " << dt * rate1 << " > " << options.cfl
               << ", halving dt to " << 0.5 * dt;
            state.events.push_back(os.str());
            log::debug(os.str());
            dt *= 0.5;
            ++halvings;
            continue;
          }
          rate = std::max(rate, rate1);
        } else {
          u1 = u;
        }
        n = 0.5 * n + 0.5 * (stage + dt * transport_rate(grid, stage, u1, Transport::muscl, &out1));
        stats.transport_outflow = 0.5 * dt * (out0 + out1);
      }
      stats.min_after_transport = n.minCoeff();
      const double peak = n.maxCoeff();
      if (stats.min_after_transport < -options.positivity_tolerance * peak) {
        std::ostringstream os;
        os << "positivity broken at t=" << state.t << ": min n = " << stats.min_after_transport;
        throw Error(os.str());
      }
      stats.interior_drift = grid.cell_area() * (n.sum() - mass_before) + stats.transport_outflow;
      stats.clipped_mass += clip_negative(grid, n);
      state.chemo = std::move(chemo);
    }
    if (options.diffusion) {
      n = heat_flow(grid, n, 0.5 * dt, &stats.diffusion_outflow);
      stats.clipped_mass += clip_negative(grid, n);
    }
    break;
  }
  stats.halvings = halvings;

  if (symmetric_in) {
    const double err = mirror_symmetry_error(n);
    if (err > 1e-12 * n.maxCoeff()) {
      std::ostringstream os;
      os << "mirror symmetry lost at t=" << state.t + dt << ": error " << err;
      throw Error(os.str());
    }
  }

  state.n.values = std::move(n);
  state.t += dt;
  ++state.step_count;
  state.outflow += stats.transport_outflow + stats.diffusion_outflow;
  state.clipped += stats.clipped_mass;
  state.last = stats;
  double next = std::max(dt, state.dt) * 2;
  if (moving && rate > 0) next = std::min(next, 0.95 * options.cfl / rate);
  state.dt = std::min(next, options.dt_max);
  return state;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::healthy: return "healthy";
    case Verdict::suspected: return "suspected";
    case Verdict::blown_up: return "blown_up";
  }
  return "?";
}

double max_block_mass(const Grid2d& grid, const FieldXd& n) {
  const Eigen::Index cells = n.rows();
  if (cells < 3) return grid.cell_area() * n.sum();
  // Three-wide running sums along x1, then along x2.
  FieldXd rows(cells - 2, cells);
  for (Eigen::Index j = 0; j < cells; ++j) {
    for (Eigen::Index i = 0; i + 2 < cells; ++i) rows(i, j) = n(i, j) + n(i + 1, j) + n(i + 2, j);
  }
  double best = 0;
  for (Eigen::Index j = 0; j + 2 < cells; ++j) {
    for (Eigen::Index i = 0; i + 2 < cells; ++i) {
      best = std::max(best, rows(i, j) + rows(i, j + 1) + rows(i, j + 2));
    }
  }
  return grid.cell_area() * best;
}

Verdict detect_blowup(const DensityField& n, double initial_max, const BlowupThresholds& cfg) {
  const double peak = n.values.maxCoeff();
  if (peak >= cfg.ratio * initial_max) return Verdict::blown_up;
  if (peak >= cfg.block_ratio * initial_max) {
    const double mass = integrate(n);
    if (mass > 0 && max_block_mass(n.grid, n.values) >= cfg.block_fraction * mass)
      return Verdict::blown_up;
  }
  return Verdict::healthy;
}

BlowupDetector::BlowupDetector(double initial_max, BlowupThresholds cfg, bool supercritical)
    : initial_max_(initial_max), cfg_(cfg), supercritical_(supercritical) {}

void BlowupDetector::observe_second_moment(double t, double v) {
  trail_.emplace_back(t, v);
  while (static_cast<int>(trail_.size()) > cfg_.trend_window + 1) trail_.pop_front();
}

bool BlowupDetector::trend_negative() const {
  if (static_cast<int>(trail_.size()) < cfg_.trend_window + 1) return false;
  for (std::size_t k = 1; k < trail_.size(); ++k) {
    if (!(trail_[k].second < trail_[k - 1].second)) return false;
  }
  return true;
}

Verdict BlowupDetector::assess(const DensityField& n) const {
  const Verdict v = detect_blowup(n, initial_max_, cfg_);
  if (v == Verdict::healthy && supercritical_ && trend_negative()) return Verdict::suspected;
  return v;
}

}  // namespace pks
