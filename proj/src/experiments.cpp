#include "pks/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "pks/io.hpp"
#include "pks/log.hpp"

namespace pks {
namespace {

constexpr double kPi = std::numbers::pi;

double gaussian(double mass, double sigma, double dx, double dy) {
  return mass / (2 * kPi * sigma * sigma) * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
}

// P(|X - c| > L or |Y - c'| > L) style box tail of one isotropic Gaussian.
double gaussian_tail(double sigma, double cx, double cy, double half_width) {
  auto inside = [&](double c) {
    const double s = std::sqrt(2.0) * sigma;
    return 0.5 * (std::erf((half_width - c) / s) + std::erf((half_width + c) / s));
  };
  return 1 - inside(cx) * inside(cy);
}

std::set<std::string> all_checks() {
  return {check_names().begin(), check_names().end()};
}

struct EnergyProbe {
  double energy;
  double dissipation;
};

EnergyProbe probe_energy(const DensityField& n, const KernelTable& table, const StrainField& strain,
                         const ScenarioConfig& cfg) {
  if (cfg.chemotaxis) {
    const auto chemo = convolve(n, table, cfg.gradient, true);
    return {free_energy(n, &chemo, strain), dissipation(n, &chemo, strain)};
  }
  return {free_energy(n, nullptr, strain), dissipation(n, nullptr, strain)};
}

}  // namespace

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::single_bump: return "single_bump";
    case InitialKind::two_bump: return "two_bump";
    case InitialKind::snapshot: return "snapshot";
  }
  return "?";
}

std::string to_string(AmplitudeMode m) {
  return m == AmplitudeMode::automatic ? "auto" : "explicit";
}

std::string to_string(Claim c) {
  switch (c) {
    case Claim::none: return "none";
    case Claim::thm1: return "thm1";
    case Claim::thm2: return "thm2";
  }
  return "?";
}

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "single_bump") return InitialKind::single_bump;
  if (s == "two_bump") return InitialKind::two_bump;
  if (s == "snapshot") return InitialKind::snapshot;
  throw Error("unknown initial kind '" + s + "'");
}

AmplitudeMode parse_amplitude_mode(const std::string& s) {
  if (s == "auto") return AmplitudeMode::automatic;
  if (s == "explicit") return AmplitudeMode::explicit_value;
  throw Error("unknown A_mode '" + s + "'");
}

Claim parse_claim(const std::string& s) {
  if (s == "none") return Claim::none;
  if (s == "thm1") return Claim::thm1;
  if (s == "thm2") return Claim::thm2;
  throw Error("unknown claim '" + s + "'");
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "conservation", "symmetry", "energy",     "virial",
      "log_hls",      "negative_entropy", "splitting", "moments"};
  return names;
}

bool is_gating_report(const std::string& name) {
  return name != "virial_v" && name != "energy_dissipation";
}

std::vector<std::string> preset_names() {
  return {"static_subcritical", "static_critical", "static_supercritical",
          "strained_supercritical", "heat_sanity", "advection_sanity"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.checks = all_checks();
  auto static_bump = [&](double mass) {
    c.initial = {InitialKind::single_bump, mass, 1.0, 0, 0, 0, {}};
    c.half_width = 8;
    c.cells = 256;
    c.epsilon_cells = 1;
    c.t_max = 10;
    c.output_interval = 0.02;
  };
  if (name == "static_subcritical") {
    static_bump(4 * kPi);
    c.half_width = 12;
  } else if (name == "static_critical") {
    static_bump(8 * kPi);
  } else if (name == "static_supercritical") {
    static_bump(12 * kPi);
  } else if (name == "strained_supercritical") {
    c.initial = {InitialKind::two_bump, 12 * kPi, 0.5, 4.0, 0, 0, {}};
    c.amplitude_mode = AmplitudeMode::automatic;
    c.delta = 0.25;
    c.eta = 0.1;
    c.half_width = 24;
    c.cells = 512;
    c.t_max = 10;
    c.output_interval = 5e-5;
    c.claim = Claim::thm2;
  } else if (name == "heat_sanity") {
    c.initial = {InitialKind::single_bump, 4 * kPi, 0.5, 0, 0, 0, {}};
    c.half_width = 8;
    c.cells = 256;
    c.chemotaxis = false;
    c.t_max = 0.5;
    c.output_interval = 0.01;
  } else if (name == "advection_sanity") {
    c.initial = {InitialKind::single_bump, 1.0, 0.25, 0, 1.0, 0.5, {}};
    c.amplitude = 1;
    c.half_width = 4;
    c.cells = 256;
    c.diffusion = false;
    c.chemotaxis = false;
    c.stop_at_box = false;
    c.t_max = 0.5;
    c.output_interval = 0.01;
    c.checks.erase("symmetry");
    c.checks.erase("splitting");
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  return c;
}

Grid2d make_grid(const ScenarioConfig& cfg) { return Grid2d(cfg.half_width, cfg.cells); }

double resolved_epsilon(const ScenarioConfig& cfg) {
  if (cfg.epsilon > 0) return cfg.epsilon;
  if (!(cfg.epsilon_cells > 0)) throw Error("epsilon_cells must be positive");
  return cfg.epsilon_cells * make_grid(cfg).spacing();
}

DensityField initial_density(const ScenarioConfig& cfg) {
  const auto grid = make_grid(cfg);
  const auto& in = cfg.initial;
  if (in.kind == InitialKind::snapshot) {
    auto snap = read_snapshot(in.snapshot_path);
    if (!(snap.field.grid == grid)) {
      std::ostringstream os;
      os << "snapshot grid (N=" << snap.field.grid.cells() << ", L=" << snap.field.grid.half_width()
         << ") does not match the configured grid (N=" << grid.cells() << ", L=" << grid.half_width()
         << ")";
      throw Error(os.str());
    }
    return std::move(snap.field);
  }
  if (!(in.mass > 0)) throw Error("initial mass must be positive");
  if (!(in.sigma > 0)) throw Error("initial sigma must be positive");
  FieldXd v;
  if (in.kind == InitialKind::single_bump) {
    v = sample(grid, [&](double x, double y) {
      return gaussian(in.mass, in.sigma, x - in.x1, y - in.x2);
    });
  } else {
    v = sample(grid, [&](double x, double y) {
      return gaussian(0.5 * in.mass, in.sigma, x, y - in.y0) +
             gaussian(0.5 * in.mass, in.sigma, x, y + in.y0);
    });
  }
  return DensityField(grid, std::move(v));
}

double initial_tail_fraction(const ScenarioConfig& cfg) {
  const auto& in = cfg.initial;
  switch (in.kind) {
    case InitialKind::single_bump:
      return gaussian_tail(in.sigma, in.x1, in.x2, cfg.half_width);
    case InitialKind::two_bump:
      return gaussian_tail(in.sigma, 0, in.y0, cfg.half_width);
    case InitialKind::snapshot:
      return 0;
  }
  return 0;
}

double resolved_amplitude(const ScenarioConfig& cfg, const DensityField& n0) {
  if (cfg.amplitude_mode == AmplitudeMode::explicit_value) {
    if (cfg.amplitude < 0) throw Error("A must be nonnegative");
    return cfg.amplitude;
  }
  double upper = 0;
  for (int j = n0.grid.cells() / 2; j < n0.grid.cells(); ++j) upper += n0.values.col(j).sum();
  return select_amplitude(n0.grid.cell_area() * upper, cfg.delta);
}

double box_time(double amplitude, double half_width, double y_plus0) {
  if (!(amplitude > 0)) return std::numeric_limits<double>::infinity();
  if (!(y_plus0 > 0) || !(0.5 * half_width > y_plus0))
    throw Error("T_box undefined: y+(0) must lie in (0, L/2)");
  return std::log(0.5 * half_width / y_plus0) / amplitude;
}

HypothesisReport validate_hypotheses(const ScenarioConfig& cfg, const DensityField& n0) {
  HypothesisReport r;
  r.mass = integrate(n0);
  r.second_moment = moment(n0, weights::second());
  const double peak = n0.values.maxCoeff();
  r.symmetry_error = mirror_symmetry_error(n0);
  r.symmetric = peak > 0 && r.symmetry_error <= 1e-12 * peak;
  for (int j = n0.grid.cells() / 2; j < n0.grid.cells(); ++j) r.upper_mass += n0.values.col(j).sum();
  r.upper_mass *= n0.grid.cell_area();
  if (r.upper_mass > 0) {
    const auto hp = half_plane_stats(n0, VarianceMode::vertical, false);
    r.y_plus = hp.center;
    r.v_plus = hp.variance;
    r.r2 = r_squared(r.upper_mass, r.y_plus, r.v_plus);
  }
  r.r2_pass = r.r2 > 1;
  r.tail_fraction = initial_tail_fraction(cfg);
  r.tail_pass = r.tail_fraction < 1e-10;
  r.amplitude = resolved_amplitude(cfg, n0);
  r.amplitude_required = cfg.delta > 0 ? r.upper_mass / (cfg.delta * cfg.delta) : 0;
  r.thm2_pass = r.symmetric && r.r2_pass && r.mass < 16 * kPi &&
                r.amplitude >= r.amplitude_required * (1 - 1e-12);
  if (r.r2 > 0) {
    r.thm1_mass_limit = 16 * kPi / (1 + (1 + cfg.eta) * (1 + cfg.eta) / r.r2);
    r.thm1_pass = r.thm2_pass && r.mass < r.thm1_mass_limit;
  }

  auto fail = [&](bool ok, const std::string& what) {
    if (!ok) r.failures.push_back(what);
  };
  fail(r.tail_pass, "initial tail mass outside the box exceeds 1e-10 M");
  if (cfg.claim != Claim::none) {
    fail(r.symmetric, "n0 is not symmetric about the x1-axis");
    std::ostringstream os;
    os << "R^2 = " << r.r2 << " <= 1 (needs y+(0)^2 > (2/M+) V+(0))";
    fail(r.r2_pass, os.str());
    fail(r.mass < 16 * kPi, "M >= 16 pi");
    fail(r.amplitude >= r.amplitude_required * (1 - 1e-12), "A < M+/delta^2");
  }
  if (cfg.claim == Claim::thm1) {
    std::ostringstream os;
    os << "M = " << r.mass << " exceeds the moderate mass limit " << r.thm1_mass_limit;
    fail(r.mass < r.thm1_mass_limit, os.str());
  }
  return r;
}

RunResult run(const ScenarioConfig& cfg, const RunHooks& hooks) {
  if (!(cfg.output_interval > 0)) throw Error("output_interval must be positive");
  if (!(cfg.t_max > 0)) throw Error("t_max must be positive");
  for (const auto& c : cfg.checks) {
    if (std::find(check_names().begin(), check_names().end(), c) == check_names().end())
      throw Error("unknown check '" + c + "'");
  }

  RunResult res;
  res.config = cfg;
  auto n0 = initial_density(cfg);
  const auto grid = n0.grid;
  res.hypotheses = validate_hypotheses(cfg, n0);
  if (cfg.claim != Claim::none && !res.hypotheses.failures.empty()) {
    std::string msg = "configuration rejected (" + to_string(cfg.claim) + "): ";
    for (std::size_t k = 0; k < res.hypotheses.failures.size(); ++k)
      msg += (k ? "; " : "") + res.hypotheses.failures[k];
    throw Error(msg);
  }
  for (const auto& f : res.hypotheses.failures) log::warning(cfg.name + ": " + f);

  res.epsilon = resolved_epsilon(cfg);
  res.amplitude = res.hypotheses.amplitude;
  const StrainField strain{res.amplitude};
  const auto table = build_kernel(res.epsilon, grid, cfg.bridge);
  res.kernel_max_gradient = table.max_gradient;
  if (res.amplitude > 0 && res.hypotheses.upper_mass > 0 && res.hypotheses.symmetric)
    res.t_box = box_time(res.amplitude, cfg.half_width, res.hypotheses.y_plus);
  const double t_end =
      cfg.stop_at_box && std::isfinite(res.t_box) ? std::min(cfg.t_max, res.t_box) : cfg.t_max;

  StepOptions opt;
  opt.cfl = cfg.cfl;
  opt.diffusion = cfg.diffusion;
  opt.chemotaxis = cfg.chemotaxis;
  opt.transport = cfg.transport;
  opt.gradient = cfg.gradient;
  opt.dt_max = cfg.dt_max;
  opt.assert_symmetry = cfg.assert_symmetry;

  auto enabled = [&](const std::string& c) { return cfg.checks.count(c) > 0; };
  const bool symmetric = res.hypotheses.symmetric;
  const double m0 = res.hypotheses.mass;
  res.initial_max = n0.values.maxCoeff();

  RecordOptions ropt;
  ropt.strip_half_width = 2 * cfg.delta;
  ropt.chemotaxis = cfg.chemotaxis;
  ropt.gradient = cfg.gradient;

  BlowupDetector detector(res.initial_max, cfg.thresholds, m0 > 8 * kPi);
  auto state = make_state(n0, table, strain, opt);

  auto emit = [&](int index, const DensityField& n, double t) {
    auto rec = make_record(t, n, table, strain, state.outflow, ropt);
    if (enabled("log_hls")) res.reports["log_hls"].push_back(log_hls_check(n, t, cfg.hls_rel_tol * rec.mass));
    if (enabled("negative_entropy")) res.reports["negative_entropy"].push_back(negative_entropy_bound(n, t));
    if (hooks.on_record) hooks.on_record(index, rec, n);
    return rec;
  };

  res.history.push_back(emit(0, state.n, 0.0));
  detector.observe_second_moment(0.0, res.history.back().second);

  const bool track_energy = enabled("energy");
  EnergyProbe probe{};
  double energy_tol = 0;
  if (track_energy) {
    probe = probe_energy(state.n, table, strain, cfg);
    energy_tol = cfg.energy_rel_tol * (std::abs(probe.energy) + 1);
  }

  int next_index = 1;
  Verdict verdict = Verdict::healthy;
  const double span = cfg.output_interval;
  const double t_eps = 1e-9 * span;
  res.min_density = n0.values.minCoeff();

  while (state.t < t_end - t_eps) {
    const double target = std::min(next_index * span, t_end);
    state = step(std::move(state), table, strain, opt, target - state.t);
    if (std::abs(state.t - target) <= t_eps) state.t = target;

    StepTrace tr;
    tr.step = state.step_count;
    tr.t = state.t;
    tr.dt = state.last.dt;
    tr.halvings = state.last.halvings;
    tr.mass = integrate(state.n);
    tr.outflow = state.outflow;
    tr.interior_drift = state.last.interior_drift;
    tr.min_n = state.n.values.minCoeff();
    const double peak = state.n.values.maxCoeff();
    tr.symmetry_ratio = peak > 0 ? mirror_symmetry_error(state.n) / peak : 0;
    res.worst_interior_drift = std::max(res.worst_interior_drift, std::abs(tr.interior_drift) / m0);
    res.worst_conservation_gap =
        std::max(res.worst_conservation_gap, std::abs(tr.mass - m0 + tr.outflow) / m0);
    res.min_density = std::min(res.min_density, tr.min_n);
    if (symmetric) res.worst_symmetry_ratio = std::max(res.worst_symmetry_ratio, tr.symmetry_ratio);

    if (track_energy) {
      const auto next = probe_energy(state.n, table, strain, cfg);
      tr.energy = next.energy;
      tr.dissipation = next.dissipation;
      res.reports["energy"].push_back(make_report("energy", state.t, next.energy, probe.energy,
                                                  Sense::at_most, energy_tol));
      const double d_mid = 0.5 * (probe.dissipation + next.dissipation);
      const double residual = (next.energy - probe.energy) / tr.dt + d_mid;
      res.reports["energy_dissipation"].push_back(make_report(
          "energy_dissipation", state.t - 0.5 * tr.dt, std::abs(residual), 0.1 * d_mid,
          Sense::at_most, 0.0));
      probe = next;
    }
    res.steps.push_back(tr);

    verdict = detector.assess(state.n);
    const bool on_grid = state.t == target;
    if (on_grid && target == next_index * span) {
      res.history.push_back(emit(next_index, state.n, state.t));
      detector.observe_second_moment(state.t, res.history.back().second);
      verdict = detector.assess(state.n);
      ++next_index;
    }
    if (verdict == Verdict::blown_up) {
      res.blowup_time = state.t;
      if (!(on_grid && res.history.back().t == state.t)) res.final_record = emit(-1, state.n, state.t);
      break;
    }
    if (on_grid && state.t >= t_end - t_eps && !(res.history.back().t == state.t)) {
      res.final_record = emit(-1, state.n, state.t);
    }
  }

  res.verdict = verdict;
  res.t_end = state.t;
  res.events = state.events;

  // Checks over the finished run.
  if (enabled("conservation")) {
    auto& rows = res.reports["conservation"];
    for (const auto& tr : res.steps) {
      rows.push_back(make_report("interior_drift", tr.t, std::abs(tr.interior_drift), 0.0,
                                 Sense::at_most, 1e-12 * m0));
      rows.push_back(make_report("mass_balance", tr.t, std::abs(tr.mass - m0 + tr.outflow), 0.0,
                                 Sense::at_most, 1e-10 * m0));
      rows.push_back(make_report("positivity", tr.t, tr.min_n, 0.0, Sense::at_least, 0.0));
    }
  }
  if (enabled("symmetry") && symmetric) {
    auto& rows = res.reports["symmetry"];
    for (const auto& tr : res.steps)
      rows.push_back(make_report("mirror_symmetry", tr.t, tr.symmetry_ratio, 0.0, Sense::at_most, 1e-12));
  }
  if (enabled("virial") && res.history.size() >= 3) {
    res.virial = virial_residuals(res.history, res.amplitude);
    auto& v = res.reports["virial_v"];
    for (std::size_t k = 0; k < res.virial.size(); ++k) {
      const auto& row = res.virial[k];
      v.push_back(make_report("virial_v", row.t, row.dv_dt, row.dv_predicted, Sense::at_most,
                              0.02 * std::max(std::abs(row.dv_predicted), 1.0)));
      v.back().slack = -std::abs(row.dv_dt - row.dv_predicted);
      v.back().pass = v.back().slack >= -v.back().tolerance;
    }
    res.reports["virial_w"] = virial_w_reports(res.virial, res.history, cfg.virial_w_rel_tol);
  }
  if (enabled("moments")) res.reports["moments"] = moment_growth_bounds(res.history, res.amplitude);
  if (enabled("splitting") && res.amplitude > 0 && symmetric) {
    try {
      res.splitting = splitting_monitors(res.history, cfg.delta, cfg.eta, res.amplitude, res.t_box);
      res.reports["strip_mass"] = res.splitting->strip;
      res.reports["v_plus_growth"] = res.splitting->spread;
      const double rate = res.splitting->fitted_rate;
      res.reports["y_plus_rate"].push_back(make_report("y_plus_rate_low", res.t_end, rate,
                                                       0.85 * res.amplitude, Sense::at_least, 0.0));
      res.reports["y_plus_rate"].push_back(make_report("y_plus_rate_high", res.t_end, rate,
                                                       1.1 * res.amplitude, Sense::at_most, 0.0));
    } catch (const Error& e) {
      res.failed_checks.push_back(std::string("splitting: ") + e.what());
    }
  }

  for (const auto& [name, rows] : res.reports) {
    if (!is_gating_report(name)) continue;
    if (!all_pass(rows)) res.failed_checks.push_back(name);
  }
  res.checks_passed = res.failed_checks.empty();
  res.final_state = std::move(state.n);
  return res;
}

void apply_parameter(ScenarioConfig& cfg, const std::string& name, double value) {
  if (name == "M") {
    cfg.initial.mass = value;
  } else if (name == "A") {
    cfg.amplitude_mode = AmplitudeMode::explicit_value;
    cfg.amplitude = value;
  } else if (name == "delta") {
    cfg.amplitude_mode = AmplitudeMode::automatic;
    cfg.delta = value;
  } else if (name == "y0") {
    cfg.initial.y0 = value;
  } else if (name == "sigma") {
    cfg.initial.sigma = value;
  } else if (name == "eta") {
    cfg.eta = value;
  } else if (name == "N") {
    cfg.cells = static_cast<int>(std::lround(value));
  } else {
    throw Error("unknown sweep parameter '" + name + "'");
  }
}

PhaseTable sweep(const SweepSpec& spec, const std::function<void(std::size_t, const SweepRow&)>& on_row) {
  PhaseTable table;
  std::size_t total = spec.axes.empty() ? 0 : 1;
  for (const auto& a : spec.axes) {
    table.params.push_back(a.name);
    total *= a.values.size();
  }
  table.rows.resize(total);
  if (total == 0) return table;

  auto params_of = [&](std::size_t index) {
    std::vector<double> p(spec.axes.size());
    for (std::size_t k = spec.axes.size(); k-- > 0;) {
      const auto& vals = spec.axes[k].values;
      p[k] = vals[index % vals.size()];
      index /= vals.size();
    }
    return p;
  };

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      SweepRow row;
      row.params = params_of(i);
      try {
        auto cfg = spec.base;
        for (std::size_t k = 0; k < spec.axes.size(); ++k)
          apply_parameter(cfg, spec.axes[k].name, row.params[k]);
        const auto r = run(cfg);
        row.verdict = to_string(r.verdict);
        row.t_end = r.t_end;
        const auto& last = r.final_record ? *r.final_record : r.history.back();
        row.final_max_n = last.max_n;
        row.final_energy = last.energy;
        row.checks_passed = r.checks_passed;
      } catch (const std::exception& e) {
        row.verdict = "error";
        row.error = e.what();
      }
      table.rows[i] = row;
      if (on_row) {
        std::lock_guard lock(report_mutex);
        on_row(i, row);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return table;
}

}  // namespace pks
