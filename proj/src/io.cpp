#include "pks/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace pks {
namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double strict_double(const std::string& s) {
  const std::string t = lower(s);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw Error("not a number: '" + s + "'");
  return v;
}

int strict_int(const std::string& s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw Error("not an integer: '" + s + "'");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

// Section-qualified key -> setter. Top-level keys use an empty section.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto num = [](double ScenarioConfig::*field) {
      return [field](RunConfig& c, const std::string& v) { c.scenario.*field = parse_number(v); };
    };
    auto flag = [](bool ScenarioConfig::*field) {
      return [field](RunConfig& c, const std::string& v) { c.scenario.*field = parse_bool(v); };
    };
    m["name"] = [](RunConfig& c, const std::string& v) { c.scenario.name = v; };

    m["initial.kind"] = [](RunConfig& c, const std::string& v) {
      c.scenario.initial.kind = parse_initial_kind(v);
    };
    m["initial.M"] = [](RunConfig& c, const std::string& v) { c.scenario.initial.mass = parse_number(v); };
    m["initial.sigma"] = [](RunConfig& c, const std::string& v) {
      c.scenario.initial.sigma = parse_number(v);
    };
    m["initial.y0"] = [](RunConfig& c, const std::string& v) { c.scenario.initial.y0 = parse_number(v); };
    m["initial.x1"] = [](RunConfig& c, const std::string& v) { c.scenario.initial.x1 = parse_number(v); };
    m["initial.x2"] = [](RunConfig& c, const std::string& v) { c.scenario.initial.x2 = parse_number(v); };
    m["initial.snapshot"] = [](RunConfig& c, const std::string& v) {
      c.scenario.initial.snapshot_path = v;
    };

    m["numerics.N"] = [](RunConfig& c, const std::string& v) {
      const int n = strict_int(v);
      if (n <= 0) throw Error("N must be positive");
      if (n % 2 != 0) throw Error("N must be even");
      c.scenario.cells = n;
    };
    m["numerics.L"] = num(&ScenarioConfig::half_width);
    m["numerics.epsilon"] = num(&ScenarioConfig::epsilon);
    m["numerics.epsilon_cells"] = num(&ScenarioConfig::epsilon_cells);
    m["numerics.bridge"] = [](RunConfig& c, const std::string& v) { c.scenario.bridge = parse_bridge(v); };
    m["numerics.gradient"] = [](RunConfig& c, const std::string& v) {
      c.scenario.gradient = parse_gradient_mode(v);
    };
    m["numerics.transport"] = [](RunConfig& c, const std::string& v) {
      c.scenario.transport = parse_transport(v);
    };
    m["numerics.cfl"] = num(&ScenarioConfig::cfl);
    m["numerics.dt_max"] = num(&ScenarioConfig::dt_max);
    m["numerics.T_max"] = num(&ScenarioConfig::t_max);
    m["numerics.output_interval"] = num(&ScenarioConfig::output_interval);
    m["numerics.diffusion"] = flag(&ScenarioConfig::diffusion);
    m["numerics.chemotaxis"] = flag(&ScenarioConfig::chemotaxis);
    m["numerics.assert_symmetry"] = flag(&ScenarioConfig::assert_symmetry);

    m["strain.A_mode"] = [](RunConfig& c, const std::string& v) {
      c.scenario.amplitude_mode = parse_amplitude_mode(v);
    };
    m["strain.A"] = num(&ScenarioConfig::amplitude);
    m["strain.delta"] = num(&ScenarioConfig::delta);
    m["strain.eta"] = num(&ScenarioConfig::eta);
    m["strain.claim"] = [](RunConfig& c, const std::string& v) { c.scenario.claim = parse_claim(v); };
    m["strain.stop_at_box"] = flag(&ScenarioConfig::stop_at_box);

    m["checks.enabled"] = [](RunConfig& c, const std::string& v) { c.scenario.checks = parse_checks(v); };
    m["checks.energy_rel_tol"] = num(&ScenarioConfig::energy_rel_tol);
    m["checks.hls_rel_tol"] = num(&ScenarioConfig::hls_rel_tol);
    m["checks.virial_w_rel_tol"] = num(&ScenarioConfig::virial_w_rel_tol);
    m["checks.blowup_ratio"] = [](RunConfig& c, const std::string& v) {
      c.scenario.thresholds.ratio = parse_number(v);
    };
    m["checks.block_fraction"] = [](RunConfig& c, const std::string& v) {
      c.scenario.thresholds.block_fraction = parse_number(v);
    };
    m["checks.block_ratio"] = [](RunConfig& c, const std::string& v) {
      c.scenario.thresholds.block_ratio = parse_number(v);
    };
    m["checks.trend_window"] = [](RunConfig& c, const std::string& v) {
      c.scenario.thresholds.trend_window = strict_int(v);
    };

    m["output.dir"] = [](RunConfig& c, const std::string& v) { c.output.dir = v; };
    m["output.snapshot_every"] = [](RunConfig& c, const std::string& v) {
      const int k = strict_int(v);
      if (k < 0) throw Error("snapshot_every must be nonnegative");
      c.output.snapshot_every = k;
    };
    return m;
  }();
  return table;
}

const char* kSections[] = {"initial", "numerics", "strain", "checks", "output"};

void validate_config(const RunConfig& c) {
  const auto& s = c.scenario;
  if (s.initial.kind != InitialKind::snapshot && !(s.initial.mass > 0))
    throw Error("initial M must be positive");
  if (s.initial.kind == InitialKind::snapshot && s.initial.snapshot_path.empty())
    throw Error("kind = snapshot needs initial.snapshot");
  if (!(s.initial.sigma > 0)) throw Error("sigma must be positive");
  if (!(s.half_width > 0)) throw Error("L must be positive");
  if (!(s.cfl > 0)) throw Error("cfl must be positive");
  if (s.transport == Transport::muscl && s.cfl > 0.5) throw Error("cfl must be <= 0.5 for muscl");
  if (s.transport == Transport::upwind && s.cfl > 1) throw Error("cfl must be <= 1 for upwind");
  if (!(s.t_max > 0)) throw Error("T_max must be positive");
  if (!(s.output_interval > 0)) throw Error("output_interval must be positive");
  if (s.epsilon < 0) throw Error("epsilon must be nonnegative");
  if (s.epsilon == 0 && !(s.epsilon_cells > 0)) throw Error("epsilon_cells must be positive");
  if (s.amplitude < 0) throw Error("A must be nonnegative");
  if (s.amplitude_mode == AmplitudeMode::automatic && !(s.delta > 0))
    throw Error("delta must be positive when A_mode = auto");
  if (!(s.eta > 0)) throw Error("eta must be positive");
}

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::set<std::string>& items) {
  std::string s;
  for (const auto& x : items) s += (s.empty() ? "" : ",") + x;
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text) {
  std::string s = trim(text);
  const std::string l = lower(s);
  if (l.size() >= 2 && l.compare(l.size() - 2, 2, "pi") == 0) {
    std::string head = trim(s.substr(0, s.size() - 2));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    const double factor = head.empty() ? 1.0 : strict_double(head);
    return factor * std::numbers::pi;
  }
  return strict_double(s);
}

bool parse_bool(const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw Error("not a boolean: '" + text + "'");
}

std::set<std::string> parse_checks(const std::string& text) {
  const std::string s = trim(text);
  const auto& names = check_names();
  if (s == "all") return {names.begin(), names.end()};
  if (s == "none" || s.empty()) return {};
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (std::find(names.begin(), names.end(), item) == names.end())
      throw Error("unknown check '" + item + "'");
    out.insert(item);
  }
  return out;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig cfg;
  cfg.scenario.checks = parse_checks("all");
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  bool seen_section = false;
  bool seen_setting = false;
  try {
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw Error("malformed section header '" + line + "'");
        section = trim(line.substr(1, line.size() - 2));
        if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
          throw Error("unknown section [" + section + "]");
        seen_section = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error("expected 'key = value', got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw Error("empty key");
      if (!seen_section && key == "preset") {
        if (seen_setting) throw Error("preset must come before any other setting");
        const auto dir = cfg.output;
        cfg.scenario = preset(value);
        cfg.output = dir;
        seen_setting = true;
        continue;
      }
      const std::string full = seen_section ? section + "." + key : key;
      const auto it = setters().find(full);
      if (it == setters().end())
        throw Error("unknown key '" + key + "'" + (seen_section ? " in [" + section + "]" : ""));
      it->second(cfg, value);
      seen_setting = true;
    }
  } catch (const Error& e) {
    throw Error(source + ":" + std::to_string(line_no) + ": " + e.what());
  }
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string format_config(const RunConfig& cfg) {
  const auto& s = cfg.scenario;
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  auto flag = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };
  kv("name", s.name);
  os << "[initial]\n";
  kv("kind", to_string(s.initial.kind));
  num("M", s.initial.mass);
  num("sigma", s.initial.sigma);
  num("y0", s.initial.y0);
  num("x1", s.initial.x1);
  num("x2", s.initial.x2);
  if (!s.initial.snapshot_path.empty()) kv("snapshot", s.initial.snapshot_path);
  os << "[numerics]\n";
  kv("N", std::to_string(s.cells));
  num("L", s.half_width);
  num("epsilon", s.epsilon);
  num("epsilon_cells", s.epsilon_cells);
  kv("bridge", to_string(s.bridge));
  kv("gradient", to_string(s.gradient));
  kv("transport", to_string(s.transport));
  num("cfl", s.cfl);
  num("dt_max", s.dt_max);
  num("T_max", s.t_max);
  num("output_interval", s.output_interval);
  flag("diffusion", s.diffusion);
  flag("chemotaxis", s.chemotaxis);
  flag("assert_symmetry", s.assert_symmetry);
  os << "[strain]\n";
  kv("A_mode", to_string(s.amplitude_mode));
  num("A", s.amplitude);
  num("delta", s.delta);
  num("eta", s.eta);
  kv("claim", to_string(s.claim));
  flag("stop_at_box", s.stop_at_box);
  os << "[checks]\n";
  kv("enabled", s.checks.empty() ? "none" : join(s.checks));
  num("energy_rel_tol", s.energy_rel_tol);
  num("hls_rel_tol", s.hls_rel_tol);
  num("virial_w_rel_tol", s.virial_w_rel_tol);
  num("blowup_ratio", s.thresholds.ratio);
  num("block_fraction", s.thresholds.block_fraction);
  num("block_ratio", s.thresholds.block_ratio);
  kv("trend_window", std::to_string(s.thresholds.trend_window));
  os << "[output]\n";
  kv("dir", cfg.output.dir);
  kv("snapshot_every", std::to_string(cfg.output.snapshot_every));
  return os.str();
}

void write_snapshot(std::ostream& os, const DensityField& n, double t) {
  const int N = n.grid.cells();
  os << "PKS-FIELD v1 N=" << N << " L=" << format_double(n.grid.half_width())
     << " t=" << format_double(t) << "\n";
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) os << (i ? " " : "") << format_double(n.values(i, j));
    os << "\n";
  }
}

void write_snapshot(const std::string& path, const DensityField& n, double t) {
  std::ofstream os(path);
  if (!os) throw Error(path + ": cannot write");
  write_snapshot(os, n, t);
  if (!os) throw Error(path + ": write failed");
}

Snapshot read_snapshot(std::istream& is, const std::string& source) {
  std::string header;
  if (!std::getline(is, header)) throw Error(source + ": empty snapshot");
  std::istringstream hs(header);
  std::string magic, version, n_tok, l_tok, t_tok, extra;
  hs >> magic >> version >> n_tok >> l_tok >> t_tok;
  if (magic != "PKS-FIELD" || version != "v1" || n_tok.rfind("N=", 0) != 0 ||
      l_tok.rfind("L=", 0) != 0 || t_tok.rfind("t=", 0) != 0 || (hs >> extra))
    throw Error(source + ": bad header, expected 'PKS-FIELD v1 N=<N> L=<L> t=<t>'");
  int N = 0;
  double L = 0, t = 0;
  try {
    N = strict_int(n_tok.substr(2));
    L = strict_double(l_tok.substr(2));
    t = strict_double(t_tok.substr(2));
  } catch (const Error& e) {
    throw Error(source + ": bad header: " + e.what());
  }
  const Grid2d grid(L, N);
  FieldXd v(N, N);
  std::string line;
  for (int j = 0; j < N; ++j) {
    if (!std::getline(is, line))
      throw Error(source + ": expected " + std::to_string(N) + " rows, got " + std::to_string(j));
    std::istringstream ls(line);
    std::string tok;
    int i = 0;
    while (ls >> tok) {
      if (i >= N) throw Error(source + ":" + std::to_string(j + 2) + ": too many values");
      try {
        v(i++, j) = strict_double(tok);
      } catch (const Error& e) {
        throw Error(source + ":" + std::to_string(j + 2) + ": " + e.what());
      }
    }
    if (i != N) throw Error(source + ":" + std::to_string(j + 2) + ": too few values");
  }
  return {DensityField(grid, std::move(v)), t};
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  return read_snapshot(in, path);
}

void write_diagnostics_header(std::ostream& os) {
  const auto& cols = record_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
  const auto vals = record_values(r);
  for (std::size_t k = 0; k < vals.size(); ++k) os << (k ? "," : "") << format_double(vals[k]);
  os << "\n";
}

void write_report_csv(std::ostream& os, const std::vector<InequalityReport>& rows) {
  os << "t,lhs,rhs,slack,pass\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << "," << format_double(r.lhs) << "," << format_double(r.rhs) << ","
       << format_double(r.slack) << "," << (r.pass ? 1 : 0) << "\n";
  }
}

void write_steps_csv(std::ostream& os, const std::vector<StepTrace>& steps) {
  os << "step,t,dt,halvings,M,outflow,interior_drift,min_n,sym_ratio,E,D\n";
  for (const auto& s : steps) {
    os << s.step << "," << format_double(s.t) << "," << format_double(s.dt) << "," << s.halvings
       << "," << format_double(s.mass) << "," << format_double(s.outflow) << ","
       << format_double(s.interior_drift) << "," << format_double(s.min_n) << ","
       << format_double(s.symmetry_ratio) << "," << format_double(s.energy) << ","
       << format_double(s.dissipation) << "\n";
  }
}

void write_phase_header(std::ostream& os, const std::vector<std::string>& params) {
  for (const auto& p : params) os << p << ",";
  os << "verdict,t_end,final_max_n,final_E,checks_passed\n";
}

void write_phase_row(std::ostream& os, const SweepRow& row) {
  for (double p : row.params) os << format_double(p) << ",";
  os << row.verdict << "," << format_double(row.t_end) << "," << format_double(row.final_max_n)
     << "," << format_double(row.final_energy) << "," << (row.checks_passed ? 1 : 0) << "\n";
}

void write_phase_table(std::ostream& os, const PhaseTable& table) {
  write_phase_header(os, table.params);
  for (const auto& r : table.rows) write_phase_row(os, r);
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  kv("format", "PKS-MANIFEST v1");
  kv("version", m.version);
  kv("start", iso_time(m.start));
  kv("end", iso_time(m.end));
  num("wall_seconds", m.wall_seconds);
  kv("status", m.status);
  kv("exit_code", std::to_string(m.exit_code));
  if (!m.error.empty()) kv("error", m.error);
  if (const auto* r = m.result) {
    kv("verdict", to_string(r->verdict));
    num("blowup_time", r->blowup_time);
    num("t_end", r->t_end);
    num("t_box", r->t_box);
    num("epsilon", r->epsilon);
    num("A", r->amplitude);
    num("h", make_grid(r->config).spacing());
    num("M0", r->hypotheses.mass);
    num("M_plus0", r->hypotheses.upper_mass);
    num("y_plus0", r->hypotheses.y_plus);
    num("V_plus0", r->hypotheses.v_plus);
    num("R2", r->hypotheses.r2);
    kv("symmetric", r->hypotheses.symmetric ? "true" : "false");
    num("thm1_mass_limit", r->hypotheses.thm1_mass_limit);
    kv("thm2_hypotheses", r->hypotheses.thm2_pass ? "pass" : "fail");
    kv("dt_policy", "strang; adaptive dt = 0.95 cfl h / max outgoing speed, growth <= 2x, "
                    "halving on CFL breach; outputs hit exactly");
    num("initial_max_n", r->initial_max);
    num("kernel_max_gradient", r->kernel_max_gradient);
    kv("steps", std::to_string(r->steps.size()));
    num("worst_interior_drift_over_M", r->worst_interior_drift);
    num("worst_conservation_gap_over_M", r->worst_conservation_gap);
    num("worst_symmetry_ratio", r->worst_symmetry_ratio);
    num("min_n", r->min_density);
    if (r->splitting) {
      num("fitted_rate", r->splitting->fitted_rate);
      kv("fit_points", std::to_string(r->splitting->fit_points));
      num("C_fit", r->splitting->c_fit);
      num("implied_C", r->splitting->implied_c);
      num("strip_bound", r->splitting->strip_bound);
    }
    kv("checks_passed", r->checks_passed ? "true" : "false");
    std::string failed;
    for (const auto& f : r->failed_checks) failed += (failed.empty() ? "" : "; ") + f;
    kv("failed_checks", failed.empty() ? "none" : failed);
    for (std::size_t k = 0; k < r->events.size(); ++k) kv("event." + std::to_string(k), r->events[k]);
  }
  os << "\n# resolved configuration\n";
  std::istringstream cfg(format_config(m.config));
  std::string line, section;
  while (std::getline(cfg, line)) {
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2) + ".";
      continue;
    }
    os << "config." << section << line << "\n";
  }
  os << "\n";
  for (const auto& f : m.files) kv("file", f);
  kv("file", "manifest.txt");
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream os(path);
  if (!os) throw Error(path + ": cannot write");
  write_manifest(os, m);
}

RunWriter::RunWriter(const RunConfig& cfg) : cfg_(cfg) {
  std::filesystem::create_directories(cfg_.output.dir);
  std::ofstream(path("config.cfg")) << format_config(cfg_);
  note("config.cfg");
  diagnostics_ = std::make_unique<std::ofstream>(path("diagnostics.csv"));
  if (!*diagnostics_) throw Error(path("diagnostics.csv") + ": cannot write");
  write_diagnostics_header(*diagnostics_);
  note("diagnostics.csv");
}

std::string RunWriter::path(const std::string& name) const {
  return (std::filesystem::path(cfg_.output.dir) / name).string();
}

void RunWriter::note(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

RunHooks RunWriter::hooks() {
  RunHooks h;
  h.on_record = [this](int index, const DiagnosticsRecord& r, const DensityField& n) {
    write_diagnostics_row(*diagnostics_, r);
    ++records_;
    const int k = cfg_.output.snapshot_every;
    if (k > 0 && (index < 0 || index % k == 0)) {
      char name[48];
      if (index < 0) {
        std::snprintf(name, sizeof name, "field_final.txt");
      } else {
        std::snprintf(name, sizeof name, "field_%06d.txt", index);
      }
      write_snapshot(path(name), n, r.t);
      note(name);
    }
  };
  return h;
}

void RunWriter::finish(const RunResult& result) {
  diagnostics_->flush();
  std::map<std::string, std::vector<InequalityReport>> by_name;
  for (const auto& [check, rows] : result.reports)
    for (const auto& r : rows) by_name[r.name].push_back(r);
  for (const auto& [name, rows] : by_name) {
    const std::string file = "report_" + name + ".csv";
    std::ofstream os(path(file));
    write_report_csv(os, rows);
    note(file);
  }
  std::ofstream steps(path("steps.csv"));
  write_steps_csv(steps, result.steps);
  note("steps.csv");
  if (!result.virial.empty()) {
    std::ofstream os(path("virial.csv"));
    os << "t,dV_dt,dV_dt_predicted,dW_dt,dW_dt_bound\n";
    for (const auto& v : result.virial) {
      os << format_double(v.t) << "," << format_double(v.dv_dt) << "," << format_double(v.dv_predicted)
         << "," << format_double(v.dw_dt) << "," << format_double(v.dw_bound) << "\n";
    }
    note("virial.csv");
  }
  const int k = cfg_.output.snapshot_every;
  if (k > 0 && !result.final_record && !result.history.empty() &&
      (static_cast<int>(result.history.size()) - 1) % k != 0) {
    write_snapshot(path("field_final.txt"), result.final_state, result.t_end);
    note("field_final.txt");
  }
}

}  // namespace pks
