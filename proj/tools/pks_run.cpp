// pks_run: run one scenario (or a sweep) and write its artifacts.
//
// Exit codes: 0 healthy, 2 blown_up, 1 error (one line on stderr).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "pks/io.hpp"
#include "pks/log.hpp"

namespace {

pks::SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw pks::Error("sweep axis must look like NAME=v1,v2,...");
  pks::SweepAxis axis;
  axis.name = text.substr(0, eq);
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) axis.values.push_back(pks::parse_number(item));
  return axis;
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strained Keller-Segel simulator"};
  std::string config_path, scenario, out_dir, checks;
  int resolution = 0, snapshot_every = -1, threads = 0;
  double tmax = 0;
  bool quiet = false;
  std::vector<std::string> sweep_axes;
  app.add_option("--config", config_path, "scenario config file");
  app.add_option("--scenario", scenario, "preset name")
      ->check(CLI::IsMember(pks::preset_names()));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--resolution", resolution, "cells per side N (even)");
  app.add_option("--tmax", tmax, "final time");
  app.add_option("--snapshot-every", snapshot_every, "write a field snapshot every k records");
  app.add_option("--checks", checks, "all, none, or a comma list of checks");
  app.add_option("--sweep", sweep_axes, "sweep axis NAME=v1,v2,... (M, A, delta, y0, sigma, eta, N)");
  app.add_option("--threads", threads, "sweep worker threads (default: hardware)");
  app.add_flag("--quiet", quiet, "only errors on stderr");
  app.set_version_flag("--version", pks::kVersion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  if (quiet) pks::log::set_threshold(pks::log::Level::error);

  pks::RunManifest manifest;
  manifest.start = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  manifest.config.output.dir = out_dir.empty() ? "run" : out_dir;
  pks::RunResult result;
  std::unique_ptr<pks::RunWriter> writer;

  auto finish = [&](int code) {
    manifest.end = std::chrono::system_clock::now();
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.exit_code = code;
    if (writer) manifest.files = writer->files();
    try {
      std::filesystem::create_directories(manifest.config.output.dir);
      pks::write_manifest(
          (std::filesystem::path(manifest.config.output.dir) / "manifest.txt").string(), manifest);
    } catch (const std::exception& e) {
      std::cerr << "error: " << one_line(e.what()) << "\n";
      return 1;
    }
    return code;
  };

  try {
    pks::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = pks::parse_config(config_path);
      if (!scenario.empty()) {
        const auto out = cfg.output;
        cfg.scenario = pks::preset(scenario);
        cfg.output = out;
      }
    } else if (!scenario.empty()) {
      cfg.scenario = pks::preset(scenario);
    } else {
      throw pks::Error("one of --config or --scenario is required");
    }
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (resolution != 0) {
      if (resolution < 0) throw pks::Error("N must be positive");
      if (resolution % 2 != 0) throw pks::Error("N must be even");
      cfg.scenario.cells = resolution;
    }
    if (tmax != 0) {
      if (!(tmax > 0)) throw pks::Error("--tmax must be positive");
      cfg.scenario.t_max = tmax;
    }
    if (snapshot_every >= 0) cfg.output.snapshot_every = snapshot_every;
    if (!checks.empty()) cfg.scenario.checks = pks::parse_checks(checks);
    manifest.config = cfg;

    if (!sweep_axes.empty()) {
      pks::SweepSpec spec;
      spec.base = cfg.scenario;
      for (const auto& a : sweep_axes) spec.axes.push_back(parse_axis(a));
      spec.threads = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
      std::filesystem::create_directories(cfg.output.dir);
      const auto table = pks::sweep(spec, [&](std::size_t i, const pks::SweepRow& row) {
        std::ostringstream os;
        os << "sweep point " << i << ": " << row.verdict;
        if (!row.error.empty()) os << " (" << row.error << ")";
        pks::log::info(os.str());
      });
      std::ofstream os(std::filesystem::path(cfg.output.dir) / "phase_table.csv");
      pks::write_phase_table(os, table);
      manifest.files.push_back("phase_table.csv");
      manifest.end = std::chrono::system_clock::now();
      return finish(0);
    }

    writer = std::make_unique<pks::RunWriter>(cfg);
    result = pks::run(cfg.scenario, writer->hooks());
    writer->finish(result);
    manifest.result = &result;
    if (!quiet) {
      std::ostringstream os;
      os << cfg.scenario.name << ": " << pks::to_string(result.verdict) << " at t = " << result.t_end
         << ", checks " << (result.checks_passed ? "passed" : "failed");
      pks::log::info(os.str());
    }
    return finish(result.verdict == pks::Verdict::blown_up ? 2 : 0);
  } catch (const std::exception& e) {
    manifest.status = "error";
    manifest.error = one_line(e.what());
    std::cerr << "error: " << manifest.error << "\n";
    finish(1);
    return 1;
  }
}
