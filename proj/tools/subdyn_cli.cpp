// Batch front end: subdyn <command> --config <ini> [--out <dir>] [--sector ...] [--nmax n] [--modes n]
#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "subdyn/errors.hpp"
#include "subdyn/report.hpp"

namespace {

enum Exit { ok = 0, internal = 1, config = 2, numeric = 3, invariant = 4 };

int exit_code(subdyn::ErrorKind k) {
  switch (k) {
    case subdyn::ErrorKind::config: return config;
    case subdyn::ErrorKind::invariant: return invariant;
    case subdyn::ErrorKind::convergence:
    case subdyn::ErrorKind::singular:
    case subdyn::ErrorKind::resource: return numeric;
    case subdyn::ErrorKind::contract: return internal;
  }
  return internal;
}

std::string kind_name(subdyn::ErrorKind k) {
  switch (k) {
    case subdyn::ErrorKind::config: return "config";
    case subdyn::ErrorKind::convergence: return "convergence";
    case subdyn::ErrorKind::invariant: return "invariant";
    case subdyn::ErrorKind::singular: return "singular";
    case subdyn::ErrorKind::contract: return "contract";
    case subdyn::ErrorKind::resource: return "resource";
  }
  return "unknown";
}

bool write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level atom in a scalar field: poles, kinetic generators, dressing and exact reference"};
  std::string command, config_path, out_dir = ".", sector = "diag";
  int nmax = 0, modes = 0;
  app.add_option("command", command, "poles | kinetic | dress | oracle | verify | evolve")->required();
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--out", out_dir, "directory for <command>.json and <command>.csv");
  app.add_option("--sector", sector, "diag | dipole | photon (kinetic and dress)");
  app.add_option("--nmax", nmax, "photon-number truncation of the exact reference");
  app.add_option("--modes", modes, "number of discretized field modes");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config;
  }

  const auto cmd = subdyn::parse_command(command);
  const auto sec = subdyn::parse_sector(sector);
  if (!cmd) {
    std::cerr << "unknown command '" << command << "'\n";
    return config;
  }
  if (!sec) {
    std::cerr << "--sector: expected diag, dipole or photon, got '" << sector << "'\n";
    return config;
  }

  subdyn::RunOptions opt;
  opt.command = *cmd;
  opt.sector = *sec;
  if (nmax > 0) opt.nmax = nmax;
  if (modes > 0) opt.modes = modes;

  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto json_path = dir / (command + ".json");

  const auto t0 = std::chrono::steady_clock::now();
  int rc = ok;
  subdyn::Json report;
  std::string csv;
  try {
    const subdyn::ModelSpec spec = subdyn::load_config(config_path);
    auto out = subdyn::run_command(spec, opt);
    report = std::move(out.report);
    csv = std::move(out.csv);
    if (!out.passed) rc = invariant;
  } catch (const subdyn::Error& e) {
    std::cerr << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    rc = exit_code(e.kind());
    if (e.kind() == subdyn::ErrorKind::config) return rc;
    report = subdyn::Json{{"schema", 1}, {"command", command},
                          {"error", subdyn::Json{{"kind", kind_name(e.kind())}, {"message", e.what()}}},
                          {"verdict", false}};
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return internal;
  }

  if (!write_file(json_path, report.dump(2) + "\n")) {
    std::cerr << "cannot write " << json_path << "\n";
    return internal;
  }
  if (!csv.empty() && !write_file(dir / (command + ".csv"), csv)) {
    std::cerr << "cannot write " << (dir / (command + ".csv")) << "\n";
    return internal;
  }
  // Timing goes to stderr so the report stays byte-identical between runs.
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << command << ": " << (rc == ok ? "ok" : "failed") << " in " << secs << " s, report " << json_path.string()
            << "\n";
  return rc;
}
