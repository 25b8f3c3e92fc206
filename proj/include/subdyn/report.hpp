#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "subdyn/dressing.hpp"
#include "subdyn/kinetics.hpp"
#include "subdyn/oracle.hpp"

namespace subdyn {

using Json = nlohmann::ordered_json;

// One named residual with its tolerance and verdict.
struct CheckRecord {
  enum class Bound { at_most, at_least };
  std::string name;
  double value;
  double tolerance;
  Bound bound;
  bool pass;
};

class CheckSuite {
 public:
  void at_most(const std::string& name, double value, double tolerance);
  void at_least(const std::string& name, double value, double bound);
  void add(const CancellationCheck& c);
  const std::vector<CheckRecord>& items() const { return items_; }
  bool all_pass() const;
  Json to_json() const;

 private:
  std::vector<CheckRecord> items_;
};

enum class Command { poles, kinetic, dress, oracle, verify, evolve };
enum class SectorChoice { diag, dipole, photon };

std::optional<Command> parse_command(const std::string& s);
std::optional<SectorChoice> parse_sector(const std::string& s);
std::string to_string(Command c);
std::string to_string(SectorChoice s);

struct RunOptions {
  Command command = Command::verify;
  SectorChoice sector = SectorChoice::diag;
  std::optional<int> nmax;
  std::optional<int> modes;
};

struct RunOutput {
  Json report;
  std::string csv;     // time series; empty for commands without one
  bool passed = true;  // conjunction of every check in the report
};

RunOutput run_command(const ModelSpec& spec, const RunOptions& opt);

// Building blocks, exposed for tests.
Json to_json(cplx v);
Json to_json(const Eigen::MatrixXcd& m);
Json to_json(const SectorBlock& b);
Json to_json(const PoleSet& p);
Json to_json(const FourthOrderGround& f);
Json config_json(const ModelSpec& spec);

// The invariant suite run by `verify`.
CheckSuite invariant_suite(const ModelSpec& spec);

// Ten resolvent sample points with Im z >= 0.2 around the atomic frequencies.
std::vector<cplx> resolvent_probe_points(const ModelSpec& spec);

// Largest relative deviation between the oracle and the Green's function at the probe points.
double resolvent_deviation(const ModelSpec& spec, int n_modes, int nmax);

// Uniform grid on [0, t_max] with n + 1 samples; t_max = 3 / decay rate, or 10 / gap when free.
std::vector<double> default_time_grid(const ModelSpec& spec, int n = 300);

}  // namespace subdyn
