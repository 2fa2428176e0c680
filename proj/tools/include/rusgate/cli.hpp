#pragma once

// Command-line driver: configuration parsing and subcommand dispatch.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rusgate/protocol.hpp"

namespace rusgate::cli {

// Bad configuration: unknown key, type mismatch or constraint violation.
// `key()` names the offending key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidArgument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  // protocol
  double gamma = 0.03;
  int N = 1;
  double alpha1 = 2.0;
  double transmittance = 0.99;
  double eta = 0.9;
  double dark_rate_hz = 100.0;
  double window_s = 1e-10;
  int cutoff = 40;
  int resource_cutoff = 80;
  int ancilla_cutoff = 4;
  int max_attempts = 10000;
  std::string sampling = "unconditioned";
  std::string route = "kraus";
  int ensemble = 100;
  std::uint64_t seed = 0;
  // simulate: "grid" runs the default coherent grid, "coherent" the single
  // state coherent(input_re + i input_im)
  std::string input = "grid";
  double input_re = 0.3;
  double input_im = 0.0;
  // sweep-variance
  double im_alpha = 0.25;
  double re_alpha_max = 1.5;
  int re_alpha_points = 7;
  std::vector<int> n_list{1, 3, 5, 7};
  // error-ensemble
  double x_max = 2.5;
  int x_points = 6;
  // compare-schemes
  std::vector<double> p_list{0.05, 0.1, 0.2, 0.5};
  int mc_runs = 20000;

  std::string out;  // empty or "-" for stdout
  int verbosity = 0;  // > 0: summary lines on the log stream

  ProtocolConfig protocol() const;
  void validate() const;
};

// Every key accepted in a config file, in documentation order.
const std::vector<std::string>& config_keys();

// Applies one key=value setting; throws ConfigError.
void set_value(RunConfig& config, const std::string& key, const std::string& value);

// Parses `key=value` lines; blank lines and `#` comments are ignored.
void parse_config_text(RunConfig& config, const std::string& text);

// Defaults, then the file (if non-empty path), then overrides in order; the
// result is validated.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

const std::vector<std::string>& subcommands();

// Writes the subcommand's CSV to `out`. Throws on error.
void run(const std::string& subcommand, const RunConfig& config, std::ostream& out,
         std::ostream& log);

// Shortest round-trip decimal.
std::string format_double(double v);

// Entry point used by main(): parses argv, runs, maps errors to exit codes.
int main(int argc, char** argv);

}  // namespace rusgate::cli
