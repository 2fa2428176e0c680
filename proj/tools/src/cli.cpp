#include "rusgate/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rusgate/analysis.hpp"
#include "rusgate/cubic.hpp"
#include "rusgate/schemes.hpp"

namespace rusgate::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F&& parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename M>
Setter real(M member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); };
}
template <typename M>
Setter integer(M member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_int<int>(k, v); };
}
template <typename M>
Setter text(M member) {
  return [member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"gamma", real(&RunConfig::gamma)},
      {"N", integer(&RunConfig::N)},
      {"alpha1", real(&RunConfig::alpha1)},
      {"transmittance", real(&RunConfig::transmittance)},
      {"eta", real(&RunConfig::eta)},
      {"dark_rate_hz", real(&RunConfig::dark_rate_hz)},
      {"window_s", real(&RunConfig::window_s)},
      {"cutoff", integer(&RunConfig::cutoff)},
      {"resource_cutoff", integer(&RunConfig::resource_cutoff)},
      {"ancilla_cutoff", integer(&RunConfig::ancilla_cutoff)},
      {"max_attempts", integer(&RunConfig::max_attempts)},
      {"sampling", text(&RunConfig::sampling)},
      {"route", text(&RunConfig::route)},
      {"ensemble", integer(&RunConfig::ensemble)},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"input", text(&RunConfig::input)},
      {"input_re", real(&RunConfig::input_re)},
      {"input_im", real(&RunConfig::input_im)},
      {"im_alpha", real(&RunConfig::im_alpha)},
      {"re_alpha_max", real(&RunConfig::re_alpha_max)},
      {"re_alpha_points", integer(&RunConfig::re_alpha_points)},
      {"n_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_list = to_list<int>(k, v, to_int<int>); }},
      {"x_max", real(&RunConfig::x_max)},
      {"x_points", integer(&RunConfig::x_points)},
      {"p_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_list = to_list<double>(k, v, to_double); }},
      {"mc_runs", integer(&RunConfig::mc_runs)},
      {"out", text(&RunConfig::out)},
      {"verbosity", integer(&RunConfig::verbosity)},
  };
  return table;
}

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

// ---- subcommands ------------------------------------------------------------------

void check_identities(const RunConfig& c, std::ostream& out) {
  out << "identity_name,fitted_constant,residual,cutoff\n";
  auto row = [&](const std::string& name, const IdentityReport& r) {
    out << name << ',' << format_double(r.constant.real()) << ',' << format_double(r.residual)
        << ',' << r.cutoff << '\n';
  };
  for (int m : {4, 5, 6}) row("monomial_m" + std::to_string(m), monomial_identity_report(m, c.cutoff));
  for (auto [m, n] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    row("polynomial_m" + std::to_string(m) + "_n" + std::to_string(n),
        polynomial_identity_report(m, n, c.cutoff));
  }
}

void sweep_variance(const RunConfig& c, std::ostream& out) {
  MomentSweepSpec spec;
  spec.gamma = c.gamma;
  spec.N_list = c.n_list;
  spec.im_alpha = c.im_alpha;
  spec.re_alpha = linspace(0.0, c.re_alpha_max, c.re_alpha_points);
  spec.cutoff = c.cutoff;
  out << "re_alpha,ideal";
  for (int n : spec.N_list) out << ",N" << n;
  out << '\n';
  for (const MomentRow& r : variance_sweep(spec)) {
    out << format_double(r.re_alpha) << ',' << format_double(r.ideal_variance);
    for (double v : r.variance) out << ',' << format_double(v);
    out << '\n';
  }
}

void error_ensemble(const RunConfig& c, std::ostream& out) {
  ErrorEnsembleSpec spec;
  spec.gamma = c.gamma;
  spec.N = c.N;
  spec.detector = {c.eta, c.dark_rate_hz, c.window_s};
  spec.alpha1 = c.alpha1;
  spec.transmittance = c.transmittance;
  spec.x_grid = linspace(0.0, c.x_max, c.x_points);
  spec.seed = c.seed;
  out << "x,mean_re,mean_im,stddev\n";
  for (const ErrorStatsRow& r : error_operator_stats(spec)) {
    out << format_double(r.x) << ',' << format_double(r.mean.real()) << ','
        << format_double(r.mean.imag()) << ',' << format_double(r.stddev) << '\n';
  }
}

void simulate(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const ProtocolConfig pc = c.protocol();
  for (const std::string& w : config_warnings(pc)) log << "warning: " << w << '\n';
  std::vector<FockState> inputs;
  if (c.input == "coherent") inputs.push_back(coherent(Complex(c.input_re, c.input_im), c.cutoff));
  const FidelityReport report = gate_fidelity_report(pc, c.ensemble, inputs);
  out << "run,seed,success,total_attempts,fidelity_target,fidelity_ideal\n";
  for (const RunRecord& r : report.runs) {
    out << r.run << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.total_attempts << ','
        << format_double(r.fidelity_target) << ',' << format_double(r.fidelity_ideal) << '\n';
  }
  if (c.verbosity > 0) {
    log << "successes " << report.successes << '/' << report.runs.size() << ", mean fidelity "
        << format_double(report.mean_fidelity_target) << " (target) "
        << format_double(report.mean_fidelity_ideal) << " (ideal), mean attempts "
        << format_double(report.mean_total_attempts) << " vs 3N/p estimate "
        << format_double(report.mean_expected_attempts) << '\n';
  }
}

void compare_schemes(const RunConfig& c, std::ostream& out) {
  out << "p,ours_per_factor,ours_full_gate,marek_closed_form,marek_monte_carlo,gkp\n";
  for (std::size_t i = 0; i < c.p_list.size(); ++i) {
    const RuntimeModels m = runtime_models(c.p_list[i], c.N);
    Rng rng(derive_seed(c.seed, i));
    const double mc = marek_restart_monte_carlo(m.p, c.mc_runs, rng);
    out << format_double(m.p) << ',' << format_double(m.ours_per_factor) << ','
        << format_double(m.ours_full_gate) << ',' << format_double(m.marek_restart) << ','
        << format_double(mc) << ",NA\n";
  }
}

}  // namespace

// ---- configuration ------------------------------------------------------------------

ProtocolConfig RunConfig::protocol() const {
  ProtocolConfig p;
  p.gamma = gamma;
  p.N = N;
  p.alpha1 = alpha1;
  p.transmittance = transmittance;
  p.system_cutoff = cutoff;
  p.resource_cutoff = resource_cutoff;
  p.ancilla_cutoff = ancilla_cutoff;
  p.max_attempts = max_attempts;
  p.detector = {eta, dark_rate_hz, window_s};
  p.seed = seed;
  p.route = route == "beamsplitter" ? AttemptRoute::beamsplitter : AttemptRoute::kraus;
  p.sampling = sampling == "heralded" ? Sampling::heralded : Sampling::unconditioned;
  return p;
}

void RunConfig::validate() const {
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
  require(N >= 1, "N", "must be at least 1");
  require(std::isfinite(alpha1) && alpha1 > 0.0, "alpha1", "must be > 0");
  require(transmittance > 0.0 && transmittance < 1.0, "transmittance", "must lie in (0, 1)");
  require(eta >= 0.0 && eta <= 1.0, "eta", "must lie in [0, 1]");
  require(std::isfinite(dark_rate_hz) && dark_rate_hz >= 0.0, "dark_rate_hz", "must be >= 0");
  require(std::isfinite(window_s) && window_s > 0.0, "window_s", "must be > 0");
  require(cutoff >= 2 && cutoff <= 400, "cutoff", "must lie in [2, 400]");
  require(resource_cutoff >= 2 && resource_cutoff <= 1000, "resource_cutoff", "must lie in [2, 1000]");
  require(ancilla_cutoff >= 2 && ancilla_cutoff <= 64, "ancilla_cutoff", "must lie in [2, 64]");
  require(max_attempts >= 1, "max_attempts", "must be at least 1");
  require(sampling == "unconditioned" || sampling == "heralded", "sampling",
          "must be 'unconditioned' or 'heralded'");
  require(sampling != "heralded" || eta == 1.0, "sampling", "heralded sampling needs eta = 1");
  require(route == "kraus" || route == "beamsplitter", "route", "must be 'kraus' or 'beamsplitter'");
  require(ensemble >= 1 && ensemble <= 1000000, "ensemble", "must lie in [1, 1000000]");
  require(input == "grid" || input == "coherent", "input", "must be 'grid' or 'coherent'");
  require(std::isfinite(input_re), "input_re", "must be finite");
  require(std::isfinite(input_im), "input_im", "must be finite");
  require(std::isfinite(im_alpha), "im_alpha", "must be finite");
  require(std::isfinite(re_alpha_max) && re_alpha_max >= 0.0, "re_alpha_max", "must be >= 0");
  require(re_alpha_points >= 1, "re_alpha_points", "must be at least 1");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1, "n_list", "entries must be at least 1");
    require(i == 0 || n_list[i] > n_list[i - 1], "n_list", "must be strictly ascending");
  }
  require(std::isfinite(x_max) && x_max >= 0.0, "x_max", "must be >= 0");
  require(x_points >= 1, "x_points", "must be at least 1");
  for (double p : p_list) require(p > 0.0 && p <= 1.0, "p_list", "entries must lie in (0, 1]");
  require(mc_runs >= 1, "mc_runs", "must be at least 1");
  require(verbosity >= 0, "verbosity", "must be >= 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(config, key, value);
      return;
    }
  }
  throw ConfigError(key, "unknown key");
}

void parse_config_text(RunConfig& config, const std::string& text) {
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    }
    set_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig c;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    parse_config_text(c, ss.str());
  }
  for (const auto& [k, v] : overrides) set_value(c, k, v);
  c.validate();
  return c;
}

// ---- dispatch ---------------------------------------------------------------------

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "sweep-variance", "error-ensemble",
                                                 "compare-schemes", "check-identities"};
  return names;
}

void run(const std::string& subcommand, const RunConfig& config, std::ostream& out,
         std::ostream& log) {
  config.validate();
  if (subcommand == "simulate") return simulate(config, out, log);
  if (subcommand == "sweep-variance") return sweep_variance(config, out);
  if (subcommand == "error-ensemble") return error_ensemble(config, out);
  if (subcommand == "compare-schemes") return compare_schemes(config, out);
  if (subcommand == "check-identities") return check_identities(config, out);
  throw ConfigError("subcommand", "unknown subcommand '" + subcommand + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int main(int argc, char** argv) {
  CLI::App app{"Repeat-until-success cubic phase gate simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  // Flag order in the table is the override order.
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--seed", "seed"},           {"--out", "out"},
      {"--N", "N"},                 {"--gamma", "gamma"},
      {"--alpha1", "alpha1"},       {"--transmittance", "transmittance"},
      {"--eta", "eta"},             {"--dark-rate-hz", "dark_rate_hz"},
      {"--window-s", "window_s"},   {"--cutoff", "cutoff"},
      {"--ensemble", "ensemble"},
  };
  std::vector<std::string> values(flags.size());
  app.add_option("--config", config_path, "key=value configuration file");
  for (std::size_t i = 0; i < flags.size(); ++i) {
    app.add_option(flags[i].first, values[i], "overrides '" + flags[i].second + "'");
  }
  const std::map<std::string, std::string> about = {
      {"simulate", "run the gate over an ensemble and report fidelities and attempts"},
      {"sweep-variance", "momentum variance of U_N vs the ideal gate over coherent inputs"},
      {"error-ensemble", "mean and spread of the detector-error operator A(x)"},
      {"compare-schemes", "running-time models, with a restart Monte Carlo"},
      {"check-identities", "fitted constants of the commutator identities"},
  };
  for (const std::string& name : subcommands()) app.add_subcommand(name, about.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (app.count(flags[i].first) > 0) overrides.emplace_back(flags[i].second, values[i]);
    }
    const RunConfig config = parse_config(config_path, overrides);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (config.out.empty() || config.out == "-") {
      run(sub, config, std::cout, std::cerr);
    } else {
      std::ostringstream buffer;
      run(sub, config, buffer, std::cerr);
      std::ofstream f(config.out, std::ios::binary);
      if (!f) throw ConfigError("out", "cannot write '" + config.out + "'");
      f << buffer.str();
    }
    return kExitOk;
  } catch (const NumericalDegradation& e) {
    std::cerr << "numerical degradation: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateOutcome& e) {
    std::cerr << "degenerate outcome: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace rusgate::cli
