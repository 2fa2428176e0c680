#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rusgate/cli.hpp"

using namespace rusgate;
using namespace rusgate::cli;

namespace {

std::string run_to_string(const std::string& sub, const RunConfig& c) {
  std::ostringstream out, log;
  run(sub, c, out, log);
  return out.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  RunConfig c;
  parse_config_text(c, "");
  c.validate();
  EXPECT_EQ(c.gamma, 0.03);
  EXPECT_EQ(c.N, 1);
  EXPECT_EQ(c.transmittance, 0.99);
  EXPECT_EQ(c.eta, 0.9);
  EXPECT_EQ(c.dark_rate_hz, 100.0);
  EXPECT_EQ(c.window_s, 1e-10);
}

TEST(Config, ParsesKeysCommentsAndLists) {
  RunConfig c;
  parse_config_text(c, "# header\n gamma = 0.1  # inline\n\nN=3\nn_list=1, 2,4\nsampling=heralded\neta=1\n");
  EXPECT_EQ(c.gamma, 0.1);
  EXPECT_EQ(c.N, 3);
  EXPECT_EQ(c.n_list, (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(c.protocol().sampling, Sampling::heralded);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ErrorsNameTheKey) {
  RunConfig c;
  EXPECT_EQ(key_of([&] { parse_config_text(c, "gama=0.1\n"); }), "gama");
  EXPECT_EQ(key_of([&] { parse_config_text(c, "N=three\n"); }), "N");
  EXPECT_EQ(key_of([&] { parse_config_text(c, "N=2.5\n"); }), "N");
  EXPECT_EQ(key_of([&] {
              RunConfig d;
              parse_config_text(d, "gamma=-1\n");
              d.validate();
            }),
            "gamma");
  EXPECT_EQ(key_of([&] {
              RunConfig d;
              d.sampling = "heralded";
              d.validate();
            }),
            "sampling");
  EXPECT_EQ(key_of([&] {
              RunConfig d;
              d.transmittance = 1.0;
              d.validate();
            }),
            "transmittance");
}

TEST(Config, FlagsOverrideFile) {
  const std::string path = ::testing::TempDir() + "rusgate_cfg.txt";
  std::ofstream(path) << "N=1\ngamma=0.05\n";
  const RunConfig c = parse_config(path, {{"N", "3"}});
  EXPECT_EQ(c.N, 3);
  EXPECT_EQ(c.gamma, 0.05);
  EXPECT_THROW(parse_config(path + ".missing", {}), ConfigError);
  std::remove(path.c_str());
}

TEST(Config, EveryKeyIsKnown) {
  EXPECT_EQ(config_keys().size(), 28u);
  for (const auto& k : config_keys()) {
    RunConfig c;
    try {
      set_value(c, k, "@");
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), k);
      EXPECT_EQ(std::string(e.what()).find("unknown key"), std::string::npos) << k;
    }
  }
}

TEST(Cli, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.03}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(Cli, CheckIdentitiesHeaderAndRows) {
  const auto l = lines(run_to_string("check-identities", RunConfig{}));
  ASSERT_EQ(l.size(), 8u);
  EXPECT_EQ(l[0], "identity_name,fitted_constant,residual,cutoff");
  EXPECT_EQ(l[1].substr(0, 12), "monomial_m4,");
}

TEST(Cli, SweepVarianceColumns) {
  RunConfig c;
  const auto l = lines(run_to_string("sweep-variance", c));
  ASSERT_EQ(l.size(), 8u);
  EXPECT_EQ(l[0], "re_alpha,ideal,N1,N3,N5,N7");
  EXPECT_EQ(l[1].substr(0, 2), "0,");
  EXPECT_EQ(l[7].substr(0, 4), "1.5,");
}

TEST(Cli, ErrorEnsembleRows) {
  const auto l = lines(run_to_string("error-ensemble", RunConfig{}));
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "x,mean_re,mean_im,stddev");
  EXPECT_EQ(l[6].substr(0, 4), "2.5,");
}

TEST(Cli, CompareSchemes) {
  RunConfig c;
  c.p_list = {0.1, 0.2};
  c.mc_runs = 2000;
  const auto l = lines(run_to_string("compare-schemes", c));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "p,ours_per_factor,ours_full_gate,marek_closed_form,marek_monte_carlo,gkp");
  EXPECT_EQ(l[1].substr(0, 11), "0.1,10,30,1");
  EXPECT_EQ(l[1].substr(l[1].size() - 3), ",NA");
}

TEST(Cli, SimulateIsDeterministic) {
  RunConfig c;
  c.ensemble = 3;
  c.cutoff = 20;
  c.resource_cutoff = 50;
  c.seed = 12;
  const std::string a = run_to_string("simulate", c);
  const std::string b = run_to_string("simulate", c);
  EXPECT_EQ(a, b);
  const auto l = lines(a);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "run,seed,success,total_attempts,fidelity_target,fidelity_ideal");
  c.seed = 13;
  EXPECT_NE(run_to_string("simulate", c), a);
}

TEST(Cli, UnknownSubcommand) {
  EXPECT_THROW(run_to_string("nope", RunConfig{}), ConfigError);
}

TEST(Cli, MainExitCodes) {
  const std::string out = ::testing::TempDir() + "rusgate_out.csv";
  std::vector<std::string> ok = {"rusgate", "check-identities", "--out", out};
  std::vector<std::string> bad = {"rusgate", "simulate", "--gamma", "-1"};
  std::vector<std::string> junk = {"rusgate", "simulate", "--N", "x"};
  std::vector<std::string> none = {"rusgate"};
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return rusgate::cli::main(static_cast<int>(argv.size()), argv.data());
  };
  EXPECT_EQ(call(ok), kExitOk);
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "identity_name,fitted_constant,residual,cutoff");
  EXPECT_EQ(call(bad), kExitValidation);
  EXPECT_EQ(call(junk), kExitValidation);
  EXPECT_EQ(call(none), kExitValidation);
  std::remove(out.c_str());
}
