/*
 * Copyright 2026 The fpmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// fpmimo command line: sweep, verify, bounds and cost.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpmimo/bounds.hpp"
#include "fpmimo/harness.hpp"

namespace {

using namespace fpmimo;

// Config keys exposed as flags. Flags are appended after the config file, so
// they override it; --set covers anything not listed here.
struct KeyFlag {
  const char* key;
  const char* flag;
  const char* help;
};

constexpr KeyFlag kKeyFlags[] = {
    {"scenario", "--scenario", "simo, miso, mu-simo or mu-miso"},
    {"M", "-M,--antennas", "comma-separated antenna counts"},
    {"K", "-K,--users", "number of users"},
    {"rho_db", "--rho-db", "comma-separated SNRs in dB"},
    {"low", "--low", "low (or only) format: bfloat16, fp16, fp32, fp64, custom(t,emin,emax)"},
    {"high", "--high", "high format for mixed mode"},
    {"mode", "--mode", "uniform_low, uniform_high or mixed"},
    {"block_size", "-b,--block-size", "mixed-precision block size"},
    {"rounding", "--rounding", "nearest or stochastic[:seed]"},
    {"range", "--range", "unbounded or strict"},
    {"lambda", "--lambda", "bound confidence parameter"},
    {"trials", "-n,--trials", "trials per grid point"},
    {"seed", "--seed", "master seed"},
    {"csi", "--csi", "perfect or mmse"},
    {"coherence", "--coherence", "coherence block length T"},
    {"tau", "--tau", "pilot length"},
    {"threads", "-j,--threads", "worker threads (0 = all cores)"},
};

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::string> values = std::vector<std::string>(std::size(kKeyFlags));
  std::string output;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  for (std::size_t i = 0; i < std::size(kKeyFlags); ++i) {
    cmd->add_option(kKeyFlags[i].flag, args.values[i], kKeyFlags[i].help);
  }
  cmd->add_option("--set", args.sets, "extra key=value config entries")->take_all();
  cmd->add_option("-o,--output", args.output, "output CSV (default stdout)");
}

ExperimentConfig build_config(const ConfigArgs& args) {
  std::stringstream text;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    text << in.rdbuf() << "\n";
  }
  for (std::size_t i = 0; i < std::size(kKeyFlags); ++i) {
    if (!args.values[i].empty()) text << kKeyFlags[i].key << " = " << args.values[i] << "\n";
  }
  for (const auto& s : args.sets) {
    if (s.find('=') == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    text << s << "\n";
  }
  return parse_config(text);
}

template <typename Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

int run_sweep_cmd(const ConfigArgs& args) {
  const auto config = build_config(args);
  const auto result = run_sweep(config);
  emit(args.output, [&](std::ostream& out) { write_csv(result, out); });
  for (const auto& p : result.points) {
    std::fprintf(stderr, "M=%ld rho=%g dB: rate %.4f +- %.4f, breakdown %.3f\n", p.M, p.rho_db,
                 p.mean_rate, p.rate_stderr, p.breakdown_rate);
  }
  return 0;
}

int run_verify_cmd(const ConfigArgs& args) {
  const auto report = verify_bounds(build_config(args));
  emit(args.output, [&](std::ostream& out) { write_verify_csv(report, out); });
  return 0;
}

struct BoundsArgs {
  std::string format = "fp16";
  std::string high = "fp32";
  int block_size = 32;
  std::vector<long> M = {16, 32, 64, 128, 256, 512, 1024};
  long K = 1;
  std::vector<double> rho_db = {10.0};
  double lambda = 1.0;
  std::size_t upsilon_samples = 20000;
  std::uint64_t seed = 1;
  std::string output;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Rate bounds need a probabilistic gamma; throws from a too-coarse format turn
// into nan so one bad grid point does not hide the rest of the table.
template <typename F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const PrecisionTooLow&) {
    return std::nan("");
  }
}

int run_bounds_cmd(const BoundsArgs& a) {
  const auto fmt = FloatFormat::from_name(a.format);
  const double u = fmt.unit_roundoff();
  const double u_h = FloatFormat::from_name(a.high).unit_roundoff();
  emit(a.output, [&](std::ostream& out) {
    out << "# fpmimo bounds\n# format=" << fmt.name() << "\n# u=" << num(u)
        << "\n# lambda=" << num(a.lambda) << "\n# miso_ceiling=" << num(miso_rate_ceiling(u, a.lambda).value_bits)
        << "\n# rate_gap_limit_large_m=" << num(rate_gap_limit_large_m(u, a.lambda)) << "\n";
    out << "M,K,rho_db,m_max_simo,delta_simo,delta_miso,xi_mixed,lb_rate_simo,simo_ceiling,"
           "lb_rate_miso,rate_gap,c_u,upsilon,lb_sumrate_mu_simo,lb_sumrate_mu_miso\n";
    for (long M : a.M) {
      const bool mu = a.K > 1 && M > a.K;
      const double ups = mu ? upsilon_monte_carlo(M, a.K, a.upsilon_samples, a.seed).value
                            : std::nan("");
      const double ecd2 =
          mu ? or_nan([&] {
            return expected_cd_squared(M, a.K, u, a.lambda, a.upsilon_samples, a.seed).value;
          })
             : std::nan("");
      for (double db : a.rho_db) {
        const double rho = std::pow(10.0, db / 10.0);
        const auto m_max = m_max_simo(rho, u, a.lambda);
        out << M << "," << a.K << "," << num(db) << "," << (m_max ? std::to_string(*m_max) : "")
            << "," << num(delta_simo(M, u, a.lambda)) << "," << num(delta_miso(u, a.lambda)) << ","
            << num(xi_bn(a.block_size, M, u, u_h, a.lambda)) << ","
            << num(lb_rate_simo(M, rho, u, a.lambda).value_bits) << ","
            << num(simo_rate_ceiling(M, u, a.lambda).value_bits) << ","
            << num(lb_rate_miso(M, rho, u, a.lambda).value_bits) << ","
            << num(rate_gap(M, rho, u, a.lambda)) << ","
            << num(mu ? or_nan([&] { return c_u(M, a.K, u, a.lambda); }) : std::nan("")) << ","
            << num(ups) << ","
            << num(mu ? or_nan([&] {
                 return lb_sumrate_mu_simo(M, a.K, rho, u, a.lambda, ups).value_bits;
               })
                      : std::nan(""))
            << ","
            << num(mu ? lb_sumrate_mu_miso(M, a.K, rho, ecd2).value_bits : std::nan("")) << "\n";
      }
    }
  });
  return 0;
}

struct CostArgs {
  std::vector<long> n = {100, 250, 500, 1000, 2000};
  long m = 4;
  long p = 4;
  long b = 32;
  double G = 2.0;
  bool fractional = false;
  std::string output;
};

int run_cost_cmd(const CostArgs& a) {
  emit(a.output, [&](std::ostream& out) {
    out << "# fpmimo cost\n# m=" << a.m << "\n# p=" << a.p << "\n# b=" << a.b << "\n# G=" << num(a.G)
        << "\n# blocks=" << (a.fractional ? "fractional" : "ceil") << "\n";
    out << "n,mixed_sum,mixed_mul,low_sum,low_mul,high_sum,high_mul,summation_overhead,"
           "total_overhead\n";
    for (long n : a.n) {
      const auto c = cost_model(a.m, n, a.p, a.b, a.G,
                                a.fractional ? BlockCount::kFractional : BlockCount::kCeil);
      out << n << "," << num(c.mixed.summations) << "," << num(c.mixed.multiplications) << ","
          << num(c.low.summations) << "," << num(c.low.multiplications) << ","
          << num(c.high.summations) << "," << num(c.high.multiplications) << ","
          << num(c.summation_overhead()) << "," << num(c.total_overhead()) << "\n";
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-precision massive MIMO transceiver experiments"};
  app.require_subcommand(1);

  ConfigArgs sweep_args, verify_args;
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo rate sweep and write CSV");
  add_config_options(sweep, sweep_args);
  auto* verify = app.add_subcommand("verify", "measure bound-violation rates per gamma model");
  add_config_options(verify, verify_args);

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "evaluate the closed-form error and rate bounds");
  bounds->add_option("--format", bounds_args.format, "arithmetic format")->capture_default_str();
  bounds->add_option("--high", bounds_args.high, "high format for the mixed constant")
      ->capture_default_str();
  bounds->add_option("-b,--block-size", bounds_args.block_size)->capture_default_str();
  bounds->add_option("-M,--antennas", bounds_args.M)->delimiter(',')->capture_default_str();
  bounds->add_option("-K,--users", bounds_args.K)->capture_default_str();
  bounds->add_option("--rho-db", bounds_args.rho_db)->delimiter(',')->capture_default_str();
  bounds->add_option("--lambda", bounds_args.lambda)->capture_default_str();
  bounds->add_option("--upsilon-samples", bounds_args.upsilon_samples,
                     "Monte Carlo samples for the multi-user expectations")
      ->capture_default_str();
  bounds->add_option("--seed", bounds_args.seed)->capture_default_str();
  bounds->add_option("-o,--output", bounds_args.output);

  CostArgs cost_args;
  auto* cost = app.add_subcommand("cost", "operation counts of mixed vs uniform products");
  cost->add_option("-n,--length", cost_args.n, "inner dimensions")->delimiter(',')->capture_default_str();
  cost->add_option("-m,--rows", cost_args.m)->capture_default_str();
  cost->add_option("-p,--cols", cost_args.p)->capture_default_str();
  cost->add_option("-b,--block-size", cost_args.b)->capture_default_str();
  cost->add_option("-G,--cost-ratio", cost_args.G, "high/low cost per operation")->capture_default_str();
  cost->add_flag("--fractional", cost_args.fractional, "count 2n/b as a real number");
  cost->add_option("-o,--output", cost_args.output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return run_sweep_cmd(sweep_args);
    if (*verify) return run_verify_cmd(verify_args);
    if (*bounds) return run_bounds_cmd(bounds_args);
    if (*cost) return run_cost_cmd(cost_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
