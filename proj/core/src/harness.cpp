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

#include "fpmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fpmimo/parallel.hpp"

namespace fpmimo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("fpmimo: bad number for '" + key + "': '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("fpmimo: bad integer for '" + key + "': '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto d = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("fpmimo: bad unsigned integer for '" + key + "': '" + v + "'");
  }
}

RoundingMode parse_rounding(const std::string& v) {
  if (v == "nearest" || v == "nearest_even") return RoundingMode::nearest_even();
  if (v == "stochastic") return RoundingMode::stochastic(0);
  if (v.rfind("stochastic:", 0) == 0) return RoundingMode::stochastic(parse_u64("rounding", v.substr(11)));
  throw std::invalid_argument("fpmimo: unknown rounding '" + v + "'");
}

RangeMode parse_range(const std::string& v) {
  if (v == "unbounded") return RangeMode::kUnbounded;
  if (v == "strict" || v == "strict_ieee") return RangeMode::kStrictIEEE;
  throw std::invalid_argument("fpmimo: unknown range mode '" + v + "'");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

// Keys applied so far while parsing one file.
struct ParseState {
  bool k_set = false;
};

double kappa2_and_norm(const ComplexMatrix& gram, double* spectral_norm_sq) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (spectral_norm_sq) *spectral_norm_sq = ev(ev.size() - 1);
  return ev(ev.size() - 1) / ev(0);
}

double log2p1(double x) { return std::log1p(x) / std::log(2.0); }

std::uint64_t rounding_stream(std::uint64_t seed, std::size_t grid_index, std::size_t trial) {
  return mix64(seed ^ mix64(grid_index * 0x9e3779b97f4a7c15ULL + trial));
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kSimo: return "simo";
    case Scenario::kMiso: return "miso";
    case Scenario::kMuSimo: return "mu-simo";
    case Scenario::kMuMiso: return "mu-miso";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(l.begin(), l.end(), '_', '-');
  if (l == "simo") return Scenario::kSimo;
  if (l == "miso") return Scenario::kMiso;
  if (l == "mu-simo") return Scenario::kMuSimo;
  if (l == "mu-miso") return Scenario::kMuMiso;
  throw std::invalid_argument("fpmimo: unknown scenario '" + std::string(s) + "'");
}

bool is_single_user(Scenario s) { return s == Scenario::kSimo || s == Scenario::kMiso; }

double CsiModel::data_fraction() const {
  if (perfect()) return 1.0;
  return static_cast<double>(coherence - tau) / static_cast<double>(coherence);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("fpmimo: trials must be at least 1");
  if (M_grid.empty() || rho_db_grid.empty()) throw std::invalid_argument("fpmimo: empty grid");
  if (!(lambda > 0.0)) throw std::invalid_argument("fpmimo: lambda must be positive");
  if (is_single_user(scenario)) {
    if (K != 1) throw std::invalid_argument("fpmimo: single-user scenarios need K = 1");
  } else if (K < 1) {
    throw std::invalid_argument("fpmimo: K must be positive");
  }
  for (long m : M_grid) {
    if (m < 1) throw std::invalid_argument("fpmimo: antenna counts must be positive");
    if (!is_single_user(scenario) && m < K + 1) {
      throw std::invalid_argument("fpmimo: multi-user scenarios need M >= K + 1");
    }
  }
  for (double r : rho_db_grid) {
    if (!std::isfinite(r)) throw std::invalid_argument("fpmimo: SNR grid must be finite");
  }
  if (!csi.perfect()) {
    if (csi.tau < K) throw std::invalid_argument("fpmimo: pilot length tau must be at least K");
    if (csi.coherence <= csi.tau) throw std::invalid_argument("fpmimo: coherence must exceed tau");
  }
  policy.validate();
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_pairs() const {
  return {
      {"scenario", std::string(to_string(scenario))},
      {"M", join(M_grid)},
      {"K", std::to_string(K)},
      {"rho_db", join(rho_db_grid)},
      {"low", policy.low.name()},
      {"high", policy.high.name()},
      {"mode", std::string(to_string(policy.mode))},
      {"block_size", std::to_string(policy.block_size)},
      {"rounding", to_string(policy.rounding)},
      {"range", std::string(to_string(policy.range))},
      {"lambda", fmt_double(lambda)},
      {"trials", std::to_string(trials)},
      {"seed", std::to_string(seed)},
      {"csi", csi.perfect() ? "perfect" : "imperfect"},
      {"coherence", std::to_string(csi.coherence)},
      {"tau", std::to_string(csi.tau)},
  };
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    c.scenario = scenario_from_string(value);
  } else if (key == "M") {
    c.M_grid.clear();
    for (const auto& v : split(value, ',')) c.M_grid.push_back(parse_long(key, v));
  } else if (key == "K") {
    c.K = parse_long(key, value);
  } else if (key == "rho_db") {
    c.rho_db_grid.clear();
    for (const auto& v : split(value, ',')) c.rho_db_grid.push_back(parse_double(key, v));
  } else if (key == "low") {
    c.policy.low = FloatFormat::from_name(value);
  } else if (key == "high") {
    c.policy.high = FloatFormat::from_name(value);
  } else if (key == "mode") {
    c.policy.mode = precision_mode_from_string(value);
  } else if (key == "block_size") {
    c.policy.block_size = static_cast<int>(parse_long(key, value));
  } else if (key == "rounding") {
    c.policy.rounding = parse_rounding(value);
  } else if (key == "range") {
    c.policy.range = parse_range(value);
  } else if (key == "lambda") {
    c.lambda = parse_double(key, value);
  } else if (key == "trials") {
    c.trials = parse_u64(key, value);
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "csi") {
    if (value == "perfect") {
      c.csi.kind = CsiModel::Kind::kPerfect;
    } else if (value == "imperfect" || value == "mmse") {
      c.csi.kind = CsiModel::Kind::kImperfectMmse;
    } else {
      throw std::invalid_argument("fpmimo: unknown csi model '" + value + "'");
    }
  } else if (key == "coherence") {
    c.csi.coherence = parse_long(key, value);
  } else if (key == "tau") {
    c.csi.tau = parse_long(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<unsigned>(parse_u64(key, value));
  } else {
    throw std::invalid_argument("fpmimo: unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  ParseState st;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("fpmimo: config line " + std::to_string(lineno) + " has no '='");
    }
    const std::string key = trim(line.substr(0, eq));
    apply_config_value(c, key, trim(line.substr(eq + 1)));
    if (key == "K") st.k_set = true;
  }
  if (!st.k_set) c.K = is_single_user(c.scenario) ? 1 : 4;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("fpmimo: cannot open config '" + path + "'");
  return parse_config(in);
}

ChannelRealization draw_channel(long M, long K, Rng& gen) {
  if (M < 1 || K < 1) throw std::invalid_argument("fpmimo: channel dimensions must be positive");
  ComplexGaussian cn;
  ChannelRealization ch{ComplexMatrix(M, K)};
  for (long k = 0; k < K; ++k)
    for (long m = 0; m < M; ++m) ch.H(m, k) = cn(gen);
  return ch;
}

ComplexMatrix estimate_channel_mmse(const ComplexMatrix& H, long tau, double rho, Rng& gen) {
  if (tau < 1 || !(rho > 0.0)) throw std::invalid_argument("fpmimo: pilot needs tau >= 1, rho > 0");
  const double rp = static_cast<double>(tau) * rho;
  const double gain = std::sqrt(rp) / (rp + 1.0);
  ComplexGaussian cn;
  ComplexMatrix est(H.rows(), H.cols());
  for (Eigen::Index k = 0; k < H.cols(); ++k)
    for (Eigen::Index m = 0; m < H.rows(); ++m) est(m, k) = gain * (std::sqrt(rp) * H(m, k) + cn(gen));
  return est;
}

double bound_constant(const ExperimentConfig& config, long M, const GammaModel& gamma,
                      double kappa2) {
  const auto& pol = config.policy;
  const double u = pol.working_format().unit_roundoff();
  std::optional<InnerProductConstant> inner;
  if (pol.is_mixed()) {
    inner = InnerProductConstant{
        xi_bn(pol.block_size, M, pol.low.unit_roundoff(), pol.high.unit_roundoff(), gamma)};
  }
  double c = kInf;
  try {
    switch (config.scenario) {
      case Scenario::kSimo: c = inner ? std::sqrt(2.0) * inner->value : delta_simo(M, u, gamma); break;
      case Scenario::kMiso: c = delta_miso(u, gamma); break;
      case Scenario::kMuSimo: c = c_u(M, config.K, u, gamma, inner); break;
      case Scenario::kMuMiso: c = c_d(M, config.K, u, gamma, std::max(1.0, kappa2), inner); break;
    }
  } catch (const PrecisionTooLow&) {
    c = kInf;
  }
  return std::isnan(c) ? kInf : c;
}

bool violates(const ExperimentConfig& config, long M, const GammaModel& gamma,
              const TrialRecord& record) {
  if (record.breakdown) return false;
  const double bound = bound_constant(config, M, gamma, record.kappa2) * record.bound_scale;
  return record.arith_error_norm > bound;
}

TrialRecord run_trial(const ExperimentConfig& config, long M, double rho_db,
                      std::size_t grid_index, std::size_t trial) {
  Rng gen = substream(config.seed, grid_index, trial);
  ComplexGaussian cn;
  const double rho = std::pow(10.0, rho_db / 10.0);
  const long K = config.K;
  const ComplexMatrix H = draw_channel(M, K, gen).H;
  const bool perfect = config.csi.perfect();
  const ComplexMatrix Hh = perfect ? H : estimate_channel_mmse(H, config.csi.tau, rho, gen);
  const double rp = static_cast<double>(config.csi.tau) * rho;
  const double sigma_e2 = perfect ? 0.0 : 1.0 / (rp + 1.0);
  const double prefactor = config.csi.data_fraction();

  const PrecisionPolicy full = PrecisionPolicy::full();
  Precision prec(config.policy, rounding_stream(config.seed, grid_index, trial));
  Precision ref(full);

  TrialRecord rec;
  auto finish_rates = [&] {
    rec.rate = 0.0;
    for (double s : rec.sinr) rec.rate += log2p1(s);
    rec.rate *= prefactor;
  };

  switch (config.scenario) {
    case Scenario::kSimo: {
      const Complex x = cn(gen);
      ComplexVector z(M);
      for (long m = 0; m < M; ++m) z(m) = std::sqrt(rho) * H(m, 0) * x + cn(gen);
      const ComplexVector h = Hh.col(0);
      const ComplexVector hl = prec.round(h);
      const ComplexVector zl = prec.round(z);
      const Complex r = mrc_combine(hl, zl, prec);
      const Complex r_ref = mrc_combine(h, z, ref);
      const Complex r_ar = mrc_combine(hl, zl, ref);
      const double err = std::abs(r - r_ref);
      const double nh2 = h.squaredNorm();
      const double noise = nh2 * (1.0 + rho * sigma_e2);
      rec.sinr_reference = {rho * nh2 * nh2 / noise};
      rec.sinr = {rho * nh2 * nh2 / (noise + err * err)};
      rec.error_norm = err;
      rec.arith_error_norm = std::abs(r - r_ar);
      rec.reference_norm = std::abs(r_ref);
      rec.bound_scale = hl.norm() * zl.norm();
      break;
    }
    case Scenario::kMiso: {
      const Complex x = cn(gen);
      const ComplexVector h = Hh.col(0);
      const ComplexVector hl = prec.round(h);
      const Complex xl = prec.round(x);
      const ComplexVector s = mrt_precode(hl, xl, prec);
      const ComplexVector s_ref = mrt_precode(h, x, ref);
      const ComplexVector s_ar = mrt_precode(hl, xl, ref);
      const ComplexVector delta = s - s_ref;
      const double leak = std::norm(H.col(0).dot(delta));
      const double nh2 = h.squaredNorm();
      rec.sinr_reference = {rho * nh2 / (rho * sigma_e2 + 1.0)};
      rec.sinr = {rho * nh2 / (rho * sigma_e2 + rho * leak + 1.0)};
      rec.error_norm = delta.norm();
      rec.arith_error_norm = (s - s_ar).norm();
      rec.reference_norm = s_ref.norm();
      rec.bound_scale = std::abs(xl);
      break;
    }
    case Scenario::kMuSimo: {
      ComplexVector x(K);
      for (long k = 0; k < K; ++k) x(k) = cn(gen);
      ComplexVector z = std::sqrt(rho) * (H * x);
      for (long m = 0; m < M; ++m) z(m) += cn(gen);
      const ComplexMatrix Hl = prec.round(Hh);
      const ComplexVector zl = prec.round(z);
      const ComplexMatrix gl = Hl.adjoint() * Hl;
      double norm_sq = 0.0;
      rec.kappa2 = kappa2_and_norm(gl, &norm_sq);
      ComplexVector r;
      try {
        r = zf_detect_ne(Hl, zl, prec);
      } catch (const PrecisionBreakdown&) {
        rec.breakdown = true;
        return rec;
      }
      const ComplexVector r_ref = zf_detect_ne(Hh, z, ref);
      const ComplexVector r_ar = zf_detect_ne(Hl, zl, ref);
      const ComplexVector delta = r - r_ref;
      const ComplexMatrix g = Hh.adjoint() * Hh;
      const ComplexMatrix ginv = g.llt().solve(ComplexMatrix::Identity(K, K));
      const double noise_scale = 1.0 + rho * static_cast<double>(K) * sigma_e2;
      for (long k = 0; k < K; ++k) {
        const double d = noise_scale * ginv(k, k).real();
        rec.sinr_reference.push_back(rho / d);
        rec.sinr.push_back(rho / (d + std::norm(delta(k))));
      }
      rec.error_norm = delta.norm();
      rec.arith_error_norm = (r - r_ar).norm();
      rec.reference_norm = r_ref.norm();
      rec.bound_scale = rec.kappa2 * r_ar.norm();
      rec.stability_ratio = std::sqrt(norm_sq) * zl.norm() / (gl * r_ar).norm();
      break;
    }
    case Scenario::kMuMiso: {
      ComplexVector x(K);
      for (long k = 0; k < K; ++k) x(k) = cn(gen);
      const double beta = perfect ? zf_beta(M, K) : zf_beta(M, K) * rp / (rp + 1.0);
      const ComplexMatrix Hl = prec.round(Hh);
      const ComplexVector xl = prec.round(x);
      rec.kappa2 = kappa2_and_norm(Hl.adjoint() * Hl, nullptr);
      ComplexVector s;
      try {
        s = zf_precode_ne(Hl, xl, prec, beta);
      } catch (const PrecisionBreakdown&) {
        rec.breakdown = true;
        return rec;
      }
      const ComplexVector s_ref = zf_precode_ne(Hh, x, ref, beta);
      const ComplexVector s_ar = zf_precode_ne(Hl, xl, ref, beta);
      const ComplexVector delta = s - s_ref;
      const double est_noise = rho * sigma_e2 * s_ref.squaredNorm();
      for (long k = 0; k < K; ++k) {
        const double leak = std::norm(H.col(k).dot(delta));
        rec.sinr_reference.push_back(rho * beta / (est_noise + 1.0));
        rec.sinr.push_back(rho * beta / (est_noise + rho * leak + 1.0));
      }
      rec.error_norm = delta.norm();
      rec.arith_error_norm = (s - s_ar).norm();
      rec.reference_norm = s_ref.norm();
      rec.bound_scale = s_ar.norm();
      break;
    }
  }
  rec.rel_error = rec.reference_norm > 0.0 ? rec.error_norm / rec.reference_norm : 0.0;
  finish_rates();
  return rec;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result{config, {}};
  const auto gamma = GammaModel::probabilistic(config.lambda);
  std::size_t grid_index = 0;
  for (long M : config.M_grid) {
    for (double rho_db : config.rho_db_grid) {
      std::vector<TrialRecord> records(config.trials);
      parallel_for(
          config.trials,
          [&](std::size_t t) { records[t] = run_trial(config, M, rho_db, grid_index, t); },
          config.threads);

      GridStats g;
      g.M = M;
      g.rho_db = rho_db;
      g.trials = config.trials;
      std::vector<double> rates, rel;
      std::size_t breakdowns = 0, violations = 0;
      for (const auto& r : records) {
        if (r.breakdown) {
          ++breakdowns;
          continue;
        }
        rates.push_back(r.rate);
        rel.push_back(r.rel_error);
        violations += violates(config, M, gamma, r) ? 1 : 0;
      }
      const double n = static_cast<double>(rates.size());
      if (rates.empty()) {
        g.mean_rate = g.rate_stderr = g.bound_violation_rate = kNaN;
      } else {
        double mean = 0.0;
        for (double r : rates) mean += r;
        mean /= n;
        double ss = 0.0;
        for (double r : rates) ss += (r - mean) * (r - mean);
        g.mean_rate = mean;
        g.rate_stderr = rates.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
        g.bound_violation_rate = static_cast<double>(violations) / n;
      }
      g.median_rel_err = quantile(rel, 0.5);
      g.p99_rel_err = quantile(rel, 0.99);
      g.breakdown_rate = static_cast<double>(breakdowns) / static_cast<double>(config.trials);
      if (config.keep_records) g.records = std::move(records);
      result.points.push_back(std::move(g));
      ++grid_index;
    }
  }
  return result;
}

VerifyReport verify_bounds(const SweepResult& sweep) {
  const auto& config = sweep.config;
  const std::vector<GammaModel> models = {GammaModel::probabilistic(0.5),
                                          GammaModel::probabilistic(1.0),
                                          GammaModel::probabilistic(3.0), GammaModel::worst_case()};
  VerifyReport report{config, {}};
  for (const auto& g : sweep.points) {
    if (g.records.size() != g.trials) {
      throw std::invalid_argument("fpmimo: verify_bounds needs a sweep run with keep_records");
    }
    VerifyPoint p;
    p.M = g.M;
    p.rho_db = g.rho_db;
    std::vector<double> ratios;
    for (const auto& r : g.records) {
      if (!r.breakdown && r.stability_ratio > 0.0) ratios.push_back(r.stability_ratio);
    }
    p.median_stability_ratio = ratios.empty() ? kNaN : quantile(ratios, 0.5);
    for (const auto& model : models) {
      std::size_t valid = 0, bad = 0;
      for (const auto& r : g.records) {
        if (r.breakdown) continue;
        ++valid;
        bad += violates(config, g.M, model, r) ? 1 : 0;
      }
      p.rates.push_back({model.label(), valid ? static_cast<double>(bad) / valid : kNaN, valid});
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

VerifyReport verify_bounds(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.keep_records = true;
  return verify_bounds(run_sweep(c));
}

const std::vector<std::string> kCsvColumns = {
    "scenario", "M",           "K",           "rho_db",        "format",
    "mode",     "block_size",  "lambda",      "mean_rate",     "rate_stderr",
    "median_rel_err", "p99_rel_err", "bound_violation_rate", "breakdown_rate", "trials",
    "seed"};

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_header(const ExperimentConfig& config, const char* kind, std::ostream& out) {
  out << "# fpmimo " << kind << "\n";
  for (const auto& [k, v] : config.to_pairs()) out << "# " << k << "=" << v << "\n";
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& out) {
  const auto& c = result.config;
  write_header(c, "sweep", out);
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << "\n";
  for (const auto& g : result.points) {
    const std::vector<std::string> row = {
        std::string(to_string(c.scenario)),
        std::to_string(g.M),
        std::to_string(c.K),
        fmt_double(g.rho_db),
        c.policy.format_label(),
        std::string(to_string(c.policy.mode)),
        std::to_string(c.policy.block_size),
        fmt_double(c.lambda),
        fmt_double(g.mean_rate),
        fmt_double(g.rate_stderr),
        fmt_double(g.median_rel_err),
        fmt_double(g.p99_rel_err),
        fmt_double(g.bound_violation_rate),
        fmt_double(g.breakdown_rate),
        std::to_string(g.trials),
        std::to_string(c.seed)};
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\n";
  }
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("fpmimo: cannot write '" + path + "'");
  write_csv(result, out);
  if (!out) throw std::runtime_error("fpmimo: write to '" + path + "' failed");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::vector<std::string> columns;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.header.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    auto fields = parse_csv_line(line);
    if (columns.empty()) {
      columns = std::move(fields);
      continue;
    }
    if (fields.size() != columns.size()) throw std::runtime_error("fpmimo: ragged CSV row");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = fields[i];
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_verify_csv(const VerifyReport& report, std::ostream& out) {
  write_header(report.config, "verify", out);
  out << "scenario,M,K,rho_db,format,gamma_model,violation_rate,trials,median_stability_ratio\n";
  const auto& c = report.config;
  for (const auto& p : report.points) {
    for (const auto& r : p.rates) {
      out << to_string(c.scenario) << "," << p.M << "," << c.K << "," << fmt_double(p.rho_db) << ","
          << csv_field(c.policy.format_label()) << "," << r.model << "," << fmt_double(r.rate) << ","
          << r.trials << "," << fmt_double(p.median_stability_ratio) << "\n";
    }
  }
}

}  // namespace fpmimo
