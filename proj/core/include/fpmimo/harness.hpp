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

// Monte Carlo experiments: channel generation, per-trial transceiver runs
// against 64-bit references, rate and error statistics, bound-violation
// studies and CSV output.

#ifndef FPMIMO_HARNESS_HPP_
#define FPMIMO_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fpmimo/bounds.hpp"
#include "fpmimo/linalg.hpp"
#include "fpmimo/random.hpp"
#include "fpmimo/transceiver.hpp"

namespace fpmimo {

enum class Scenario { kSimo, kMiso, kMuSimo, kMuMiso };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);
bool is_single_user(Scenario s);

struct CsiModel {
  enum class Kind { kPerfect, kImperfectMmse };
  Kind kind = Kind::kPerfect;
  long coherence = 196;  // T, symbols per coherence block
  long tau = 4;          // pilot length

  bool perfect() const { return kind == Kind::kPerfect; }
  /// Fraction of the coherence block left for data, (T - tau) / T.
  double data_fraction() const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kSimo;
  std::vector<long> M_grid = {16, 32, 64, 128, 256, 512, 1024};
  long K = 1;
  std::vector<double> rho_db_grid = {10.0};
  PrecisionPolicy policy = PrecisionPolicy::uniform(FloatFormat::fp16());
  double lambda = 3.0;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  CsiModel csi;
  unsigned threads = 0;       // 0 = all hardware threads; never affects results
  bool keep_records = false;  // retain per-trial records in the result

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  /// Every field as key/value text, in the config-file vocabulary.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
};

/// Parses flat "key = value" text; '#' starts a comment. Unknown keys are
/// errors. Keys: scenario, M, K, rho_db, low, high, mode, block_size,
/// rounding, range, lambda, trials, seed, csi, coherence, tau, threads.
/// Lists are comma separated. K defaults to 1 for single-user scenarios and 4
/// otherwise.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Applies one key/value pair on top of `config`.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// H with iid CN(0, 1) entries.
ChannelRealization draw_channel(long M, long K, Rng& gen);

/// MMSE channel estimate from a tau-symbol pilot at per-symbol SNR rho:
/// Y = sqrt(tau rho) H + W, H_hat = sqrt(tau rho) / (tau rho + 1) Y. The
/// error H - H_hat has iid CN(0, 1/(tau rho + 1)) entries independent of
/// H_hat.
ComplexMatrix estimate_channel_mmse(const ComplexMatrix& H, long tau, double rho, Rng& gen);

/// Outcome of one Monte Carlo draw at one grid point.
struct TrialRecord {
  bool breakdown = false;
  std::vector<double> sinr_reference;  // per user, 64-bit transceiver
  std::vector<double> sinr;            // per user, emulated transceiver
  double rate = 0.0;                   // bits/s/Hz including CSI prefactor
  double error_norm = 0.0;             // ||emulated - 64-bit on raw inputs||
  double arith_error_norm = 0.0;       // ||emulated - 64-bit on rounded inputs||
  double reference_norm = 0.0;         // ||64-bit output on raw inputs||
  double rel_error = 0.0;              // error_norm / reference_norm
  // Scale the bound constant multiplies: ||h|| ||z|| (SIMO), |x| (MISO),
  // kappa2 ||r|| (MU-SIMO), ||s|| (MU-MISO; kappa2 enters c_d).
  double bound_scale = 0.0;
  double kappa2 = 1.0;
  // ||H||_2 ||z||_2 / ||H^H H r||_2 for MU-SIMO; 0 elsewhere.
  double stability_ratio = 0.0;
};

struct GridStats {
  long M = 0;
  double rho_db = 0.0;
  double mean_rate = 0.0;
  double rate_stderr = 0.0;
  double median_rel_err = 0.0;
  double p99_rel_err = 0.0;
  double bound_violation_rate = 0.0;
  double breakdown_rate = 0.0;
  std::size_t trials = 0;
  std::vector<TrialRecord> records;  // filled when keep_records is set
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<GridStats> points;  // M-major, then rho
};

/// Bound constant for one trial's scenario under a gamma model; multiply by
/// TrialRecord::bound_scale. Infinite when the bound is vacuous.
double bound_constant(const ExperimentConfig& config, long M, const GammaModel& gamma,
                      double kappa2);
/// True when the record's arithmetic error exceeds its bound.
bool violates(const ExperimentConfig& config, long M, const GammaModel& gamma,
              const TrialRecord& record);

/// Runs one trial. Deterministic in (config.seed, grid_index, trial).
TrialRecord run_trial(const ExperimentConfig& config, long M, double rho_db,
                      std::size_t grid_index, std::size_t trial);

/// Runs every grid point. Bit-identical for a fixed config regardless of the
/// thread count.
SweepResult run_sweep(const ExperimentConfig& config);

struct ViolationRate {
  std::string model;  // gamma model label
  double rate = 0.0;
  std::size_t trials = 0;
};

struct VerifyPoint {
  long M = 0;
  double rho_db = 0.0;
  std::vector<ViolationRate> rates;  // lambda 0.5, 1, 3, then deterministic
  double median_stability_ratio = 0.0;
};

struct VerifyReport {
  ExperimentConfig config;
  std::vector<VerifyPoint> points;
};

/// Empirical bound-violation rates per gamma model over the config's grid.
VerifyReport verify_bounds(const ExperimentConfig& config);
VerifyReport verify_bounds(const SweepResult& sweep);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

extern const std::vector<std::string> kCsvColumns;

/// One row per grid point; "# key=value" lines echo the config first.
void write_csv(const SweepResult& result, std::ostream& out);
void write_csv(const SweepResult& result, const std::string& path);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::map<std::string, std::string>> rows;
};

CsvTable read_csv(std::istream& in);

void write_verify_csv(const VerifyReport& report, std::ostream& out);

}  // namespace fpmimo

#endif  // FPMIMO_HARNESS_HPP_
