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

// Closed-form rounding-error and rate bounds, all evaluated in double.
// Arguments named u are unit roundoffs (FloatFormat::unit_roundoff()). lambda
// is the free confidence knob of the probabilistic bounds; larger lambda gives
// a looser bound that fails less often.

#ifndef FPMIMO_BOUNDS_HPP_
#define FPMIMO_BOUNDS_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fpmimo {

/// Raised when a bound's denominator is not positive, i.e. the format is too
/// coarse for the bound to say anything.
class PrecisionTooLow : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Probabilistic accumulation constant exp(lambda sqrt(n) u + n u^2/(1-u)) - 1.
/// u = 0 gives 0. Throws std::invalid_argument unless 0 <= u < 1 and n >= 0.
double gamma_n(double n, double u, double lambda);
/// lambda sqrt(n) u, the leading term of gamma_n.
double gamma_n_first_order(double n, double u, double lambda);
/// Worst-case n u / (1 - n u); +infinity once n u >= 1.
double gamma_n_deterministic(double n, double u);

/// Which accumulation constant a composite bound is built from: the
/// probabilistic gamma_n at a given lambda, or the worst-case n u / (1 - n u).
class GammaModel {
 public:
  static GammaModel probabilistic(double lambda);
  static GammaModel worst_case() { return GammaModel(0.0, true); }

  double operator()(double n, double u) const;
  double lambda() const { return lambda_; }
  bool is_worst_case() const { return worst_case_; }
  /// "0.5", "1", "3" or "deterministic".
  std::string label() const;

 private:
  GammaModel(double lambda, bool worst_case) : lambda_(lambda), worst_case_(worst_case) {}
  double lambda_;
  bool worst_case_;
};

/// Error constant of a length-n complex inner product under blocked mixed
/// summation: u_l + gamma_{b-1}(u_l) + gamma_{ceil(2n/b)-1}(u_h).
double xi_bn(long b, long n, double u_l, double u_h, double lambda);
double xi_bn(long b, long n, double u_l, double u_h, const GammaModel& gamma);

/// sqrt(2) gamma_{2M}: relative error constant of an M-term MRC combine.
double delta_simo(long M, double u, double lambda);
double delta_simo(long M, double u, const GammaModel& gamma);
/// sqrt(2) gamma_2: per-entry constant of MRT precoding, independent of M.
double delta_miso(double u, double lambda);
double delta_miso(double u, const GammaModel& gamma);

struct RateBoundResult {
  enum class Regime { kExactFormula, kAsymptoticLimit };

  double value_bits = 0.0;
  Regime regime = Regime::kExactFormula;
  std::vector<std::pair<std::string, double>> components;

  double component(const std::string& name) const;
};

/// log2(1 + rho M / (1 + delta_simo^2 M (rho + 1))).
RateBoundResult lb_rate_simo(long M, double rho, double u, double lambda);
/// rho -> infinity limit of lb_rate_simo: log2(1 + delta_simo^-2).
RateBoundResult simo_rate_ceiling(long M, double u, double lambda);
/// floor(1 / (2 u lambda sqrt(rho + 1))), the antenna count that maximizes
/// lb_rate_simo. Empty when u = 0 (no interior maximum).
std::optional<long> m_max_simo(double rho, double u, double lambda);

/// log2(1 + rho M / (1 + delta_miso^2 rho M)).
RateBoundResult lb_rate_miso(long M, double rho, double u, double lambda);
/// Common M -> infinity and rho -> infinity limit: log2(1 + delta_miso^-2).
RateBoundResult miso_rate_ceiling(double u, double lambda);

/// lb_rate_miso - lb_rate_simo.
double rate_gap(long M, double rho, double u, double lambda);
/// M -> infinity limit of rate_gap at fixed rho.
double rate_gap_limit_large_m(double u, double lambda);
/// rho -> infinity limit of rate_gap at fixed M.
double rate_gap_limit_high_snr(long M, double u, double lambda);

/// Inner-product constant used inside the ZF constants. Uniform arithmetic
/// uses gamma_{2M}(u); a blocked mixed run substitutes xi_bn.
struct InnerProductConstant {
  double value;
};

/// 2K (g + gamma_{6K+1} / (1 - 2K gamma_{2K+1})) with g = gamma_{2M} unless
/// overridden. Throws PrecisionTooLow when 2K gamma_{2K+1} >= 1.
double c1_u(long M, long K, double u, double lambda,
            std::optional<InnerProductConstant> inner = std::nullopt);
double c1_u(long M, long K, double u, const GammaModel& gamma,
            std::optional<InnerProductConstant> inner = std::nullopt);
/// c1_u + sqrt(2K) g.
double c_u(long M, long K, double u, double lambda,
           std::optional<InnerProductConstant> inner = std::nullopt);
double c_u(long M, long K, double u, const GammaModel& gamma,
           std::optional<InnerProductConstant> inner = std::nullopt);
/// c1 kappa2 + sqrt(2K) gamma_{2K} (1 + c1 kappa2), with c1 = c1_u.
/// Throws std::invalid_argument for kappa2 < 1.
double c_d(long M, long K, double u, double lambda, double kappa2,
           std::optional<InnerProductConstant> inner = std::nullopt);
double c_d(long M, long K, double u, const GammaModel& gamma, double kappa2,
           std::optional<InnerProductConstant> inner = std::nullopt);

enum class UpsilonMethod { kMonteCarlo, kQuadratureK2 };

struct UpsilonEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for quadrature
  UpsilonMethod method = UpsilonMethod::kMonteCarlo;
};

/// E{kappa2(H^H H)^2} for H with iid CN(0,1) entries, M >= K + 1.
/// Monte Carlo draws `samples` channels from `seed` (0 threads = all cores).
UpsilonEstimate upsilon_monte_carlo(long M, long K, std::size_t samples, std::uint64_t seed,
                                    unsigned threads = 0);
/// K = 2 only: integrates c^2 f(c) over [1, inf) for the condition-number
/// density f(c) = A (c-1)^2 c^(M-2) / (c+1)^(2M), A = Gamma(2M) /
/// (Gamma(M) Gamma(M-1)). Infinite for M <= 3.
UpsilonEstimate upsilon_quadrature_k2(long M);
/// Dispatches on method; K = 1 returns exactly 1 for either method.
UpsilonEstimate upsilon(long M, long K, UpsilonMethod method, std::size_t samples = 100000,
                        std::uint64_t seed = 1);

/// Monte Carlo E{c_d(kappa2)^2} over Rayleigh channels.
UpsilonEstimate expected_cd_squared(long M, long K, double u, double lambda, std::size_t samples,
                                    std::uint64_t seed,
                                    std::optional<InnerProductConstant> inner = std::nullopt,
                                    unsigned threads = 0);

/// K log2(1 + rho (M-K) / (1 + c_u^2 (rho (M-K) + 1) upsilon)).
RateBoundResult lb_sumrate_mu_simo(long M, long K, double rho, double u, double lambda,
                                   double upsilon_value,
                                   std::optional<InnerProductConstant> inner = std::nullopt);
/// K log2(1 + rho (M-K) / (1 + E{c_d^2} rho M K)).
RateBoundResult lb_sumrate_mu_miso(long M, long K, double rho, double expected_cd_sq);

/// How the block count 2n/b enters the mixed cost when b does not divide 2n.
enum class BlockCount {
  kCeil,        // whole blocks; every count is an integer
  kFractional,  // 2n/b as a real number
};

struct OpCount {
  double summations = 0.0;
  double multiplications = 0.0;
  double total() const { return summations + multiplications; }
};

/// Real-operation counts of an m x n by n x p complex product computed by the
/// 2n-term real expansion. low and high are uniform precision; high is counted
/// in low-precision units with cost ratio G. mixed uses block size b.
struct CostModel {
  OpCount mixed;
  OpCount low;
  OpCount high;

  /// Relative extra summation work of mixed over uniform low.
  double summation_overhead() const { return mixed.summations / low.summations - 1.0; }
  /// Relative extra total work of mixed over uniform low.
  double total_overhead() const { return mixed.total() / low.total() - 1.0; }
};

CostModel cost_model(long m, long n, long p, long b, double G,
                     BlockCount count = BlockCount::kCeil);

std::string to_string(RateBoundResult::Regime regime);

}  // namespace fpmimo

#endif  // FPMIMO_BOUNDS_HPP_
