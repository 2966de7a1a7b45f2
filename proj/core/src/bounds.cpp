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

#include "fpmimo/bounds.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "fpmimo/parallel.hpp"
#include "fpmimo/random.hpp"

namespace fpmimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_u(double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("fpmimo: unit roundoff must lie in [0, 1)");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fpmimo: lambda must be positive");
}

void check_mk(long M, long K) {
  if (K < 1 || M < K + 1) throw std::invalid_argument("fpmimo: bound requires M >= K + 1, K >= 1");
}

double log2p1(double x) { return std::log1p(x) / std::log(2.0); }

double inner_constant(long M, double u, const GammaModel& gamma,
                      const std::optional<InnerProductConstant>& inner) {
  return inner ? inner->value : gamma(2.0 * M, u);
}

// Running mean and variance; merged in chunk order so the result does not
// depend on how chunks were scheduled.
struct Moments {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
  double std_error() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

double kappa2_of_gram(const Eigen::MatrixXcd& g) {
  if (g.rows() == 1) return 1.0;
  if (g.rows() == 2) {
    const double a = g(0, 0).real(), d = g(1, 1).real();
    const double half = 0.5 * (a - d);
    const double r = std::sqrt(half * half + std::norm(g(0, 1)));
    const double mid = 0.5 * (a + d);
    return (mid + r) / (mid - r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev(ev.size() - 1) / ev(0);
}

constexpr std::size_t kChunk = 4096;

// Averages f(kappa2(H^H H)) over Rayleigh draws.
template <class F>
UpsilonEstimate kappa_average(long M, long K, std::size_t samples, std::uint64_t seed,
                              unsigned threads, F&& f) {
  if (samples == 0) throw std::invalid_argument("fpmimo: Monte Carlo needs at least one sample");
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Rng gen = substream(seed, c, 0x75707369ULL);
        ComplexGaussian cn;
        Eigen::MatrixXcd H(M, K);
        const std::size_t stop = std::min(samples, (c + 1) * kChunk);
        for (std::size_t s = c * kChunk; s < stop; ++s) {
          for (long j = 0; j < K; ++j)
            for (long i = 0; i < M; ++i) H(i, j) = cn(gen);
          const Eigen::MatrixXcd g = H.adjoint() * H;
          parts[c].add(f(kappa2_of_gram(g)));
        }
      },
      threads);
  Moments all;
  for (const auto& p : parts) all.merge(p);
  return {all.mean, all.std_error(), UpsilonMethod::kMonteCarlo};
}

}  // namespace

double gamma_n(double n, double u, double lambda) {
  check_u(u);
  check_lambda(lambda);
  if (n < 0) throw std::invalid_argument("fpmimo: gamma_n needs n >= 0");
  return std::expm1(lambda * std::sqrt(n) * u + n * u * u / (1.0 - u));
}

double gamma_n_first_order(double n, double u, double lambda) {
  check_u(u);
  check_lambda(lambda);
  if (n < 0) throw std::invalid_argument("fpmimo: gamma_n needs n >= 0");
  return lambda * std::sqrt(n) * u;
}

double gamma_n_deterministic(double n, double u) {
  check_u(u);
  if (n < 0) throw std::invalid_argument("fpmimo: gamma_n needs n >= 0");
  const double nu = n * u;
  return nu >= 1.0 ? kInf : nu / (1.0 - nu);
}

GammaModel GammaModel::probabilistic(double lambda) {
  check_lambda(lambda);
  return GammaModel(lambda, false);
}

double GammaModel::operator()(double n, double u) const {
  return worst_case_ ? gamma_n_deterministic(n, u) : gamma_n(n, u, lambda_);
}

std::string GammaModel::label() const {
  if (worst_case_) return "deterministic";
  std::ostringstream os;
  os << lambda_;
  return os.str();
}

double xi_bn(long b, long n, double u_l, double u_h, double lambda) {
  return xi_bn(b, n, u_l, u_h, GammaModel::probabilistic(lambda));
}

double xi_bn(long b, long n, double u_l, double u_h, const GammaModel& gamma) {
  if (b < 1 || n < 1) throw std::invalid_argument("fpmimo: xi needs b >= 1 and n >= 1");
  check_u(u_h);
  const long blocks = (2 * n + b - 1) / b;
  return u_l + gamma(static_cast<double>(b - 1), u_l) + gamma(static_cast<double>(blocks - 1), u_h);
}

double delta_simo(long M, double u, double lambda) {
  return delta_simo(M, u, GammaModel::probabilistic(lambda));
}

double delta_simo(long M, double u, const GammaModel& gamma) {
  if (M < 1) throw std::invalid_argument("fpmimo: M must be positive");
  return std::sqrt(2.0) * gamma(2.0 * M, u);
}

double delta_miso(double u, double lambda) {
  return delta_miso(u, GammaModel::probabilistic(lambda));
}

double delta_miso(double u, const GammaModel& gamma) { return std::sqrt(2.0) * gamma(2.0, u); }

double RateBoundResult::component(const std::string& name) const {
  for (const auto& [k, v] : components) {
    if (k == name) return v;
  }
  throw std::out_of_range("fpmimo: no bound component named " + name);
}

RateBoundResult lb_rate_simo(long M, double rho, double u, double lambda) {
  if (!(rho > 0)) throw std::invalid_argument("fpmimo: rho must be positive");
  const double d = delta_simo(M, u, lambda);
  const double m = static_cast<double>(M);
  const double sinr = rho * m / (1.0 + d * d * m * (rho + 1.0));
  return {log2p1(sinr), RateBoundResult::Regime::kExactFormula, {{"delta_simo", d}, {"sinr", sinr}}};
}

RateBoundResult simo_rate_ceiling(long M, double u, double lambda) {
  const double d = delta_simo(M, u, lambda);
  return {d == 0.0 ? kInf : log2p1(1.0 / (d * d)), RateBoundResult::Regime::kAsymptoticLimit,
          {{"delta_simo", d}}};
}

std::optional<long> m_max_simo(double rho, double u, double lambda) {
  check_u(u);
  check_lambda(lambda);
  if (!(rho > 0)) throw std::invalid_argument("fpmimo: rho must be positive");
  if (u == 0.0) return std::nullopt;
  return static_cast<long>(std::floor(1.0 / (2.0 * u * lambda * std::sqrt(rho + 1.0))));
}

RateBoundResult lb_rate_miso(long M, double rho, double u, double lambda) {
  if (M < 1) throw std::invalid_argument("fpmimo: M must be positive");
  if (!(rho > 0)) throw std::invalid_argument("fpmimo: rho must be positive");
  const double d = delta_miso(u, lambda);
  const double rm = rho * static_cast<double>(M);
  const double sinr = rm / (1.0 + d * d * rm);
  return {log2p1(sinr), RateBoundResult::Regime::kExactFormula, {{"delta_miso", d}, {"sinr", sinr}}};
}

RateBoundResult miso_rate_ceiling(double u, double lambda) {
  const double d = delta_miso(u, lambda);
  return {d == 0.0 ? kInf : log2p1(1.0 / (d * d)), RateBoundResult::Regime::kAsymptoticLimit,
          {{"delta_miso", d}}};
}

double rate_gap(long M, double rho, double u, double lambda) {
  return lb_rate_miso(M, rho, u, lambda).value_bits - lb_rate_simo(M, rho, u, lambda).value_bits;
}

double rate_gap_limit_large_m(double u, double lambda) {
  return miso_rate_ceiling(u, lambda).value_bits;
}

double rate_gap_limit_high_snr(long M, double u, double lambda) {
  return miso_rate_ceiling(u, lambda).value_bits - simo_rate_ceiling(M, u, lambda).value_bits;
}

double c1_u(long M, long K, double u, double lambda, std::optional<InnerProductConstant> inner) {
  return c1_u(M, K, u, GammaModel::probabilistic(lambda), inner);
}

double c1_u(long M, long K, double u, const GammaModel& gamma,
            std::optional<InnerProductConstant> inner) {
  if (M < 1 || K < 1) throw std::invalid_argument("fpmimo: M and K must be positive");
  const double k = static_cast<double>(K);
  const double den = 1.0 - 2.0 * k * gamma(2.0 * k + 1.0, u);
  if (!(den > 0.0)) {
    throw PrecisionTooLow("fpmimo: 2K gamma_{2K+1} >= 1, the ZF bound is vacuous at this precision");
  }
  const double g = inner_constant(M, u, gamma, inner);
  return 2.0 * k * (g + gamma(6.0 * k + 1.0, u) / den);
}

double c_u(long M, long K, double u, double lambda, std::optional<InnerProductConstant> inner) {
  return c_u(M, K, u, GammaModel::probabilistic(lambda), inner);
}

double c_u(long M, long K, double u, const GammaModel& gamma,
           std::optional<InnerProductConstant> inner) {
  return c1_u(M, K, u, gamma, inner) +
         std::sqrt(2.0 * static_cast<double>(K)) * inner_constant(M, u, gamma, inner);
}

double c_d(long M, long K, double u, double lambda, double kappa2,
           std::optional<InnerProductConstant> inner) {
  return c_d(M, K, u, GammaModel::probabilistic(lambda), kappa2, inner);
}

double c_d(long M, long K, double u, const GammaModel& gamma, double kappa2,
           std::optional<InnerProductConstant> inner) {
  if (!(kappa2 >= 1.0)) throw std::invalid_argument("fpmimo: kappa2 must be at least 1");
  const double ck = c1_u(M, K, u, gamma, inner) * kappa2;
  const double k = static_cast<double>(K);
  return ck + std::sqrt(2.0 * k) * gamma(2.0 * k, u) * (1.0 + ck);
}

UpsilonEstimate upsilon_monte_carlo(long M, long K, std::size_t samples, std::uint64_t seed,
                                    unsigned threads) {
  check_mk(M, K);
  if (K == 1) return {1.0, 0.0, UpsilonMethod::kMonteCarlo};
  return kappa_average(M, K, samples, seed, threads, [](double k) { return k * k; });
}

UpsilonEstimate upsilon_quadrature_k2(long M) {
  check_mk(M, 2);
  if (M <= 3) return {kInf, 0.0, UpsilonMethod::kQuadratureK2};
  const double m = static_cast<double>(M);
  // Density normalizer Gamma(2M) / (Gamma(M) Gamma(M-1)).
  const double log_norm = std::lgamma(2.0 * m) - std::lgamma(m) - std::lgamma(m - 1.0);
  // c = 1 + x; the integrand is evaluated in log space to avoid overflow of
  // c^M and (c+1)^(2M) for large M.
  auto integrand = [m, log_norm](double x) {
    if (x <= 0.0) return 0.0;
    const double c = 1.0 + x;
    const double lg = log_norm + 2.0 * std::log(x) + m * std::log(c) - 2.0 * m * std::log1p(c);
    return std::exp(lg);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double value = integrator.integrate(integrand, 1e-13);
  return {value, 0.0, UpsilonMethod::kQuadratureK2};
}

UpsilonEstimate upsilon(long M, long K, UpsilonMethod method, std::size_t samples,
                        std::uint64_t seed) {
  check_mk(M, K);
  if (K == 1) return {1.0, 0.0, method};
  if (method == UpsilonMethod::kQuadratureK2) {
    if (K != 2) throw std::invalid_argument("fpmimo: quadrature upsilon is only available for K = 2");
    return upsilon_quadrature_k2(M);
  }
  return upsilon_monte_carlo(M, K, samples, seed);
}

UpsilonEstimate expected_cd_squared(long M, long K, double u, double lambda, std::size_t samples,
                                    std::uint64_t seed, std::optional<InnerProductConstant> inner,
                                    unsigned threads) {
  check_mk(M, K);
  // fail early rather than inside a worker
  const double c1 = c1_u(M, K, u, lambda, inner);
  const double k = static_cast<double>(K);
  const double tail = std::sqrt(2.0 * k) * gamma_n(2.0 * k, u, lambda);
  return kappa_average(M, K, samples, seed, threads, [=](double kappa) {
    const double ck = c1 * kappa;
    const double cd = ck + tail * (1.0 + ck);
    return cd * cd;
  });
}

RateBoundResult lb_sumrate_mu_simo(long M, long K, double rho, double u, double lambda,
                                   double upsilon_value,
                                   std::optional<InnerProductConstant> inner) {
  check_mk(M, K);
  if (!(rho > 0)) throw std::invalid_argument("fpmimo: rho must be positive");
  if (!(upsilon_value >= 1.0)) throw std::invalid_argument("fpmimo: upsilon must be at least 1");
  const double cu = c_u(M, K, u, lambda, inner);
  const double snr = rho * static_cast<double>(M - K);
  const double sinr = snr / (1.0 + cu * cu * (snr + 1.0) * upsilon_value);
  return {static_cast<double>(K) * log2p1(sinr), RateBoundResult::Regime::kExactFormula,
          {{"c_u", cu}, {"upsilon", upsilon_value}, {"sinr", sinr}}};
}

RateBoundResult lb_sumrate_mu_miso(long M, long K, double rho, double expected_cd_sq) {
  check_mk(M, K);
  if (!(rho > 0)) throw std::invalid_argument("fpmimo: rho must be positive");
  if (!(expected_cd_sq >= 0.0)) throw std::invalid_argument("fpmimo: E{c_d^2} must be non-negative");
  const double k = static_cast<double>(K);
  const double sinr =
      rho * static_cast<double>(M - K) / (1.0 + expected_cd_sq * rho * static_cast<double>(M) * k);
  return {k * log2p1(sinr), RateBoundResult::Regime::kExactFormula,
          {{"expected_cd_sq", expected_cd_sq}, {"sinr", sinr}}};
}

CostModel cost_model(long m, long n, long p, long b, double G, BlockCount count) {
  if (m < 1 || n < 1 || p < 1 || b < 1) {
    throw std::invalid_argument("fpmimo: cost model dimensions must be positive");
  }
  if (!(G >= 1.0)) throw std::invalid_argument("fpmimo: cost ratio G must be at least 1");
  const double scale = 4.0 * static_cast<double>(m) * static_cast<double>(p);
  const double two_n = 2.0 * static_cast<double>(n);
  const double blocks = count == BlockCount::kCeil
                            ? static_cast<double>((2 * n + b - 1) / b)
                            : two_n / static_cast<double>(b);
  CostModel c;
  c.mixed = {scale * (blocks * (G - 1.0) + two_n - G), scale * two_n};
  c.low = {scale * (two_n - 1.0), scale * two_n};
  c.high = {scale * G * (two_n - 1.0), scale * G * two_n};
  return c;
}

std::string to_string(RateBoundResult::Regime regime) {
  return regime == RateBoundResult::Regime::kExactFormula ? "exact-formula" : "asymptotic-limit";
}

}  // namespace fpmimo
