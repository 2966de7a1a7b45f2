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

// End-to-end acceptance checks. Each criterion runs on its own and prints one
// PASS/FAIL line; ctest registers one entry per criterion so a red one stays
// visible on its own.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpmimo/bounds.hpp"
#include "fpmimo/harness.hpp"

namespace {

using namespace fpmimo;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig base(Scenario s, PrecisionPolicy policy, std::vector<long> M, long K = 1) {
  ExperimentConfig c;
  c.scenario = s;
  c.policy = policy;
  c.M_grid = std::move(M);
  c.K = K;
  c.rho_db_grid = {10.0};
  c.lambda = 3.0;
  c.trials = 500;
  c.seed = 20260101;
  return c;
}

const PrecisionPolicy kFp16 = PrecisionPolicy::uniform(FloatFormat::fp16());
const PrecisionPolicy kFp64 = PrecisionPolicy::full();
const PrecisionPolicy kMixed =
    PrecisionPolicy::mixed(FloatFormat::fp16(), FloatFormat::fp32(), 32);
const double kU16 = FloatFormat::fp16().unit_roundoff();

// Two-sample Kolmogorov-Smirnov p-value with the Stephens small-sample
// correction to the asymptotic Kolmogorov distribution.
double ks_two_sample_p(std::vector<double> a, std::vector<double> b, double* stat = nullptr) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  if (stat) *stat = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lam = (ne + 0.12 + 0.11 / ne) * d;
  if (lam < 0.2) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto simo = base(Scenario::kSimo, kFp64, {100});
  simo.trials = 2000;
  const auto s = run_sweep(simo).points.front();
  const double rho = db_to_linear(10.0);
  const double closed = std::log2(1.0 + rho * 100);
  const double rel = std::abs(s.mean_rate - closed) / closed;

  auto mu = base(Scenario::kMuSimo, kFp64, {128}, 4);
  mu.trials = 2000;
  const auto m = run_sweep(mu).points.front();
  const double bound = 4 * std::log2(1.0 + rho * (128 - 4));
  const double mu_rel = (m.mean_rate - bound) / bound;
  const double secs = seconds_since(t0);

  const bool pass = rel < 0.02 && mu_rel >= 0.0 && mu_rel < 0.03 && secs < 60.0;
  return {pass, fmt("SIMO fp64 %.4f vs closed form %.4f (%.2f%%); MU-SIMO fp64 %.3f vs "
                    "K log2(1+rho(M-K)) %.3f (%+.2f%%); %.1f s",
                    s.mean_rate, closed, 100 * rel, m.mean_rate, bound, 100 * mu_rel, secs)};
}

Outcome criterion_2a() {
  const double exact = gamma_n(1000, kU16, 1.0);
  const double err = exact - gamma_n_first_order(1000, kU16, 1.0);
  const double rel = std::abs(err - 3.62e-4) / 3.62e-4;
  return {rel < 0.01, fmt("gamma_1000 - lambda sqrt(n) u = %.4e (target 3.62e-4, %.2f%% off)",
                          err, 100 * rel)};
}

Outcome criterion_2b() {
  const double c1 = c1_u(1000, 4, kU16, 1.0);
  const double rel = std::abs(c1 - 4.6e-3) / 4.6e-3;
  return {rel < 0.01, fmt("c1_u(M=1000, K=4, fp16, lambda=1) = %.5e (target 4.6e-3, %.1f%% off)",
                          c1, 100 * rel)};
}

Outcome criterion_2c() {
  const double v = std::sqrt(2.0) * xi_bn(32, 1000, kU16, FloatFormat::fp32().unit_roundoff(), 1.0);
  return {v < 4.5e-3, fmt("sqrt(2) xi_{32,1000}(fp16/fp32, lambda=1) = %.5e (must be < 4.5e-3)", v)};
}

Outcome criterion_2d() {
  const auto frac = cost_model(1, 1000, 1, 32, 2.0, BlockCount::kFractional);
  const auto ceil = cost_model(1, 1000, 1, 32, 2.0, BlockCount::kCeil);
  const double pct = 100 * frac.summation_overhead();
  const bool pass = std::abs(std::round(pct * 100) / 100 - 3.08) < 1e-9;
  return {pass, fmt("mixed vs low summation overhead %.4f%% (fractional 2n/b; whole blocks give "
                    "%.4f%%, total ops %.4f%%)",
                    pct, 100 * ceil.summation_overhead(), 100 * frac.total_overhead())};
}

Outcome criterion_2e() {
  bool pass = true;
  std::string worst;
  for (long n : {1L, 7L, 64L, 1000L}) {
    for (long b : {1L, 4L, 32L, 500L}) {
      for (auto count : {BlockCount::kCeil, BlockCount::kFractional}) {
        const auto c = cost_model(3, n, 5, b, 1.0, count);
        if (c.mixed.summations != c.low.summations ||
            c.mixed.multiplications != c.low.multiplications) {
          pass = false;
          worst = fmt(" (n=%ld b=%ld differs)", n, b);
        }
      }
    }
  }
  return {pass, "C_m(G=1) == C_l over n in {1,7,64,1000}, b in {1,4,32,500}" + worst};
}

Outcome criterion_2f() {
  bool sums = true, muls = true;
  double mixed_mul = 0, high_mul = 0;
  for (long n : {1L, 7L, 64L, 1000L}) {
    for (double G : {1.0, 2.0, 4.0}) {
      const auto c = cost_model(3, n, 5, 1, G);
      sums = sums && c.mixed.summations == c.high.summations;
      if (c.mixed.multiplications != c.high.multiplications && muls) {
        muls = false;
        mixed_mul = c.mixed.multiplications;
        high_mul = c.high.multiplications;
      }
    }
  }
  std::string detail = fmt("C_m(b=1) == C_h: summations %s, multiplications %s", sums ? "equal" : "differ",
                           muls ? "equal" : "differ");
  if (!muls) detail += fmt(" (e.g. %.0f vs %.0f)", mixed_mul, high_mul);
  return {sums && muls, detail};
}

Outcome criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = base(Scenario::kSimo, kFp16, {16, 32, 64, 128, 256, 512, 1024, 2048, 4096});
  const auto r = run_sweep(c);
  std::size_t arg = 0;
  std::string rates;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (r.points[i].mean_rate > r.points[arg].mean_rate) arg = i;
    rates += fmt("%s%ld:%.2f", i ? " " : "", r.points[i].M, r.points[i].mean_rate);
  }
  const bool interior = arg > 0 && arg + 1 < r.points.size();
  const long m_max = *m_max_simo(db_to_linear(10.0), kU16, 3.0);
  const long m_arg = r.points[arg].M;
  const double secs = seconds_since(t0);
  const bool pass = interior && 2 * m_arg >= m_max && m_arg <= 2 * m_max && secs < 300.0;
  return {pass, fmt("argmax M=%ld, predicted M_max=%ld (window [%ld, %ld]), rates {%s}; %.1f s",
                    m_arg, m_max, m_max / 2, 2 * m_max, rates.c_str(), secs)};
}

Outcome criterion_4() {
  auto c = base(Scenario::kSimo, kFp16, {100});
  c.rho_db_grid = {0, 5, 10, 15, 20, 25, 30, 35, 40};
  c.trials = 2000;
  const auto r = run_sweep(c);
  bool monotone = true;
  std::string rates;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (i && r.points[i].mean_rate + 3 * r.points[i].rate_stderr < r.points[i - 1].mean_rate) {
      monotone = false;
    }
    rates += fmt("%s%.0fdB:%.3f", i ? " " : "", r.points[i].rho_db, r.points[i].mean_rate);
  }
  const auto& last = r.points.back();
  const auto& prev = r.points[r.points.size() - 2];
  const double ceiling = simo_rate_ceiling(100, kU16, 3.0).value_bits;
  const bool under = last.mean_rate <= ceiling + 3 * last.rate_stderr;
  const double step = std::abs(last.mean_rate - prev.mean_rate) / prev.mean_rate;
  const bool plateau = step < 0.05;
  return {monotone && under && plateau,
          fmt("non-decreasing %s; rate(40 dB) %.3f vs ceiling %.3f (+3 SE %.3f) %s; last step "
              "%.2f%% %s; {%s}",
              monotone ? "yes" : "no", last.mean_rate, ceiling, 3 * last.rate_stderr,
              under ? "ok" : "exceeded", 100 * step, plateau ? "ok" : ">= 5%", rates.c_str())};
}

Outcome criterion_5() {
  auto c = base(Scenario::kMiso, kFp16, {100, 1000, 10000});
  c.trials = 10000;
  c.keep_records = true;
  const auto r = run_sweep(c);
  // MRT output has |x| norm, so ||Delta s|| / |x| is the record's error over
  // the reference norm.
  std::vector<std::vector<double>> total(3), arith(3);
  for (std::size_t g = 0; g < 3; ++g) {
    for (const auto& rec : r.points[g].records) {
      total[g].push_back(rec.error_norm / rec.reference_norm);
      arith[g].push_back(rec.arith_error_norm / rec.reference_norm);
    }
  }
  bool pass = true;
  std::string detail;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    double d = 0, da = 0;
    const double p = ks_two_sample_p(total[i], total[j], &d);
    const double pa = ks_two_sample_p(arith[i], arith[j], &da);
    pass = pass && p > 0.01;
    detail += fmt("%sM=%ld vs %ld: D=%.4f p=%.3g (arithmetic only: D=%.4f p=%.3g)",
                  detail.empty() ? "" : "; ", r.points[i].M, r.points[j].M, d, p, da, pa);
  }
  detail += fmt("; medians %.3e %.3e %.3e", quantile(total[0], 0.5), quantile(total[1], 0.5),
                quantile(total[2], 0.5));
  return {pass, detail};
}

Outcome criterion_6() {
  auto rates = [](PrecisionPolicy p, Scenario s) {
    auto c = base(s, p, {1000});
    c.trials = 2000;
    return run_sweep(c).points.front();
  };
  const auto s16 = rates(kFp16, Scenario::kSimo), m16 = rates(kFp16, Scenario::kMiso);
  const auto s64 = rates(kFp64, Scenario::kSimo), m64 = rates(kFp64, Scenario::kMiso);
  const double se16 = std::hypot(s16.rate_stderr, m16.rate_stderr);
  const double se64 = std::hypot(s64.rate_stderr, m64.rate_stderr);
  const double gap16 = std::abs(s16.mean_rate - m16.mean_rate);
  const double gap64 = std::abs(s64.mean_rate - m64.mean_rate);
  const bool pass = gap16 > 5 * se16 && gap64 <= 3 * se64;
  return {pass, fmt("fp16 SIMO %.3f vs MISO %.3f (gap %.1f pooled SE); fp64 SIMO %.4f vs MISO "
                    "%.4f (gap %.2f pooled SE)",
                    s16.mean_rate, m16.mean_rate, gap16 / se16, s64.mean_rate, m64.mean_rate,
                    se64 > 0 ? gap64 / se64 : 0.0)};
}

Outcome criterion_7() {
  auto c = base(Scenario::kSimo, kFp16, {2000});
  c.trials = 10000;
  const auto report = verify_bounds(c);
  const auto& rates = report.points.front().rates;
  std::map<std::string, double> v;
  for (const auto& r : rates) v[r.model] = r.rate;
  const bool ordered = v["3"] <= v["1"] && v["1"] <= v["0.5"];
  const bool strict = v["3"] < v["1"] || v["1"] < v["0.5"];
  const bool pass = ordered && strict && v["deterministic"] == 0.0;
  return {pass, fmt("violation rates lambda=0.5: %.4f, 1: %.4f, 3: %.4f, deterministic: %.4f",
                    v["0.5"], v["1"], v["3"], v["deterministic"])};
}

Outcome criterion_8() {
  auto c = base(Scenario::kMuSimo, kFp16, {256}, 4);
  c.trials = 10000;
  c.keep_records = true;
  const auto r = run_sweep(c);
  const auto model = GammaModel::probabilistic(1.0);
  std::size_t valid = 0, held = 0;
  for (const auto& rec : r.points.front().records) {
    if (rec.breakdown) continue;
    ++valid;
    held += violates(c, 256, model, rec) ? 0 : 1;
  }
  const double frac = valid ? static_cast<double>(held) / valid : 0.0;
  return {frac >= 0.99 && valid > 0,
          fmt("bound held in %zu of %zu non-breakdown trials (%.2f%%)", held, valid, 100 * frac)};
}

Outcome criterion_9() {
  const auto t0 = std::chrono::steady_clock::now();
  auto mu = [](PrecisionPolicy p) {
    return run_sweep(base(Scenario::kMuSimo, p, {1024}, 4)).points.front().mean_rate;
  };
  const double r16 = mu(kFp16), rmix = mu(kMixed), r64 = mu(kFp64);
  const double recovered = (rmix - r16) / (r64 - r16);
  auto simo = [](PrecisionPolicy p) {
    return run_sweep(base(Scenario::kSimo, p, {4096})).points.front().mean_rate;
  };
  const double s_mix = simo(kMixed), s64 = simo(kFp64);
  const double simo_rel = std::abs(s_mix - s64) / s64;
  const double secs = seconds_since(t0);
  const bool pass = recovered >= 0.9 && simo_rel < 0.02 && secs < 600.0;
  return {pass, fmt("MU-SIMO M=1024: fp16 %.3f, mixed %.3f, fp64 %.3f (recovers %.1f%% of gap); "
                    "SIMO M=4096 mixed %.3f vs fp64 %.3f (%.2f%%); %.1f s",
                    r16, rmix, r64, 100 * recovered, s_mix, s64, 100 * simo_rel, secs)};
}

Outcome criterion_10() {
  bool pass = true;
  std::string detail;
  for (long M : {8L, 16L, 32L}) {
    const auto mc = upsilon_monte_carlo(M, 2, 1000000, 7);
    const auto q = upsilon_quadrature_k2(M);
    const double rel = std::abs(mc.value - q.value) / q.value;
    pass = pass && rel < 0.01;
    detail += fmt("%sM=%ld: MC %.5f (SE %.5f) vs quadrature %.5f (%.3f%%)",
                  detail.empty() ? "" : "; ", M, mc.value, mc.std_error, q.value, 100 * rel);
  }
  return {pass, detail};
}

Outcome criterion_11() {
  const std::vector<long> grid = {32, 64, 128, 256, 512};
  const auto up = run_sweep(base(Scenario::kMuSimo, kFp16, grid, 4));
  const auto down = run_sweep(base(Scenario::kMuMiso, kFp16, grid, 4));
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = up.points[i].mean_rate, b = down.points[i].mean_rate;
    const double rel = std::abs(a - b) / std::max(a, b);
    pass = pass && rel < 0.05;
    detail += fmt("%sM=%ld %.2f/%.2f (%.2f%%)", i ? "; " : "", grid[i], a, b, 100 * rel);
  }
  return {pass, detail};
}

Outcome criterion_12() {
  const std::vector<long> grid = {16, 32, 64, 128, 256, 512, 1024};
  auto sweep = [&](PrecisionPolicy p, bool imperfect) {
    auto c = base(Scenario::kMuSimo, p, grid, 4);
    if (imperfect) {
      c.csi.kind = CsiModel::Kind::kImperfectMmse;
      c.csi.coherence = 196;
      c.csi.tau = 4;
    }
    return run_sweep(c);
  };
  const auto i16 = sweep(kFp16, true), imix = sweep(kMixed, true), i64 = sweep(kFp64, true);
  const auto p16 = sweep(kFp16, false), pmix = sweep(kMixed, false), p64 = sweep(kFp64, false);
  bool between = true, below = true;
  std::string detail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lo = i16.points[i].mean_rate, mid = imix.points[i].mean_rate,
                 hi = i64.points[i].mean_rate;
    between = between && lo <= mid && mid <= hi;
    below = below && lo < p16.points[i].mean_rate && mid < pmix.points[i].mean_rate &&
            hi < p64.points[i].mean_rate;
    detail += fmt("%sM=%ld %.2f<=%.2f<=%.2f", i ? "; " : "", grid[i], lo, mid, hi);
  }
  return {between && below, fmt("mixed between fp16 and fp64: %s; imperfect below perfect: %s; {",
                                between ? "yes" : "no", below ? "yes" : "no") +
                                detail + "}"};
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"1", "full-precision degeneration", criterion_1},
      {"2a", "gamma approximation error", criterion_2a},
      {"2b", "c1_u constant", criterion_2b},
      {"2c", "mixed inner-product constant", criterion_2c},
      {"2d", "mixed cost overhead", criterion_2d},
      {"2e", "cost identity G=1", criterion_2e},
      {"2f", "cost identity b=1", criterion_2f},
      {"3", "SIMO non-monotonicity in M", criterion_3},
      {"4", "SIMO rate ceiling in SNR", criterion_4},
      {"5", "MISO error independent of M", criterion_5},
      {"6", "SU duality failure and recovery", criterion_6},
      {"7", "probabilistic bound ordering", criterion_7},
      {"8", "ZF error bound conformance", criterion_8},
      {"9", "mixed-precision recovery", criterion_9},
      {"10", "Upsilon Monte Carlo vs quadrature", criterion_10},
      {"11", "MU duality", criterion_11},
      {"12", "imperfect CSI ordering", criterion_12},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fpmimo acceptance checks"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("criteria", selected, "criterion ids to run (default: all)");
  app.add_flag("--list", list, "print criterion ids and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria()) std::printf("%s\t%s\n", c.id.c_str(), c.title.c_str());
    return 0;
  }
  for (const auto& id : selected) {
    const bool known = std::any_of(criteria().begin(), criteria().end(),
                                   [&](const Criterion& c) { return c.id == id; });
    if (!known) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %s (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(),
                c.title.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
