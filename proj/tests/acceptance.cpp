// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Uses the shipped models and configs under BSS_SOURCE_DIR.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bss/attack.hpp"
#include "bss/bss_transform.hpp"
#include "bss/error.hpp"
#include "bss/harness.hpp"
#include "bss/segmentation.hpp"
#include "bss/tiny_conv_net.hpp"
#include "gradient_check.hpp"
#include "oracle_models.hpp"
#include "reference_mifgsm.hpp"
#include "test_support.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
  std::fflush(stderr);
}

// ---------------------------------------------------------------------------

Outcome adj_conservation() {
  const auto start = Clock::now();
  bss::Rng rng(101);
  long bad = 0;
  for (int trial = 0; trial < 100'000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 64));
    const int total = static_cast<int>(rng.uniform_int(n, 1024));
    std::vector<int> targets(n);
    for (int& t : targets) t = static_cast<int>(rng.uniform_int(-total, 2 * total));
    const auto out = bss::adjust_lengths(targets, total);
    const long long sum = std::accumulate(out.begin(), out.end(), 0LL);
    bad += sum != total || *std::min_element(out.begin(), out.end()) < 1;
  }
  const double secs = seconds_since(start);
  return {bad == 0 && secs < 10.0, fmt("%.0f bad of 100000, %.2f s", bad, secs)};
}

Outcome constraint_satisfaction() {
  bss::SegmentationConfig cfg;
  cfg.num_pairs = 2;
  cfg.border_margin = 35;
  cfg.min_spacing = 40;
  bss::Rng rng(102);
  long bad = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    bss::Rng sample_rng = rng.child(trial);
    const auto pts = bss::sample_points(cfg, 224, 224, sample_rng);
    bad += pts.size() != 2;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (int v : {pts[i].x, pts[i].y}) bad += v < 35 || v > 224 - 35;
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        bad += std::abs(pts[i].x - pts[j].x) < 40;
        bad += std::abs(pts[i].y - pts[j].y) < 40;
      }
    }
  }
  return {bad == 0, fmt("%.0f violations in 10000 samples", bad)};
}

Outcome shape_preservation() {
  bss::Rng meta(103);
  int ok = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    const bss::Shape shape{static_cast<int>(meta.uniform_int(1, 4)),
                           static_cast<int>(meta.uniform_int(8, 96)),
                           static_cast<int>(meta.uniform_int(8, 96))};
    bss::BssConfig cfg;
    do {  // only feasible segmentation settings are valid inputs
      cfg.seg.num_pairs = static_cast<int>(meta.uniform_int(0, 3));
      cfg.seg.border_margin = static_cast<int>(meta.uniform_int(1, 3));
      cfg.seg.min_spacing = static_cast<int>(meta.uniform_int(1, 2));
    } while (!bss::is_feasible(cfg.seg, shape.height) || !bss::is_feasible(cfg.seg, shape.width));
    cfg.seg.constrained = meta.coin();
    cfg.axes = meta.coin() ? bss::AxesMode::OneAxis : bss::AxesMode::TwoAxis;
    cfg.target_mode = meta.coin() ? bss::TargetLengthMode::TotalShare
                                  : bss::TargetLengthMode::PerBlockLiteral;
    cfg.r = meta.uniform(0.0, 2.0);
    const bss::ImageTensor img = bss::testing::random_image(shape, trial);
    bss::Rng rng(trial);
    ok += bss::bss_transform(img, cfg, rng).shape() == shape;
  }
  return {ok == 10'000, fmt("%.0f of 10000 shapes preserved", ok)};
}

bss::ConvNetArch arch(int c, int h, int w, int c1, int c2) {
  bss::ConvNetArch a;
  a.in_channels = c;
  a.height = h;
  a.width = w;
  a.conv1_channels = c1;
  a.conv2_channels = c2;
  return a;
}

Outcome gradient_oracle(const bss::TinyConvNet& shipped) {
  std::vector<bss::TinyConvNet> nets;
  bss::Rng init(104);
  for (const auto& a : {arch(1, 8, 8, 2, 3), arch(3, 16, 16, 4, 8), arch(3, 32, 32, 8, 16)}) {
    nets.push_back(bss::TinyConvNet::initialized(a, init));
  }
  nets.push_back(shipped);
  bss::Rng rng(105);
  double worst = 0.0;
  int min_checked = 1 << 30;
  for (const auto& net : nets) {
    const auto img = bss::testing::random_image(net.arch().input_shape(), 106);
    const std::vector<double> x(img.data().begin(), img.data().end());
    const int label = static_cast<int>(rng.uniform_int(0, net.num_classes() - 1));
    const auto res = bss::testing::check_input_gradient(net, x, label, 100, rng);
    worst = std::max(worst, res.max_rel_error);
    min_checked = std::min(min_checked, res.checked);
  }
  return {min_checked >= 100 && worst < 1e-4,
          fmt("%.0f architectures, >= %.0f coords each, max rel error %.2e",
              static_cast<double>(nets.size()), min_checked, worst)};
}

Outcome analytic_mifgsm() {
  const bss::Shape shape{3, 16, 16};
  bss::ImageTensor pattern(shape);
  bss::Rng rng(107);
  for (float& v : pattern.data()) v = static_cast<float>(rng.uniform_int(-1, 1)) * 0.25f;
  const bss::testing::ConstantGradientModel model(pattern);
  const bss::LabeledImage sample{bss::ImageTensor(shape, 0.5f), 0};
  bss::AttackConfig cfg;  // 16/255, T = 10, mu = 1
  bss::MethodParams params;
  const auto method = bss::make_method(bss::MethodKind::None, params, 1);
  const auto res = bss::run_attack(model, sample, *method, cfg, bss::Rng(108));
  const float eps = static_cast<float>(cfg.epsilon);
  const float tol = static_cast<float>(cfg.iterations) * bss::testing::ulp(eps);
  float worst = 0.0f;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const float p = pattern.data()[i];
    const float expected = p > 0 ? eps : (p < 0 ? -eps : 0.0f);
    worst = std::max(worst, std::abs(res.delta.data()[i] - expected));
  }
  return {worst <= tol, fmt("max |delta - eps*sign| = %.3g (tolerance %.3g)", worst, tol)};
}

Outcome baseline_equivalence(const bss::TinyConvNet& surrogate,
                             const std::vector<bss::LabeledImage>& samples) {
  bss::AttackConfig cfg;
  const auto method = bss::make_method(bss::MethodKind::None, bss::MethodParams{}, 1);
  int identical = 0;
  for (int s = 0; s < 10; ++s) {
    const auto reference =
        bss::testing::textbook_mifgsm(surrogate, samples[s], cfg.epsilon, cfg.iterations, cfg.mu);
    std::vector<std::vector<float>> engine;
    bss::run_attack(surrogate, samples[s], *method, cfg, bss::Rng(109),
                    [&](const bss::AttackState& st) {
                      engine.emplace_back(st.delta.data().begin(), st.delta.data().end());
                    });
    identical += engine == reference;
  }
  return {identical == 10, fmt("%.0f of 10 trajectories bit-identical", identical)};
}

// Average ranks, ties share the mean rank.
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return da == 0 || db == 0 ? 0.0 : num / std::sqrt(da * db);
}

// A criterion that throws fails with the exception text.
template <typename Fn>
void guarded(Outcome& out, Fn&& fn) {
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

int main() {
  const std::filesystem::path root = BSS_SOURCE_DIR;
  std::vector<Outcome> results(11);
  std::vector<bss::ResultTable> sweeps;

  try {
    const bss::ExperimentConfig cfg = bss::load_experiment_config(root / "configs" / "default.ini");
    const bss::ModelSet models = bss::load_models(cfg);
    const auto samples = bss::load_attack_samples(cfg);

    progress("properties");
    guarded(results[0], adj_conservation);
    guarded(results[1], constraint_satisfaction);
    guarded(results[2], shape_preservation);
    guarded(results[3], [&] { return gradient_oracle(*models.surrogate); });
    guarded(results[5], analytic_mifgsm);
    guarded(results[6], [&] { return baseline_equivalence(*models.surrogate, samples); });

    // Criteria 8 and 9 share the first default sweep.
    progress("default sweep (threads 1)");
    const auto t0 = Clock::now();
    sweeps.push_back(bss::run_sweep(cfg, models, samples));
    const double sweep_secs = seconds_since(t0);
    progress("default sweep again");
    sweeps.push_back(bss::run_sweep(cfg, models, samples));
    progress("default sweep (threads 8)");
    bss::ExperimentConfig threaded = cfg;
    threaded.threads = 8;
    sweeps.push_back(bss::run_sweep(threaded, models, samples));
    const std::string csv = bss::format_csv(sweeps[0]);
    const bool rerun_same = bss::format_csv(sweeps[1]) == csv;
    const bool threads_same = bss::format_csv(sweeps[2]) == csv;
    results[7] = {rerun_same && threads_same,
                  std::string("rerun ") + (rerun_same ? "identical" : "differs") +
                      ", 1 vs 8 threads " + (threads_same ? "identical" : "differs")};

    progress("ablation");
    const auto t1 = Clock::now();
    sweeps.push_back(bss::run_ablation(cfg, models, samples));
    const double total_secs = sweep_secs + seconds_since(t1);
    const bss::ResultTable& ablation = sweeps.back();
    const int n = cfg.number_scales.front();
    const double mi = sweeps[0].black_box_mean("mi-fgsm", 1);
    const double full = sweeps[0].black_box_mean("bss", n);
    bool ordered = true;
    std::string variants;
    for (const char* v : {"1d-bss", "2d-bss-rp", "1d-bss-rp"}) {
      const double rate = ablation.black_box_mean(v, n);
      ordered = ordered && full >= rate;
      variants += std::string(", ") + v + " " + fmt("%.2f", rate);
    }
    results[8] = {full - mi >= 5.0 && ordered && total_secs < 600.0,
                  fmt("black-box mean: mi-fgsm %.2f, bss %.2f (gain %.2f pp)", mi, full, full - mi) +
                      variants + fmt("; runtime %.0f s", total_secs)};

    progress("number-scale trend");
    const std::vector<int> scales{1, 5, 10, 20};
    std::vector<double> mean_rate(scales.size(), 0.0);
    const std::vector<std::uint64_t> seeds{42, 43, 44};
    for (std::uint64_t seed : seeds) {
      bss::ExperimentConfig trend = cfg;
      trend.seed = seed;
      trend.methods = {{bss::MethodKind::Bss, {}}};
      trend.number_scales = scales;
      sweeps.push_back(bss::run_sweep(trend, models, samples));
      for (std::size_t i = 0; i < scales.size(); ++i) {
        mean_rate[i] += sweeps.back().black_box_mean("bss", scales[i]) / seeds.size();
      }
    }
    const double rho = spearman({1, 5, 10, 20}, mean_rate);
    results[9] = {rho >= 0.8, fmt("bss black-box mean by N 1/5/10/20: %.2f %.2f %.2f %.2f",
                                  mean_rate[0], mean_rate[1], mean_rate[2], mean_rate[3]) +
                                  fmt(", Spearman %.2f", rho)};

    std::uint64_t checks = 0, violations = 0;
    float max_linf = 0.0f;
    long cells = 0, cost_mismatch = 0;
    for (const auto& table : sweeps) {
      checks += table.budget_checks;
      violations += table.budget_violations;
      max_linf = std::max(max_linf, table.max_delta_linf);
      for (const auto& row : table.rows) {
        ++cells;
        const std::uint64_t expected = static_cast<std::uint64_t>(table.samples) *
                                       static_cast<std::uint64_t>(table.iterations) *
                                       static_cast<std::uint64_t>(row.n);
        cost_mismatch += row.evals != expected;
      }
    }
    results[4] = {checks > 0 && violations == 0 && max_linf <= static_cast<float>(cfg.attack.epsilon),
                  fmt("%.0f recorded steps, %.0f violations, max |delta|_inf %.6f (eps %.6f)",
                      static_cast<double>(checks), static_cast<double>(violations), max_linf,
                      cfg.attack.epsilon)};
    results[10] = {cells > 0 && cost_mismatch == 0,
                   fmt("%.0f rows, %.0f with evals != samples*T*N", cells, cost_mismatch)};
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
  }

  static const char* const names[] = {
      "adj conservation",       "constraint satisfaction", "shape preservation",
      "gradient oracle",        "budget invariant",        "analytic MI-FGSM",
      "baseline equivalence",   "determinism",             "directional transferability",
      "number-scale trend",     "cost model",
  };
  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    all = all && r.pass;
    std::printf("%s  %2zu %-28s %s\n", r.pass ? "PASS" : "FAIL", i + 1, names[i],
                r.detail.empty() ? "not run" : r.detail.c_str());
  }
  return all ? 0 : 1;
}
