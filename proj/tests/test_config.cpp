// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "bss/error.hpp"
#include "bss/experiment_config.hpp"
#include "test_support.hpp"

namespace bss {
namespace {

template <typename Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseReal, DecimalsAndFractions) {
  EXPECT_DOUBLE_EQ(parse_real("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_real("16/255"), 16.0 / 255.0);
  EXPECT_DOUBLE_EQ(parse_real(" 3 / 4 "), 0.75);
  EXPECT_THROW(parse_real("abc"), ConfigError);
  EXPECT_THROW(parse_real("1/0"), ConfigError);
  EXPECT_THROW(parse_real("1/2/3"), ConfigError);
}

TEST(ExperimentConfig, EmptyTextKeepsDefaults) {
  const ExperimentConfig cfg = parse_experiment_config("");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.number_scales, std::vector<int>{10});
  EXPECT_EQ(cfg.bss_border_margin, 35);
  EXPECT_EQ(cfg.bss_min_spacing, 40);
  EXPECT_FALSE(cfg.attack.alpha.has_value());
}

TEST(ExperimentConfig, ParsesEverySection) {
  const ExperimentConfig cfg = parse_experiment_config(R"(
[experiment]
seed = 7
dataset = synthetic:1:50:32
samples = 20
surrogate = m/s.ckpt
targets = m/a.ckpt, m/b.ckpt
methods = mi-fgsm, bss, resize-pad@5
number_scales = 1, 5, 10
threads = 3
allow_mixed_n = yes
out = results/x

[attack]
epsilon = 8/255
iterations = 5
alpha = 0.01
mu = 0.5
grad_mode = image-space

[bss]
pairs = 1
border_margin = 10
min_spacing = 12
ratio = 0.5
base_resolution = 64
target_length_mode = literal

[baselines]
scale_depth = 3
resize_min_scale = 0.9
shuffle_grid = 3
rotate_max_degrees = 10

[train]
optimizer = adam
lr_schedule = cosine
epochs = 4
conv1 = 6
conv2 = 12
target_conv2 = 24
target_seeds = 5, 6, 7
)",
                                                          "/base");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.dataset, "synthetic:1:50:32");
  EXPECT_EQ(cfg.samples, 20);
  EXPECT_EQ(cfg.surrogate, std::filesystem::path("/base/m/s.ckpt"));
  ASSERT_EQ(cfg.targets.size(), 2u);
  EXPECT_EQ(cfg.targets[1], std::filesystem::path("/base/m/b.ckpt"));
  ASSERT_EQ(cfg.methods.size(), 3u);
  EXPECT_EQ(cfg.methods[2].kind, MethodKind::ResizePad);
  EXPECT_EQ(cfg.methods[2].fixed_n, 5);
  EXPECT_EQ(cfg.number_scales, (std::vector<int>{1, 5, 10}));
  EXPECT_EQ(cfg.threads, 3);
  EXPECT_TRUE(cfg.allow_mixed_n);
  EXPECT_EQ(cfg.out_dir, std::filesystem::path("/base/results/x"));
  EXPECT_DOUBLE_EQ(cfg.attack.epsilon, 8.0 / 255.0);
  EXPECT_EQ(cfg.attack.iterations, 5);
  EXPECT_EQ(cfg.attack.alpha, 0.01);
  EXPECT_EQ(cfg.attack.mu, 0.5);
  EXPECT_EQ(cfg.attack.grad_mode, GradMode::ImageSpace);
  EXPECT_EQ(cfg.bss_pairs, 1);
  EXPECT_EQ(cfg.bss_ratio, 0.5);
  EXPECT_EQ(cfg.base_resolution, 64);
  EXPECT_EQ(cfg.scale_depth, 3);
  EXPECT_EQ(cfg.target_mode, TargetLengthMode::PerBlockLiteral);
  EXPECT_EQ(cfg.shuffle_grid, 3);
  EXPECT_EQ(cfg.train.options.optimizer, Optimizer::Adam);
  EXPECT_TRUE(cfg.train.options.cosine_decay);
  EXPECT_EQ(cfg.train.options.epochs, 4);
  EXPECT_EQ(cfg.train.arch.conv1_channels, 6);
  EXPECT_EQ(cfg.train.target_arch.conv1_channels, 6);
  EXPECT_EQ(cfg.train.target_arch.conv2_channels, 24);
  EXPECT_EQ(cfg.train.target_seeds, (std::vector<std::uint64_t>{5, 6, 7}));
}

TEST(ExperimentConfig, UnknownKeysAreRejected) {
  EXPECT_NE(error_of([] { parse_experiment_config("[attack]\nepsilom = 0.1\n"); })
                .find("unknown key 'epsilom'"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_experiment_config("[atack]\nepsilon = 0.1\n"); }).find("unknown"),
            std::string::npos);
}

TEST(ExperimentConfig, BadValuesAreRejected) {
  EXPECT_THROW(parse_experiment_config("[experiment]\nthreads = 0\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[experiment]\nsamples = many\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[experiment]\nnumber_scales = 0\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[experiment]\nmethods = nonsense\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[experiment]\nallow_mixed_n = maybe\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[attack]\ngrad_mode = fast\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[bss]\ntarget_length_mode = odd\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[train]\noptimizer = lbfgs\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[train]\nlr_schedule = step\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[experiment\n"), ConfigError);
}

TEST(ExperimentConfig, IdxPathsResolveAgainstTheConfigDirectory) {
  const ExperimentConfig cfg =
      parse_experiment_config("[experiment]\ndataset = d/img.idx, d/lbl.idx\n", "/cfg");
  EXPECT_EQ(cfg.dataset, "/cfg/d/img.idx,/cfg/d/lbl.idx");
}

TEST(ExperimentConfig, LoadFromFile) {
  testing::TempDir dir("config");
  {
    std::ofstream out(dir / "exp.ini");
    out << "[experiment]\nsurrogate = s.ckpt\n";
  }
  const ExperimentConfig cfg = load_experiment_config(dir / "exp.ini");
  EXPECT_EQ(cfg.surrogate, dir / "s.ckpt");
  EXPECT_THROW(load_experiment_config(dir / "missing.ini"), IoError);
}

TEST(ExperimentConfig, ShippedConfigsParse) {
  const std::filesystem::path root = BSS_SOURCE_DIR;
  for (const auto& entry : std::filesystem::directory_iterator(root / "configs")) {
    if (entry.path().extension() != ".ini") continue;
    SCOPED_TRACE(entry.path().string());
    const ExperimentConfig cfg = load_experiment_config(entry.path());
    EXPECT_DOUBLE_EQ(cfg.attack.epsilon, 16.0 / 255.0);
    EXPECT_EQ(cfg.attack.iterations, 10);
    EXPECT_EQ(cfg.attack.mu, 1.0);
  }
}

}  // namespace
}  // namespace bss
