// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "bss/checkpoint.hpp"
#include "bss/classifier.hpp"
#include "bss/dataset.hpp"
#include "bss/error.hpp"
#include "bss/tiny_conv_net.hpp"
#include "gradient_check.hpp"
#include "test_support.hpp"

namespace bss {
namespace {

using testing::random_image;
using testing::TempDir;

ConvNetArch arch(int c, int h, int w, int c1, int c2, int classes = 10) {
  ConvNetArch a;
  a.in_channels = c;
  a.height = h;
  a.width = w;
  a.conv1_channels = c1;
  a.conv2_channels = c2;
  a.num_classes = classes;
  return a;
}

std::vector<double> to_f64(const ImageTensor& img) {
  return std::vector<double>(img.data().begin(), img.data().end());
}

TEST(ConvNetArch, ParamCountAndValidation) {
  // conv1: 3*9*8 + 8, conv2: 8*9*16 + 16, dense: 16*8*8*10 + 10
  EXPECT_EQ(arch(3, 32, 32, 8, 16).param_count(), 224u + 1168u + 10250u);
  EXPECT_THROW(arch(3, 30, 32, 8, 16).validate(), ArgumentError);
  EXPECT_THROW(arch(3, 32, 32, 0, 16).validate(), ArgumentError);
  EXPECT_THROW(TinyConvNet(arch(3, 8, 8, 2, 2), std::vector<float>(5)), ShapeError);
}

TEST(TinyConvNet, ZeroNetGivesZeroLogitsAndLogC) {
  const TinyConvNet net(arch(3, 16, 16, 4, 6));
  const ImageTensor img = random_image({3, 16, 16}, 1);
  const auto logits = net.forward(img);
  ASSERT_EQ(logits.size(), 10u);
  for (float v : logits) EXPECT_EQ(v, 0.0f);
  EXPECT_NEAR(net.loss_and_input_grad(img, 3).loss, std::log(10.0), 1e-12);
  EXPECT_NEAR(net.loss_and_input_grad(ImageTensor(3, 16, 16), 0).loss, std::log(10.0), 1e-12);
}

TEST(TinyConvNet, InputChecks) {
  Rng rng(2);
  const TinyConvNet net = TinyConvNet::initialized(arch(1, 8, 8, 2, 3), rng);
  EXPECT_THROW(net.forward(ImageTensor(1, 8, 12)), ShapeError);
  EXPECT_THROW(net.loss_and_input_grad(ImageTensor(1, 8, 8), 10), ArgumentError);
  EXPECT_THROW(net.loss_and_input_grad(ImageTensor(1, 8, 8), -1), ArgumentError);
}

TEST(TinyConvNet, NonFiniteInputIsANumericError) {
  Rng rng(3);
  const TinyConvNet net = TinyConvNet::initialized(arch(1, 8, 8, 2, 3), rng);
  ImageTensor img(1, 8, 8, 0.5f);
  img.at(0, 3, 3) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(net.forward(img), NumericError);
}

class GradientOracle : public ::testing::TestWithParam<ConvNetArch> {};

TEST_P(GradientOracle, MatchesCentralDifferences) {
  const ConvNetArch a = GetParam();
  Rng init(10);
  const TinyConvNet net = TinyConvNet::initialized(a, init);
  Rng rng(11);
  for (int trial = 0; trial < 2; ++trial) {
    const auto x = to_f64(random_image(a.input_shape(), 20 + trial));
    const int label = static_cast<int>(rng.uniform_int(0, a.num_classes - 1));
    const auto res = testing::check_input_gradient(net, x, label, 100, rng);
    EXPECT_EQ(res.checked, 100);
    EXPECT_LT(res.max_rel_error, 1e-4) << "resampled " << res.resampled;
  }
}

INSTANTIATE_TEST_SUITE_P(Architectures, GradientOracle,
                         ::testing::Values(arch(1, 8, 8, 2, 3, 4), arch(3, 12, 16, 4, 6),
                                           arch(3, 32, 32, 8, 16), arch(3, 32, 32, 16, 32)),
                         [](const auto& info) {
                           const ConvNetArch& a = info.param;
                           return "c" + std::to_string(a.in_channels) + "_" + std::to_string(a.height) +
                                  "x" + std::to_string(a.width) + "_" +
                                  std::to_string(a.conv1_channels) + "_" +
                                  std::to_string(a.conv2_channels);
                         });

TEST(TinyConvNet, Float32PathAgreesWith64BitPath) {
  Rng init(12);
  const ConvNetArch a = arch(3, 16, 16, 4, 8);
  const TinyConvNet net = TinyConvNet::initialized(a, init);
  const ImageTensor img = random_image(a.input_shape(), 13);
  const LossAndGrad lg = net.loss_and_input_grad(img, 2);
  std::vector<double> g64(img.size());
  const double loss64 = net.loss_and_input_grad_f64(to_f64(img), 2, g64);
  EXPECT_NEAR(lg.loss, loss64, 1e-5);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g64.size(); ++i) {
    num += std::pow(lg.grad.data()[i] - g64[i], 2);
    den += g64[i] * g64[i];
  }
  EXPECT_LT(std::sqrt(num / den), 1e-4);
}

TEST(SoftmaxCrossEntropy, ShiftInvariance) {
  const std::vector<double> logits{0.3, -1.2, 2.5, 0.0};
  std::vector<double> shifted = logits;
  for (double& v : shifted) v += 123.456;
  std::vector<double> d1(4), d2(4);
  const double l1 = softmax_cross_entropy(logits, 2, d1);
  const double l2 = softmax_cross_entropy(shifted, 2, d2);
  EXPECT_NEAR(l1, l2, 1e-6);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(d1[i], d2[i], 1e-6);
  // Gradient is softmax minus one-hot.
  double sum = 0.0;
  for (double v : d1) sum += v;
  EXPECT_NEAR(sum, 0.0, 1e-12);
}

TEST(SoftmaxCrossEntropy, UniformLogits) {
  const std::vector<double> logits(7, 0.25);
  std::vector<double> d(7);
  EXPECT_NEAR(softmax_cross_entropy(logits, 0, d), std::log(7.0), 1e-12);
}

TEST(TinyConvNet, DuplicatedBatchKeepsMeanGradient) {
  Rng init(14);
  const TinyConvNet net = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init);
  const LabeledImage ex{random_image({3, 8, 8}, 15), 4};
  std::vector<double> single(net.params().size()), batch(net.params().size());
  const double l1 = net.batch_loss_and_param_grad(std::vector<LabeledImage>{ex}, single);
  const double l4 = net.batch_loss_and_param_grad(std::vector<LabeledImage>(4, ex), batch);
  EXPECT_NEAR(l1, l4, 1e-12);
  for (std::size_t i = 0; i < single.size(); ++i) EXPECT_NEAR(single[i], batch[i], 1e-12);
}

TEST(TinyConvNet, ParamGradientMatchesFiniteDifferences) {
  Rng init(16);
  TinyConvNet net = TinyConvNet::initialized(arch(1, 8, 8, 2, 3, 4), init);
  const LabeledImage ex{random_image({1, 8, 8}, 17), 1};
  std::vector<double> grad(net.params().size());
  net.accumulate_param_grad(ex.image, ex.label, grad);
  Rng rng(18);
  const auto x = to_f64(ex.image);
  int checked = 0;
  for (int draw = 0; draw < 2000 && checked < 40; ++draw) {
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(grad.size()) - 1));
    const float orig = net.params()[i];
    const float h = 1e-2f;
    net.params()[i] = orig + h;
    const auto pattern_p = net.relu_pattern_f64(x);
    const double lp = net.loss_f64(x, ex.label);
    net.params()[i] = orig - h;
    const auto pattern_m = net.relu_pattern_f64(x);
    const double lm = net.loss_f64(x, ex.label);
    net.params()[i] = orig;
    if (pattern_p != pattern_m || pattern_p != net.relu_pattern_f64(x)) continue;
    const double fd = (lp - lm) / (static_cast<double>(orig + h) - static_cast<double>(orig - h));
    EXPECT_NEAR(grad[i], fd, 1e-3 * std::max(1.0, std::abs(fd))) << "param " << i;
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}

std::vector<LabeledImage> tiny_data(int count, std::uint64_t seed) {
  return make_synthetic({seed, count, 8});
}

TEST(Train, ZeroLearningRateLeavesParametersUnchanged) {
  Rng init(19);
  TinyConvNet net = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init);
  const std::uint64_t before = net.checksum();
  TrainOptions opt;
  opt.epochs = 1;
  opt.learning_rate = 0.0;
  opt.batch_size = 4;
  for (Optimizer o : {Optimizer::Sgd, Optimizer::Adam}) {
    opt.optimizer = o;
    Rng rng(20);
    train(net, tiny_data(10, 1), {}, opt, rng);
    EXPECT_EQ(net.checksum(), before);
  }
}

TrainOptions quick_options() {
  TrainOptions opt;
  opt.epochs = 2;
  opt.learning_rate = 0.01;
  opt.batch_size = 8;
  opt.crop_min_area = 0.7;
  opt.crop_max_aspect = 1.3;
  opt.stretch_pieces = 2;
  opt.stretch_limit = 0.3;
  opt.optimizer = Optimizer::Adam;
  return opt;
}

TEST(Train, SameSeedIsBitIdentical) {
  const auto data = tiny_data(40, 2);
  std::uint64_t sums[2];
  for (int run = 0; run < 2; ++run) {
    Rng init(21), order(22);
    TinyConvNet net = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init);
    train(net, data, {}, quick_options(), order);
    sums[run] = net.checksum();
  }
  EXPECT_EQ(sums[0], sums[1]);
}

TEST(Train, DifferentSeedsGiveDistinctModels) {
  const auto data = tiny_data(40, 2);
  Rng init_a(23), init_b(24), order_a(25), order_b(26);
  TinyConvNet a = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init_a);
  TinyConvNet b = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init_b);
  train(a, data, {}, quick_options(), order_a);
  train(b, data, {}, quick_options(), order_b);
  EXPECT_NE(a.checksum(), b.checksum());
}

TEST(Train, LearnsTheSyntheticTask) {
  const auto data = make_synthetic({3, 600, 32});
  const auto held = make_synthetic({4, 200, 32});
  Rng init(27), order(28);
  TinyConvNet net = TinyConvNet::initialized(arch(3, 32, 32, 8, 16), init);
  TrainOptions opt;
  opt.optimizer = Optimizer::Adam;
  opt.learning_rate = 0.003;
  opt.epochs = 12;
  opt.cosine_decay = true;
  const TrainReport report = train(net, data, held, opt, order);
  EXPECT_GT(report.heldout_accuracy, 40.0);  // chance is 10%
  EXPECT_DOUBLE_EQ(report.heldout_accuracy, accuracy(net, held));
}

TEST(Train, DivergenceIsReported) {
  Rng init(29), order(30);
  TinyConvNet net = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init);
  TrainOptions opt;
  opt.epochs = 3;
  opt.learning_rate = 1e30;
  opt.momentum = 0.0;
  EXPECT_THROW(train(net, tiny_data(20, 3), {}, opt, order), TrainingError);
}

TEST(Train, Errors) {
  Rng init(31), order(32);
  TinyConvNet net = TinyConvNet::initialized(arch(3, 8, 8, 2, 3), init);
  EXPECT_THROW(train(net, {}, {}, TrainOptions{}, order), ArgumentError);
  TrainOptions bad;
  bad.batch_size = 0;
  EXPECT_THROW(train(net, tiny_data(4, 1), {}, bad, order), ArgumentError);
}

TEST(Checkpoint, RoundTrip) {
  TempDir dir("ckpt");
  Rng init(33);
  const TinyConvNet net = TinyConvNet::initialized(arch(3, 12, 16, 4, 6, 7), init);
  save_checkpoint(net, dir / "m.ckpt");
  const TinyConvNet back = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.arch(), net.arch());
  EXPECT_EQ(back.checksum(), net.checksum());
  EXPECT_EQ(std::filesystem::file_size(dir / "m.ckpt"), 8 + 4 + 24 + 8 + 4 * net.params().size());
}

TEST(Checkpoint, CorruptFiles) {
  TempDir dir("ckpt_bad");
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), IoError);
  std::ofstream(dir / "magic.ckpt", std::ios::binary) << "NOTACKPT0000000000000000000000000000";
  EXPECT_THROW(load_checkpoint(dir / "magic.ckpt"), FormatError);

  Rng init(34);
  save_checkpoint(TinyConvNet::initialized(arch(1, 8, 8, 2, 2), init), dir / "ok.ckpt");
  std::filesystem::resize_file(dir / "ok.ckpt", std::filesystem::file_size(dir / "ok.ckpt") - 3);
  EXPECT_THROW(load_checkpoint(dir / "ok.ckpt"), FormatError);
}

TEST(LinearClassifier, LossAndGradientAreAnalytic) {
  // Two classes on a 1x1x2 input: logits = W x + b.
  const LinearClassifier model({1, 1, 2}, 2, {1.0f, -2.0f, 0.5f, 0.25f}, {0.1f, -0.1f});
  const ImageTensor x({1, 1, 2}, std::vector<float>{0.3f, 0.6f});
  const double z0 = 0.1 + 0.3 - 1.2, z1 = -0.1 + 0.15 + 0.15;
  const double p0 = std::exp(z0) / (std::exp(z0) + std::exp(z1));
  const LossAndGrad lg = model.loss_and_input_grad(x, 0);
  EXPECT_NEAR(lg.loss, -std::log(p0), 1e-6);
  // d/dx = W^T (p - onehot)
  EXPECT_NEAR(lg.grad.at(0, 0, 0), (p0 - 1.0) * 1.0 + (1.0 - p0) * 0.5, 1e-6);
  EXPECT_NEAR(lg.grad.at(0, 0, 1), (p0 - 1.0) * -2.0 + (1.0 - p0) * 0.25, 1e-6);
  EXPECT_EQ(model.predict(x), 1);
}

TEST(CountingClassifier, CountsEvaluations) {
  const LinearClassifier inner({1, 1, 2}, 2, std::vector<float>(4, 0.5f), {0.0f, 0.0f});
  CountingClassifier counter(inner);
  const ImageTensor x(1, 1, 2, 0.5f);
  counter.forward(x);
  counter.loss_and_input_grad(x, 1);
  counter.loss_and_input_grad(x, 0);
  EXPECT_EQ(counter.forward_evals(), 1u);
  EXPECT_EQ(counter.gradient_evals(), 2u);
  counter.reset();
  EXPECT_EQ(counter.gradient_evals(), 0u);
}

}  // namespace
}  // namespace bss
