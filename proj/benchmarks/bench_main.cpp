// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bss/attack.hpp"
#include "bss/bss_transform.hpp"
#include "bss/methods.hpp"
#include "bss/tiny_conv_net.hpp"

namespace {

bss::ImageTensor noise(const bss::Shape& shape, std::uint64_t seed) {
  bss::ImageTensor img(shape);
  bss::Rng rng(seed);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return img;
}

void BM_ResizeAxis(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const bss::ImageTensor img = noise({3, size, size}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bss::resize_axis_bilinear(img, size * 3 / 2, bss::Axis::Width));
  }
}
BENCHMARK(BM_ResizeAxis)->Arg(32)->Arg(224);

void BM_AdjustLengths(benchmark::State& state) {
  bss::Rng rng(2);
  std::vector<int> targets(static_cast<std::size_t>(state.range(0)));
  for (int& t : targets) t = static_cast<int>(rng.uniform_int(-5, 40));
  for (auto _ : state) benchmark::DoNotOptimize(bss::adjust_lengths(targets, 1024));
}
BENCHMARK(BM_AdjustLengths)->Arg(5)->Arg(64);

void BM_BssTransform(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const bss::ImageTensor img = noise({3, size, size}, 3);
  bss::BssConfig cfg;
  if (size < 224) {
    cfg.seg.border_margin = 5;
    cfg.seg.min_spacing = 6;
  }
  bss::Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(bss::bss_transform(img, cfg, rng));
}
BENCHMARK(BM_BssTransform)->Arg(32)->Arg(224);

void BM_InputGradient(benchmark::State& state) {
  bss::ConvNetArch arch;
  arch.conv1_channels = static_cast<int>(state.range(0));
  arch.conv2_channels = 2 * arch.conv1_channels;
  bss::Rng rng(5);
  const bss::TinyConvNet net = bss::TinyConvNet::initialized(arch, rng);
  const bss::ImageTensor img = noise(arch.input_shape(), 6);
  for (auto _ : state) benchmark::DoNotOptimize(net.loss_and_input_grad(img, 3));
}
BENCHMARK(BM_InputGradient)->Arg(8)->Arg(16);

void BM_EnsembleGradient(benchmark::State& state) {
  bss::ConvNetArch arch;
  arch.conv1_channels = 16;
  arch.conv2_channels = 32;
  bss::Rng rng(7);
  const bss::TinyConvNet net = bss::TinyConvNet::initialized(arch, rng);
  const bss::ImageTensor img = noise(arch.input_shape(), 8);
  const bss::ImageTensor delta(arch.input_shape());
  bss::MethodParams params;
  params.seg.border_margin = 5;
  params.seg.min_spacing = 6;
  const auto method =
      bss::make_method(bss::MethodKind::Bss, params, static_cast<int>(state.range(0)));
  const bss::Rng stream(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bss::ensemble_gradient(net, img, delta, 1, *method, stream));
  }
}
BENCHMARK(BM_EnsembleGradient)->Arg(1)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
