// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bss/classifier.hpp"
#include "bss/experiment_config.hpp"
#include "bss/tiny_conv_net.hpp"

namespace bss {

struct ResultRow {
  std::string method;
  int n = 1;
  std::string model;
  bool white_box = false;  // the model that generated the perturbations
  double success_rate_pct = 0.0;
  std::uint64_t evals = 0;  // surrogate gradient evaluations spent on the cell
  double wall_ms = 0.0;

  /// Model name as written to the CSV; white-box rows carry a trailing '*'.
  std::string display_model() const { return white_box ? model + "*" : model; }
};

struct ModelAccuracy {
  std::string model;
  double clean_accuracy_pct = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
  std::vector<ModelAccuracy> clean_accuracy;
  int samples = 0;
  int iterations = 0;
  int border_margin = 0;  // after scaling to the dataset resolution
  int min_spacing = 0;
  std::uint64_t budget_checks = 0;      // recorded ||delta_t||_inf values
  std::uint64_t budget_violations = 0;  // of those, how many exceeded epsilon
  float max_delta_linf = 0.0f;
  bool record_wall_time = false;  // otherwise wall_ms is written as 0 in the CSV

  /// Mean success rate over the black-box rows of one (method, N) cell.
  double black_box_mean(const std::string& method, int n) const;
  const ResultRow* find(const std::string& method, int n, const std::string& model) const;
};

/// d' = max(1, round(d * target_res / base_res)) for both distances, then
/// rechecks feasibility on a target_res x target_res image.
std::pair<int, int> scale_parameters(int border_margin, int min_spacing, int base_res,
                                     int target_res, int num_pairs = 2);

struct TrainedModel {
  TinyConvNet model;
  TrainReport report;
};

/// Trains one TinyConvNet on the [train] datasets. The input shape of `arch`
/// is taken from the data. `model_seed` alone fixes the initialization and
/// the batch order.
TrainedModel train_from_config(const TrainSection& section, ConvNetArch arch,
                               std::uint64_t model_seed);

/// Surrogate and targets plus the names used in result rows (file stems).
struct ModelSet {
  std::unique_ptr<TinyConvNet> surrogate;
  std::string surrogate_name;
  std::vector<std::unique_ptr<TinyConvNet>> targets;
  std::vector<std::string> target_names;
};

ModelSet load_models(const ExperimentConfig& cfg);

/// Method parameters at the resolution of `shape`.
MethodParams method_params_for(const ExperimentConfig& cfg, const Shape& shape);

/// The attack samples: the first `cfg.samples` entries of the dataset.
std::vector<LabeledImage> load_attack_samples(const ExperimentConfig& cfg);

/// Attacks every sample on the surrogate for each (method, N) cell and
/// evaluates on the surrogate and all targets. Everything is validated before
/// the first attack. Rows do not depend on `cfg.threads`.
ResultTable run_sweep(const ExperimentConfig& cfg, const ModelSet& models,
                      const std::vector<LabeledImage>& samples);
ResultTable run_sweep(const ExperimentConfig& cfg);

/// Baseline plus the four BSS variants at N = cfg.number_scales.front().
/// cfg.methods is ignored.
ResultTable run_ablation(const ExperimentConfig& cfg, const ModelSet& models,
                         const std::vector<LabeledImage>& samples);
ResultTable run_ablation(const ExperimentConfig& cfg);

/// Header: method,N,model,success_rate_pct,evals,wall_ms
std::string format_csv(const ResultTable& table);
void write_results(const ResultTable& table, const ExperimentConfig& cfg,
                   const std::filesystem::path& out_dir);

/// Max over channels of |d loss / d x|, divided by its maximum, as gray PNG.
/// An all-zero gradient gives a black image.
ImageTensor saliency_map(const Classifier& model, const ImageTensor& img, int label);
void saliency_dump(const Classifier& model, const ImageTensor& img, int label,
                   const std::filesystem::path& path);

}  // namespace bss
