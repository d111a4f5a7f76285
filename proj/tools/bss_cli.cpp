// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// bss: command line front end for the attack toolkit.
//
//   bss train             --config configs/train.ini
//   bss sweep             --config configs/default.ini --threads 4
//   bss ablate            --config configs/ablation.ini
//   bss attack            --config configs/default.ini --index 3 --method bss
//   bss transform-preview --input photo.png --method bss --n 4
//   bss saliency          --config configs/default.ini --index 3

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bss/attack.hpp"
#include "bss/checkpoint.hpp"
#include "bss/dataset.hpp"
#include "bss/error.hpp"
#include "bss/experiment_config.hpp"
#include "bss/harness.hpp"
#include "bss/image_io.hpp"
#include "bss/methods.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string grad_mode;
  std::string target_length_mode;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
  auto* config = cmd->add_option("--config", o.config, "Experiment config file (INI)");
  if (config_required) config->required();
  config->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--grad-mode", o.grad_mode, "Gradient mapping through transforms")
      ->check(CLI::IsMember({"exact", "image-space"}));
  cmd->add_option("--target-length-mode", o.target_length_mode, "BSS target length rule")
      ->check(CLI::IsMember({"total", "literal"}));
}

bss::ExperimentConfig resolve_config(const CommonOptions& o) {
  bss::ExperimentConfig cfg = o.config.empty() ? bss::ExperimentConfig{}
                                               : bss::load_experiment_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.grad_mode.empty()) cfg.attack.grad_mode = bss::parse_grad_mode(o.grad_mode);
  if (!o.target_length_mode.empty()) {
    cfg.target_mode = bss::parse_target_length_mode(o.target_length_mode);
  }
  return cfg;
}

void print_table(const bss::ResultTable& table) {
  std::printf("%-22s %5s %-14s %9s %10s\n", "method", "N", "model", "success%", "evals");
  for (const auto& row : table.rows) {
    std::printf("%-22s %5d %-14s %9.2f %10llu\n", row.method.c_str(), row.n,
                row.display_model().c_str(), row.success_rate_pct,
                static_cast<unsigned long long>(row.evals));
  }
  for (const auto& w : table.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (table.budget_violations != 0) {
    std::fprintf(stderr, "error: %llu budget violations\n",
                 static_cast<unsigned long long>(table.budget_violations));
  }
}

int cmd_sweep(const CommonOptions& o, bool ablation) {
  const bss::ExperimentConfig cfg = resolve_config(o);
  const bss::ResultTable table = ablation ? bss::run_ablation(cfg) : bss::run_sweep(cfg);
  bss::write_results(table, cfg, cfg.out_dir);
  print_table(table);
  std::printf("wrote %s\n", (cfg.out_dir / "results.csv").string().c_str());
  return table.budget_violations == 0 ? 0 : 3;
}

int cmd_train(const CommonOptions& o) {
  const bss::ExperimentConfig cfg = resolve_config(o);
  if (cfg.surrogate.empty()) throw bss::ConfigError("train needs a surrogate path");
  if (cfg.targets.size() != cfg.train.target_seeds.size()) {
    throw bss::ConfigError("need one target seed per target checkpoint (" +
                           std::to_string(cfg.targets.size()) + " targets, " +
                           std::to_string(cfg.train.target_seeds.size()) + " seeds)");
  }
  struct Job {
    std::filesystem::path path;
    bss::ConvNetArch arch;
    std::uint64_t seed;
  };
  std::vector<Job> jobs{{cfg.surrogate, cfg.train.arch, cfg.train.surrogate_seed}};
  for (std::size_t i = 0; i < cfg.targets.size(); ++i) {
    jobs.push_back({cfg.targets[i], cfg.train.target_arch, cfg.train.target_seeds[i]});
  }

  nlohmann::json manifest = {{"dataset", cfg.train.dataset},
                             {"heldout", cfg.train.heldout},
                             {"models", nlohmann::json::object()}};
  for (const auto& [path, arch, seed] : jobs) {
    const bss::TrainedModel trained = bss::train_from_config(cfg.train, arch, seed);
    bss::save_checkpoint(trained.model, path);
    std::printf("%s: loss %.4f train %.2f%% heldout %.2f%%\n", path.string().c_str(),
                trained.report.final_loss, trained.report.train_accuracy,
                trained.report.heldout_accuracy);
    manifest["models"][path.filename().string()] = {
        {"seed", seed},
        {"conv1", arch.conv1_channels},
        {"conv2", arch.conv2_channels},
        {"checksum", trained.model.checksum()},
        {"train_accuracy_pct", trained.report.train_accuracy},
        {"heldout_accuracy_pct", trained.report.heldout_accuracy}};
  }
  const auto manifest_path = cfg.surrogate.parent_path() / "manifest.json";
  std::ofstream os(manifest_path);
  if (!os) throw bss::IoError("cannot write " + manifest_path.string());
  os << manifest.dump(2) << '\n';
  return 0;
}

struct SampleOptions {
  int index = 0;
  std::string method = "bss";
  int n = 10;
  std::string input;
  int label = -1;
};

bss::LabeledImage pick_sample(const bss::ExperimentConfig& cfg, const SampleOptions& s) {
  if (!s.input.empty()) return {bss::read_image(s.input), s.label < 0 ? 0 : s.label};
  const auto data = bss::load_dataset(cfg.dataset);
  if (s.index < 0 || static_cast<std::size_t>(s.index) >= data.size()) {
    throw bss::ArgumentError("sample index " + std::to_string(s.index) + " is out of range");
  }
  bss::LabeledImage sample = data[s.index];
  if (s.label >= 0) sample.label = s.label;
  return sample;
}

int cmd_attack(const CommonOptions& o, const SampleOptions& s) {
  const bss::ExperimentConfig cfg = resolve_config(o);
  const bss::ModelSet models = bss::load_models(cfg);
  const bss::LabeledImage sample = pick_sample(cfg, s);
  const auto method = bss::make_method(bss::parse_method_kind(s.method),
                                       bss::method_params_for(cfg, sample.image.shape()), s.n);
  method->validate(sample.image.shape());
  const bss::Rng stream =
      bss::Rng::substream(cfg.seed, {bss::fnv1a64(method->name()), static_cast<std::uint64_t>(s.index)});
  const bss::AttackResult res =
      bss::run_attack(*models.surrogate, sample, *method, cfg.attack, stream, {}, cfg.threads);

  std::filesystem::create_directories(cfg.out_dir);
  bss::write_png(sample.image, cfg.out_dir / "clean.png");
  bss::write_png(res.adversarial, cfg.out_dir / "adversarial.png");
  bss::write_raw_f32(res.delta, cfg.out_dir / "delta.bssd");

  std::printf("method %s N=%d label %d, ||delta||_inf = %.6f\n", method->name().c_str(),
              method->number_scale(), sample.label, bss::linf_norm(res.delta));
  auto report = [&](const std::string& name, const bss::Classifier& m) {
    std::printf("  %-14s clean %d -> adversarial %d\n", name.c_str(), m.predict(sample.image),
                m.predict(res.adversarial));
  };
  report(models.surrogate_name + "*", *models.surrogate);
  for (std::size_t i = 0; i < models.targets.size(); ++i) {
    report(models.target_names[i], *models.targets[i]);
  }
  return 0;
}

int cmd_preview(const CommonOptions& o, const SampleOptions& s) {
  const bss::ExperimentConfig cfg = resolve_config(o);
  const bss::LabeledImage sample = pick_sample(cfg, s);
  const auto method = bss::make_method(bss::parse_method_kind(s.method),
                                       bss::method_params_for(cfg, sample.image.shape()), s.n);
  method->validate(sample.image.shape());
  const bss::Rng stream = bss::Rng::substream(cfg.seed, {bss::fnv1a64(method->name()), 0});
  const auto variants = method->apply(sample.image, stream);
  std::filesystem::create_directories(cfg.out_dir);
  bss::write_png(sample.image, cfg.out_dir / "preview_input.png");
  for (std::size_t k = 0; k < variants.size(); ++k) {
    bss::write_png(variants[k], cfg.out_dir / ("preview_" + std::to_string(k) + ".png"));
  }
  std::printf("wrote %zu previews to %s\n", variants.size(), cfg.out_dir.string().c_str());
  return 0;
}

int cmd_saliency(const CommonOptions& o, const SampleOptions& s) {
  const bss::ExperimentConfig cfg = resolve_config(o);
  const bss::ModelSet models = bss::load_models(cfg);
  const bss::LabeledImage sample = pick_sample(cfg, s);
  std::filesystem::create_directories(cfg.out_dir);
  bss::saliency_dump(*models.surrogate, sample.image, sample.label,
                     cfg.out_dir / "saliency_clean.png");

  const auto method = bss::make_method(bss::parse_method_kind(s.method),
                                       bss::method_params_for(cfg, sample.image.shape()), 1);
  method->validate(sample.image.shape());
  bss::Rng rng = bss::Rng::substream(cfg.seed, {bss::fnv1a64(method->name()), 0}).child(0);
  const bss::ImageTensor transformed =
      method->sample(sample.image.shape(), 0, rng)->forward(sample.image);
  bss::write_png(transformed, cfg.out_dir / "saliency_input_transformed.png");
  bss::saliency_dump(*models.surrogate, transformed, sample.label,
                     cfg.out_dir / ("saliency_" + method->name() + ".png"));
  std::printf("wrote saliency maps to %s\n", cfg.out_dir.string().c_str());
  return 0;
}

void add_sample_options(CLI::App* cmd, SampleOptions& s, bool with_n) {
  cmd->add_option("--index", s.index, "Dataset sample index");
  cmd->add_option("--input", s.input, "Image file to use instead of a dataset sample")
      ->check(CLI::ExistingFile);
  cmd->add_option("--label", s.label, "Label override");
  cmd->add_option("--method", s.method, "Transform method");
  if (with_n) cmd->add_option("--n", s.n, "Number scale")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block stretch-and-shrink transfer attack toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  SampleOptions sample;

  auto* sweep = app.add_subcommand("sweep", "Unified number-scale sweep");
  add_common(sweep, common, true);
  auto* ablate = app.add_subcommand("ablate", "BSS ablation grid at one number scale");
  add_common(ablate, common, true);
  auto* train = app.add_subcommand("train", "Train the surrogate and target models");
  add_common(train, common, true);
  auto* attack = app.add_subcommand("attack", "Attack one sample and save the result");
  add_common(attack, common, true);
  add_sample_options(attack, sample, true);
  auto* preview = app.add_subcommand("transform-preview", "Write N transformed copies as PNG");
  add_common(preview, common, false);
  add_sample_options(preview, sample, true);
  auto* saliency = app.add_subcommand("saliency", "Input-gradient saliency maps");
  add_common(saliency, common, true);
  add_sample_options(saliency, sample, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(common, false);
    if (ablate->parsed()) return cmd_sweep(common, true);
    if (train->parsed()) return cmd_train(common);
    if (attack->parsed()) return cmd_attack(common, sample);
    if (preview->parsed()) return cmd_preview(common, sample);
    if (saliency->parsed()) return cmd_saliency(common, sample);
  } catch (const bss::Error& e) {
    std::fprintf(stderr, "bss: %s\n", e.what());
    return 2;
  }
  return 1;
}
