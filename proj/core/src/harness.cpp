// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "bss/attack.hpp"
#include "bss/checkpoint.hpp"
#include "bss/dataset.hpp"
#include "bss/error.hpp"
#include "bss/image_io.hpp"
#include "bss/parallel.hpp"

namespace bss {

double ResultTable::black_box_mean(const std::string& method, int n) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& row : rows) {
    if (row.method == method && row.n == n && !row.white_box) {
      sum += row.success_rate_pct;
      ++count;
    }
  }
  if (count == 0) throw ArgumentError("no black-box rows for " + method + " at N=" +
                                      std::to_string(n));
  return sum / count;
}

const ResultRow* ResultTable::find(const std::string& method, int n,
                                   const std::string& model) const {
  for (const auto& row : rows) {
    if (row.method == method && row.n == n && row.model == model) return &row;
  }
  return nullptr;
}

std::pair<int, int> scale_parameters(int border_margin, int min_spacing, int base_res,
                                     int target_res, int num_pairs) {
  if (target_res < 8) {
    throw ConfigError("target resolution must be >= 8, got " + std::to_string(target_res));
  }
  if (base_res < 1) throw ConfigError("base resolution must be >= 1");
  if (border_margin < 0 || min_spacing < 0) throw ConfigError("distances must be >= 0");
  auto scale = [&](int d) {
    const double v = static_cast<double>(d) * target_res / base_res;
    return std::max(1, static_cast<int>(std::lround(v)));
  };
  const int db = scale(border_margin);
  const int dp = scale(min_spacing);
  SegmentationConfig seg;
  seg.num_pairs = num_pairs;
  seg.border_margin = db;
  seg.min_spacing = dp;
  if (!is_feasible(seg, target_res)) {
    throw ConfigError("scaled BSS parameters (d_b=" + std::to_string(db) + ", d_p=" +
                      std::to_string(dp) + ", M=" + std::to_string(num_pairs) +
                      ") are infeasible at resolution " + std::to_string(target_res));
  }
  return {db, dp};
}

TrainedModel train_from_config(const TrainSection& section, ConvNetArch arch,
                               std::uint64_t model_seed) {
  const auto data = load_dataset(section.dataset);
  const auto heldout = section.heldout.empty() ? std::vector<LabeledImage>{}
                                               : load_dataset(section.heldout);
  if (data.empty()) throw ConfigError("the training set is empty");
  const Shape shape = data.front().image.shape();
  arch.in_channels = shape.channels;
  arch.height = shape.height;
  arch.width = shape.width;
  Rng init = Rng::substream(model_seed, {1});
  Rng order = Rng::substream(model_seed, {2});
  TinyConvNet model = TinyConvNet::initialized(arch, init);
  const TrainReport report = train(model, data, heldout, section.options, order);
  return {std::move(model), report};
}

ModelSet load_models(const ExperimentConfig& cfg) {
  if (cfg.surrogate.empty()) throw ConfigError("no surrogate checkpoint configured");
  ModelSet set;
  set.surrogate = std::make_unique<TinyConvNet>(load_checkpoint(cfg.surrogate));
  set.surrogate_name = cfg.surrogate.stem().string();
  for (const auto& path : cfg.targets) {
    set.targets.push_back(std::make_unique<TinyConvNet>(load_checkpoint(path)));
    set.target_names.push_back(path.stem().string());
    if (set.targets.back()->arch().input_shape() != set.surrogate->arch().input_shape() ||
        set.targets.back()->num_classes() != set.surrogate->num_classes()) {
      throw ConfigError("target " + path.string() + " does not match the surrogate's input shape");
    }
  }
  std::set<std::string> names{set.surrogate_name};
  for (const auto& n : set.target_names) {
    if (!names.insert(n).second) throw ConfigError("duplicate model name '" + n + "'");
  }
  return set;
}

MethodParams method_params_for(const ExperimentConfig& cfg, const Shape& shape) {
  const int res = std::min(shape.height, shape.width);
  const auto [db, dp] = scale_parameters(cfg.bss_border_margin, cfg.bss_min_spacing,
                                         cfg.base_resolution, res, cfg.bss_pairs);
  MethodParams p;
  p.seg.num_pairs = cfg.bss_pairs;
  p.seg.border_margin = db;
  p.seg.min_spacing = dp;
  p.r = cfg.bss_ratio;
  p.target_mode = cfg.target_mode;
  p.scale_depth = cfg.scale_depth;
  p.resize_min_scale = cfg.resize_min_scale;
  p.shuffle_grid = cfg.shuffle_grid;
  p.rotate_max_degrees = cfg.rotate_max_degrees;
  return p;
}

std::vector<LabeledImage> load_attack_samples(const ExperimentConfig& cfg) {
  auto data = load_dataset(cfg.dataset);
  if (cfg.samples > 0) {
    if (static_cast<std::size_t>(cfg.samples) > data.size()) {
      throw ConfigError("requested " + std::to_string(cfg.samples) + " samples but the dataset has " +
                        std::to_string(data.size()));
    }
    data.resize(cfg.samples);
  }
  if (data.empty()) throw ConfigError("the attack dataset is empty");
  return data;
}

namespace {

struct Cell {
  MethodKind kind;
  int n;
};

struct CellOutcome {
  std::vector<LabeledImage> adversarial;
  std::uint64_t evals = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  float max_linf = 0.0f;
  double wall_ms = 0.0;
};

CellOutcome attack_cell(const ExperimentConfig& cfg, const Classifier& surrogate,
                        const std::vector<LabeledImage>& samples, const TransformMethod& method) {
  CountingClassifier counted(surrogate);
  const float eps = static_cast<float>(cfg.attack.epsilon);
  const std::uint64_t method_key = fnv1a64(method.name());

  CellOutcome out;
  out.adversarial.resize(samples.size());
  std::vector<std::uint64_t> violations(samples.size(), 0);
  std::vector<float> max_linf(samples.size(), 0.0f);

  const auto start = std::chrono::steady_clock::now();
  parallel_for(samples.size(), cfg.threads, [&](std::size_t i) {
    // experiment seed -> method -> sample; iterations and transforms below.
    const Rng stream = Rng::substream(cfg.seed, {method_key, static_cast<std::uint64_t>(i)});
    AttackResult res = run_attack(counted, samples[i], method, cfg.attack, stream);
    for (float v : res.delta_linf) {
      violations[i] += v > eps;
      max_linf[i] = std::max(max_linf[i], v);
    }
    out.adversarial[i] = LabeledImage{std::move(res.adversarial), samples[i].label};
  });
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  out.evals = counted.gradient_evals();
  out.checks = static_cast<std::uint64_t>(samples.size()) * cfg.attack.iterations;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.violations += violations[i];
    out.max_linf = std::max(out.max_linf, max_linf[i]);
  }
  return out;
}

std::vector<int> predictions(const Classifier& model, const std::vector<LabeledImage>& data,
                             int threads) {
  std::vector<int> pred(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) { pred[i] = model.predict(data[i].image); });
  return pred;
}

double fooled_pct(const std::vector<int>& pred, const std::vector<LabeledImage>& data) {
  std::size_t fooled = 0;
  for (std::size_t i = 0; i < data.size(); ++i) fooled += pred[i] != data[i].label;
  return 100.0 * static_cast<double>(fooled) / static_cast<double>(data.size());
}

void validate_inputs(const ExperimentConfig& cfg, const ModelSet& models,
                     const std::vector<LabeledImage>& samples) {
  cfg.attack.validate();
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (!models.surrogate) throw ConfigError("no surrogate model");
  if (samples.empty()) throw ConfigError("no attack samples");
  const Shape shape = models.surrogate->input_shape();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].image.shape() != shape) {
      throw ConfigError("sample " + std::to_string(i) + " has shape " +
                        to_string(samples[i].image.shape()) + " but the surrogate expects " +
                        to_string(shape));
    }
    if (samples[i].label < 0 || samples[i].label >= models.surrogate->num_classes()) {
      throw ConfigError("sample " + std::to_string(i) + " has an out-of-range label");
    }
  }
}

ResultTable run_cells(const ExperimentConfig& cfg, const ModelSet& models,
                      const std::vector<LabeledImage>& samples, const std::vector<Cell>& cells,
                      std::vector<std::string> warnings) {
  validate_inputs(cfg, models, samples);
  const Shape shape = samples.front().image.shape();
  const MethodParams params = method_params_for(cfg, shape);

  // Build and validate every method before the first attack runs.
  std::vector<std::unique_ptr<TransformMethod>> methods;
  for (const auto& cell : cells) {
    methods.push_back(make_method(cell.kind, params, cell.n));
    methods.back()->validate(shape);
  }

  ResultTable table;
  table.warnings = std::move(warnings);
  table.samples = static_cast<int>(samples.size());
  table.iterations = cfg.attack.iterations;
  table.border_margin = params.seg.border_margin;
  table.min_spacing = params.seg.min_spacing;
  table.record_wall_time = cfg.record_wall_time;

  std::vector<const Classifier*> evaluated{models.surrogate.get()};
  std::vector<std::string> names{models.surrogate_name};
  for (std::size_t j = 0; j < models.targets.size(); ++j) {
    evaluated.push_back(models.targets[j].get());
    names.push_back(models.target_names[j]);
  }
  for (std::size_t j = 0; j < evaluated.size(); ++j) {
    table.clean_accuracy.push_back(
        {names[j], 100.0 - fooled_pct(predictions(*evaluated[j], samples, cfg.threads), samples)});
  }

  for (const auto& method : methods) {
    const CellOutcome outcome = attack_cell(cfg, *models.surrogate, samples, *method);
    table.budget_checks += outcome.checks;
    table.budget_violations += outcome.violations;
    table.max_delta_linf = std::max(table.max_delta_linf, outcome.max_linf);
    for (std::size_t j = 0; j < evaluated.size(); ++j) {
      ResultRow row;
      row.method = method->name();
      row.n = method->number_scale();
      row.model = names[j];
      row.white_box = j == 0;
      row.success_rate_pct =
          fooled_pct(predictions(*evaluated[j], outcome.adversarial, cfg.threads),
                     outcome.adversarial);
      row.evals = outcome.evals;
      row.wall_ms = outcome.wall_ms;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace

ResultTable run_sweep(const ExperimentConfig& cfg, const ModelSet& models,
                      const std::vector<LabeledImage>& samples) {
  if (cfg.number_scales.empty()) throw ConfigError("number_scales must not be empty");
  std::vector<Cell> cells;
  std::vector<std::string> warnings;
  std::set<std::pair<MethodKind, int>> seen;
  for (int n : cfg.number_scales) {
    if (n < 1) throw ConfigError("number scales must be >= 1");
    for (const auto& entry : cfg.methods) {
      int cell_n = n;
      if (entry.fixed_n) {
        if (!cfg.allow_mixed_n) {
          throw ConfigError(method_name(entry.kind) + "@" + std::to_string(*entry.fixed_n) +
                            " mixes number scales; set allow_mixed_n = true to permit it");
        }
        if (*entry.fixed_n < 1) throw ConfigError("fixed number scale must be >= 1");
        cell_n = *entry.fixed_n;
        if (cell_n != n) {
          warnings.push_back("mixed number scale: " + method_name(entry.kind) + " runs at N=" +
                             std::to_string(cell_n) + " in the N=" + std::to_string(n) + " cell");
        }
      }
      if (!expands_number_scale(entry.kind)) {
        if (cell_n != 1) {
          warnings.push_back("unified N: " + method_name(entry.kind) +
                             " cannot expand its number scale; reported at N=1 in the N=" +
                             std::to_string(cell_n) + " cell");
        }
        cell_n = 1;
      }
      if (seen.insert({entry.kind, cell_n}).second) cells.push_back({entry.kind, cell_n});
    }
  }
  return run_cells(cfg, models, samples, cells, std::move(warnings));
}

ResultTable run_sweep(const ExperimentConfig& cfg) {
  const ModelSet models = load_models(cfg);
  return run_sweep(cfg, models, load_attack_samples(cfg));
}

ResultTable run_ablation(const ExperimentConfig& cfg, const ModelSet& models,
                         const std::vector<LabeledImage>& samples) {
  if (cfg.number_scales.empty()) throw ConfigError("number_scales must not be empty");
  const int n = cfg.number_scales.front();
  if (n < 1) throw ConfigError("number scale must be >= 1");
  const std::vector<Cell> cells{{MethodKind::None, 1},
                                {MethodKind::Bss1DRandomPoints, n},
                                {MethodKind::Bss1D, n},
                                {MethodKind::BssRandomPoints, n},
                                {MethodKind::Bss, n}};
  std::vector<std::string> warnings;
  if (n != 1) {
    warnings.push_back("unified N: mi-fgsm cannot expand its number scale; reported at N=1 in "
                       "the N=" + std::to_string(n) + " cell");
  }
  return run_cells(cfg, models, samples, cells, std::move(warnings));
}

ResultTable run_ablation(const ExperimentConfig& cfg) {
  const ModelSet models = load_models(cfg);
  return run_ablation(cfg, models, load_attack_samples(cfg));
}

std::string format_csv(const ResultTable& table) {
  std::ostringstream os;
  os << "method,N,model,success_rate_pct,evals,wall_ms\n";
  char rate[32];
  char wall[32];
  for (const auto& row : table.rows) {
    std::snprintf(rate, sizeof rate, "%.2f", row.success_rate_pct);
    std::snprintf(wall, sizeof wall, "%.1f", table.record_wall_time ? row.wall_ms : 0.0);
    os << row.method << ',' << row.n << ',' << row.display_model() << ',' << rate << ','
       << row.evals << ',' << wall << '\n';
  }
  return os.str();
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : cfg.methods) {
    methods.push_back(m.fixed_n ? method_name(m.kind) + "@" + std::to_string(*m.fixed_n)
                                : method_name(m.kind));
  }
  std::vector<std::string> targets;
  for (const auto& t : cfg.targets) targets.push_back(t.string());
  return {
      {"seed", cfg.seed},
      {"dataset", cfg.dataset},
      {"samples", cfg.samples},
      {"surrogate", cfg.surrogate.string()},
      {"targets", targets},
      {"methods", methods},
      {"number_scales", cfg.number_scales},
      {"threads", cfg.threads},
      {"allow_mixed_n", cfg.allow_mixed_n},
      {"attack",
       {{"epsilon", cfg.attack.epsilon},
        {"iterations", cfg.attack.iterations},
        {"alpha", cfg.attack.step_size()},
        {"mu", cfg.attack.mu},
        {"grad_mode", to_string(cfg.attack.grad_mode)}}},
      {"bss",
       {{"pairs", cfg.bss_pairs},
        {"border_margin", cfg.bss_border_margin},
        {"min_spacing", cfg.bss_min_spacing},
        {"ratio", cfg.bss_ratio},
        {"base_resolution", cfg.base_resolution},
        {"target_length_mode", to_string(cfg.target_mode)}}},
      {"baselines",
       {{"scale_depth", cfg.scale_depth},
        {"resize_min_scale", cfg.resize_min_scale},
        {"shuffle_grid", cfg.shuffle_grid},
        {"rotate_max_degrees", cfg.rotate_max_degrees}}},
  };
}

}  // namespace

void write_results(const ResultTable& table, const ExperimentConfig& cfg,
                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  {
    std::ofstream csv(out_dir / "results.csv", std::ios::binary);
    if (!csv) throw IoError("cannot write " + (out_dir / "results.csv").string());
    csv << format_csv(table);
    if (!csv) throw IoError("write failed for " + (out_dir / "results.csv").string());
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"method", row.method},
                    {"N", row.n},
                    {"model", row.model},
                    {"white_box", row.white_box},
                    {"success_rate_pct", row.success_rate_pct},
                    {"evals", row.evals},
                    {"wall_ms", row.wall_ms}});
  }
  nlohmann::json clean = nlohmann::json::object();
  for (const auto& acc : table.clean_accuracy) clean[acc.model] = acc.clean_accuracy_pct;

  const nlohmann::json doc = {
      {"config", config_echo(cfg)},
      {"scaled_bss", {{"border_margin", table.border_margin}, {"min_spacing", table.min_spacing}}},
      {"environment",
       {{"compiler", __VERSION__},
        {"cplusplus", __cplusplus},
        {"hardware_concurrency", std::thread::hardware_concurrency()}}},
      {"written_at", utc_timestamp()},
      {"samples", table.samples},
      {"iterations", table.iterations},
      {"clean_accuracy_pct", clean},
      {"budget",
       {{"checks", table.budget_checks},
        {"violations", table.budget_violations},
        {"max_delta_linf", table.max_delta_linf}}},
      {"warnings", table.warnings},
      {"rows", rows},
  };
  std::ofstream json(out_dir / "results.json");
  if (!json) throw IoError("cannot write " + (out_dir / "results.json").string());
  json << doc.dump(2) << '\n';
}

ImageTensor saliency_map(const Classifier& model, const ImageTensor& img, int label) {
  const LossAndGrad lg = model.loss_and_input_grad(img, label);
  const Shape s = img.shape();
  ImageTensor out(1, s.height, s.width);
  float peak = 0.0f;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      float m = 0.0f;
      for (int c = 0; c < s.channels; ++c) m = std::max(m, std::fabs(lg.grad.at(c, y, x)));
      out.at(0, y, x) = m;
      peak = std::max(peak, m);
    }
  }
  if (peak > 0.0f) {
    for (float& v : out.data()) v /= peak;
  }
  return out;
}

void saliency_dump(const Classifier& model, const ImageTensor& img, int label,
                   const std::filesystem::path& path) {
  write_png(saliency_map(model, img, label), path);
}

}  // namespace bss
