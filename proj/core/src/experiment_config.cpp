// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/experiment_config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bss/error.hpp"

namespace bss {

namespace pt = boost::property_tree;

double parse_real(const std::string& raw) {
  const std::string text = boost::trim_copy(raw);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("expected a number, got '" + raw + "'");
    }
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return number(text);
  const double den = number(boost::trim_copy(text.substr(slash + 1)));
  if (den == 0.0) throw ConfigError("division by zero in '" + raw + "'");
  return number(boost::trim_copy(text.substr(0, slash))) / den;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment",
       {"seed", "dataset", "samples", "surrogate", "targets", "methods", "number_scales", "out",
        "threads", "allow_mixed_n", "record_wall_time"}},
      {"attack", {"epsilon", "iterations", "alpha", "mu", "grad_mode"}},
      {"bss",
       {"pairs", "border_margin", "min_spacing", "ratio", "base_resolution",
        "target_length_mode"}},
      {"baselines", {"scale_depth", "resize_min_scale", "shuffle_grid", "rotate_max_degrees"}},
      {"train",
       {"dataset", "heldout", "epochs", "learning_rate", "batch_size", "momentum", "conv1",
        "conv2", "target_conv1", "target_conv2", "surrogate_seed", "target_seeds", "crop_min_area", "crop_max_aspect", "stretch_pieces", "stretch_limit", "optimizer", "lr_schedule"}},
  };
  return keys;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  boost::split(parts, value, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

long long parse_int(const std::string& raw, const std::string& key) {
  const std::string s = boost::trim_copy(raw);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + raw + "'");
  }
}

std::uint64_t parse_u64(const std::string& raw, const std::string& key) {
  const std::string s = boost::trim_copy(raw);
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + raw + "'");
  }
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = boost::to_lower_copy(boost::trim_copy(raw));
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + raw + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(boost::trim_copy(p));
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

std::string resolve_dataset(const std::filesystem::path& base, const std::string& spec) {
  if (spec.rfind("synthetic:", 0) == 0) return spec;
  const auto parts = split_list(spec);
  if (parts.size() != 2) return spec;
  return resolve(base, parts[0]).string() + "," + resolve(base, parts[1]).string();
}

MethodEntry parse_method_entry(const std::string& text) {
  MethodEntry entry;
  const auto at = text.find('@');
  entry.kind = parse_method_kind(boost::trim_copy(text.substr(0, at)));
  if (at != std::string::npos) {
    entry.fixed_n = static_cast<int>(parse_int(text.substr(at + 1), "methods"));
  }
  return entry;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || body.empty()) {
      throw ConfigError("unknown config section or top-level key '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }

  ExperimentConfig cfg;
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'))) {
      return boost::trim_copy(*v);
    }
    return std::nullopt;
  };

  if (auto v = get("experiment", "seed")) cfg.seed = parse_u64(*v, "seed");
  if (auto v = get("experiment", "dataset")) cfg.dataset = resolve_dataset(base_dir, *v);
  if (auto v = get("experiment", "samples")) cfg.samples = static_cast<int>(parse_int(*v, "samples"));
  if (auto v = get("experiment", "surrogate")) cfg.surrogate = resolve(base_dir, *v);
  if (auto v = get("experiment", "targets")) {
    cfg.targets.clear();
    for (const auto& p : split_list(*v)) cfg.targets.push_back(resolve(base_dir, p));
  }
  if (auto v = get("experiment", "methods")) {
    cfg.methods.clear();
    for (const auto& m : split_list(*v)) cfg.methods.push_back(parse_method_entry(m));
  }
  if (auto v = get("experiment", "number_scales")) {
    cfg.number_scales.clear();
    for (const auto& n : split_list(*v)) {
      cfg.number_scales.push_back(static_cast<int>(parse_int(n, "number_scales")));
    }
  }
  if (auto v = get("experiment", "out")) cfg.out_dir = resolve(base_dir, *v);
  if (auto v = get("experiment", "threads")) cfg.threads = static_cast<int>(parse_int(*v, "threads"));
  if (auto v = get("experiment", "allow_mixed_n")) cfg.allow_mixed_n = parse_bool(*v, "allow_mixed_n");
  if (auto v = get("experiment", "record_wall_time")) {
    cfg.record_wall_time = parse_bool(*v, "record_wall_time");
  }

  if (auto v = get("attack", "epsilon")) cfg.attack.epsilon = parse_real(*v);
  if (auto v = get("attack", "iterations")) {
    cfg.attack.iterations = static_cast<int>(parse_int(*v, "iterations"));
  }
  if (auto v = get("attack", "alpha")) {
    if (boost::to_lower_copy(*v) == "auto") {
      cfg.attack.alpha.reset();
    } else {
      cfg.attack.alpha = parse_real(*v);
    }
  }
  if (auto v = get("attack", "mu")) cfg.attack.mu = parse_real(*v);
  if (auto v = get("attack", "grad_mode")) {
    try {
      cfg.attack.grad_mode = parse_grad_mode(*v);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }

  if (auto v = get("bss", "pairs")) cfg.bss_pairs = static_cast<int>(parse_int(*v, "pairs"));
  if (auto v = get("bss", "border_margin")) {
    cfg.bss_border_margin = static_cast<int>(parse_int(*v, "border_margin"));
  }
  if (auto v = get("bss", "min_spacing")) {
    cfg.bss_min_spacing = static_cast<int>(parse_int(*v, "min_spacing"));
  }
  if (auto v = get("bss", "ratio")) cfg.bss_ratio = parse_real(*v);
  if (auto v = get("bss", "base_resolution")) {
    cfg.base_resolution = static_cast<int>(parse_int(*v, "base_resolution"));
  }
  if (auto v = get("bss", "target_length_mode")) {
    try {
      cfg.target_mode = parse_target_length_mode(*v);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }

  if (auto v = get("baselines", "scale_depth")) {
    cfg.scale_depth = static_cast<int>(parse_int(*v, "scale_depth"));
  }
  if (auto v = get("baselines", "resize_min_scale")) cfg.resize_min_scale = parse_real(*v);
  if (auto v = get("baselines", "shuffle_grid")) {
    cfg.shuffle_grid = static_cast<int>(parse_int(*v, "shuffle_grid"));
  }
  if (auto v = get("baselines", "rotate_max_degrees")) cfg.rotate_max_degrees = parse_real(*v);

  TrainSection& tr = cfg.train;
  if (auto v = get("train", "dataset")) tr.dataset = resolve_dataset(base_dir, *v);
  if (auto v = get("train", "heldout")) tr.heldout = resolve_dataset(base_dir, *v);
  if (auto v = get("train", "epochs")) tr.options.epochs = static_cast<int>(parse_int(*v, "epochs"));
  if (auto v = get("train", "learning_rate")) tr.options.learning_rate = parse_real(*v);
  if (auto v = get("train", "batch_size")) {
    tr.options.batch_size = static_cast<int>(parse_int(*v, "batch_size"));
  }
  if (auto v = get("train", "momentum")) tr.options.momentum = parse_real(*v);
  if (auto v = get("train", "crop_min_area")) tr.options.crop_min_area = parse_real(*v);
  if (auto v = get("train", "crop_max_aspect")) tr.options.crop_max_aspect = parse_real(*v);
  if (auto v = get("train", "optimizer")) {
    const std::string name = boost::to_lower_copy(*v);
    if (name == "sgd") {
      tr.options.optimizer = Optimizer::Sgd;
    } else if (name == "adam") {
      tr.options.optimizer = Optimizer::Adam;
    } else {
      throw ConfigError("unknown optimizer '" + *v + "' (expected sgd|adam)");
    }
  }
  if (auto v = get("train", "lr_schedule")) {
    const std::string name = boost::to_lower_copy(*v);
    if (name != "constant" && name != "cosine") {
      throw ConfigError("unknown lr_schedule '" + *v + "' (expected constant|cosine)");
    }
    tr.options.cosine_decay = name == "cosine";
  }
  if (auto v = get("train", "stretch_pieces")) {
    tr.options.stretch_pieces = static_cast<int>(parse_int(*v, "stretch_pieces"));
  }
  if (auto v = get("train", "stretch_limit")) tr.options.stretch_limit = parse_real(*v);
  if (auto v = get("train", "conv1")) tr.arch.conv1_channels = static_cast<int>(parse_int(*v, "conv1"));
  if (auto v = get("train", "conv2")) tr.arch.conv2_channels = static_cast<int>(parse_int(*v, "conv2"));
  tr.target_arch = tr.arch;
  if (auto v = get("train", "target_conv1")) {
    tr.target_arch.conv1_channels = static_cast<int>(parse_int(*v, "target_conv1"));
  }
  if (auto v = get("train", "target_conv2")) {
    tr.target_arch.conv2_channels = static_cast<int>(parse_int(*v, "target_conv2"));
  }
  if (auto v = get("train", "surrogate_seed")) tr.surrogate_seed = parse_u64(*v, "surrogate_seed");
  if (auto v = get("train", "target_seeds")) {
    tr.target_seeds.clear();
    for (const auto& s : split_list(*v)) tr.target_seeds.push_back(parse_u64(s, "target_seeds"));
  }

  if (cfg.number_scales.empty()) throw ConfigError("number_scales must not be empty");
  for (int n : cfg.number_scales) {
    if (n < 1) throw ConfigError("number scales must be >= 1");
  }
  if (cfg.methods.empty()) throw ConfigError("methods must not be empty");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (cfg.samples < 0) throw ConfigError("samples must be >= 0");
  cfg.attack.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_experiment_config(buffer.str(), path.parent_path());
}

}  // namespace bss
