// Copyright 2026 The pixmim Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pixmim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <string_view>
#include <thread>


namespace pixmim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || key == k;
    if (!found) throw ConfigError("unknown config key '" + std::string(where) + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Interval read_interval(const json& obj, const char* key, Interval fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(std::string("config key '") + key + "' must be a [lo, hi] pair");
  }
  return Interval{v[0].get<double>(), v[1].get<double>()};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

AugmentSpec augment_from_json(const json& obj) {
  reject_unknown(obj, "augment",
                 {"kind", "train_resolution", "rrc_scale", "rrc_aspect", "src_pad",
                  "bg_threshold", "bg_retries", "horizontal_flip_prob", "interpolation",
                  "align_corners"});
  AugmentSpec spec;
  if (obj.contains("kind")) {
    try {
      spec.kind = parse_augment_kind(obj.at("kind").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("augment.kind: ") + e.what());
    }
  }
  read(obj, "train_resolution", spec.train_resolution);
  spec.rrc_scale = read_interval(obj, "rrc_scale", spec.rrc_scale);
  spec.rrc_aspect = read_interval(obj, "rrc_aspect", spec.rrc_aspect);
  read(obj, "src_pad", spec.src_pad);
  read(obj, "bg_threshold", spec.bg_threshold);
  read(obj, "bg_retries", spec.bg_retries);
  read(obj, "horizontal_flip_prob", spec.horizontal_flip_prob);
  if (obj.contains("interpolation")) {
    std::string mode;
    read(obj, "interpolation", mode);
    if (mode == "bilinear") {
      spec.resize.mode = Interpolation::kBilinear;
    } else if (mode == "bicubic") {
      spec.resize.mode = Interpolation::kBicubic;
    } else {
      throw ConfigError("augment.interpolation must be 'bilinear' or 'bicubic'");
    }
  }
  read(obj, "align_corners", spec.resize.align_corners);
  return spec;
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    augment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("augment: ") + e.what());
  }
  if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) {
    throw ConfigError("mask_ratio must lie in [0, 1]");
  }
  if (patch_size < 1) throw ConfigError("patch_size must be positive");
  if (augment.train_resolution % patch_size != 0) {
    throw ConfigError("train_resolution " + std::to_string(augment.train_resolution) +
                      " is not divisible by patch_size " + std::to_string(patch_size));
  }
  if (bandwidth) {
    const double limit = augment.train_resolution / 2.0;
    if (!(*bandwidth >= 0.0 && *bandwidth <= limit)) {
      throw ConfigError("bandwidth must lie in [0, " + std::to_string(limit) + "]");
    }
  }
  if (!(loss.eps > 0.0)) throw ConfigError("loss.eps must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
}

PipelineConfig config_from_json(const json& doc, const fs::path& base_dir) {
  reject_unknown(doc, "config",
                 {"augment", "mask_ratio", "bandwidth", "patch_size", "loss", "seed", "input_dir",
                  "mask_dir", "output_dir", "threads", "preview_fill"});
  PipelineConfig config;
  if (doc.contains("augment")) config.augment = augment_from_json(doc.at("augment"));
  read(doc, "mask_ratio", config.mask_ratio);
  if (doc.contains("bandwidth")) {
    const json& bw = doc.at("bandwidth");
    if (bw.is_null()) {
      config.bandwidth.reset();
    } else if (bw.is_number()) {
      config.bandwidth = bw.get<double>();
    } else {
      throw ConfigError("bandwidth must be a number or null (pass-through)");
    }
  }
  read(doc, "patch_size", config.patch_size);
  if (doc.contains("loss")) {
    const json& loss = doc.at("loss");
    reject_unknown(loss, "loss", {"distance", "normalize_per_patch", "eps"});
    if (loss.contains("distance")) {
      std::string name;
      read(loss, "distance", name);
      try {
        config.loss.distance = parse_distance(name);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("loss.distance: ") + e.what());
      }
    }
    read(loss, "normalize_per_patch", config.loss.normalize_per_patch);
    read(loss, "eps", config.loss.eps);
  }
  read(doc, "seed", config.seed);
  std::string path;
  if (doc.contains("input_dir")) {
    read(doc, "input_dir", path);
    config.input_dir = resolve(base_dir, path);
  }
  if (doc.contains("mask_dir") && !doc.at("mask_dir").is_null()) {
    read(doc, "mask_dir", path);
    config.mask_dir = resolve(base_dir, path);
  }
  if (doc.contains("output_dir")) {
    read(doc, "output_dir", path);
    config.output_dir = resolve(base_dir, path);
  }
  read(doc, "threads", config.threads);
  read(doc, "preview_fill", config.preview_fill);
  config.validate();
  return config;
}

json config_to_json(const PipelineConfig& config) {
  const AugmentSpec& a = config.augment;
  json doc;
  doc["augment"] = {
      {"kind", std::string(to_string(a.kind))},
      {"train_resolution", a.train_resolution},
      {"rrc_scale", {a.rrc_scale.lo, a.rrc_scale.hi}},
      {"rrc_aspect", {a.rrc_aspect.lo, a.rrc_aspect.hi}},
      {"src_pad", a.src_pad},
      {"bg_threshold", a.bg_threshold},
      {"bg_retries", a.bg_retries},
      {"horizontal_flip_prob", a.horizontal_flip_prob},
      {"interpolation", a.resize.mode == Interpolation::kBicubic ? "bicubic" : "bilinear"},
      {"align_corners", a.resize.align_corners},
  };
  doc["mask_ratio"] = config.mask_ratio;
  doc["bandwidth"] = config.bandwidth ? json(*config.bandwidth) : json(nullptr);
  doc["patch_size"] = config.patch_size;
  doc["loss"] = {{"distance", std::string(to_string(config.loss.distance))},
                 {"normalize_per_patch", config.loss.normalize_per_patch},
                 {"eps", config.loss.eps}};
  doc["seed"] = config.seed;
  if (!config.input_dir.empty()) doc["input_dir"] = config.input_dir.string();
  if (config.mask_dir) doc["mask_dir"] = config.mask_dir->string();
  if (!config.output_dir.empty()) doc["output_dir"] = config.output_dir.string();
  doc["threads"] = config.threads;
  doc["preview_fill"] = config.preview_fill;
  return doc;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

int resolve_threads(int configured) {
  if (const char* env = std::getenv("PIXMIM_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace pixmim
