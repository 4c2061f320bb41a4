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

// pixmim: batch target generation and diagnostics.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pixmim/commands.hpp"
#include "pixmim/image_io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<double> parse_edges(const std::string& text) {
  std::vector<double> edges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad band edge '" + item + "'");
    edges.push_back(v);
  }
  return edges;
}

std::vector<pixmim::AugmentKind> parse_kinds(const std::string& text) {
  std::vector<pixmim::AugmentKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) kinds.push_back(pixmim::parse_augment_kind(item));
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-frequency target generation and masked-image-modeling diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string ref_dir;
  std::string cand_dir;
  std::string edges_text;
  std::string kinds_text = "src,rrc,cc,bg";
  std::string image_path;
  int threads = 0;
  int n_images = 100;
  bool pooled = false;
  bool check = false;
  bool skip_naive = false;

  auto* gen = app.add_subcommand("gen-targets", "Write augmented samples, masks and targets");
  gen->add_option("--config", config_path, "Pipeline config JSON")->required();

  auto* freq = app.add_subcommand("analyze-frequency", "Mean PSNR per frequency band");
  freq->add_option("--ref", ref_dir, "Reference image directory")->required();
  freq->add_option("--cand", cand_dir, "Candidate image directory")->required();
  freq->add_option("--out", out, "Output CSV")->required();
  freq->add_option("--edges", edges_text, "Comma-separated band edges, starting at 0");
  freq->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* cov = app.add_subcommand("analyze-coverage", "Object coverage per augmentation");
  cov->add_option("--config", config_path, "Pipeline config JSON (needs mask_dir)")->required();
  cov->add_option("--out", out, "Output CSV")->required();
  cov->add_option("--kinds", kinds_text, "Comma-separated augmentation kinds");
  cov->add_flag("--pooled", pooled, "Report pooled retained/total instead of per-image mean");

  auto* prev = app.add_subcommand("preview", "Render one sample and its frequency bands");
  prev->add_option("--config", config_path, "Pipeline config JSON")->required();
  prev->add_option("--image", image_path, "Input image")->required();
  prev->add_option("--out", out, "Output directory")->required();
  prev->add_flag("--check", check, "Fail if the bands do not sum to the image");

  auto* bench = app.add_subcommand("bench", "Pipeline throughput on synthetic images");
  bench->add_option("--config", config_path, "Pipeline config JSON")->required();
  bench->add_option("-n", n_images, "Number of images")->check(CLI::PositiveNumber);
  bench->add_flag("--skip-naive", skip_naive, "Skip the direct DFT comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto summary = pixmim::cmd_gen_targets(pixmim::load_config(config_path), std::cerr);
      return summary.failed == 0 ? 0 : kExitData;
    }
    if (freq->parsed()) {
      std::optional<std::vector<double>> edges;
      if (!edges_text.empty()) edges = parse_edges(edges_text);
      pixmim::cmd_analyze_frequency(ref_dir, cand_dir, edges, out, threads, std::cerr);
      return 0;
    }
    if (cov->parsed()) {
      pixmim::cmd_analyze_coverage(pixmim::load_config(config_path), parse_kinds(kinds_text), out,
                                   pooled, std::cerr);
      return 0;
    }
    if (prev->parsed()) {
      pixmim::cmd_preview(pixmim::load_config(config_path), image_path, out, check, std::cerr);
      return 0;
    }
    if (bench->parsed()) {
      std::cout << pixmim::cmd_bench(pixmim::load_config(config_path), n_images, !skip_naive).dump(2)
                << '\n';
      return 0;
    }
  } catch (const pixmim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pixmim::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const pixmim::DecodeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
