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

#ifndef PIXMIM_COMMANDS_HPP_
#define PIXMIM_COMMANDS_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "pixmim/augment.hpp"
#include "pixmim/config.hpp"
#include "pixmim/coverage.hpp"
#include "pixmim/frequency.hpp"

namespace pixmim {

/// Problems with the input data (missing pairs, no masks, unreadable dirs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  std::string id;  // file stem
  std::filesystem::path image;
  std::optional<std::filesystem::path> mask;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  /// Mask files whose stem matches no image.
  std::vector<std::filesystem::path> unpaired_masks;
  /// Files that are not PNG/JPEG, or duplicate stems.
  std::vector<std::filesystem::path> skipped;
  std::vector<std::string> warnings;

  std::size_t with_masks() const;
};

/// Lexicographic listing of PNG/JPEG files in `input_dir` (non-recursive),
/// paired with `mask_dir/<stem>.png` when a mask dir is given.
/// Throws DataError when a directory cannot be read.
Manifest scan_manifest(const std::filesystem::path& input_dir,
                       const std::optional<std::filesystem::path>& mask_dir = std::nullopt);

/// Runs fn(i) for i in [0, n) on `threads` workers. The first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct GenSummary {
  std::size_t written = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;
};

/// One SampleRecord per manifest entry, written under config.output_dir, plus
/// a manifest.json. Per-image seeds are derive_seed(config.seed, index).
GenSummary cmd_gen_targets(const PipelineConfig& config, std::ostream& log);

/// Mean band PSNR over reference/candidate pairs matched by stem; writes
/// band_lo,band_hi,mean_psnr,n_finite. Throws DataError if nothing pairs up.
std::vector<BandProfileAccumulator::Row> cmd_analyze_frequency(
    const std::filesystem::path& ref_dir, const std::filesystem::path& cand_dir,
    const std::optional<std::vector<double>>& edges, const std::filesystem::path& out_csv,
    int threads, std::ostream& log);

struct CoverageRow {
  AugmentKind kind;
  bool masked;
  CoverageReport report;
  double pooled;
};

/// Per-kind J and J under masking over every image that has a mask; writes
/// kind,masked,mean_J,std_J,n. With `pooled`, mean_J holds the pooled ratio.
std::vector<CoverageRow> cmd_analyze_coverage(const PipelineConfig& config,
                                              const std::vector<AugmentKind>& kinds,
                                              const std::filesystem::path& out_csv, bool pooled,
                                              std::ostream& log);

struct PreviewResult {
  int masked_patches = 0;
  /// Largest |sum of band components - augmented| over all pixels.
  double band_sum_error = 0.0;
};

/// Writes original/augmented/masked/target renders and per-band components.
/// With `check`, throws DataError if the bands do not sum back within 1e-4.
PreviewResult cmd_preview(const PipelineConfig& config, const std::filesystem::path& image,
                          const std::filesystem::path& out_dir, bool check, std::ostream& log);

/// Throughput of the full pipeline on synthetic images, per-stage timings and
/// the FFT vs direct-DFT target-generation ratio at train resolution.
nlohmann::json cmd_bench(const PipelineConfig& config, int n_images, bool include_naive = true);

}  // namespace pixmim

#endif  // PIXMIM_COMMANDS_HPP_
