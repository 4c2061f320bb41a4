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

#include "pixmim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "pixmim/image_io.hpp"
#include "pixmim/masking.hpp"
#include "pixmim/recon_loss.hpp"
#include "pixmim/rng.hpp"
#include "pixmim/sample.hpp"

namespace pixmim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<fs::path> list_files(const fs::path& dir, const char* what) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw DataError(std::string("cannot read ") + what + " directory " + dir.string());
  }
  std::vector<fs::path> files;
  fs::directory_iterator it(dir, ec);
  if (ec) throw DataError(std::string("cannot read ") + what + " directory " + dir.string());
  for (const auto& entry : it) {
    if (entry.is_regular_file(ec)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

void open_csv(std::ofstream& out, const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  out.open(file, std::ios::trunc);
  if (!out) throw DataError("cannot open " + file.string() + " for writing");
}

Image synthetic_image(int height, int width, std::uint64_t seed) {
  Rng rng(seed);
  Image img(height, width, 3);
  for (double& v : img.data()) v = rng.uniform();
  return img;
}

}  // namespace

std::size_t Manifest::with_masks() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.mask.has_value(); }));
}

Manifest scan_manifest(const fs::path& input_dir, const std::optional<fs::path>& mask_dir) {
  Manifest manifest;
  std::map<std::string, std::size_t> by_stem;
  for (const auto& file : list_files(input_dir, "input")) {
    if (sniff_format(file) == ImageFormat::kUnknown) {
      manifest.skipped.push_back(file);
      manifest.warnings.push_back("skipping " + file.filename().string() + ": not a PNG or JPEG");
      continue;
    }
    const std::string stem = file.stem().string();
    if (by_stem.count(stem) != 0) {
      manifest.skipped.push_back(file);
      manifest.warnings.push_back("skipping " + file.filename().string() + ": duplicate stem '" +
                                  stem + "'");
      continue;
    }
    by_stem[stem] = manifest.entries.size();
    manifest.entries.push_back({stem, file, std::nullopt});
  }
  if (mask_dir) {
    for (const auto& file : list_files(*mask_dir, "mask")) {
      if (sniff_format(file) != ImageFormat::kPng) {
        manifest.skipped.push_back(file);
        manifest.warnings.push_back("skipping mask " + file.filename().string() + ": not a PNG");
        continue;
      }
      const auto it = by_stem.find(file.stem().string());
      if (it == by_stem.end() || manifest.entries[it->second].mask) {
        manifest.unpaired_masks.push_back(file);
        manifest.warnings.push_back("mask " + file.filename().string() + " has no matching image");
        continue;
      }
      manifest.entries[it->second].mask = file;
    }
  }
  if (manifest.entries.empty()) {
    manifest.warnings.push_back("no PNG or JPEG images found in " + input_dir.string());
  }
  return manifest;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          stop.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

GenSummary cmd_gen_targets(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  if (config.output_dir.empty()) throw ConfigError("gen-targets needs output_dir");
  const Manifest manifest = scan_manifest(config.input_dir, config.mask_dir);
  for (const auto& w : manifest.warnings) log << "warning: " << w << '\n';
  fs::create_directories(config.output_dir);

  const std::size_t n = manifest.entries.size();
  std::vector<std::string> errors(n);
  const bool needs_mask = config.augment.kind == AugmentKind::kBg;
  parallel_for(n, resolve_threads(config.threads), [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    try {
      const Image img = load_image(entry.image);
      std::optional<ForegroundMask> fg;
      if (needs_mask) {
        if (!entry.mask) throw DataError("bg augmentation needs a mask for " + entry.id);
        fg = load_foreground(*entry.mask);
      }
      const SampleRecord sample =
          make_sample(config, img, derive_seed(config.seed, i), fg ? &*fg : nullptr, entry.id);
      write_sample(config.output_dir, sample);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  });

  GenSummary summary;
  json samples = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    json item = {{"index", i},
                 {"id", entry.id},
                 {"source", entry.image.filename().string()},
                 {"seed", derive_seed(config.seed, i)},
                 {"mask", entry.mask ? json(entry.mask->filename().string()) : json(nullptr)}};
    if (errors[i].empty()) {
      item["status"] = "ok";
      ++summary.written;
    } else {
      item["status"] = "failed";
      item["error"] = errors[i];
      ++summary.failed;
      summary.failures.push_back(entry.id + ": " + errors[i]);
      log << "warning: " << entry.id << ": " << errors[i] << '\n';
    }
    samples.push_back(std::move(item));
  }
  json echo = config_to_json(config);
  for (const char* key : {"input_dir", "mask_dir", "output_dir", "threads"}) echo.erase(key);
  json skipped = json::array();
  for (const auto& p : manifest.skipped) skipped.push_back(p.filename().string());
  json unpaired = json::array();
  for (const auto& p : manifest.unpaired_masks) unpaired.push_back(p.filename().string());
  write_json(config.output_dir / "manifest.json",
             {{"config", echo},
              {"samples", samples},
              {"skipped", skipped},
              {"unpaired_masks", unpaired},
              {"written", summary.written},
              {"failed", summary.failed}});
  log << "gen-targets: wrote " << summary.written << " samples, " << summary.failed
      << " failed, " << manifest.skipped.size() << " skipped\n";
  return summary;
}

std::vector<BandProfileAccumulator::Row> cmd_analyze_frequency(
    const fs::path& ref_dir, const fs::path& cand_dir, const std::optional<std::vector<double>>& edges,
    const fs::path& out_csv, int threads, std::ostream& log) {
  const Manifest ref = scan_manifest(ref_dir);
  const Manifest cand = scan_manifest(cand_dir);
  std::map<std::string, fs::path> cand_by_id;
  for (const auto& e : cand.entries) cand_by_id[e.id] = e.image;
  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& e : ref.entries) {
    const auto it = cand_by_id.find(e.id);
    if (it != cand_by_id.end()) pairs.emplace_back(e.image, it->second);
  }
  if (pairs.empty()) {
    throw DataError("no reference/candidate pairs with matching stems in " + ref_dir.string() +
                    " and " + cand_dir.string());
  }

  std::vector<ImageDims> dims(pairs.size());
  double max_radius = 0.0;
  int max_h = 0;
  int max_w = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      dims[i] = read_image_dims(pairs[i].first);
      max_radius = std::max(max_radius, max_bin_radius(dims[i].height, dims[i].width));
      max_h = std::max(max_h, dims[i].height);
      max_w = std::max(max_w, dims[i].width);
    } catch (const DecodeError& e) {
      log << "warning: " << e.what() << '\n';
    }
  }
  std::vector<double> band_edges;
  if (edges) {
    band_edges = *edges;
    if (band_edges.empty() || !(band_edges.back() > max_radius)) {
      throw std::invalid_argument("band edges must extend past the largest spectrum radius " +
                                  general(max_radius));
    }
  } else {
    band_edges = default_band_edges(max_h, max_w);
  }

  std::vector<std::optional<BandProfile>> profiles(pairs.size());
  std::vector<std::string> errors(pairs.size());
  parallel_for(pairs.size(), resolve_threads(threads), [&](std::size_t i) {
    try {
      const Image a = load_image(pairs[i].first);
      const Image b = load_image(pairs[i].second);
      if (!a.same_shape(b)) throw DataError("shape mismatch for " + pairs[i].first.stem().string());
      profiles[i] = band_psnr(a, b, band_edges);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  BandProfileAccumulator acc(band_edges);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (profiles[i]) {
      acc.add(*profiles[i]);
    } else {
      log << "warning: " << errors[i] << '\n';
    }
  }
  if (acc.count() == 0) throw DataError("no image pair could be analyzed");

  std::ofstream out;
  open_csv(out, out_csv);
  out << "band_lo,band_hi,mean_psnr,n_finite\n";
  const auto rows = acc.rows();
  for (const auto& row : rows) {
    out << general(row.lo) << ',' << general(row.hi) << ','
        << (row.n_finite == 0 ? std::string("inf") : fixed(row.mean_psnr)) << ',' << row.n_finite
        << '\n';
  }
  log << "analyze-frequency: " << acc.count() << " pairs, " << rows.size() << " bands\n";
  return rows;
}

std::vector<CoverageRow> cmd_analyze_coverage(const PipelineConfig& config,
                                              const std::vector<AugmentKind>& kinds,
                                              const fs::path& out_csv, bool pooled,
                                              std::ostream& log) {
  config.validate();
  if (kinds.empty()) throw std::invalid_argument("no augmentation kinds requested");
  if (!config.mask_dir) throw DataError("analyze-coverage needs mask_dir in the config");
  const Manifest manifest = scan_manifest(config.input_dir, config.mask_dir);
  for (const auto& w : manifest.warnings) log << "warning: " << w << '\n';
  if (manifest.with_masks() == 0) throw DataError("no image has a matching foreground mask");

  const int res = config.augment.train_resolution;
  const PatchGrid grid = PatchGrid::for_image(res, res, config.patch_size);
  const std::size_t n = manifest.entries.size();
  const std::size_t k = kinds.size();
  // [image][kind] -> (crop, masked)
  std::vector<std::vector<std::pair<CoverageCount, CoverageCount>>> results(n);
  std::vector<std::string> errors(n);

  parallel_for(n, resolve_threads(config.threads), [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    if (!entry.mask) return;
    try {
      const ForegroundMask fg = load_foreground(*entry.mask);
      const ImageDims dims = read_image_dims(entry.image);
      if (dims.height != fg.height() || dims.width != fg.width()) {
        throw DataError("mask for " + entry.id + " does not match the image size");
      }
      const std::uint64_t seed = derive_seed(config.seed, i);
      const MaskPattern mask = random_mask(grid, config.mask_ratio, mask_seed(seed));
      std::vector<std::pair<CoverageCount, CoverageCount>> row;
      for (AugmentKind kind : kinds) {
        AugmentSpec spec = config.augment;
        spec.kind = kind;
        const AugmentPlan plan = plan_augment(fg.height(), fg.width(), spec, augment_seed(seed), &fg);
        row.emplace_back(count_crop(fg, plan.geometry),
                         MaskedCoverage(fg, plan.geometry, grid).count(mask));
      }
      results[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<CoverageRow> rows;
  for (std::size_t kk = 0; kk < k; ++kk) {
    for (bool masked : {false, true}) {
      std::vector<std::optional<double>> values;
      std::vector<CoverageCount> counts;
      for (std::size_t i = 0; i < n; ++i) {
        if (results[i].empty()) continue;
        const CoverageCount& c = masked ? results[i][kk].second : results[i][kk].first;
        values.push_back(c.fraction());
        counts.push_back(c);
      }
      if (values.empty()) throw DataError("no image with a mask could be analyzed");
      std::string label = std::string(to_string(kinds[kk])) + (masked ? "+mask" : "");
      CoverageReport report;
      try {
        report = aggregate(values, label);
      } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
      }
      rows.push_back({kinds[kk], masked, report, pooled_coverage(counts)});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) log << "warning: " << manifest.entries[i].id << ": " << errors[i] << '\n';

  std::ofstream out;
  open_csv(out, out_csv);
  out << "kind,masked,mean_J,std_J,n\n";
  for (const auto& row : rows) {
    out << to_string(row.kind) << ',' << (row.masked ? "true" : "false") << ','
        << fixed(pooled ? row.pooled : row.report.mean) << ',' << fixed(row.report.stddev) << ','
        << row.report.count << '\n';
    if (row.report.not_applicable > 0) {
      log << "note: " << row.report.label << ": " << row.report.not_applicable
          << " images without foreground excluded\n";
    }
  }
  log << "analyze-coverage: " << rows.size() << " rows\n";
  return rows;
}

PreviewResult cmd_preview(const PipelineConfig& config, const fs::path& image,
                          const fs::path& out_dir, bool check, std::ostream& log) {
  config.validate();
  const Image img = load_image(image);
  std::optional<ForegroundMask> fg;
  if (config.augment.kind == AugmentKind::kBg) {
    if (!config.mask_dir) throw DataError("bg preview needs mask_dir in the config");
    fg = load_foreground(*config.mask_dir / (image.stem().string() + ".png"));
  }
  fs::create_directories(out_dir);
  const SampleRecord sample = make_sample(config, img, derive_seed(config.seed, 0),
                                          fg ? &*fg : nullptr, image.stem().string());
  const Image& augmented = sample.augment.output;
  const int res = config.augment.train_resolution;
  const PatchGrid grid = sample.mask.grid;
  const Image target = unpatchify(sample.targets, grid, augmented.channels());

  save_png(out_dir / "original.png", img);
  save_png(out_dir / "augmented.png", augmented);
  save_png(out_dir / "masked.png", apply_mask(augmented, sample.mask, config.preview_fill));
  save_png(out_dir / "target.png", target);
  const std::vector<std::size_t> shape{static_cast<std::size_t>(augmented.channels()),
                                       static_cast<std::size_t>(res), static_cast<std::size_t>(res)};
  write_f32_tensor(out_dir / "augmented.f32", augmented.data(), shape, "augmented image, CHW");
  write_f32_tensor(out_dir / "target.f32", target.data(), shape, "reconstruction target, CHW");

  const auto edges = default_band_edges(res, res);
  const BandDecomposition bands = band_decompose(augmented, edges);
  Image sum = bands.residual;
  const auto write_band = [&](const std::string& name, const Image& component, json extra) {
    Image shown = component;
    for (double& v : shown.data()) v += 0.5;
    save_png(out_dir / (name + ".png"), shown);
    write_f32_tensor(out_dir / (name + ".f32"), component.data(), shape,
                     "frequency band component, CHW", std::move(extra));
  };
  for (std::size_t b = 0; b < bands.components.size(); ++b) {
    char name[32];
    std::snprintf(name, sizeof(name), "band_%02zu", b);
    write_band(name, bands.components[b], {{"band_lo", edges[b]}, {"band_hi", edges[b + 1]}});
    auto s = sum.data();
    auto c = bands.components[b].data();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c[i];
  }
  write_band("band_residual", bands.residual, {{"band_lo", edges.back()}});

  PreviewResult result;
  result.masked_patches = sample.mask.masked_count();
  auto s = sum.data();
  auto a = augmented.data();
  for (std::size_t i = 0; i < s.size(); ++i)
    result.band_sum_error = std::max(result.band_sum_error, std::abs(s[i] - a[i]));
  write_json(out_dir / "preview.json",
             {{"augment", augment_record_json(sample.augment)},
              {"masked_patches", result.masked_patches},
              {"visible_patches", sample.mask.visible_count()},
              {"band_edges", edges},
              {"band_sum_max_abs_error", result.band_sum_error}});
  log << "preview: " << result.masked_patches << " masked patches, band sum error "
      << result.band_sum_error << '\n';
  if (check && !(result.band_sum_error <= 1e-4)) {
    throw DataError("band components do not sum to the augmented image (max error " +
                    general(result.band_sum_error) + ")");
  }
  return result;
}

json cmd_bench(const PipelineConfig& config, int n_images, bool include_naive) {
  config.validate();
  if (n_images < 1) throw std::invalid_argument("bench needs at least one image");
  const int res = config.augment.train_resolution;
  const PatchGrid grid = PatchGrid::for_image(res, res, config.patch_size);
  double t_augment = 0.0;
  double t_mask = 0.0;
  double t_target = 0.0;
  double t_patchify = 0.0;
  AugmentSpec spec = config.augment;
  if (spec.kind == AugmentKind::kBg) spec.kind = AugmentKind::kRrc;  // no masks in bench

  // Synthetic sources are generated up front so timing covers the pipeline only.
  constexpr int kSourceCount = 4;
  std::vector<Image> sources;
  for (int s = 0; s < kSourceCount; ++s) sources.push_back(synthetic_image(375, 500, derive_seed(config.seed, s)));

  const auto total_start = Clock::now();
  for (int i = 0; i < n_images; ++i) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    auto t0 = Clock::now();
    const AugmentRecord rec = apply_augment(sources[i % kSourceCount], spec, augment_seed(seed));
    t_augment += seconds_since(t0);
    t0 = Clock::now();
    const MaskPattern mask = random_mask(grid, config.mask_ratio, mask_seed(seed));
    const VisiblePatches visible = extract_visible(rec.output, mask);
    t_mask += seconds_since(t0);
    t0 = Clock::now();
    const Image target = make_target(rec.output, config.bandwidth);
    t_target += seconds_since(t0);
    t0 = Clock::now();
    const Patches patches = patchify(target, grid);
    t_patchify += seconds_since(t0);
    if (patches.count != static_cast<std::size_t>(grid.count()) || visible.indices.size() > patches.count) {
      throw std::logic_error("bench produced inconsistent sample");
    }
  }
  const double total = seconds_since(total_start);

  json report = {
      {"n_images", n_images},
      {"train_resolution", res},
      {"total_seconds", total},
      {"images_per_sec", total > 0.0 ? n_images / total : 0.0},
      {"stages",
       {{"augment", t_augment}, {"mask", t_mask}, {"target", t_target}, {"patchify", t_patchify}}},
  };

  const double bandwidth = config.bandwidth.value_or(std::min(40.0, res / 2.0));
  Image probe = synthetic_image(res, res, config.seed);
  Image gray(res, res, 1, std::vector<double>(probe.plane(0).begin(), probe.plane(0).end()));
  auto t0 = Clock::now();
  const Image fast = low_freq_target(gray, bandwidth);
  const double fft_seconds = seconds_since(t0);
  json cmp = {{"resolution", res}, {"channels", 1}, {"bandwidth", bandwidth}, {"fft_seconds", fft_seconds}};
  if (include_naive) {
    t0 = Clock::now();
    const Image slow = low_freq_target_naive(gray, bandwidth);
    const double naive_seconds = seconds_since(t0);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i)
      max_diff = std::max(max_diff, std::abs(fast.data()[i] - slow.data()[i]));
    cmp["naive_seconds"] = naive_seconds;
    cmp["speedup"] = fft_seconds > 0.0 ? naive_seconds / fft_seconds : 0.0;
    cmp["max_abs_difference"] = max_diff;
  } else {
    cmp["naive_seconds"] = nullptr;
    cmp["speedup"] = nullptr;
  }
  report["fft_vs_naive"] = cmp;
  return report;
}

}  // namespace pixmim
