// Copyright 2026 The vidaudit Authors
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

// Publication side of the audit: noise every sample, rank samples by how
// much the noise moves an evaluation model, carve the candidate pool into
// reference and modification sets, and assemble the published dataset D
// and its retained complement U.
//
//   D = modified(modification) + original(reference + remaining)
//   U = original(modification) + modified(reference + remaining)

#ifndef VIDAUDIT_PIPELINE_H_
#define VIDAUDIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vidaudit/config.h"
#include "vidaudit/errors.h"
#include "vidaudit/oracle.h"
#include "vidaudit/video.h"

namespace vidaudit {

struct Sample {
  std::string id;  // [A-Za-z0-9_.-]+, unique within a dataset
  int label = 0;
  VideoTensor video;
};

using Dataset = std::vector<Sample>;

// Throws ConfigError unless `id` is a non-empty [A-Za-z0-9_.-]+ string.
void ValidateSampleId(std::string_view id);

// Perlin seed of one sample; lets the owner regenerate any modified variant
// from the master seed instead of storing it.
uint64_t SampleNoiseSeed(uint64_t noise_seed, std::string_view sample_id);

// Modified variant of one sample under `cfg`.
VideoTensor ModifyVideo(const VideoTensor& video, std::string_view sample_id,
                        const AuditConfig& cfg);

// Q_i = InjectNoise(O_i, field_i, epsilon) with field_i seeded per sample.
// Ids and labels are copied unchanged. Errors are rethrown with the sample
// id prefixed to the message.
Dataset ModifyDataset(const Dataset& original, const AuditConfig& cfg,
                      int jobs = 1);

// delta_m[i] = score(M(O_i)) - score(M(Q_i)) on the true label, querying
// "<id>:original" and "<id>:modified". Throws ScoringError (carrying the
// number of samples scored) when the oracle fails.
std::vector<double> ScoreSamples(const Oracle& model, const Dataset& original,
                                 const Dataset& modified, int num_classes,
                                 int jobs = 1);

class ScoringError : public QueryError {
 public:
  ScoringError(const std::string& message, size_t completed)
      : QueryError(message), completed_(completed) {}
  // Samples whose score was computed before the failure.
  size_t completed() const { return completed_; }

 private:
  size_t completed_;
};

enum class Assignment { kModification, kReference, kRemaining };

std::string_view AssignmentName(Assignment a);
Assignment ParseAssignment(std::string_view name);

struct ManifestEntry {
  std::string id;
  int label = 0;
  Assignment assignment = Assignment::kRemaining;
  bool candidate = false;
  std::optional<double> delta_m;  // absent without an evaluation model
  uint64_t noise_seed = 0;

  // Published variant: modified exactly for the modification set.
  Variant published_variant() const {
    return assignment == Assignment::kModification ? Variant::kModified
                                                   : Variant::kOriginal;
  }
  Variant unpublished_variant() const {
    return published_variant() == Variant::kModified ? Variant::kOriginal
                                                     : Variant::kModified;
  }
};

struct SetCounts {
  size_t candidates = 0;
  size_t modification = 0;
  size_t reference = 0;
  size_t remaining = 0;
};

struct DatasetManifest {
  std::string config_hash;
  std::vector<ManifestEntry> entries;

  SetCounts Counts() const;
  const ManifestEntry* Find(std::string_view id) const;
  // Ids of one set, sorted ascending.
  std::vector<std::string> IdsOf(Assignment a) const;

  // {"config_hash", "entries": [{"id", "label", "assignment", "delta_m",
  //  "noise_seed", "candidate"}]}; delta_m is null without an evaluation
  // model.
  nlohmann::json ToJson() const;
  static DatasetManifest FromJson(const nlohmann::json& j);
  void Write(const std::filesystem::path& path) const;
  static DatasetManifest Read(const std::filesystem::path& path);
};

struct SampleInfo {
  std::string id;
  int label = 0;
};

// floor(ratio * n), tolerant of representation error in the ratio.
size_t RatioCount(double ratio, size_t n);

// Candidates are the top floor(r_c N) samples by descending delta_m (ties by
// ascending id); with an empty delta_m they are a seeded uniform sample.
// A seeded shuffle of the candidates puts the first floor(r_r N) into the
// reference set and the next floor(r_m N) into the modification set;
// everything else is remaining. Throws ConfigError when either audit set
// would be empty or delta_m has the wrong length.
DatasetManifest SelectSets(std::span<const double> delta_m,
                           std::span<const SampleInfo> samples,
                           const AuditConfig& cfg);

std::vector<SampleInfo> InfoOf(const Dataset& dataset);

struct PairEntry {
  std::string id;
  int label = 0;
  Assignment assignment = Assignment::kRemaining;
  VideoTensor published;
  VideoTensor unpublished;
  Variant published_variant = Variant::kOriginal;

  const VideoTensor& variant(Variant v) const {
    return v == published_variant ? published : unpublished;
  }
};

// Published dataset D and unpublished dataset U, keyed by manifest entry.
// Entries follow manifest order.
struct DatasetPair {
  std::vector<PairEntry> entries;

  const PairEntry* Find(std::string_view id) const;
  Dataset Published() const;
  Dataset Unpublished() const;
};

// Throws IntegrityError when a manifest id is missing from O or Q or the
// two collections disagree on a label.
DatasetPair BuildPair(const Dataset& original, const Dataset& modified,
                      const DatasetManifest& manifest);

// Rebuilds the pair from published/unpublished directories.
DatasetPair LoadPair(const std::filesystem::path& published_dir,
                     const std::filesystem::path& unpublished_dir,
                     const DatasetManifest& manifest);

// Dataset directory layout: one "<id>.vtr" VTR1 file per sample plus
// labels.json mapping id -> label. Samples are returned sorted by id.
Dataset ReadDatasetDir(const std::filesystem::path& dir);
void WriteDatasetDir(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace vidaudit

#endif  // VIDAUDIT_PIPELINE_H_
