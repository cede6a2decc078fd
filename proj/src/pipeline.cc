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

#include "vidaudit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "vidaudit/errors.h"
#include "vidaudit/hash.h"
#include "vidaudit/parallel.h"
#include "vidaudit/perlin.h"
#include "vidaudit/video_io.h"

namespace vidaudit {
namespace {

using nlohmann::json;

constexpr uint64_t kCandidateStream = 1;
constexpr uint64_t kSplitStream = 2;

// Fisher-Yates driven by the hash of (seed, stream, position), so the
// permutation is identical on every standard library.
template <typename T>
void SeededShuffle(std::vector<T>& items, uint64_t seed, uint64_t stream) {
  for (size_t i = items.size(); i > 1; --i) {
    const uint64_t h = HashWords(seed, stream, uint64_t(i));
    const size_t j = size_t((static_cast<unsigned __int128>(h) * i) >> 64);
    std::swap(items[i - 1], items[j]);
  }
}

std::map<std::string, const Sample*> IndexById(const Dataset& d,
                                               const char* which) {
  std::map<std::string, const Sample*> index;
  for (const Sample& s : d) {
    if (!index.emplace(s.id, &s).second) {
      throw IntegrityError(std::string(which) + " has duplicate id '" + s.id +
                           "'");
    }
  }
  return index;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return j;
}

void WriteJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace

void ValidateSampleId(std::string_view id) {
  const bool ok = !id.empty() && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) ||
                           c == '_' || c == '-' || c == '.';
                  });
  if (!ok) throw ConfigError("invalid sample id '" + std::string(id) + "'");
}

uint64_t SampleNoiseSeed(uint64_t noise_seed, std::string_view sample_id) {
  return HashCombine(noise_seed, HashString(sample_id));
}

VideoTensor ModifyVideo(const VideoTensor& video, std::string_view sample_id,
                        const AuditConfig& cfg) {
  PerlinParams params = cfg.perlin;
  params.seed = SampleNoiseSeed(cfg.noise_seed, sample_id);
  const NoiseField field =
      GenerateField(video.t(), video.h(), video.w(), params);
  return InjectNoise(video, field, cfg.epsilon);
}

Dataset ModifyDataset(const Dataset& original, const AuditConfig& cfg,
                      int jobs) {
  cfg.Validate();
  Dataset out(original.size());
  ParallelFor(original.size(), jobs, [&](size_t i) {
    const Sample& s = original[i];
    try {
      out[i] = Sample{s.id, s.label, ModifyVideo(s.video, s.id, cfg)};
    } catch (const ShapeError& e) {
      throw ShapeError("sample '" + s.id + "': " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("sample '" + s.id + "': " + e.what());
    }
  });
  return out;
}

std::vector<double> ScoreSamples(const Oracle& model, const Dataset& original,
                                 const Dataset& modified, int num_classes,
                                 int jobs) {
  if (original.size() != modified.size()) {
    throw IntegrityError("original and modified datasets differ in size");
  }
  for (size_t i = 0; i < original.size(); ++i) {
    if (original[i].id != modified[i].id ||
        original[i].label != modified[i].label) {
      throw IntegrityError("sample " + std::to_string(i) +
                           " differs between original and modified datasets");
    }
  }
  std::vector<double> delta(original.size());
  std::atomic<size_t> completed{0};
  try {
    ParallelFor(original.size(), jobs, [&](size_t i) {
      const Sample& o = original[i];
      const double p_o = TrueLabelProb(
          model.Query(QueryId(o.id, Variant::kOriginal), o.video), o.label,
          num_classes);
      const double p_q = TrueLabelProb(
          model.Query(QueryId(o.id, Variant::kModified), modified[i].video),
          o.label, num_classes);
      delta[i] = p_o - p_q;
      completed.fetch_add(1);
    });
  } catch (const std::exception& e) {
    throw ScoringError(std::string("scoring aborted after ") +
                           std::to_string(completed.load()) + " of " +
                           std::to_string(original.size()) +
                           " samples: " + e.what(),
                       completed.load());
  }
  return delta;
}

std::string_view AssignmentName(Assignment a) {
  switch (a) {
    case Assignment::kModification:
      return "modification";
    case Assignment::kReference:
      return "reference";
    case Assignment::kRemaining:
      return "remaining";
  }
  return "remaining";
}

Assignment ParseAssignment(std::string_view name) {
  if (name == "modification") return Assignment::kModification;
  if (name == "reference") return Assignment::kReference;
  if (name == "remaining") return Assignment::kRemaining;
  throw FormatError("unknown assignment '" + std::string(name) + "'");
}

SetCounts DatasetManifest::Counts() const {
  SetCounts c;
  for (const ManifestEntry& e : entries) {
    if (e.candidate) ++c.candidates;
    switch (e.assignment) {
      case Assignment::kModification:
        ++c.modification;
        break;
      case Assignment::kReference:
        ++c.reference;
        break;
      case Assignment::kRemaining:
        ++c.remaining;
        break;
    }
  }
  return c;
}

const ManifestEntry* DatasetManifest::Find(std::string_view id) const {
  for (const ManifestEntry& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<std::string> DatasetManifest::IdsOf(Assignment a) const {
  std::vector<std::string> ids;
  for (const ManifestEntry& e : entries) {
    if (e.assignment == a) ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

json DatasetManifest::ToJson() const {
  json list = json::array();
  for (const ManifestEntry& e : entries) {
    list.push_back({{"id", e.id},
                    {"label", e.label},
                    {"assignment", std::string(AssignmentName(e.assignment))},
                    {"candidate", e.candidate},
                    {"delta_m", e.delta_m ? json(*e.delta_m) : json(nullptr)},
                    {"noise_seed", e.noise_seed}});
  }
  return json{{"config_hash", config_hash}, {"entries", std::move(list)}};
}

DatasetManifest DatasetManifest::FromJson(const json& j) {
  try {
    DatasetManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    std::set<std::string> seen;
    for (const json& e : j.at("entries")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      ValidateSampleId(entry.id);
      if (!seen.insert(entry.id).second) {
        throw FormatError("duplicate manifest id '" + entry.id + "'");
      }
      entry.label = e.at("label").get<int>();
      entry.assignment = ParseAssignment(e.at("assignment").get<std::string>());
      entry.candidate = e.value("candidate", false);
      if (const auto d = e.find("delta_m"); d != e.end() && !d->is_null()) {
        entry.delta_m = d->get<double>();
      }
      entry.noise_seed = e.at("noise_seed").get<uint64_t>();
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

void DatasetManifest::Write(const std::filesystem::path& path) const {
  WriteJsonFile(path, ToJson());
}

DatasetManifest DatasetManifest::Read(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path));
}

size_t RatioCount(double ratio, size_t n) {
  return size_t(std::floor(ratio * double(n) + 1e-9));
}

std::vector<SampleInfo> InfoOf(const Dataset& dataset) {
  std::vector<SampleInfo> info;
  info.reserve(dataset.size());
  for (const Sample& s : dataset) info.push_back({s.id, s.label});
  return info;
}

DatasetManifest SelectSets(std::span<const double> delta_m,
                           std::span<const SampleInfo> samples,
                           const AuditConfig& cfg) {
  cfg.Validate();
  const size_t n = samples.size();
  if (!delta_m.empty() && delta_m.size() != n) {
    throw ConfigError("delta_m has " + std::to_string(delta_m.size()) +
                      " values for " + std::to_string(n) + " samples");
  }
  const size_t n_candidates = RatioCount(cfg.r_c, n);
  const size_t n_reference = RatioCount(cfg.r_r, n);
  const size_t n_modification = RatioCount(cfg.r_m, n);
  if (n_modification == 0 || n_reference == 0) {
    throw ConfigError("floor(r_m * |O|) = " + std::to_string(n_modification) +
                      " and floor(r_r * |O|) = " + std::to_string(n_reference) +
                      " for |O| = " + std::to_string(n) +
                      "; both sets must be non-empty");
  }
  if (n_reference + n_modification > n_candidates) {
    throw ConfigError("reference and modification sets do not fit in the " +
                      std::to_string(n_candidates) + " candidates");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (delta_m.empty()) {
    SeededShuffle(order, cfg.selection_seed, kCandidateStream);
  } else {
    for (double v : delta_m) {
      if (!std::isfinite(v)) throw ConfigError("delta_m values must be finite");
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (delta_m[a] != delta_m[b]) return delta_m[a] > delta_m[b];
      return samples[a].id < samples[b].id;
    });
  }
  std::vector<size_t> candidates(order.begin(), order.begin() + n_candidates);
  // Candidate membership does not depend on input order, so neither may the
  // split: shuffle from the id-sorted candidate list.
  std::sort(candidates.begin(), candidates.end(), [&](size_t a, size_t b) {
    return samples[a].id < samples[b].id;
  });
  SeededShuffle(candidates, cfg.selection_seed, kSplitStream);

  DatasetManifest m;
  m.config_hash = cfg.Hash();
  m.entries.resize(n);
  std::set<std::string> seen;
  for (size_t i = 0; i < n; ++i) {
    ValidateSampleId(samples[i].id);
    if (!seen.insert(samples[i].id).second) {
      throw ConfigError("duplicate sample id '" + samples[i].id + "'");
    }
    ManifestEntry& e = m.entries[i];
    e.id = samples[i].id;
    e.label = samples[i].label;
    if (!delta_m.empty()) e.delta_m = delta_m[i];
    e.noise_seed = SampleNoiseSeed(cfg.noise_seed, e.id);
  }
  for (size_t rank = 0; rank < candidates.size(); ++rank) {
    ManifestEntry& e = m.entries[candidates[rank]];
    e.candidate = true;
    if (rank < n_reference) {
      e.assignment = Assignment::kReference;
    } else if (rank < n_reference + n_modification) {
      e.assignment = Assignment::kModification;
    }
  }
  return m;
}

const PairEntry* DatasetPair::Find(std::string_view id) const {
  for (const PairEntry& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Dataset DatasetPair::Published() const {
  Dataset d;
  d.reserve(entries.size());
  for (const PairEntry& e : entries) d.push_back({e.id, e.label, e.published});
  return d;
}

Dataset DatasetPair::Unpublished() const {
  Dataset d;
  d.reserve(entries.size());
  for (const PairEntry& e : entries) d.push_back({e.id, e.label, e.unpublished});
  return d;
}

DatasetPair BuildPair(const Dataset& original, const Dataset& modified,
                      const DatasetManifest& manifest) {
  const auto by_id_o = IndexById(original, "original dataset");
  const auto by_id_q = IndexById(modified, "modified dataset");
  DatasetPair pair;
  pair.entries.reserve(manifest.entries.size());
  for (const ManifestEntry& e : manifest.entries) {
    const auto o = by_id_o.find(e.id);
    const auto q = by_id_q.find(e.id);
    if (o == by_id_o.end() || q == by_id_q.end()) {
      throw IntegrityError("sample '" + e.id + "' missing from " +
                           (o == by_id_o.end() ? "original" : "modified") +
                           " dataset");
    }
    if (o->second->label != e.label || q->second->label != e.label) {
      throw IntegrityError("label of '" + e.id + "' disagrees with manifest");
    }
    PairEntry p;
    p.id = e.id;
    p.label = e.label;
    p.assignment = e.assignment;
    p.published_variant = e.published_variant();
    const bool publish_modified = p.published_variant == Variant::kModified;
    p.published = publish_modified ? q->second->video : o->second->video;
    p.unpublished = publish_modified ? o->second->video : q->second->video;
    pair.entries.push_back(std::move(p));
  }
  return pair;
}

DatasetPair LoadPair(const std::filesystem::path& published_dir,
                     const std::filesystem::path& unpublished_dir,
                     const DatasetManifest& manifest) {
  DatasetPair pair;
  pair.entries.reserve(manifest.entries.size());
  for (const ManifestEntry& e : manifest.entries) {
    const auto pub = published_dir / (e.id + ".vtr");
    const auto unpub = unpublished_dir / (e.id + ".vtr");
    if (!std::filesystem::exists(pub) || !std::filesystem::exists(unpub)) {
      throw IntegrityError("sample '" + e.id +
                           "' missing from published or unpublished directory");
    }
    PairEntry p;
    p.id = e.id;
    p.label = e.label;
    p.assignment = e.assignment;
    p.published_variant = e.published_variant();
    p.published = ReadVtr1File(pub);
    p.unpublished = ReadVtr1File(unpub);
    pair.entries.push_back(std::move(p));
  }
  return pair;
}

Dataset ReadDatasetDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("dataset directory " + dir.string() + " does not exist");
  }
  const json labels = ReadJsonFile(dir / "labels.json");
  if (!labels.is_object()) {
    throw FormatError((dir / "labels.json").string() +
                      " must map sample id -> label");
  }
  Dataset d;
  for (const auto& [id, label] : labels.items()) {
    ValidateSampleId(id);
    if (!label.is_number_integer() || label.get<int>() < 0) {
      throw FormatError("label of '" + id + "' must be a non-negative integer");
    }
    d.push_back({id, label.get<int>(), ReadVtr1File(dir / (id + ".vtr"))});
  }
  // nlohmann::json objects iterate in key order already; keep it explicit.
  std::sort(d.begin(), d.end(),
            [](const Sample& a, const Sample& b) { return a.id < b.id; });
  return d;
}

void WriteDatasetDir(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  json labels = json::object();
  for (const Sample& s : dataset) {
    ValidateSampleId(s.id);
    labels[s.id] = s.label;
    WriteVtr1File(dir / (s.id + ".vtr"), s.video);
  }
  WriteJsonFile(dir / "labels.json", labels);
}

}  // namespace vidaudit
