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

// vidaudit: publish a noised video dataset and audit suspect models.
//
//   vidaudit modify   --config run.cfg          O -> Q, plus noise seeds
//   vidaudit score    --config run.cfg          delta_m from an eval model
//   vidaudit select   --config run.cfg          manifest, published/, unpublished/
//   vidaudit verify   --config run.cfg          audit report; exit 3 on misuse
//   vidaudit bound    [--config run.cfg]        threshold range and FPR bound
//   vidaudit simulate [--config run.cfg]        synthetic TPR/FPR/F1
//   vidaudit serve    --config run.cfg          /predict server for a table
//                                               or a simulated suspect
//
// Exit codes: 0 success (no_misuse for verify), 3 misuse, 1 error. Errors
// are printed to stderr as one JSON object.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "run_config.h"
#include "vidaudit/errors.h"
#include "vidaudit/oracle.h"
#include "vidaudit/pipeline.h"
#include "vidaudit/predict_server.h"
#include "vidaudit/sim.h"
#include "vidaudit/theory.h"
#include "vidaudit/verify.h"

namespace vidaudit {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMisuse = 3;

struct Flags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::string oracle_url;
  std::string predictions;
  std::string out;
  std::optional<int> quantize_decimals;
  std::optional<int64_t> query_limit;
  std::string mode;
  std::optional<int> top_k;
  std::string scores;
  // simulate / serve
  std::string scenario;
  std::string behavior;
  std::string host = "127.0.0.1";
  int port = 8080;
};

RunConfig LoadRunConfig(const Flags& f) {
  RunConfig rc = f.config.empty() ? RunConfig::FromKeyValues({})
                                  : RunConfig::FromFile(f.config);
  if (f.seed) {
    rc.audit.noise_seed = *f.seed;
    rc.audit.selection_seed = *f.seed;
  }
  if (f.jobs) rc.jobs = *f.jobs;
  if (!f.oracle_url.empty()) rc.oracle_url = f.oracle_url;
  if (!f.predictions.empty()) rc.predictions = fs::path(f.predictions);
  if (!f.out.empty()) rc.out = fs::path(f.out);
  if (!f.scores.empty()) rc.scores = fs::path(f.scores);
  if (f.quantize_decimals) rc.quantize_decimals = *f.quantize_decimals;
  if (f.query_limit) rc.query_limit = *f.query_limit;
  if (!f.mode.empty()) rc.mode = ParseResponseMode(f.mode);
  if (f.top_k) rc.top_k = *f.top_k;
  if (rc.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (rc.quantize_decimals && *rc.quantize_decimals < 0) {
    throw ConfigError("--quantize-decimals must be >= 0");
  }
  if (rc.query_limit && *rc.query_limit < 0) {
    throw ConfigError("--query-limit must be >= 0");
  }
  if (rc.top_k < 1) throw ConfigError("--top-k must be >= 1");
  return rc;
}

const fs::path& RequireOut(const RunConfig& rc) {
  if (!rc.out) throw ConfigError("output path (out / --out) is not set");
  return *rc.out;
}

void WriteJson(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return j;
}

// The oracle named by the run config, with quantization and response-mode
// restriction layered on top.
class OracleStack {
 public:
  explicit OracleStack(const RunConfig& rc) {
    if (rc.predictions && rc.oracle_url) {
      throw ConfigError("set only one of predictions and oracle_url");
    }
    if (rc.predictions) {
      RequireFile(rc.predictions, "predictions");
      layers_.push_back(
          std::make_unique<FileOracle>(FileOracle::FromFile(*rc.predictions)));
    } else if (rc.oracle_url) {
      RemoteOracleOptions opt;
      opt.max_retries = rc.oracle_retries;
      opt.timeout = std::chrono::milliseconds(rc.oracle_timeout_ms);
      layers_.push_back(std::make_unique<RemoteOracle>(*rc.oracle_url, opt));
    } else {
      throw ConfigError("no oracle: set predictions or oracle_url");
    }
    if (rc.quantize_decimals) {
      layers_.push_back(
          std::make_unique<QuantizingOracle>(top(), *rc.quantize_decimals));
    }
    if (rc.mode != ResponseMode::kFull) {
      layers_.push_back(
          std::make_unique<RestrictingOracle>(top(), rc.mode, rc.top_k));
    }
  }

  const Oracle& top() const { return *layers_.back(); }

 private:
  std::vector<std::unique_ptr<Oracle>> layers_;
};

std::vector<double> AlignScores(const json& scores, const Dataset& original) {
  const json* table = &scores;
  if (scores.is_object() && scores.contains("delta_m")) table = &scores["delta_m"];
  if (!table->is_object()) {
    throw FormatError("scores file must map sample id -> delta_m");
  }
  std::vector<double> out;
  out.reserve(original.size());
  for (const Sample& s : original) {
    const auto it = table->find(s.id);
    if (it == table->end() || !it->is_number()) {
      throw IntegrityError("scores file has no delta_m for '" + s.id + "'");
    }
    out.push_back(it->get<double>());
  }
  if (table->size() != original.size()) {
    throw IntegrityError("scores file has entries for unknown samples");
  }
  return out;
}

int CmdModify(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  const fs::path& in = RequireDir(rc.input_dir, "input_dir");
  const fs::path& out = RequireOut(rc);
  const Dataset original = ReadDatasetDir(in);
  const Dataset modified = ModifyDataset(original, rc.audit, rc.jobs);
  WriteDatasetDir(out, modified);
  json seeds = json::object();
  for (const Sample& s : original) {
    seeds[s.id] = SampleNoiseSeed(rc.audit.noise_seed, s.id);
  }
  WriteJson(out / "noise_seeds.json",
            {{"config_hash", rc.audit.Hash()}, {"noise_seeds", seeds}});
  std::cout << json{{"samples", modified.size()}, {"out", out.string()}}.dump()
            << "\n";
  return kExitOk;
}

int CmdScore(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  const Dataset original = ReadDatasetDir(RequireDir(rc.input_dir, "input_dir"));
  const Dataset modified =
      ReadDatasetDir(RequireDir(rc.modified_dir, "modified_dir"));
  const fs::path& out = RequireOut(rc);
  const OracleStack oracle(rc);
  const std::vector<double> delta = ScoreSamples(
      oracle.top(), original, modified, rc.audit.num_classes, rc.jobs);
  json table = json::object();
  for (size_t i = 0; i < original.size(); ++i) table[original[i].id] = delta[i];
  WriteJson(out, {{"config_hash", rc.audit.Hash()}, {"delta_m", table}});
  std::cout << json{{"samples", delta.size()}, {"out", out.string()}}.dump()
            << "\n";
  return kExitOk;
}

int CmdSelect(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  const Dataset original = ReadDatasetDir(RequireDir(rc.input_dir, "input_dir"));
  const Dataset modified =
      ReadDatasetDir(RequireDir(rc.modified_dir, "modified_dir"));
  const fs::path& out = RequireOut(rc);
  std::vector<double> delta;
  if (rc.scores) delta = AlignScores(ReadJson(RequireFile(rc.scores, "scores")), original);
  const DatasetManifest manifest = SelectSets(delta, InfoOf(original), rc.audit);
  const DatasetPair pair = BuildPair(original, modified, manifest);
  fs::create_directories(out);
  manifest.Write(out / "manifest.json");
  WriteDatasetDir(out / "published", pair.Published());
  WriteDatasetDir(out / "unpublished", pair.Unpublished());
  const SetCounts c = manifest.Counts();
  std::cout << json{{"candidates", c.candidates},
                    {"modification", c.modification},
                    {"reference", c.reference},
                    {"remaining", c.remaining},
                    {"out", out.string()}}
                   .dump()
            << "\n";
  return kExitOk;
}

struct AuditInputs {
  DatasetManifest manifest;
  DatasetPair pair;
};

AuditInputs LoadAuditInputs(const RunConfig& rc) {
  AuditInputs in;
  in.manifest = DatasetManifest::Read(RequireFile(rc.manifest, "manifest"));
  in.pair = LoadPair(RequireDir(rc.published_dir, "published_dir"),
                     RequireDir(rc.unpublished_dir, "unpublished_dir"),
                     in.manifest);
  return in;
}

int CmdVerify(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  // Validate every input before the first query goes out.
  RequireFile(rc.manifest, "manifest");
  RequireDir(rc.published_dir, "published_dir");
  RequireDir(rc.unpublished_dir, "unpublished_dir");
  const OracleStack oracle(rc);
  const AuditInputs in = LoadAuditInputs(rc);
  AuditOptions opt;
  opt.jobs = rc.jobs;
  opt.query_limit = rc.query_limit;
  AuditReport report = Audit(oracle.top(), in.manifest, in.pair, rc.audit, opt);
  if (in.manifest.config_hash != report.config_hash) {
    report.warnings.push_back("manifest config_hash " +
                              in.manifest.config_hash +
                              " differs from the verification config " +
                              report.config_hash);
  }
  const json j = report.ToJson();
  if (rc.out) {
    WriteJson(*rc.out, j);
  }
  std::cout << j.dump(2) << "\n";
  return report.decision == Decision::kMisuse ? kExitMisuse : kExitOk;
}

double BoundReal(const RunConfig& rc, const char* key, double fallback) {
  const auto it = rc.bound.find(key);
  return it == rc.bound.end() ? fallback : ParseDouble(key, it->second);
}

int64_t BoundInt(const RunConfig& rc, const char* key, int64_t fallback) {
  const auto it = rc.bound.find(key);
  return it == rc.bound.end() ? fallback : ParseInt(key, it->second);
}

int CmdBound(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  ThresholdModel m;
  m.mu0 = BoundReal(rc, "bound.mu0", 0.02);
  m.sigma0 = BoundReal(rc, "bound.sigma0", 0.01);
  m.mu1 = BoundReal(rc, "bound.mu1", 0.08);
  m.sigma1 = BoundReal(rc, "bound.sigma1", 0.02);
  m.n = BoundInt(rc, "bound.n", 100);
  m.a = BoundReal(rc, "bound.a", 0.05);
  m.b = BoundReal(rc, "bound.b", 0.05);

  FprBoundInputs in;
  in.alpha = rc.audit.alpha;
  in.clip_bound = rc.audit.clip_bound;
  in.n_m = BoundInt(rc, "bound.n_M", 100);
  in.n_r = BoundInt(rc, "bound.n_R", 100);
  in.delta_h = BoundReal(rc, "bound.delta_h", 0.01);
  in.c_h = BoundReal(rc, "bound.c_h", 0.01);
  in.mu = BoundReal(rc, "bound.mu", 0.02);
  in.f_max = BoundReal(rc, "bound.f_max", 5.0);
  in.k_pp = BoundReal(rc, "bound.k_pp", 1.0);

  json out;
  out["threshold_model"] = {{"mu0", m.mu0}, {"sigma0", m.sigma0},
                            {"mu1", m.mu1}, {"sigma1", m.sigma1},
                            {"n", m.n},     {"a", m.a},
                            {"b", m.b}};
  out["threshold_range"] = ComputeThresholdRange(m).ToJson();
  out["fpr_inputs"] = {{"alpha", in.alpha},     {"n_M", in.n_m},
                       {"n_R", in.n_r},         {"delta_h", in.delta_h},
                       {"c_h", in.c_h},         {"H", in.clip_bound},
                       {"mu", in.mu},           {"f_max", in.f_max},
                       {"k_pp", in.k_pp}};
  out["fpr_bound"] = FprBound(in).ToJson();
  if (rc.bound.count("bound.sweep_steps")) {
    out["delta_h_sweep"] =
        SweepDeltaH(in, BoundReal(rc, "bound.sweep_lo", 0.0),
                    BoundReal(rc, "bound.sweep_hi", 0.05),
                    int(BoundInt(rc, "bound.sweep_steps", 11)))
            .ToJson();
  }
  std::cout << out.dump(2) << "\n";
  if (rc.out) WriteJson(*rc.out, out);
  return kExitOk;
}

std::string SimText(const RunConfig& rc, const char* key, std::string fallback) {
  const auto it = rc.sim.find(key);
  return it == rc.sim.end() ? fallback : it->second;
}

std::optional<double> SimReal(const RunConfig& rc, const char* key) {
  const auto it = rc.sim.find(key);
  if (it == rc.sim.end()) return std::nullopt;
  return ParseDouble(key, it->second);
}

// Scenario specs with the run config's oracle settings and sim.* overrides.
std::pair<SyntheticOracleSpec, SyntheticOracleSpec> RunScenarioSpecs(
    const RunConfig& rc, const std::string& scenario) {
  auto [pos, neg] = ScenarioSpecs(scenario, rc.audit);
  for (SyntheticOracleSpec* s : {&pos, &neg}) {
    s->num_classes = rc.audit.num_classes;
    s->mode = rc.mode;
    s->top_k = rc.top_k;
    s->quantize_decimals = rc.quantize_decimals;
    s->query_limit = rc.query_limit;
    if (auto v = SimReal(rc, "sim.noise_sigma")) s->noise_sigma = *v;
  }
  if (auto v = SimReal(rc, "sim.base_true_prob")) pos.base_true_prob = *v;
  if (auto v = SimReal(rc, "sim.gap")) pos.gap = *v;
  if (auto v = SimReal(rc, "sim.level")) neg.level = *v;
  if (auto v = SimReal(rc, "sim.natural_gap")) neg.natural_gap = *v;
  if (auto v = SimReal(rc, "sim.reference_gap")) neg.reference_gap = *v;
  return {pos, neg};
}

int CmdSimulate(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  const std::string scenario =
      f.scenario.empty() ? SimText(rc, "sim.negative", "default") : f.scenario;
  const auto [pos, neg] = RunScenarioSpecs(rc, scenario);
  EvalOptions opt;
  opt.n_pos = int(ParseInt("sim.n_pos", SimText(rc, "sim.n_pos", "10")));
  opt.n_neg = int(ParseInt("sim.n_neg", SimText(rc, "sim.n_neg", "100")));
  opt.seed = f.seed ? *f.seed
                    : ParseUint64("sim.seed", SimText(rc, "sim.seed", "0"));
  opt.jobs = rc.jobs;
  opt.dataset.size = size_t(
      ParseInt("sim.dataset_size", SimText(rc, "sim.dataset_size", "1000")));
  opt.dataset.shape.t = int(ParseInt("sim.frames", SimText(rc, "sim.frames", "4")));
  opt.dataset.shape.h = int(ParseInt("sim.height", SimText(rc, "sim.height", "8")));
  opt.dataset.shape.w = int(ParseInt("sim.width", SimText(rc, "sim.width", "8")));
  opt.dataset.shape.c =
      int(ParseInt("sim.channels", SimText(rc, "sim.channels", "1")));
  const EvalSummary s = EvaluateAuditor(opt, rc.audit, pos, neg);
  json j = s.ToJson();
  j["scenario"] = scenario;
  j["seed"] = opt.seed;
  j["config_hash"] = rc.audit.Hash();
  j["positive_spec"] = pos.ToJson();
  j["negative_spec"] = neg.ToJson();
  if (rc.out) WriteJson(*rc.out, j);
  std::cout << j["summary"].dump() << "\n";
  return kExitOk;
}

httplib::Server* g_server = nullptr;

void StopServer(int) {
  if (g_server != nullptr) g_server->stop();
}

int CmdServe(const Flags& f) {
  const RunConfig rc = LoadRunConfig(f);
  std::unique_ptr<Oracle> owned;
  std::optional<OracleStack> stack;
  std::optional<AuditInputs> inputs;
  const Oracle* oracle = nullptr;
  if (!f.behavior.empty()) {
    inputs = LoadAuditInputs(rc);
    SyntheticOracleSpec spec;
    spec.behavior = ParseBehavior(f.behavior);
    spec.num_classes = rc.audit.num_classes;
    spec.mode = rc.mode;
    spec.top_k = rc.top_k;
    spec.quantize_decimals = rc.quantize_decimals;
    spec.seed = f.seed.value_or(0);
    if (auto v = SimReal(rc, "sim.base_true_prob")) spec.base_true_prob = *v;
    if (auto v = SimReal(rc, "sim.gap")) spec.gap = *v;
    if (auto v = SimReal(rc, "sim.noise_sigma")) spec.noise_sigma = *v;
    if (auto v = SimReal(rc, "sim.level")) spec.level = *v;
    if (auto v = SimReal(rc, "sim.natural_gap")) spec.natural_gap = *v;
    if (auto v = SimReal(rc, "sim.reference_gap")) spec.reference_gap = *v;
    owned = MakeSuspect(spec, inputs->manifest, inputs->pair);
    oracle = owned.get();
  } else {
    stack.emplace(rc);
    oracle = &stack->top();
  }
  httplib::Server server;
  MountPredictHandlers(server, *oracle);
  g_server = &server;
  std::signal(SIGINT, StopServer);
  std::signal(SIGTERM, StopServer);
  if (!server.bind_to_port(f.host, f.port)) {
    throw ConfigError("cannot bind " + f.host + ":" + std::to_string(f.port));
  }
  std::cout << json{{"listening", f.host + ":" + std::to_string(f.port)}}.dump()
            << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  return kExitOk;
}

void ReportError(const std::string& kind, const std::string& message,
                 const json* partial = nullptr) {
  json j = {{"error", kind}, {"message", message}};
  if (partial != nullptr) j["partial"] = *partial;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Dataset-copyright auditing for video recognition models"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "Run configuration file");
    cmd->add_option("--seed", f.seed,
                    "Seed (noise and selection seeds; master seed for simulate)");
    cmd->add_option("--jobs", f.jobs, "Worker threads");
    cmd->add_option("--out", f.out, "Output path");
  };
  auto oracle_flags = [&f](CLI::App* cmd) {
    cmd->add_option("--oracle-url", f.oracle_url, "http://host:port of /predict");
    cmd->add_option("--predictions", f.predictions, "Prediction table JSON");
    cmd->add_option("--quantize-decimals", f.quantize_decimals,
                    "Round posteriors to this many decimals");
    cmd->add_option("--query-limit", f.query_limit, "Maximum oracle queries");
    cmd->add_option("--mode", f.mode, "Response mode: full, topk or label");
    cmd->add_option("--top-k", f.top_k, "K for topk mode");
  };

  CLI::App* modify = app.add_subcommand("modify", "Inject seeded noise into every sample");
  common(modify);
  CLI::App* score = app.add_subcommand("score", "Score samples with an evaluation model");
  common(score);
  oracle_flags(score);
  CLI::App* select = app.add_subcommand("select", "Split samples and build published/unpublished sets");
  common(select);
  select->add_option("--scores", f.scores, "delta_m JSON from 'score'");
  CLI::App* verify = app.add_subcommand("verify", "Audit a suspect model");
  common(verify);
  oracle_flags(verify);
  CLI::App* bound = app.add_subcommand("bound", "Threshold range and FPR bound calculators");
  common(bound);
  CLI::App* simulate = app.add_subcommand("simulate", "Evaluate the auditor on synthetic suspects");
  common(simulate);
  oracle_flags(simulate);
  simulate->add_option("--scenario", f.scenario, "default, weak or inflated");
  CLI::App* serve = app.add_subcommand("serve", "Serve a prediction table or simulated suspect over /predict");
  common(serve);
  oracle_flags(serve);
  serve->add_option("--behavior", f.behavior, "member, non_member or weak (simulated suspect)");
  serve->add_option("--host", f.host, "Listen address");
  serve->add_option("--port", f.port, "Listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*modify) return CmdModify(f);
    if (*score) return CmdScore(f);
    if (*select) return CmdSelect(f);
    if (*verify) return CmdVerify(f);
    if (*bound) return CmdBound(f);
    if (*simulate) return CmdSimulate(f);
    if (*serve) return CmdServe(f);
  } catch (const AuditAborted& e) {
    const json partial = e.partial().ToJson();
    ReportError(e.kind(), e.what(), &partial);
  } catch (const Error& e) {
    ReportError(e.kind(), e.what());
  } catch (const std::exception& e) {
    ReportError("internal", e.what());
  }
  return kExitError;
}

}  // namespace vidaudit

int main(int argc, char** argv) { return vidaudit::Main(argc, argv); }
