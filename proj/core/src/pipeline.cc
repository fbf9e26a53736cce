// Copyright 2026 The mtpref Authors.
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

#include "mtpref/pipeline.h"

#include <cstdlib>
#include <iomanip>
#include <limits>
#include <memory>

#include "mtpref/parallel.h"
#include "mtpref/random.h"
#include "text_util.h"

namespace mtpref {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kGreedy = "greedy";

template <typename T>
T Get(const Json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config field '") + key +
                      "' has the wrong type");
  }
}

template <typename T>
std::optional<T> GetOptional(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return Get<T>(obj, key, T{});
}

const Json& Section(const Json& root, const char* key) {
  static const Json kEmpty = Json::object();
  auto it = root.find(key);
  if (it == root.end() || it->is_null()) return kEmpty;
  if (!it->is_object()) {
    throw ConfigError(std::string("config section '") + key +
                      "' must be an object");
  }
  return *it;
}

BackendConfig ParseBackend(const Json& j, const std::string& role) {
  if (!j.is_object()) throw ConfigError("backend '" + role + "' malformed");
  BackendConfig b;
  const std::string kind = Get<std::string>(j, "kind", "mock");
  if (kind == "http") {
    b.kind = BackendKind::kHttp;
  } else if (kind == "mock") {
    b.kind = BackendKind::kMock;
  } else {
    throw ConfigError("backend '" + role + "': unknown kind '" + kind + "'");
  }
  b.endpoint_url = GetOptional<std::string>(j, "endpoint_url");
  b.model_name = Get<std::string>(j, "model", b.kind == BackendKind::kMock
                                                  ? "mock"
                                                  : "");
  b.api_key_env_var = GetOptional<std::string>(j, "api_key_env_var");
  if (j.contains("api_key")) {
    throw ConfigError("backend '" + role +
                      "': put the key in an environment variable and name it "
                      "with api_key_env_var");
  }
  const Json& retry = Section(j, "retry");
  b.retry.max_attempts = Get<int>(retry, "max_attempts", b.retry.max_attempts);
  b.retry.backoff_ms = Get<int>(retry, "backoff_ms", b.retry.backoff_ms);
  b.timeout_seconds = Get<double>(j, "timeout_seconds", b.timeout_seconds);
  const std::string mode = Get<std::string>(j, "mode", "template");
  auto parsed_mode = ParseMockMode(mode);
  if (!parsed_mode) {
    throw ConfigError("backend '" + role + "': unknown mock mode '" + mode +
                      "'");
  }
  b.mock_mode = *parsed_mode;
  b.script = Get<std::vector<std::string>>(j, "script", {});
  b.script_cycle = Get<bool>(j, "script_cycle", false);
  try {
    ValidateBackendConfig(b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("backend '" + role + "': " + e.what());
  }
  return b;
}

TokenBudget ParseBudget(const Json& j, TokenBudget budget) {
  budget.max_tokens = Get<std::size_t>(j, "max_tokens", budget.max_tokens);
  const std::string counter =
      Get<std::string>(j, "token_counter",
                       std::string(TokenCounterName(budget.counter)));
  auto parsed = ParseTokenCounter(counter);
  if (!parsed) throw ConfigError("unknown token_counter '" + counter + "'");
  budget.counter = *parsed;
  return budget;
}

void RequireReadable(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is not set");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ConfigError(what + " not found: " + path.string());
  }
}

void RequireWritable(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is not set");
  const fs::path parent = path.parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw ConfigError(what + " directory does not exist: " + parent.string());
  }
  if (fs::is_directory(path, ec)) {
    throw ConfigError(what + " is a directory: " + path.string());
  }
}

const BackendConfig& RequireBackend(const std::optional<BackendConfig>& b,
                                    const std::string& role) {
  if (!b) throw ConfigError("no backend configured for role '" + role + "'");
  return *b;
}

std::shared_ptr<const PromptSet> LoadPrompts(const PipelineConfig& cfg) {
  if (!cfg.templates_dir) return nullptr;
  try {
    return std::make_shared<const PromptSet>(
        PromptSet::FromDirectory(*cfg.templates_dir));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("templates: ") + e.what());
  }
}

template <typename Fn>
void Checked(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void ReportReadErrors(const fs::path& path,
                      const std::vector<JsonlError>& errors,
                      std::ostream& log) {
  for (const JsonlError& e : errors) {
    log << path.string() << ":" << e.line << ": skipped: " << e.message
        << "\n";
  }
}

fs::path ManifestPath(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

struct LoadedScorer {
  std::string name;
  BonSide side;
};

LoadedScorer LoadScorer(const std::string& ref) {
  if (ref == kGreedy) return {std::string(kGreedy), BonSide::Greedy()};
  RewardModelParams params = ParamsFromJson(ReadJsonFile(ref));
  std::shared_ptr<const Featurizer> featurizer =
      MakeFeaturizer(params.featurizer);
  const std::string name = fs::path(ref).stem().string();
  return {name,
          BonSide{name, MakeRewardScorer(featurizer, std::move(params)),
                  false}};
}

void RequireScorerRef(const std::string& ref, const std::string& what) {
  if (ref == kGreedy) return;
  RequireReadable(ref, what);
}

}  // namespace

Json InterpolateEnv(const Json& value) {
  if (value.is_string()) {
    const std::string& s = value.get_ref<const std::string&>();
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      const std::size_t open = s.find("${", pos);
      if (open == std::string::npos) {
        out.append(s, pos, std::string::npos);
        break;
      }
      const std::size_t close = s.find('}', open + 2);
      if (close == std::string::npos) {
        throw ConfigError("unterminated ${ in config value '" + s + "'");
      }
      out.append(s, pos, open - pos);
      const std::string name = s.substr(open + 2, close - open - 2);
      const char* env = std::getenv(name.c_str());
      if (env == nullptr) {
        throw ConfigError("environment variable " + name + " is not set");
      }
      out += env;
      pos = close + 1;
    }
    return out;
  }
  if (value.is_object()) {
    Json out = Json::object();
    for (auto it = value.begin(); it != value.end(); ++it) {
      out[it.key()] = InterpolateEnv(it.value());
    }
    return out;
  }
  if (value.is_array()) {
    Json out = Json::array();
    for (const Json& v : value) out.push_back(InterpolateEnv(v));
    return out;
  }
  return value;
}

PipelineConfig ParsePipelineConfig(const Json& raw) {
  if (!raw.is_object()) throw ConfigError("config must be a JSON object");
  const Json j = InterpolateEnv(raw);
  PipelineConfig cfg;

  const Json& backends = Section(j, "backends");
  if (backends.contains("user_sim")) {
    cfg.user_sim = ParseBackend(backends["user_sim"], "user_sim");
  }
  if (backends.contains("assistant")) {
    cfg.assistant = ParseBackend(backends["assistant"], "assistant");
  }
  if (backends.contains("judge")) {
    cfg.judge = ParseBackend(backends["judge"], "judge");
  }

  const Json& templates = Section(j, "templates");
  const std::string source = Get<std::string>(templates, "source", "embedded");
  if (source == "external") {
    cfg.templates_dir = Get<std::string>(templates, "dir", "");
    if (cfg.templates_dir->empty()) {
      throw ConfigError("external templates need templates.dir");
    }
  } else if (source != "embedded") {
    throw ConfigError("templates.source must be 'embedded' or 'external'");
  }

  const Json& aug = Section(j, "augment");
  AugmentSettings& a = cfg.augment;
  a.input = Get<std::string>(aug, "input", "");
  a.output = Get<std::string>(aug, "output", "");
  if (auto trace = GetOptional<std::string>(aug, "trace")) a.trace = *trace;
  a.sampler.max_turns = Get<std::size_t>(aug, "max_turns", 5);
  a.sampler.budget = ParseBudget(aug, a.sampler.budget);
  a.sampler.seeds_per_conversation =
      Get<std::size_t>(aug, "seeds_per_conversation", 1);
  a.rollout.max_turns = Get<std::size_t>(aug, "rollout_turns", 5);
  a.rollout.budget = a.sampler.budget;
  a.rollout.stop_at_budget = Get<bool>(aug, "stop_at_budget", false);
  a.rollout.user_sampling.temperature =
      Get<double>(aug, "user_temperature", 0.7);
  a.rollout.assistant_sampling.temperature =
      Get<double>(aug, "assistant_temperature", 0.7);
  const int max_out = Get<int>(aug, "max_output_tokens", 1024);
  a.rollout.user_sampling.max_output_tokens = max_out;
  a.rollout.assistant_sampling.max_output_tokens = max_out;
  a.max_parallel = Get<std::size_t>(aug, "max_parallel", 4);

  const Json& tr = Section(j, "train");
  TrainSettings& t = cfg.train;
  for (const std::string& p : Get<std::vector<std::string>>(tr, "inputs", {})) {
    t.inputs.emplace_back(p);
  }
  t.params = Get<std::string>(tr, "params", "");
  if (auto loss = GetOptional<std::string>(tr, "loss_curve")) {
    t.loss_curve = *loss;
  }
  if (tr.contains("featurizer")) {
    try {
      t.featurizer = FeaturizerSpecFromJson(tr["featurizer"]);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("train.featurizer: ") + e.what());
    }
  }
  t.train.learning_rate = Get<double>(tr, "learning_rate", 0.5);
  t.train.epochs = Get<double>(tr, "epochs", 2.0);
  t.train.batch_size = Get<std::size_t>(tr, "batch_size", 16);
  t.train.l2 = Get<double>(tr, "l2", 0.0);
  t.budget = ParseBudget(tr, t.budget);
  t.max_turns = GetOptional<std::size_t>(tr, "max_turns");

  const Json& bon = Section(j, "bon");
  BonSettings& b = cfg.bon;
  b.prompts = Get<std::string>(bon, "prompts", "");
  b.scorers = Get<std::vector<std::string>>(bon, "params", {});
  b.output = Get<std::string>(bon, "output", "");
  b.bon.n_candidates = Get<std::size_t>(bon, "n_candidates", 4);
  b.bon.horizon = Get<std::size_t>(bon, "horizon", 3);
  b.bon.greedy = Get<bool>(bon, "greedy", false);
  b.bon.shared_user = Get<bool>(bon, "shared_user", false);
  b.bon.assistant_sampling.temperature = Get<double>(bon, "temperature", 0.7);
  b.bon.user_sampling.temperature = Get<double>(bon, "user_temperature", 0.7);
  b.bon.judge_sampling.temperature = Get<double>(bon, "judge_temperature", 0.0);
  const int bon_max_out = Get<int>(bon, "max_output_tokens", 1024);
  b.bon.assistant_sampling.max_output_tokens = bon_max_out;
  b.bon.user_sampling.max_output_tokens = bon_max_out;
  b.bon.judge_sampling.max_output_tokens = bon_max_out;
  b.bon.max_in_flight = Get<std::size_t>(bon, "max_in_flight", 4);
  b.bon.max_parallel_prompts =
      Get<std::size_t>(bon, "max_parallel_prompts", 1);

  const Json& judge = Section(j, "judge");
  cfg.judge_cmd.params_a = Get<std::string>(judge, "params_a", "");
  cfg.judge_cmd.params_b = Get<std::string>(judge, "params_b", "");
  cfg.judge_cmd.output = Get<std::string>(judge, "output", "");
  if (auto summary = GetOptional<std::string>(judge, "summary")) {
    cfg.judge_cmd.summary = *summary;
  }

  const Json& ev = Section(j, "eval");
  cfg.eval.input = Get<std::string>(ev, "input", "");
  cfg.eval.params = Get<std::string>(ev, "params", "");
  if (auto report = GetOptional<std::string>(ev, "report")) {
    cfg.eval.report = *report;
  }

  ApplySeed(cfg, Get<std::uint64_t>(j, "seed", 0));
  return cfg;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ConfigError("config file not found: " + path.string());
  }
  try {
    return ParsePipelineConfig(ReadJsonFile(path));
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

void ApplySeed(PipelineConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.augment.sampler.rng_seed = seed;
  cfg.augment.rollout.user_sampling.seed = seed;
  cfg.augment.rollout.assistant_sampling.seed = seed;
  cfg.train.train.rng_seed = seed;
  cfg.bon.bon.assistant_sampling.seed = seed;
  cfg.bon.bon.user_sampling.seed = seed;
  cfg.bon.bon.judge_sampling.seed = seed;
}

void ForceMockBackends(PipelineConfig& cfg) {
  BackendConfig mock;
  mock.kind = BackendKind::kMock;
  mock.mock_mode = MockMode::kTemplate;
  mock.retry.backoff_ms = 0;
  cfg.user_sim = mock;
  cfg.assistant = mock;
  cfg.judge = mock;
}

std::vector<PromptItem> ReadPromptsJsonl(const fs::path& path) {
  std::vector<PromptItem> prompts;
  const auto errors = ForEachJsonlRecord(path, [&](const Json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("prompt") || !j["prompt"].is_string()) {
      throw SchemaError("prompt record needs string id and prompt");
    }
    prompts.push_back({j["id"].get<std::string>(),
                       j["prompt"].get<std::string>()});
  });
  if (!errors.empty()) {
    throw SchemaError(path.string() + ":" + std::to_string(errors[0].line) +
                      ": " + errors[0].message);
  }
  return prompts;
}

void WritePromptsJsonl(const fs::path& path,
                       std::span<const PromptItem> prompts) {
  std::vector<Json> rows;
  rows.reserve(prompts.size());
  for (const PromptItem& p : prompts) {
    rows.push_back(Json{{"id", p.id}, {"prompt", p.text}});
  }
  WriteJsonl(path, rows);
}

void RunAugment(const PipelineConfig& cfg, std::ostream& log) {
  const AugmentSettings& a = cfg.augment;
  RequireReadable(a.input, "augment input");
  RequireWritable(a.output, "augment output");
  if (a.trace) RequireWritable(*a.trace, "augment trace");
  const BackendConfig& user_cfg = RequireBackend(cfg.user_sim, "user_sim");
  const BackendConfig& assistant_cfg =
      RequireBackend(cfg.assistant, "assistant");
  RolloutConfig rollout = a.rollout;
  Checked([&] {
    ValidateSamplerConfig(a.sampler);
    ValidateRolloutConfig(rollout);
    if (a.max_parallel == 0) {
      throw std::invalid_argument("augment.max_parallel must be >= 1");
    }
  });
  rollout.prompts = LoadPrompts(cfg);
  std::unique_ptr<ChatBackend> user;
  std::unique_ptr<ChatBackend> assistant;
  Checked([&] {
    user = MakeBackend(user_cfg);
    assistant = MakeBackend(assistant_cfg);
  });

  auto read = ReadPairsJsonl(a.input);
  ReportReadErrors(a.input, read.errors, log);
  SeedSetStats seed_stats;
  const std::vector<SeedContext> seeds =
      BuildSeedSet(read.records, a.sampler, &seed_stats);

  Json manifest;
  manifest["complete"] = false;
  manifest["output"] = a.output.string();
  manifest["seed"] = cfg.seed;
  manifest["rng_algorithm"] = std::string(kRngAlgorithm);
  WriteJsonFile(ManifestPath(a.output), manifest);

  RolloutDatasetResult result =
      RolloutDataset(seeds, *user, *assistant, rollout, a.max_parallel);
  WritePairsJsonl(a.output, result.pairs);
  if (a.trace) {
    std::vector<Json> rows;
    rows.reserve(result.traces.size());
    for (const RolloutTrace& t : result.traces) rows.push_back(TraceToJson(t));
    WriteJsonl(*a.trace, rows);
  }

  Json stats;
  stats["input_records"] = read.records.size() + read.errors.size();
  stats["unparseable_lines"] = read.errors.size();
  stats["filter"] = Json{{"kept", seed_stats.filter.kept},
                         {"malformed", seed_stats.filter.malformed},
                         {"too_many_turns", seed_stats.filter.too_many_turns},
                         {"over_budget", seed_stats.filter.over_budget}};
  stats["seeds"] = seed_stats.seeds;
  stats["rollout"] = RolloutStatsToJson(result.stats);
  stats["music_pairs"] = result.pairs.size();
  manifest["complete"] = true;
  manifest["stats"] = stats;
  WriteJsonFile(ManifestPath(a.output), manifest);
  log << "augment: " << result.pairs.size() << " music pairs from "
      << seeds.size() << " seeds (completed " << result.stats.completed
      << ", abandoned " << result.stats.abandoned_parse << " parse / "
      << result.stats.abandoned_backend << " backend, dropped identical "
      << result.stats.dropped_identical << ")\n"
      << stats.dump() << "\n";
}

void RunTrain(const PipelineConfig& cfg, std::ostream& log) {
  const TrainSettings& t = cfg.train;
  if (t.inputs.empty()) throw ConfigError("train needs at least one input");
  for (const fs::path& in : t.inputs) RequireReadable(in, "train input");
  RequireWritable(t.params, "params output");
  if (t.loss_curve) RequireWritable(*t.loss_curve, "loss curve output");
  Checked([&] {
    ValidateTrainConfig(t.train);
    if (t.budget.max_tokens == 0) {
      throw std::invalid_argument("train.max_tokens must be >= 1");
    }
    if (t.max_turns && *t.max_turns == 0) {
      throw std::invalid_argument("train.max_turns must be >= 1");
    }
  });
  std::unique_ptr<Featurizer> featurizer;
  Checked([&] { featurizer = MakeFeaturizer(t.featurizer); });

  // The union of all inputs; the source field keeps provenance.
  std::vector<PreferencePair> all;
  for (const fs::path& in : t.inputs) {
    auto read = ReadPairsJsonl(in);
    ReportReadErrors(in, read.errors, log);
    log << "train: " << read.records.size() << " pairs from " << in.string()
        << "\n";
    all.insert(all.end(), std::make_move_iterator(read.records.begin()),
               std::make_move_iterator(read.records.end()));
  }
  FilterStats filter;
  const std::vector<PreferencePair> kept = FilterDataset(
      all, t.budget,
      t.max_turns.value_or(std::numeric_limits<std::size_t>::max()), &filter);
  if (kept.empty()) {
    throw std::runtime_error("no training pairs left after filtering");
  }
  std::size_t music = 0;
  for (const PreferencePair& p : kept) music += p.source == PairSource::kMusic;

  const auto data = FeaturizePairs(kept, *featurizer);
  const TrainResult result = TrainOnFeatures(data, featurizer->spec(), t.train);
  WriteJsonFile(t.params, ParamsToJson(result.params));
  if (t.loss_curve) {
    Json curve;
    curve["steps"] = result.steps;
    curve["initial_loss"] = result.initial_loss;
    curve["final_loss"] = result.final_loss;
    curve["loss_curve"] = result.loss_curve;
    WriteJsonFile(*t.loss_curve, curve);
  }
  const AccuracyReport train_acc =
      PairwiseAccuracyOnFeatures(data, result.params);
  log << "train: " << kept.size() << " pairs (" << music << " music, "
      << filter.malformed << " malformed, "
      << filter.over_budget + filter.too_many_turns << " filtered), "
      << result.steps << " steps, loss " << result.initial_loss << " -> "
      << result.final_loss << ", train accuracy "
      << train_acc.overall.value_or(0.0) << "\n";
}

void RunBon(const PipelineConfig& cfg, std::ostream& log) {
  const BonSettings& b = cfg.bon;
  RequireReadable(b.prompts, "bon prompts");
  if (b.scorers.empty()) throw ConfigError("bon needs at least one params");
  for (const std::string& s : b.scorers) RequireScorerRef(s, "bon params");
  RequireWritable(b.output, "bon output");
  const BackendConfig& user_cfg = RequireBackend(cfg.user_sim, "user_sim");
  const BackendConfig& assistant_cfg =
      RequireBackend(cfg.assistant, "assistant");
  BonConfig bon = b.bon;
  Checked([&] { ValidateBonConfig(bon); });
  bon.prompts = LoadPrompts(cfg);
  std::unique_ptr<ChatBackend> user;
  std::unique_ptr<ChatBackend> assistant;
  Checked([&] {
    user = MakeBackend(user_cfg);
    assistant = MakeBackend(assistant_cfg);
  });

  const std::vector<PromptItem> prompts = ReadPromptsJsonl(b.prompts);
  std::vector<Json> rows;
  for (const std::string& ref : b.scorers) {
    const LoadedScorer scorer = LoadScorer(ref);
    BonConfig side_cfg = bon;
    side_cfg.greedy = bon.greedy || scorer.side.greedy;
    std::vector<std::optional<Expected<Conversation, BonAbandon>>> convs(
        prompts.size());
    ParallelFor(prompts.size(), bon.max_parallel_prompts, [&](std::size_t i) {
      convs[i].emplace(BonConversation(prompts[i].text, scorer.side.scorer,
                                       {*user, *assistant}, side_cfg,
                                       internal::Fnv1a64(prompts[i].id)));
    });
    std::size_t abandoned = 0;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      Json row;
      row["prompt_id"] = prompts[i].id;
      row["scorer"] = scorer.name;
      if (*convs[i]) {
        row["status"] = "complete";
        row["conversation"] = TurnsToJson(convs[i]->value());
      } else {
        ++abandoned;
        row["status"] = "abandoned";
        row["detail"] = convs[i]->error().detail;
      }
      rows.push_back(std::move(row));
    }
    log << "bon: " << scorer.name << ": " << prompts.size() - abandoned
        << " conversations, " << abandoned << " abandoned\n";
  }
  WriteJsonl(b.output, rows);
}

void RunJudge(const PipelineConfig& cfg, std::ostream& log) {
  const JudgeSettings& j = cfg.judge_cmd;
  RequireReadable(cfg.bon.prompts, "bon prompts");
  if (j.params_a.empty() || j.params_b.empty()) {
    throw ConfigError("judge needs params_a and params_b");
  }
  RequireScorerRef(j.params_a, "judge params_a");
  RequireScorerRef(j.params_b, "judge params_b");
  RequireWritable(j.output, "judge output");
  if (j.summary) RequireWritable(*j.summary, "judge summary");
  const BackendConfig& user_cfg = RequireBackend(cfg.user_sim, "user_sim");
  const BackendConfig& assistant_cfg =
      RequireBackend(cfg.assistant, "assistant");
  const BackendConfig& judge_cfg = RequireBackend(cfg.judge, "judge");
  BonConfig bon = cfg.bon.bon;
  Checked([&] { ValidateBonConfig(bon); });
  bon.prompts = LoadPrompts(cfg);
  std::unique_ptr<ChatBackend> user, assistant, judge;
  Checked([&] {
    user = MakeBackend(user_cfg);
    assistant = MakeBackend(assistant_cfg);
    judge = MakeBackend(judge_cfg);
  });

  const std::vector<PromptItem> prompts = ReadPromptsJsonl(cfg.bon.prompts);
  const LoadedScorer a = LoadScorer(j.params_a);
  const LoadedScorer b = LoadScorer(j.params_b);
  const ComparisonResult result =
      CompareRms(prompts, a.side, b.side, {*user, *assistant}, *judge, bon);

  std::vector<Json> rows;
  rows.reserve(result.records.size());
  for (const ComparisonRecord& r : result.records) {
    rows.push_back(ComparisonRecordToJson(r));
  }
  WriteJsonl(j.output, rows);
  Json summary = WinrateReportToJson(result.report);
  summary["side_a"] = a.name;
  summary["side_b"] = b.name;
  summary["abandoned"] = result.abandoned;
  if (j.summary) WriteJsonFile(*j.summary, summary);
  log << "judge: " << a.name << " vs " << b.name << ": winrate_a ";
  if (result.report.winrate_a) {
    log << std::fixed << std::setprecision(3) << *result.report.winrate_a
        << std::defaultfloat;
  } else {
    log << "undefined";
  }
  log << " over " << result.report.comparisons << " comparisons ("
      << result.abandoned << " abandoned)\n"
      << summary.dump() << "\n";
}

void RunEvalAccuracy(const PipelineConfig& cfg, std::ostream& log) {
  const EvalSettings& e = cfg.eval;
  RequireReadable(e.input, "eval input");
  RequireReadable(e.params, "eval params");
  if (e.report) RequireWritable(*e.report, "eval report");

  const RewardModelParams params = ParamsFromJson(ReadJsonFile(e.params));
  const std::unique_ptr<Featurizer> featurizer =
      MakeFeaturizer(params.featurizer);
  auto read = ReadPairsJsonl(e.input);
  ReportReadErrors(e.input, read.errors, log);
  const AccuracyReport report =
      PairwiseAccuracy(read.records, params, *featurizer);

  log << std::left << std::setw(24) << "category" << std::right
      << std::setw(8) << "pairs" << std::setw(10) << "accuracy" << "\n";
  log << std::fixed << std::setprecision(4);
  for (const auto& [name, group] : report.per_category) {
    log << std::left << std::setw(24) << name << std::right << std::setw(8)
        << group.pairs << std::setw(10) << group.accuracy << "\n";
  }
  log << std::left << std::setw(24) << "overall" << std::right << std::setw(8)
      << report.pairs << std::setw(10);
  if (report.overall) {
    log << *report.overall;
  } else {
    log << "n/a";
  }
  log << std::defaultfloat << "\n";
  if (e.report) WriteJsonFile(*e.report, AccuracyReportToJson(report));
}

}  // namespace mtpref
