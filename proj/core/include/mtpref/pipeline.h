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

// Pipeline configuration and the end-to-end commands behind the mtpref tool.
// Every command validates its configuration before touching the filesystem
// and reports problems as ConfigError; failures after validation surface as
// other exceptions.

#ifndef MTPREF_PIPELINE_H_
#define MTPREF_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtpref/bon_eval.h"
#include "mtpref/gateway.h"
#include "mtpref/jsonl.h"
#include "mtpref/reward_model.h"
#include "mtpref/rollout.h"
#include "mtpref/seed_sampler.h"

namespace mtpref {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct AugmentSettings {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> trace;
  SamplerConfig sampler;
  RolloutConfig rollout;
  std::size_t max_parallel = 4;
};

struct TrainSettings {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path params;
  std::optional<std::filesystem::path> loss_curve;
  FeaturizerSpec featurizer;
  TrainConfig train;
  TokenBudget budget;
  std::optional<std::size_t> max_turns;
};

struct BonSettings {
  std::filesystem::path prompts;
  // Params files, or the literal "greedy".
  std::vector<std::string> scorers;
  std::filesystem::path output;
  BonConfig bon;
};

struct JudgeSettings {
  std::string params_a;
  std::string params_b;  // a params file or "greedy"
  std::filesystem::path output;
  std::optional<std::filesystem::path> summary;
};

struct EvalSettings {
  std::filesystem::path input;
  std::filesystem::path params;
  std::optional<std::filesystem::path> report;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::optional<BackendConfig> user_sim;
  std::optional<BackendConfig> assistant;
  std::optional<BackendConfig> judge;
  std::optional<std::filesystem::path> templates_dir;
  AugmentSettings augment;
  TrainSettings train;
  BonSettings bon;
  JudgeSettings judge_cmd;
  EvalSettings eval;
};

// Replaces ${NAME} in every string value with the environment variable NAME.
// Throws ConfigError if a referenced variable is unset.
Json InterpolateEnv(const Json& value);

// Builds a config from its JSON form (after interpolation). Missing sections
// take defaults. Throws ConfigError.
PipelineConfig ParsePipelineConfig(const Json& j);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

// Sets the global seed and propagates it to every seeded component.
void ApplySeed(PipelineConfig& cfg, std::uint64_t seed);

// Replaces every backend with a template-mode mock.
void ForceMockBackends(PipelineConfig& cfg);

void RunAugment(const PipelineConfig& cfg, std::ostream& log);
void RunTrain(const PipelineConfig& cfg, std::ostream& log);
void RunBon(const PipelineConfig& cfg, std::ostream& log);
void RunJudge(const PipelineConfig& cfg, std::ostream& log);
void RunEvalAccuracy(const PipelineConfig& cfg, std::ostream& log);

// Reads {"id": str, "prompt": str} lines. Throws IoError / SchemaError.
std::vector<PromptItem> ReadPromptsJsonl(const std::filesystem::path& path);
void WritePromptsJsonl(const std::filesystem::path& path,
                       std::span<const PromptItem> prompts);

}  // namespace mtpref

#endif  // MTPREF_PIPELINE_H_
