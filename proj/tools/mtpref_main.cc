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

// mtpref: augment preference data with contrast rollouts, train a
// conversation reward model, and evaluate it with best-of-N and a judge.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtpref/jsonl.h"
#include "mtpref/pipeline.h"
#include "mtpref/synthetic.h"

namespace {

using mtpref::PipelineConfig;

template <typename T>
void Override(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

struct AugmentFlags {
  std::optional<std::string> input, output, trace;
  std::optional<std::size_t> max_turns, rollout_turns, max_parallel;
};

struct TrainFlags {
  std::vector<std::string> inputs;
  std::optional<std::string> params, loss_curve, featurizer;
  std::optional<std::size_t> dim, batch_size, max_turns;
  std::optional<double> epochs, lr;
};

struct BonFlags {
  std::optional<std::string> prompts, output;
  std::vector<std::string> params;
  std::optional<std::size_t> n, horizon;
  bool greedy = false;
  bool shared_user = false;
};

struct JudgeFlags {
  std::optional<std::string> prompts, params_a, params_b, output, summary;
  std::optional<std::size_t> n, horizon;
  bool shared_user = false;
};

struct EvalFlags {
  std::optional<std::string> input, params, report;
};

struct SynthFlags {
  std::string output;
  std::optional<std::string> prompts_output;
  std::size_t pairs = 100;
  std::size_t prompts = 0;
  std::size_t min_turns = 1;
  std::size_t max_turns = 5;
  std::size_t overlong = 0;
  std::string id_prefix = "syn";
};

void ApplyAugment(const AugmentFlags& f, PipelineConfig& cfg) {
  auto& a = cfg.augment;
  if (f.input) a.input = *f.input;
  if (f.output) a.output = *f.output;
  if (f.trace) a.trace = *f.trace;
  Override(f.max_turns, a.sampler.max_turns);
  Override(f.rollout_turns, a.rollout.max_turns);
  Override(f.max_parallel, a.max_parallel);
}

void ApplyTrain(const TrainFlags& f, PipelineConfig& cfg) {
  auto& t = cfg.train;
  if (!f.inputs.empty()) {
    t.inputs.assign(f.inputs.begin(), f.inputs.end());
  }
  if (f.params) t.params = *f.params;
  if (f.loss_curve) t.loss_curve = *f.loss_curve;
  if (f.featurizer || f.dim) {
    mtpref::Json spec = mtpref::FeaturizerSpecToJson(t.featurizer);
    if (f.featurizer) {
      spec = mtpref::Json{{"kind", *f.featurizer}};
    }
    if (f.dim) spec["dim"] = *f.dim;
    try {
      t.featurizer = mtpref::FeaturizerSpecFromJson(spec);
    } catch (const std::exception& e) {
      throw mtpref::ConfigError(std::string("--featurizer: ") + e.what());
    }
  }
  Override(f.epochs, t.train.epochs);
  Override(f.lr, t.train.learning_rate);
  Override(f.batch_size, t.train.batch_size);
  if (f.max_turns) t.max_turns = *f.max_turns;
}

void ApplyBon(const BonFlags& f, PipelineConfig& cfg) {
  auto& b = cfg.bon;
  if (f.prompts) b.prompts = *f.prompts;
  if (f.output) b.output = *f.output;
  if (!f.params.empty()) b.scorers = f.params;
  Override(f.n, b.bon.n_candidates);
  Override(f.horizon, b.bon.horizon);
  if (f.greedy) b.bon.greedy = true;
  if (f.shared_user) b.bon.shared_user = true;
}

void ApplyJudge(const JudgeFlags& f, PipelineConfig& cfg) {
  auto& j = cfg.judge_cmd;
  if (f.prompts) cfg.bon.prompts = *f.prompts;
  if (f.params_a) j.params_a = *f.params_a;
  if (f.params_b) j.params_b = *f.params_b;
  if (f.output) j.output = *f.output;
  if (f.summary) j.summary = *f.summary;
  Override(f.n, cfg.bon.bon.n_candidates);
  Override(f.horizon, cfg.bon.bon.horizon);
  if (f.shared_user) cfg.bon.bon.shared_user = true;
}

void ApplyEval(const EvalFlags& f, PipelineConfig& cfg) {
  auto& e = cfg.eval;
  if (f.input) e.input = *f.input;
  if (f.params) e.params = *f.params;
  if (f.report) e.report = *f.report;
}

void RunSynth(const SynthFlags& f, std::uint64_t seed) {
  namespace fs = std::filesystem;
  auto check_dir = [](const fs::path& p) {
    if (!p.parent_path().empty() && !fs::is_directory(p.parent_path())) {
      throw mtpref::ConfigError("directory does not exist: " +
                                p.parent_path().string());
    }
  };
  check_dir(f.output);
  if (f.prompts_output) check_dir(*f.prompts_output);
  if (f.min_turns == 0 || f.min_turns > f.max_turns) {
    throw mtpref::ConfigError("need 1 <= --min-turns <= --max-turns");
  }
  mtpref::SyntheticDatasetConfig cfg;
  cfg.pairs = f.pairs;
  cfg.seed = seed;
  cfg.min_turns = f.min_turns;
  cfg.max_turns = f.max_turns;
  cfg.overlong_pairs = f.overlong;
  cfg.id_prefix = f.id_prefix;
  const auto pairs = mtpref::MakeSyntheticPairs(cfg);
  mtpref::WritePairsJsonl(f.output, pairs);
  std::cerr << "synth-data: " << pairs.size() << " pairs -> " << f.output
            << "\n";
  if (f.prompts_output) {
    const std::size_t n = f.prompts > 0 ? f.prompts : f.pairs;
    const auto prompts = mtpref::MakeSyntheticPrompts(n, seed);
    mtpref::WritePromptsJsonl(*f.prompts_output, prompts);
    std::cerr << "synth-data: " << prompts.size() << " prompts -> "
              << *f.prompts_output << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-turn reward model data augmentation and evaluation"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  bool mock = false;
  app.add_option("--config", config_path, "Pipeline config (JSON)");
  app.add_option("--seed", seed, "Global seed; overrides the config");
  app.add_flag("--mock", mock, "Use template mocks for every backend");

  AugmentFlags aug;
  auto* augment = app.add_subcommand(
      "augment", "Roll out contrast pairs from seed prefixes");
  augment->add_option("--input", aug.input, "Preference pairs (JSONL)");
  augment->add_option("--output", aug.output, "Contrast pairs (JSONL)");
  augment->add_option("--trace", aug.trace, "Per-seed rollout trace (JSONL)");
  augment->add_option("--max-turns", aug.max_turns,
                      "Drop source conversations longer than this");
  augment->add_option("--rollout-turns", aug.rollout_turns,
                      "Turns appended to each seed");
  augment->add_option("--max-parallel", aug.max_parallel,
                      "Rollouts in flight");

  TrainFlags tr;
  auto* train = app.add_subcommand("train", "Train a reward model");
  train->add_option("--input", tr.inputs, "Pair files; repeat to combine");
  train->add_option("--params", tr.params, "Output params (JSON)");
  train->add_option("--loss-curve", tr.loss_curve, "Output loss curve (JSON)");
  train->add_option("--featurizer", tr.featurizer,
                    "hashed_bow, structural or remote_embedding");
  train->add_option("--dim", tr.dim, "Feature dimension");
  train->add_option("--epochs", tr.epochs, "Passes over the data");
  train->add_option("--lr", tr.lr, "Learning rate");
  train->add_option("--batch-size", tr.batch_size, "Minibatch size");
  train->add_option("--max-turns", tr.max_turns, "Drop longer conversations");

  BonFlags bf;
  auto* bon = app.add_subcommand("bon", "Best-of-N conversations per scorer");
  bon->add_option("--prompts", bf.prompts, "Prompts (JSONL)");
  bon->add_option("--params", bf.params,
                  "Params file per scorer, or 'greedy'; repeatable");
  bon->add_option("--output", bf.output, "Conversations (JSONL)");
  bon->add_option("-n,--n-candidates", bf.n, "Candidates per turn");
  bon->add_option("--horizon", bf.horizon, "Turns per conversation");
  bon->add_flag("--greedy", bf.greedy, "One candidate at temperature 0");
  bon->add_flag("--shared-user", bf.shared_user);

  JudgeFlags jf;
  auto* judge = app.add_subcommand(
      "judge", "Compare two scorers with swap-order judging");
  judge->add_option("--prompts", jf.prompts, "Prompts (JSONL)");
  judge->add_option("--params-a", jf.params_a, "Params file or 'greedy'");
  judge->add_option("--params-b", jf.params_b, "Params file or 'greedy'");
  judge->add_option("--output", jf.output, "Per-prompt records (JSONL)");
  judge->add_option("--summary", jf.summary, "Winrate report (JSON)");
  judge->add_option("-n,--n-candidates", jf.n, "Candidates per turn");
  judge->add_option("--horizon", jf.horizon, "Turns per conversation");
  judge->add_flag("--shared-user", jf.shared_user,
                  "Reuse side A's user turns for side B");

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval-accuracy",
                                  "Pairwise accuracy of a reward model");
  eval->add_option("--input", ef.input, "Preference pairs (JSONL)");
  eval->add_option("--params", ef.params, "Params (JSON)");
  eval->add_option("--report", ef.report, "Accuracy report (JSON)");

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth-data",
                                   "Write a synthetic pair corpus");
  synth->add_option("--output", sf.output, "Pairs (JSONL)")->required();
  synth->add_option("--prompts-output", sf.prompts_output, "Prompts (JSONL)");
  synth->add_option("--pairs", sf.pairs, "Number of pairs");
  synth->add_option("--prompts", sf.prompts,
                    "Number of prompts (default: --pairs)");
  synth->add_option("--min-turns", sf.min_turns);
  synth->add_option("--max-turns", sf.max_turns);
  synth->add_option("--overlong", sf.overlong,
                    "Extra pairs one turn longer than --max-turns");
  synth->add_option("--id-prefix", sf.id_prefix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mtpref::kExitOk : mtpref::kExitConfigError;
  }

  try {
    PipelineConfig cfg;
    if (config_path) cfg = mtpref::LoadPipelineConfig(*config_path);
    if (seed) mtpref::ApplySeed(cfg, *seed);
    if (mock) mtpref::ForceMockBackends(cfg);

    if (*synth) {
      RunSynth(sf, cfg.seed);
    } else if (*augment) {
      ApplyAugment(aug, cfg);
      mtpref::RunAugment(cfg, std::cerr);
    } else if (*train) {
      ApplyTrain(tr, cfg);
      mtpref::RunTrain(cfg, std::cerr);
    } else if (*bon) {
      ApplyBon(bf, cfg);
      mtpref::RunBon(cfg, std::cerr);
    } else if (*judge) {
      ApplyJudge(jf, cfg);
      mtpref::RunJudge(cfg, std::cout);
    } else if (*eval) {
      ApplyEval(ef, cfg);
      mtpref::RunEvalAccuracy(cfg, std::cout);
    }
  } catch (const mtpref::ConfigError& e) {
    std::cerr << "mtpref: config error: " << e.what() << "\n";
    return mtpref::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "mtpref: " << e.what() << "\n";
    return mtpref::kExitRuntimeError;
  }
  return mtpref::kExitOk;
}
