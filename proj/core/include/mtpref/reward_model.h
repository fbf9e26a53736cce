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

// Scalar conversation reward model: a linear head over a pluggable
// conversation featurizer, trained with the Bradley-Terry pairwise loss.
//
// The log-likelihood log sigma(R(chosen) - R(rejected)) is maximized by
// minimizing its negation, so every loss here is a nonnegative NLL. The bias
// cancels in the score difference, so it receives no gradient and never
// affects pairwise decisions.

#ifndef MTPREF_REWARD_MODEL_H_
#define MTPREF_REWARD_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtpref/conversation.h"
#include "mtpref/jsonl.h"

namespace mtpref {

enum class FeaturizerKind { kHashedBagOfTokens, kStructuralStats,
                            kRemoteEmbedding };

struct FeaturizerSpec {
  FeaturizerKind kind = FeaturizerKind::kStructuralStats;
  std::size_t dim = 8;
  // kRemoteEmbedding only.
  std::optional<std::string> endpoint_url;
  std::string model_name;
  std::optional<std::string> api_key_env_var;
  double timeout_seconds = 60.0;

  friend bool operator==(const FeaturizerSpec&,
                         const FeaturizerSpec&) = default;
};

Json FeaturizerSpecToJson(const FeaturizerSpec& spec);
FeaturizerSpec FeaturizerSpecFromJson(const Json& j);

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FeaturizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Featurizer {
 public:
  virtual ~Featurizer() = default;
  // Deterministic; the result has length dim().
  virtual std::vector<double> Featurize(const Conversation& c) const = 0;
  virtual const FeaturizerSpec& spec() const = 0;
  std::size_t dim() const { return spec().dim; }
};

// Hashes each lowercased word, tagged by speaker ("u:" or "a:"), into one of
// `dim` buckets with FNV-1a and L2-normalizes the counts.
class HashedBagOfTokensFeaturizer : public Featurizer {
 public:
  explicit HashedBagOfTokensFeaturizer(std::size_t dim);
  std::vector<double> Featurize(const Conversation& c) const override;
  // Bucket counts before normalization.
  std::vector<double> Counts(const Conversation& c) const;
  const FeaturizerSpec& spec() const override { return spec_; }

 private:
  FeaturizerSpec spec_;
};

// Fixed 8-dimensional summary:
//   [0] turn count (unscaled)
//   [1] mean assistant words / 50
//   [2] max assistant words / 100
//   [3] mean user words / 25
//   [4] mean fraction of a turn's user content words echoed in its reply
//   [5] mean fraction of reply content words already seen earlier in the
//       conversation (including the turn's own user text)
//   [6] '?' per user word, times 10
//   [7] constraint keywords ("must", "exactly", "only", ...) per user word,
//       times 10
class StructuralStatsFeaturizer : public Featurizer {
 public:
  static constexpr std::size_t kDim = 8;
  StructuralStatsFeaturizer();
  std::vector<double> Featurize(const Conversation& c) const override;
  const FeaturizerSpec& spec() const override { return spec_; }

 private:
  FeaturizerSpec spec_;
};

// POSTs {"model": m, "input": transcript} and reads data[0].embedding, which
// must have exactly dim entries. Throws FeaturizerError on failure.
class RemoteEmbeddingFeaturizer : public Featurizer {
 public:
  explicit RemoteEmbeddingFeaturizer(FeaturizerSpec spec);
  std::vector<double> Featurize(const Conversation& c) const override;
  const FeaturizerSpec& spec() const override { return spec_; }

 private:
  FeaturizerSpec spec_;
  std::string scheme_host_port_;
  std::string path_;
};

std::unique_ptr<Featurizer> MakeFeaturizer(const FeaturizerSpec& spec);

struct RewardModelParams {
  std::vector<double> weights;
  double bias = 0.0;
  FeaturizerSpec featurizer;

  friend bool operator==(const RewardModelParams&,
                         const RewardModelParams&) = default;
};

// Zero weights of the featurizer's dimension.
RewardModelParams ZeroParams(const FeaturizerSpec& spec);

Json ParamsToJson(const RewardModelParams& params);
// Throws SchemaError on malformed input or non-finite entries.
RewardModelParams ParamsFromJson(const Json& j);

double Dot(std::span<const double> a, std::span<const double> b);

// weights . features + bias. Throws DimensionMismatch.
double Score(std::span<const double> features, const RewardModelParams& p);
// Throws DimensionMismatch if the featurizer does not match the params.
double Score(const Conversation& c, const RewardModelParams& p,
             const Featurizer& f);

// R(chosen) - R(rejected) with the bias cancelled exactly.
double Margin(std::span<const double> x_chosen,
              std::span<const double> x_rejected, const RewardModelParams& p);

double Sigmoid(double x);

// -log sigma(chosen - rejected), evaluated as log1p(exp(-|d|)) + max(-d, 0).
double BtNll(double score_chosen, double score_rejected);

struct BtGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

// Gradient of BtNll(Score(x_c), Score(x_r)) with respect to (weights, bias):
// (sigma(d) - 1) * (x_c - x_r) and 0.
BtGradient BtGrad(std::span<const double> x_chosen,
                  std::span<const double> x_rejected,
                  const RewardModelParams& p);

struct TrainConfig {
  double learning_rate = 0.5;
  double epochs = 2.0;  // fractional values allowed
  std::size_t batch_size = 16;
  std::uint64_t rng_seed = 0;
  double l2 = 0.0;
};

void ValidateTrainConfig(const TrainConfig& cfg);

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeaturizedPair {
  std::vector<double> chosen;
  std::vector<double> rejected;
  std::optional<std::string> category;
};

// Featurizes both sides of every pair. Items are independent, so up to
// `max_workers` threads are used; the output is in input order.
std::vector<FeaturizedPair> FeaturizePairs(std::span<const PreferencePair> pairs,
                                           const Featurizer& f,
                                           std::size_t max_workers = 1);

struct TrainResult {
  RewardModelParams params;
  std::vector<double> loss_curve;  // mean batch NLL before each step
  double initial_loss = 0.0;       // mean NLL over the training set
  double final_loss = 0.0;
  std::size_t steps = 0;
};

// Mini-batch gradient descent from zero weights with decoupled weight decay:
//   w <- (1 - lr * l2) * w - lr * mean_batch_grad.
// Runs ceil(epochs * n / batch_size) steps; the visiting order is reshuffled
// every epoch from cfg.rng_seed. Throws TrainingDiverged on a non-finite
// loss or weight, std::invalid_argument on empty input or bad config.
TrainResult TrainOnFeatures(std::span<const FeaturizedPair> data,
                            const FeaturizerSpec& spec,
                            const TrainConfig& cfg);

TrainResult Train(std::span<const PreferencePair> pairs, const Featurizer& f,
                  const TrainConfig& cfg);

// Mean NLL of the pairs under p.
double MeanNll(std::span<const FeaturizedPair> data,
               const RewardModelParams& p);

struct GroupAccuracy {
  double accuracy = 0.0;
  std::size_t pairs = 0;
};

struct AccuracyReport {
  std::optional<double> overall;  // nullopt when there are no pairs
  std::size_t pairs = 0;
  std::map<std::string, GroupAccuracy> per_category;
};

// Fraction of pairs with R(chosen) > R(rejected); exact ties count 0.5.
AccuracyReport PairwiseAccuracyOnFeatures(std::span<const FeaturizedPair> data,
                                          const RewardModelParams& p);
AccuracyReport PairwiseAccuracy(std::span<const PreferencePair> pairs,
                                const RewardModelParams& p,
                                const Featurizer& f);

Json AccuracyReportToJson(const AccuracyReport& report);

}  // namespace mtpref

#endif  // MTPREF_REWARD_MODEL_H_
