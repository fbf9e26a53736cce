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

#include "mtpref/reward_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mtpref/parallel.h"
#include "mtpref/random.h"

namespace mtpref {
namespace {

void CheckDims(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(want) + ", got " +
                            std::to_string(got));
  }
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

RewardModelParams ZeroParams(const FeaturizerSpec& spec) {
  RewardModelParams p;
  p.weights.assign(spec.dim, 0.0);
  p.featurizer = spec;
  return p;
}

Json ParamsToJson(const RewardModelParams& params) {
  Json j;
  j["featurizer"] = FeaturizerSpecToJson(params.featurizer);
  j["dim"] = params.weights.size();
  j["weights"] = params.weights;
  j["bias"] = params.bias;
  return j;
}

RewardModelParams ParamsFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("featurizer") || !j.contains("dim") ||
      !j.contains("weights") || !j.contains("bias")) {
    throw SchemaError("params need featurizer, dim, weights and bias");
  }
  RewardModelParams p;
  p.featurizer = FeaturizerSpecFromJson(j["featurizer"]);
  try {
    p.weights = j["weights"].get<std::vector<double>>();
    p.bias = j["bias"].get<double>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("params: ") + e.what());
  }
  if (j["dim"].get<std::size_t>() != p.weights.size() ||
      p.weights.size() != p.featurizer.dim) {
    throw SchemaError("params: dim does not match weights/featurizer");
  }
  if (!AllFinite(p.weights) || !std::isfinite(p.bias)) {
    throw SchemaError("params: non-finite entries");
  }
  return p;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  CheckDims(b.size(), a.size(), "Dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Score(std::span<const double> features, const RewardModelParams& p) {
  CheckDims(features.size(), p.weights.size(), "Score");
  return Dot(p.weights, features) + p.bias;
}

double Score(const Conversation& c, const RewardModelParams& p,
             const Featurizer& f) {
  if (!(f.spec() == p.featurizer)) {
    throw DimensionMismatch("Score: featurizer does not match params");
  }
  return Score(f.Featurize(c), p);
}

double Margin(std::span<const double> x_chosen,
              std::span<const double> x_rejected, const RewardModelParams& p) {
  CheckDims(x_chosen.size(), p.weights.size(), "Margin");
  CheckDims(x_rejected.size(), p.weights.size(), "Margin");
  return Dot(p.weights, x_chosen) - Dot(p.weights, x_rejected);
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double BtNll(double score_chosen, double score_rejected) {
  const double d = score_chosen - score_rejected;
  return std::log1p(std::exp(-std::abs(d))) + std::max(-d, 0.0);
}

BtGradient BtGrad(std::span<const double> x_chosen,
                  std::span<const double> x_rejected,
                  const RewardModelParams& p) {
  const double d = Margin(x_chosen, x_rejected, p);
  // sigma(d) - 1 == -sigma(-d), which keeps precision for large d.
  const double coeff = -Sigmoid(-d);
  BtGradient g;
  g.weights.resize(p.weights.size());
  for (std::size_t i = 0; i < g.weights.size(); ++i) {
    g.weights[i] = coeff * (x_chosen[i] - x_rejected[i]);
  }
  g.bias = 0.0;
  return g;
}

void ValidateTrainConfig(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0) || !std::isfinite(cfg.learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  }
  if (!(cfg.epochs > 0) || !std::isfinite(cfg.epochs)) {
    throw std::invalid_argument("epochs must be positive");
  }
  if (cfg.batch_size == 0) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (!(cfg.l2 >= 0)) throw std::invalid_argument("l2 must be >= 0");
}

std::vector<FeaturizedPair> FeaturizePairs(std::span<const PreferencePair> pairs,
                                           const Featurizer& f,
                                           std::size_t max_workers) {
  std::vector<FeaturizedPair> out(pairs.size());
  ParallelFor(pairs.size(), max_workers, [&](std::size_t i) {
    out[i].chosen = f.Featurize(pairs[i].chosen);
    out[i].rejected = f.Featurize(pairs[i].rejected);
    out[i].category = pairs[i].category;
  });
  return out;
}

double MeanNll(std::span<const FeaturizedPair> data,
               const RewardModelParams& p) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const FeaturizedPair& pair : data) {
    total += BtNll(Margin(pair.chosen, pair.rejected, p), 0.0);
  }
  return total / static_cast<double>(data.size());
}

TrainResult TrainOnFeatures(std::span<const FeaturizedPair> data,
                            const FeaturizerSpec& spec,
                            const TrainConfig& cfg) {
  ValidateTrainConfig(cfg);
  if (data.empty()) throw std::invalid_argument("Train: no pairs");
  for (const FeaturizedPair& pair : data) {
    CheckDims(pair.chosen.size(), spec.dim, "Train");
    CheckDims(pair.rejected.size(), spec.dim, "Train");
  }

  TrainResult result;
  result.params = ZeroParams(spec);
  RewardModelParams& p = result.params;
  result.initial_loss = MeanNll(data, p);

  const double n = static_cast<double>(data.size());
  result.steps = static_cast<std::size_t>(std::max(
      1.0, std::ceil(cfg.epochs * n / static_cast<double>(cfg.batch_size))));
  result.loss_curve.reserve(result.steps);

  Rng rng(cfg.rng_seed);
  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();  // forces a shuffle on the first step
  std::vector<double> grad(spec.dim);

  for (std::size_t step = 0; step < result.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    std::size_t batch = 0;
    while (batch < cfg.batch_size) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), 0);
        Shuffle(std::span<std::size_t>(order), rng);
        cursor = 0;
      }
      const FeaturizedPair& pair = data[order[cursor++]];
      const double d = Margin(pair.chosen, pair.rejected, p);
      loss += BtNll(d, 0.0);
      const double coeff = -Sigmoid(-d);
      for (std::size_t i = 0; i < spec.dim; ++i) {
        grad[i] += coeff * (pair.chosen[i] - pair.rejected[i]);
      }
      ++batch;
      // A batch never spans an epoch boundary.
      if (cursor == order.size()) break;
    }
    loss /= static_cast<double>(batch);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step
          << " (learning_rate=" << cfg.learning_rate << ")";
      throw TrainingDiverged(msg.str());
    }
    result.loss_curve.push_back(loss);
    const double decay = 1.0 - cfg.learning_rate * cfg.l2;
    const double scale = cfg.learning_rate / static_cast<double>(batch);
    for (std::size_t i = 0; i < spec.dim; ++i) {
      p.weights[i] = decay * p.weights[i] - scale * grad[i];
    }
    if (!AllFinite(p.weights)) {
      std::ostringstream msg;
      msg << "non-finite weights after step " << step
          << " (learning_rate=" << cfg.learning_rate << ")";
      throw TrainingDiverged(msg.str());
    }
  }
  result.final_loss = MeanNll(data, p);
  if (!std::isfinite(result.final_loss)) {
    throw TrainingDiverged("non-finite final loss");
  }
  return result;
}

TrainResult Train(std::span<const PreferencePair> pairs, const Featurizer& f,
                  const TrainConfig& cfg) {
  const std::vector<FeaturizedPair> data = FeaturizePairs(pairs, f);
  return TrainOnFeatures(data, f.spec(), cfg);
}

AccuracyReport PairwiseAccuracyOnFeatures(std::span<const FeaturizedPair> data,
                                          const RewardModelParams& p) {
  AccuracyReport report;
  report.pairs = data.size();
  if (data.empty()) return report;
  double correct = 0.0;
  std::map<std::string, double> group_correct;
  for (const FeaturizedPair& pair : data) {
    const double d = Margin(pair.chosen, pair.rejected, p);
    const double credit = d > 0 ? 1.0 : (d == 0 ? 0.5 : 0.0);
    correct += credit;
    if (pair.category) {
      group_correct[*pair.category] += credit;
      ++report.per_category[*pair.category].pairs;
    }
  }
  report.overall = correct / static_cast<double>(data.size());
  for (auto& [name, group] : report.per_category) {
    group.accuracy = group_correct[name] / static_cast<double>(group.pairs);
  }
  return report;
}

AccuracyReport PairwiseAccuracy(std::span<const PreferencePair> pairs,
                                const RewardModelParams& p,
                                const Featurizer& f) {
  if (!(f.spec() == p.featurizer)) {
    throw DimensionMismatch("PairwiseAccuracy: featurizer does not match");
  }
  return PairwiseAccuracyOnFeatures(FeaturizePairs(pairs, f), p);
}

Json AccuracyReportToJson(const AccuracyReport& report) {
  Json j;
  j["pairs"] = report.pairs;
  j["accuracy"] = report.overall ? Json(*report.overall) : Json(nullptr);
  Json groups = Json::object();
  for (const auto& [name, group] : report.per_category) {
    groups[name] = Json{{"pairs", group.pairs}, {"accuracy", group.accuracy}};
  }
  j["per_category"] = std::move(groups);
  return j;
}

}  // namespace mtpref
