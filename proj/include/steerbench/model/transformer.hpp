#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "steerbench/datagen/infill_data.hpp"
#include "steerbench/model/checkpoint.hpp"
#include "steerbench/model/generator.hpp"

namespace steerbench::model {

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t attention_heads = 4;
  std::size_t hidden_size = 128;
  std::size_t intermediate_size = 512;
  std::size_t sequence_length = 128;
  std::size_t vocab_size = 0;
  double peak_learning_rate = 5e-4;
  std::size_t warmup_steps = 1000;
  std::size_t train_steps = 20000;  // the decay reaches zero here
  std::size_t batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-6;
  double init_stddev = 0.02;
  double layer_norm_epsilon = 1e-5;
  std::uint64_t seed = 0;

  // Throws PreconditionError naming the first violated constraint.
  void check() const;
  nlohmann::ordered_json to_json() const;
  static ModelConfig from_json(const nlohmann::json& doc);
  // Warmup then linear decay; `step` counts from 1.
  double learning_rate(std::size_t step) const;
};

struct LossPoint {
  std::size_t step = 0;
  double loss = 0.0;
};

// Post-LayerNorm bidirectional encoder: token + position embeddings,
// `layers` blocks of multi-head self-attention and a GELU feed-forward
// network, and a linear readout from the final hidden state at the queried
// position. Computation runs in double precision; parameters are kept at
// float precision after every update so checkpoints reload exactly.
class Transformer final : public Generator {
 public:
  // Random initialisation from cfg.seed. cfg.vocab_size must equal the
  // vocabulary size.
  Transformer(Vocabulary vocab, ModelConfig cfg);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t sequence_length() const override { return cfg_.sequence_length; }
  std::vector<double> hole_logits(std::span<const TokenId> ids, std::size_t hole_index) const override;

  const ModelConfig& config() const { return cfg_; }
  std::size_t step() const { return step_; }
  double last_loss() const { return last_loss_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  static std::size_t parameter_count(const ModelConfig& cfg);

  // Cross-entropy of `target` at `position`. When `grad` is non-null it must
  // have parameter_count() entries and receives d(loss)/d(params) added in.
  double loss_and_gradient(std::span<const TokenId> ids, std::size_t position, TokenId target,
                           std::vector<double>* grad) const;

  // Runs `steps` optimizer steps on batches drawn from `stream`, continuing
  // the learning-rate schedule from step(). Optimizer moments start from
  // zero on every call. Validates instance shapes before the first step.
  std::vector<LossPoint> train(datagen::InfillStream& stream, std::size_t steps,
                               const std::function<void(const LossPoint&)>& on_step = {});

  Checkpoint to_checkpoint() const;
  // Throws PreconditionError on a kind/vocabulary/size mismatch.
  static Transformer from_checkpoint(const Checkpoint& ckpt, const Vocabulary& vocab);

 private:
  struct Layout;
  struct Cache;
  Transformer(Vocabulary vocab, ModelConfig cfg, std::vector<double> params);
  std::vector<double> forward(std::span<const TokenId> ids, std::size_t position, Cache* cache) const;

  Vocabulary vocab_;
  ModelConfig cfg_;
  std::vector<double> params_;
  std::size_t step_ = 0;
  double last_loss_ = 0.0;
};

// Mean of -log p(target) over `instances`, where p is the generator's
// hole distribution at temperature 1.
double mean_cross_entropy(const Generator& gen, std::span<const datagen::TrainingInstance> instances);

// step,loss
void write_loss_csv(const std::filesystem::path& path, std::span<const LossPoint> curve);

}  // namespace steerbench::model
