#pragma once

// Mini-batch training: Adam with bias correction, per-epoch learning-rate
// decay, gradient clipping and early stopping on dev entity F1.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "morphotag/checkpoint.hpp"
#include "morphotag/corpus.hpp"
#include "morphotag/diff.hpp"
#include "morphotag/eval.hpp"
#include "morphotag/model.hpp"

namespace morphotag {

enum class ClipMode : std::uint8_t { Value, Norm };

struct TrainConfig {
  double lr = 0.001;
  double lr_decay = 0.99;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip = 1.0;
  ClipMode clip_mode = ClipMode::Value;
  std::size_t batch_size = 20;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  std::uint64_t seed = kDefaultSeed;
  bool shuffle = true;
  // Groups sentences of similar length into the same batch.
  bool bucket_by_length = false;
  // Threads for dev evaluation; 0 picks the hardware concurrency.
  std::size_t eval_threads = 0;

  void validate() const;  // throws BadConfig
};

// Value mode: every component clamped to [-c, c]. Norm mode: all gradients
// rescaled together so their global L2 norm is at most c.
void clip_gradients(std::span<diff::Parameter* const> params, double clip, ClipMode mode = ClipMode::Value);

struct AdamState {
  std::vector<diff::Tensor> m;
  std::vector<diff::Tensor> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::span<diff::Parameter* const> params);
};

// One bias-corrected Adam update using the accumulated Parameter::grad.
// Throws NonFiniteGradient before touching anything if a gradient is not finite.
void adam_step(std::span<diff::Parameter* const> params, AdamState& state, double lr, const TrainConfig& config);

double epoch_lr(double initial, double decay, std::size_t epoch);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;  // mean sentence NLL over the epoch
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;

  std::string to_kv() const;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
};

// Predicts every sentence (fanned out over `threads`, results in corpus order).
LabelSequences predict_all(const Model& model, const Corpus& corpus, std::size_t threads = 0);

// Trains in place. On return the model holds the parameters of the best
// dev epoch, which are also captured in TrainResult::best.
TrainResult train(Model& model, const Corpus& train_set, const Corpus& dev_set, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace morphotag
