#include "morphotag/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "morphotag/error.hpp"

namespace morphotag {

void TrainConfig::validate() const {
  auto fail = [](const std::string& why) { return Error(Errc::BadConfig, why); };
  if (!(lr > 0.0)) throw fail("learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw fail("lr decay must be in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw fail("Adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw fail("Adam epsilon must be positive");
  if (!(clip > 0.0)) throw fail("clip value must be positive");
  if (batch_size == 0) throw fail("batch size must be positive");
  if (max_epochs == 0) throw fail("max epochs must be positive");
  if (patience == 0) throw fail("patience must be at least 1");
}

void clip_gradients(std::span<diff::Parameter* const> params, double clip, ClipMode mode) {
  if (mode == ClipMode::Value) {
    for (auto* p : params)
      for (auto& g : p->grad.data) g = std::min(std::max(g, -clip), clip);
    return;
  }
  double sq = 0.0;
  for (auto* p : params)
    for (double g : p->grad.data) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= clip) return;
  const double k = clip / norm;
  for (auto* p : params)
    for (auto& g : p->grad.data) g *= k;
}

AdamState AdamState::for_params(std::span<diff::Parameter* const> params) {
  AdamState s;
  for (auto* p : params) {
    s.m.emplace_back(p->value.shape);
    s.v.emplace_back(p->value.shape);
  }
  return s;
}

void adam_step(std::span<diff::Parameter* const> params, AdamState& state, double lr, const TrainConfig& config) {
  if (state.m.size() != params.size()) throw Error(Errc::ShapeMismatch, "Adam state does not match parameters");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (state.m[k].shape != params[k]->value.shape)
      throw Error(Errc::ShapeMismatch, "Adam moments of '" + params[k]->id + "' have the wrong shape");
    if (!params[k]->grad.all_finite())
      throw Error(Errc::NonFiniteGradient, "gradient of '" + params[k]->id + "' is not finite");
  }
  ++state.step;
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& theta = params[k]->value.data;
    const auto& g = params[k]->grad.data;
    auto& m = state.m[k].data;
    auto& v = state.v[k].data;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

double epoch_lr(double initial, double decay, std::size_t epoch) {
  return initial * std::pow(decay, static_cast<double>(epoch));
}

std::string EpochLog::to_kv() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "epoch=%zu lr=%.9g train_loss=%.9g dev_precision=%.2f dev_recall=%.2f dev_f1=%.2f",
                epoch, lr, train_loss, dev_precision, dev_recall, dev_f1);
  return buf;
}

LabelSequences predict_all(const Model& model, const Corpus& corpus, std::size_t threads) {
  const std::size_t n = corpus.sentences.size();
  LabelSequences out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = model.predict(corpus.sentences[i]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) out[i] = model.predict(corpus.sentences[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> make_batches(const Corpus& corpus, const TrainConfig& config, Rng& rng) {
  std::vector<std::size_t> order(corpus.sentences.size());
  std::iota(order.begin(), order.end(), 0);
  if (config.shuffle) rng.shuffle(order);
  if (config.bucket_by_length) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return corpus.sentences[a].size() < corpus.sentences[b].size();
    });
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += config.batch_size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + config.batch_size)));
  if (config.bucket_by_length && config.shuffle) rng.shuffle(batches);
  return batches;
}

}  // namespace

TrainResult train(Model& model, const Corpus& train_set, const Corpus& dev_set, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (train_set.sentences.empty()) throw Error(Errc::EmptyFile, "training corpus is empty");
  for (const auto& s : train_set.sentences) s.labels();
  for (const auto& s : dev_set.sentences) s.labels();

  const auto params = model.trainable();
  AdamState adam = AdamState::for_params(params);
  Rng rng(config.seed);
  const auto dev_gold = gold_labels(dev_set);

  TrainResult result;
  result.best_dev_f1 = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = epoch_lr(config.lr, config.lr_decay, epoch);
    double loss_sum = 0.0;
    for (const auto& batch : make_batches(train_set, config, rng)) {
      model.params().zero_grad();
      const double weight = 1.0 / static_cast<double>(batch.size());
      try {
        for (auto idx : batch) {
          diff::Tape tape;
          const auto loss = model.loss(tape, train_set.sentences[idx], true, &rng);
          loss_sum += tape.value(loss).item();
          tape.backward(loss, weight);
        }
        clip_gradients(params, config.clip, config.clip_mode);
        adam_step(params, adam, lr, config);
      } catch (const Error& e) {
        if (e.code() == Errc::NonFiniteValue || e.code() == Errc::NonFiniteGradient)
          throw Error(Errc::DivergedLoss, "epoch " + std::to_string(epoch + 1) + ": " + e.what());
        throw;
      }
    }

    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.train_loss = loss_sum / static_cast<double>(train_set.sentences.size());
    if (!std::isfinite(log.train_loss)) throw Error(Errc::DivergedLoss, "epoch " + std::to_string(log.epoch));
    const auto report = score(dev_gold, predict_all(model, dev_set, config.eval_threads));
    log.dev_precision = report.overall.precision();
    log.dev_recall = report.overall.recall();
    log.dev_f1 = report.overall.f1();
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);

    if (log.dev_f1 > result.best_dev_f1) {
      result.best_dev_f1 = log.dev_f1;
      result.best_epoch = log.epoch;
      result.best = snapshot(model, log.dev_f1, log.epoch);
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  copy_params(result.best, model);
  return result;
}

}  // namespace morphotag
