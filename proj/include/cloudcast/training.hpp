#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cloudcast/seq2seq.hpp"

namespace cloudcast {

// ---------------------------------------------------------------------------------------------
// Loss

struct LossResult {
  double loss = 0.0;
  std::vector<PointCloudFrame> grad;  // d loss / d pred, one frame per step
};

/// Mean squared error over value features (and coordinates when `coord_loss`), averaged over
/// channels, points, features and steps.
inline LossResult mse_loss(std::span<const PointCloudFrame> pred, std::span<const PointCloudFrame> truth,
                           bool coord_loss = false) {
  if (pred.size() != truth.size() || pred.empty())
    detail::throw_argument("mse_loss: ", pred.size(), " predicted vs ", truth.size(), " true frames");
  for (std::size_t t = 0; t < pred.size(); ++t)
    if (pred[t].shape() != truth[t].shape())
      detail::throw_argument("mse_loss: step ", t, " shape ", to_string(pred[t].shape()), " vs ",
                             to_string(truth[t].shape()));

  const auto& s = pred.front().shape();
  const std::size_t per_point = coord_loss ? s.features() : s.value_dim;
  const double count = static_cast<double>(pred.size() * s.channels * s.points * per_point);

  LossResult r;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    PointCloudFrame g(pred[t].shape());
    for (std::size_t u = 0; u < s.channels; ++u)
      for (std::size_t n = 0; n < s.points; ++n)
        for (std::size_t f = 0; f < per_point; ++f) {
          const double d = pred[t].at(u, n, f) - truth[t].at(u, n, f);
          r.loss += d * d;
          g.at(u, n, f) = 2.0 * d / count;
        }
    r.grad.push_back(std::move(g));
  }
  r.loss /= count;
  return r;
}

inline LossResult mse_loss(const StreamSequence& pred, const StreamSequence& truth, bool coord_loss = false) {
  return mse_loss(pred.frames, truth.frames, coord_loss);
}

// ---------------------------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  AdamConfig config;
  std::uint64_t step = 0;
  ParameterSet first_moment;
  ParameterSet second_moment;

  static OptimizerState init(const ParameterSet& params, AdamConfig config = {}) {
    return {config, 0, params.zeros_like(), params.zeros_like()};
  }
};

/// One bias-corrected Adam update. Throws NumericError (leaving everything untouched) when a
/// gradient entry is NaN or infinite.
inline void adam_step(ParameterSet& params, const ParameterSet& grads, OptimizerState& state) {
  params.check_same_layout(grads);
  params.check_same_layout(state.first_moment);
  for (std::size_t id = 0; id < grads.size(); ++id) {
    const auto& g = grads[id].data;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(g[i]))
        throw NumericError(detail::concat("non-finite gradient in tensor '", grads[id].name, "' at index ", i));
  }

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t id = 0; id < params.size(); ++id) {
    auto p = params.values(id);
    auto m = state.first_moment.values(id);
    auto v = state.second_moment.values(id);
    const auto g = grads.values(id);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

// ---------------------------------------------------------------------------------------------
// Dataset windows

/// Window start indices, partitioned chronologically 8:1:1.
struct DatasetSplit {
  std::size_t window_len = 0;  // M + J
  std::size_t input_len = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;

  std::size_t total() const noexcept { return train.size() + validation.size() + test.size(); }
};

/// Sliding windows of length M+J with stride 1 over a stream of T frames. The first 80% of window
/// starts train, the next 10% validate, the last 10% test (validation and test sizes are
/// floor(W / 10)).
inline DatasetSplit split_dataset(std::size_t frames, std::size_t input_len, std::size_t output_len) {
  if (input_len < 1 || output_len < 1) throw ArgumentError("split_dataset: M and J must be >= 1");
  const std::size_t len = input_len + output_len;
  if (frames < len)
    detail::throw_argument("split_dataset: stream of ", frames, " frames is shorter than one window (M+J=", len, ")");

  DatasetSplit s;
  s.window_len = len;
  s.input_len = input_len;
  const std::size_t windows = frames - len + 1;
  const std::size_t n_val = windows / 10;
  const std::size_t n_test = windows / 10;
  const std::size_t n_train = windows - n_val - n_test;
  for (std::size_t w = 0; w < windows; ++w) {
    if (w < n_train)
      s.train.push_back(w);
    else if (w < n_train + n_val)
      s.validation.push_back(w);
    else
      s.test.push_back(w);
  }
  if (frames < 10 * len)
    s.warnings.push_back(detail::concat("stream has ", frames, " frames, fewer than 10*(M+J)=", 10 * len,
                                        "; validation/test splits are small or empty"));
  return s;
}

inline DatasetSplit split_dataset(const StreamSequence& stream, std::size_t input_len, std::size_t output_len) {
  return split_dataset(stream.size(), input_len, output_len);
}

inline std::span<const PointCloudFrame> window_frames(const StreamSequence& stream, std::size_t start,
                                                      std::size_t len) {
  if (start + len > stream.size()) throw ArgumentError("window exceeds stream length");
  return std::span<const PointCloudFrame>(stream.frames).subspan(start, len);
}

// ---------------------------------------------------------------------------------------------
// Gradient checking

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;

  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

// |a - b| / max(|a|, |b|, floor); the floor keeps entries that are zero up to finite-difference
// round-off from dominating.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

/// Compares `analytic` (same layout as `params`) against central differences of `loss`.
/// `params` is perturbed in place and restored.
inline GradCheckReport grad_check(ParameterSet& params, const ParameterSet& analytic,
                                  const std::function<double(const ParameterSet&)>& loss, double step = 1e-5,
                                  double floor = 1e-6) {
  params.check_same_layout(analytic);
  GradCheckReport r;
  for (std::size_t id = 0; id < params.size(); ++id) {
    auto p = params.values(id);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + step;
      const double up = loss(params);
      p[i] = saved - step;
      const double down = loss(params);
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.values(id)[i];
      const double err = relative_error(a, numeric, floor);
      ++r.checked;
      if (err > r.max_rel_error || r.checked == 1) {
        r.max_rel_error = err;
        r.worst_tensor = params[id].name;
        r.worst_index = i;
        r.worst_analytic = a;
        r.worst_numeric = numeric;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  std::size_t patience = 5;  // epochs without validation improvement before stopping
  bool teacher_forcing = true;
  bool reproducible = true;  // fixed-order gradient reduction
  std::size_t threads = 1;
  AdamConfig adam;
  std::size_t max_batches_per_epoch = 0;  // 0 = every training window each epoch
  std::size_t max_eval_windows = 0;       // 0 = every validation window

  void validate() const {
    if (epochs < 1) throw ArgumentError("train: epochs must be >= 1");
    if (batch_size < 1) throw ArgumentError("train: batch size must be >= 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  ParameterSet best_params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool diverged = false;
  std::string message;
};

/// Loss of one window and, when `grads` is given, its accumulated parameter gradient.
inline double window_loss(const Seq2SeqModel& model, std::span<const PointCloudFrame> window, bool teacher_forcing,
                          ParameterSet* grads) {
  const auto& spec = model.spec();
  const auto history = window.first(spec.input_len);
  const auto target = window.subspan(spec.input_len, spec.output_len);
  Tape tape(model.params(), grads);
  const auto unrolled =
      model.unroll(tape, history, teacher_forcing ? target.first(spec.output_len - 1) : std::span<const PointCloudFrame>{});
  std::vector<PointCloudFrame> pred;
  for (auto v : unrolled.predictions) pred.push_back(tape.value(v));
  auto loss = mse_loss(pred, target, spec.coord_loss);
  if (grads) {
    for (std::size_t j = 0; j < pred.size(); ++j) tape.seed(unrolled.predictions[j], loss.grad[j]);
    tape.backward();
  }
  return loss.loss;
}

/// Mean forecast MSE (no teacher forcing) over the given window starts.
inline double evaluate_loss(const Seq2SeqModel& model, const StreamSequence& stream,
                            std::span<const std::size_t> starts) {
  if (starts.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto& spec = model.spec();
  double total = 0.0;
  for (auto s : starts) {
    const auto w = window_frames(stream, s, spec.input_len + spec.output_len);
    StreamSequence hist{{w.begin(), w.begin() + spec.input_len}, stream.timestep_seconds};
    const auto pred = model.forecast(hist);
    total += mse_loss(pred.frames, w.subspan(spec.input_len), spec.coord_loss).loss;
  }
  return total / static_cast<double>(starts.size());
}

// Evenly spaced subset of at most `cap` entries (cap 0 keeps everything).
inline std::vector<std::size_t> subsample(std::span<const std::size_t> xs, std::size_t cap) {
  if (cap == 0 || xs.size() <= cap) return {xs.begin(), xs.end()};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cap; ++i) out.push_back(xs[i * xs.size() / cap]);
  return out;
}

namespace detail {

// Sums per-window gradients of one mini-batch into `grads`; returns the summed loss.
inline double batch_gradient(const Seq2SeqModel& model, const StreamSequence& stream,
                             std::span<const std::size_t> batch, const TrainConfig& cfg, ParameterSet& grads) {
  const std::size_t len = model.spec().input_len + model.spec().output_len;
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, batch.size()));
  std::vector<double> losses(batch.size(), 0.0);

  if (workers == 1) {
    for (std::size_t b = 0; b < batch.size(); ++b)
      losses[b] = window_loss(model, window_frames(stream, batch[b], len), cfg.teacher_forcing, &grads);
  } else if (cfg.reproducible) {
    std::vector<ParameterSet> per_sample(batch.size(), grads.zeros_like());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < batch.size(); b += workers)
          losses[b] = window_loss(model, window_frames(stream, batch[b], len), cfg.teacher_forcing, &per_sample[b]);
      });
    for (auto& t : pool) t.join();
    for (const auto& g : per_sample) grads.add_scaled(g, 1.0);
  } else {
    std::mutex lock;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        ParameterSet local = grads.zeros_like();
        for (std::size_t b = w; b < batch.size(); b += workers)
          losses[b] = window_loss(model, window_frames(stream, batch[b], len), cfg.teacher_forcing, &local);
        std::lock_guard guard(lock);
        grads.add_scaled(local, 1.0);
      });
    for (auto& t : pool) t.join();
  }
  return std::accumulate(losses.begin(), losses.end(), 0.0);
}

}  // namespace detail

/// Mini-batch Adam on the MSE objective. Keeps the parameters with the best validation loss
/// (training loss when there is no validation split) and stops after `patience` epochs without
/// improvement. On divergence the last finite parameters are kept and `diverged` is set.
inline TrainResult train(Seq2SeqModel& model, const StreamSequence& stream, const DatasetSplit& split,
                         const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  cfg.validate();
  TrainResult result;
  if (model.spec().persistence) {
    result.message = "persistence baseline has no parameters to fit";
    return result;
  }
  if (split.train.empty()) throw ArgumentError("train: no training windows");
  if (split.window_len != model.spec().input_len + model.spec().output_len)
    throw ArgumentError("train: split window length does not match model M+J");

  std::mt19937_64 rng(cfg.seed);
  OptimizerState opt = OptimizerState::init(model.params(), cfg.adam);
  const auto val_windows = subsample(split.validation, cfg.max_eval_windows);
  result.best_params = model.params();
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(split.train.begin(), split.train.end());

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_batches = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    if (cfg.max_batches_per_epoch) n_batches = std::min(n_batches, cfg.max_batches_per_epoch);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t lo = b * cfg.batch_size;
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      std::span<const std::size_t> batch(order.data() + lo, hi - lo);
      ParameterSet grads = model.params().zeros_like();
      const ParameterSet last_good = model.params();
      try {
        const double loss = detail::batch_gradient(model, stream, batch, cfg, grads);
        if (!std::isfinite(loss)) throw NumericError(detail::concat("training loss is not finite in epoch ", epoch));
        grads.scale(1.0 / static_cast<double>(batch.size()));
        adam_step(model.params(), grads, opt);
        loss_sum += loss;
        seen += batch.size();
      } catch (const NumericError& e) {
        model.set_params(last_good);
        result.diverged = true;
        result.message = e.what();
        if (result.history.empty()) result.best_params = last_good;
        return result;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(seen);
    rec.validation_loss = val_windows.empty() ? rec.train_loss : evaluate_loss(model, stream, val_windows);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (!std::isfinite(rec.validation_loss)) {
      result.diverged = true;
      result.message = detail::concat("validation loss is not finite in epoch ", epoch);
      break;
    }
    if (rec.validation_loss < best) {
      best = rec.validation_loss;
      result.best_params = model.params();
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  model.set_params(result.best_params);
  return result;
}

}  // namespace cloudcast
