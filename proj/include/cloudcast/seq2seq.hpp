#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cloudcast/cells.hpp"

namespace cloudcast {

/// Architecture description of a forecaster.
struct ModelSpec {
  bool persistence = false;  // copy the last observed frame; no parameters
  CellKind cell_kind = CellKind::lstm;
  std::size_t stacks = 2;
  std::size_t channels = 36;
  std::size_t k = 9;
  std::size_t input_len = 6;   // M
  std::size_t output_len = 6;  // J
  bool attention = false;
  std::size_t embed_k = 9;   // neighbourhood of the input/output CloudCNN layers
  std::size_t attn_dim = 0;  // 0 -> channels
  bool coord_loss = false;

  // Layout of the data the model consumes and emits.
  std::size_t data_channels = 1;  // U
  std::size_t value_dim = 1;      // H
  std::size_t coord_dim = 2;      // L

  std::size_t attention_dim() const noexcept { return attn_dim ? attn_dim : channels; }

  void validate() const {
    if (input_len < 1 || output_len < 1) throw ArgumentError("model: input and output lengths must be >= 1");
    if (data_channels < 1 || coord_dim < 1) throw ArgumentError("model: data needs >= 1 channel and coordinate");
    if (persistence) return;
    if (stacks < 1) throw ArgumentError("model: stacks must be >= 1");
    if (channels < 1 || k < 1 || embed_k < 1) throw ArgumentError("model: channels and K must be >= 1");
  }

  // CLI-facing name of the architecture.
  std::string name() const {
    if (persistence) return "persistence";
    return (attention ? "attn-" : "") + to_string(cell_kind);
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Applies a CLI model name (cloudrnn, cloudgru, cloudlstm, attn-cloudlstm, persistence).
inline void apply_model_name(ModelSpec& spec, std::string name) {
  spec.persistence = false;
  spec.attention = false;
  if (name == "persistence") {
    spec.persistence = true;
    return;
  }
  if (name.rfind("attn-", 0) == 0) {
    spec.attention = true;
    name = name.substr(5);
  }
  if (name == "cloudrnn")
    spec.cell_kind = CellKind::rnn;
  else if (name == "cloudgru")
    spec.cell_kind = CellKind::gru;
  else if (name == "cloudlstm")
    spec.cell_kind = CellKind::lstm;
  else
    throw ArgumentError("unknown model '" + name + "'");
}

/// Encoder-decoder over point-cloud recurrent cells.
///
/// Frames enter through a CloudCNN embedding (U -> C channels), pass an encoder stack, and a
/// decoder stack initialised with the final encoder states unrolls J steps. With attention the top
/// decoder state is joined (channel-wise) with its context and projected back to C channels by a
/// single-neighbour D-Conv. A final CloudCNN layer maps C -> U channels.
class Seq2SeqModel {
 public:
  struct Unrolled {
    std::vector<Tape::Var> predictions;
    std::vector<std::vector<double>> attention_weights;  // per decoder step, (M, N)
  };

  Seq2SeqModel() = default;

  static Seq2SeqModel create(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    Seq2SeqModel m;
    m.spec_ = spec;
    if (spec.persistence) return m;
    const std::size_t c = spec.channels;
    const std::size_t h = spec.value_dim;
    const std::size_t l = spec.coord_dim;
    auto& ps = m.params_;
    m.embed_ = DConvLayer::create(ps, "embed", {spec.data_channels, c, spec.embed_k, h, l}, true);
    for (std::size_t s = 0; s < spec.stacks; ++s)
      m.encoder_.push_back(Cell::create(ps, "enc" + std::to_string(s), spec.cell_kind, c, c, spec.k, h, l));
    for (std::size_t s = 0; s < spec.stacks; ++s)
      m.decoder_.push_back(Cell::create(ps, "dec" + std::to_string(s), spec.cell_kind, c, c, spec.k, h, l));
    if (spec.attention) {
      m.attention_ = AttentionLayer::create(ps, "attn", spec.attention_dim(), c, h + l);
      m.combine_ = DConvLayer::create(ps, "attn.combine", {2 * c, c, 1, h, l}, true);
    }
    m.output_ = DConvLayer::create(ps, "output", {c, spec.data_channels, spec.embed_k, h, l}, true);
    m.initialize(seed);
    return m;
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const ParameterSet& params() const noexcept { return params_; }
  ParameterSet& params() noexcept { return params_; }

  // Replaces all parameters; the layout must match.
  void set_params(ParameterSet ps) {
    params_.check_same_layout(ps);
    params_ = std::move(ps);
  }

  /// Builds the forward graph. `teacher`, when non-empty, holds the J-1 ground-truth frames fed to
  /// the decoder after the first step instead of its own predictions.
  Unrolled unroll(Tape& tape, std::span<const PointCloudFrame> history,
                  std::span<const PointCloudFrame> teacher = {}) const {
    check_history(history);
    if (spec_.persistence) throw ArgumentError("persistence model has no graph to unroll");
    if (!teacher.empty() && teacher.size() + 1 < spec_.output_len)
      throw_argument_teacher(teacher.size());

    const auto& last = history.back();
    const auto window = history.subspan(history.size() - spec_.input_len);

    std::vector<CellVars> states;
    for (const auto& cell : encoder_) states.push_back(to_tape(tape, initial_state(cell, window.front())));

    std::vector<Tape::Var> encoder_top;
    for (const auto& frame : window) {
      Tape::Var x = embed(tape, tape.constant(frame));
      for (std::size_t s = 0; s < encoder_.size(); ++s) {
        states[s] = cell_step(tape, encoder_[s], x, states[s]);
        x = states[s].hidden;
      }
      encoder_top.push_back(x);
    }

    Unrolled out;
    Tape::Var next_input = tape.constant(last);
    for (std::size_t j = 0; j < spec_.output_len; ++j) {
      Tape::Var x = embed(tape, next_input);
      for (std::size_t s = 0; s < decoder_.size(); ++s) {
        states[s] = cell_step(tape, decoder_[s], x, states[s]);
        x = states[s].hidden;
      }
      if (spec_.attention) {
        std::vector<double> weights;
        const Tape::Var ctx = tape.attention(encoder_top, x, attention_, &weights);
        out.attention_weights.push_back(std::move(weights));
        const Tape::Var joined = tape.concat_channels(x, ctx);
        const auto ident = std::make_shared<const NeighborTable>(
            NeighborTable::identity(2 * spec_.channels, last.points()));
        x = tape.dconv(joined, combine_, ident);
      }
      const Tape::Var pred = tape.dconv(x, output_, tape.neighbors(x, spec_.embed_k));
      out.predictions.push_back(pred);

      if (!teacher.empty() && j + 1 < spec_.output_len)
        next_input = tape.constant(teacher[j]);
      else
        next_input = spec_.coord_loss ? pred : tape.splice_coords(pred, last);
    }
    return out;
  }

  /// Forecasts J frames from the last M frames of `history`. Without coord_loss the forecast
  /// frames carry the coordinates of the last observed frame.
  StreamSequence forecast(const StreamSequence& history) const {
    std::span<const PointCloudFrame> frames = history.frames;
    check_history(frames);
    StreamSequence out{{}, history.timestep_seconds};
    if (spec_.persistence) {
      out.frames.assign(spec_.output_len, frames.back());
      return out;
    }
    Tape tape(params_);
    const auto unrolled = unroll(tape, frames);
    for (auto v : unrolled.predictions) {
      PointCloudFrame f = tape.value(v);
      // Coordinates are only learned with coord_loss; otherwise report the observed ones.
      if (!spec_.coord_loss)
        for (std::size_t u = 0; u < f.channels(); ++u)
          for (std::size_t n = 0; n < f.points(); ++n)
            for (std::size_t l = 0; l < f.coord_dim(); ++l) f.coord(u, n, l) = frames.back().coord(u, n, l);
      out.frames.push_back(std::move(f));
    }
    return out;
  }

 private:
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t id = 0; id < params_.size(); ++id) {
      auto& t = params_[id];
      if (t.shape.size() == 5) {
        const DConvShape s{t.shape[0], t.shape[4], t.shape[1], spec_.value_dim, spec_.coord_dim};
        std::uniform_real_distribution<double> dist(-dconv_init_bound(s), dconv_init_bound(s));
        for (double& w : t.data) w = dist(rng);
      } else if (t.name == "attn.wa" || t.name == "attn.va") {
        const double fan = static_cast<double>(t.shape.size() == 2 ? t.shape[0] + t.shape[1] : t.shape[0] + 1);
        std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / fan), std::sqrt(6.0 / fan));
        for (double& w : t.data) w = dist(rng);
      }
      // biases start at zero
    }
  }

  void check_history(std::span<const PointCloudFrame> history) const {
    if (history.size() < spec_.input_len)
      detail::throw_argument("forecast: history has ", history.size(), " frames, model needs M=", spec_.input_len);
    const auto& s = history.back().shape();
    if (s.channels != spec_.data_channels || s.value_dim != spec_.value_dim || s.coord_dim != spec_.coord_dim)
      detail::throw_argument("forecast: frame shape ", to_string(s), " does not match model (U=", spec_.data_channels,
                             ", H=", spec_.value_dim, ", L=", spec_.coord_dim, ")");
    for (const auto& f : history)
      if (f.shape() != s) throw ArgumentError("forecast: history frames differ in shape");
    if (!spec_.persistence && (s.points < spec_.k || s.points < spec_.embed_k))
      detail::throw_argument("forecast: K exceeds the point count N=", s.points);
  }

  [[noreturn]] void throw_argument_teacher(std::size_t got) const {
    detail::throw_argument("unroll: teacher forcing needs ", spec_.output_len - 1, " frames, got ", got);
  }

  Tape::Var embed(Tape& tape, Tape::Var frame) const {
    return tape.dconv(frame, embed_, tape.neighbors(frame, spec_.embed_k));
  }

  static CellVars to_tape(Tape& tape, const CellState& s) {
    CellVars v{tape.constant(s.hidden), std::nullopt};
    if (s.memory) v.memory = tape.constant(*s.memory);
    return v;
  }

  ModelSpec spec_;
  ParameterSet params_;
  DConvLayer embed_;
  std::vector<Cell> encoder_;
  std::vector<Cell> decoder_;
  AttentionLayer attention_;
  DConvLayer combine_;
  DConvLayer output_;
};

}  // namespace cloudcast
