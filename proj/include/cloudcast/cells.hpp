#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "cloudcast/tape.hpp"

namespace cloudcast {

enum class CellKind { rnn, gru, lstm };

inline std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::rnn: return "cloudrnn";
    case CellKind::gru: return "cloudgru";
    case CellKind::lstm: return "cloudlstm";
  }
  return "?";
}

// Gate paths (x*/h* feeding a sigmoid) use the D-Conv without the coordinate sigmoid; the
// candidate/memory paths keep it.
struct LstmParams {
  DConvLayer xi, hi, xf, hf, xc, hc, xo, ho;
  ParameterSet::Id bi = 0, bf = 0, bc = 0, bo = 0;
};

struct GruParams {
  DConvLayer xz, hz, xr, hr, xh, hh;
  ParameterSet::Id bz = 0, br = 0;
};

struct RnnParams {
  DConvLayer in_to_hidden, prev_to_hidden, hidden_to_out;
  ParameterSet::Id bh = 0, by = 0;
};

using CellParams = std::variant<RnnParams, GruParams, LstmParams>;

/// Recurrent state: hidden frame H_t and, for LSTM cells, the memory frame C_t.
struct CellState {
  PointCloudFrame hidden;
  std::optional<PointCloudFrame> memory;
};

/// Handles to the parameters of one recurrent cell.
struct Cell {
  CellKind kind = CellKind::lstm;
  std::size_t in_channels = 0;
  std::size_t channels = 0;
  std::size_t k = 1;
  CellParams params;

  static Cell create(ParameterSet& ps, const std::string& name, CellKind kind, std::size_t in_channels,
                     std::size_t channels, std::size_t k, std::size_t value_dim, std::size_t coord_dim) {
    Cell c{kind, in_channels, channels, k, {}};
    const DConvShape from_x{in_channels, channels, k, value_dim, coord_dim};
    const DConvShape from_h{channels, channels, k, value_dim, coord_dim};
    const std::size_t f = value_dim + coord_dim;
    auto path = [&](const char* tag, const DConvShape& s, bool coord_sigmoid) {
      return DConvLayer::create(ps, name + "." + tag, s, coord_sigmoid);
    };
    auto bias = [&](const char* tag) { return ps.add(name + "." + tag, {channels, f}); };
    switch (kind) {
      case CellKind::lstm: {
        LstmParams p;
        p.xi = path("xi", from_x, false);
        p.hi = path("hi", from_h, false);
        p.xf = path("xf", from_x, false);
        p.hf = path("hf", from_h, false);
        p.xc = path("xc", from_x, true);
        p.hc = path("hc", from_h, true);
        p.xo = path("xo", from_x, false);
        p.ho = path("ho", from_h, false);
        p.bi = bias("bi");
        p.bf = bias("bf");
        p.bc = bias("bc");
        p.bo = bias("bo");
        c.params = p;
        break;
      }
      case CellKind::gru: {
        GruParams p;
        p.xz = path("xz", from_x, false);
        p.hz = path("hz", from_h, false);
        p.xr = path("xr", from_x, false);
        p.hr = path("hr", from_h, false);
        p.xh = path("xh", from_x, false);
        p.hh = path("hh", from_h, false);
        p.bz = bias("bz");
        p.br = bias("br");
        c.params = p;
        break;
      }
      case CellKind::rnn: {
        RnnParams p;
        p.in_to_hidden = path("xh", from_x, false);
        p.prev_to_hidden = path("yh", from_h, false);
        p.hidden_to_out = path("hy", from_h, false);
        p.bh = bias("bh");
        p.by = bias("by");
        c.params = p;
        break;
      }
    }
    return c;
  }
};

/// Cell state while it lives on a tape.
struct CellVars {
  Tape::Var hidden = 0;
  std::optional<Tape::Var> memory;
};

namespace detail {

inline void check_cell_inputs(const Tape& tape, const Cell& cell, Tape::Var x, const CellVars& s) {
  const auto& vx = tape.value(x);
  const auto& vh = tape.value(s.hidden);
  if (vx.channels() != cell.in_channels)
    throw_argument("cell step: input has ", vx.channels(), " channels, cell expects ", cell.in_channels);
  if (vh.channels() != cell.channels)
    throw_argument("cell step: hidden has ", vh.channels(), " channels, cell expects ", cell.channels);
  if (vx.points() != vh.points() || vx.value_dim() != vh.value_dim() || vx.coord_dim() != vh.coord_dim())
    throw ArgumentError("cell step: input and hidden state disagree on points or feature layout");
  if ((cell.kind == CellKind::lstm) != s.memory.has_value())
    throw ArgumentError("cell step: memory frame must be present exactly for LSTM cells");
  if (s.memory && tape.value(*s.memory).shape() != vh.shape())
    throw ArgumentError("cell step: memory and hidden frames differ in shape");
}

}  // namespace detail

/// One recurrent step on the tape. Neighbour tables are rebuilt from the current input (x paths)
/// and previous hidden state (h paths).
inline CellVars cell_step(Tape& tape, const Cell& cell, Tape::Var x, const CellVars& prev) {
  detail::check_cell_inputs(tape, cell, x, prev);
  const auto nx = tape.neighbors(x, cell.k);
  const auto nh = tape.neighbors(prev.hidden, cell.k);
  const Tape::Var h = prev.hidden;

  auto pre = [&](const DConvLayer& wx, const DConvLayer& wh, ParameterSet::Id b) {
    return tape.add_bias(tape.add(tape.dconv(x, wx, nx), tape.dconv(h, wh, nh)), b);
  };

  if (const auto* p = std::get_if<LstmParams>(&cell.params)) {
    const auto in_gate = tape.sigmoid(pre(p->xi, p->hi, p->bi));
    const auto forget = tape.sigmoid(pre(p->xf, p->hf, p->bf));
    const auto cand = tape.tanh(pre(p->xc, p->hc, p->bc));
    const auto out_gate = tape.sigmoid(pre(p->xo, p->ho, p->bo));
    const auto memory = tape.add(tape.mul(forget, *prev.memory), tape.mul(in_gate, cand));
    return {tape.mul(out_gate, tape.tanh(memory)), memory};
  }
  if (const auto* p = std::get_if<GruParams>(&cell.params)) {
    const auto update = tape.sigmoid(pre(p->xz, p->hz, p->bz));
    const auto reset = tape.sigmoid(pre(p->xr, p->hr, p->br));
    const auto cand = tape.tanh(tape.add(tape.mul(reset, tape.dconv(h, p->hh, nh)), tape.dconv(x, p->xh, nx)));
    return {tape.add(tape.mul(tape.one_minus(update), cand), tape.mul(update, h)), std::nullopt};
  }
  const auto& p = std::get<RnnParams>(cell.params);
  const auto hidden = tape.sigmoid(pre(p.in_to_hidden, p.prev_to_hidden, p.bh));
  const auto nhid = tape.neighbors(hidden, cell.k);
  const auto y = tape.sigmoid(tape.add_bias(tape.dconv(hidden, p.hidden_to_out, nhid), p.by));
  return {y, std::nullopt};
}

namespace detail {

inline CellState run_single_step(const ParameterSet& ps, const Cell& cell, const PointCloudFrame& x,
                                 const CellState& state) {
  Tape tape(ps);
  CellVars prev{tape.constant(state.hidden), std::nullopt};
  if (state.memory) prev.memory = tape.constant(*state.memory);
  const auto next = cell_step(tape, cell, tape.constant(x), prev);
  CellState out{tape.value(next.hidden), std::nullopt};
  if (next.memory) out.memory = tape.value(*next.memory);
  return out;
}

inline void expect_kind(const Cell& cell, CellKind kind) {
  if (cell.kind != kind)
    throw_argument("cell is ", to_string(cell.kind), ", expected ", to_string(kind));
}

}  // namespace detail

inline CellState cloudlstm_step(const ParameterSet& ps, const Cell& cell, const PointCloudFrame& x,
                                const CellState& state) {
  detail::expect_kind(cell, CellKind::lstm);
  return detail::run_single_step(ps, cell, x, state);
}

inline CellState cloudgru_step(const ParameterSet& ps, const Cell& cell, const PointCloudFrame& x,
                               const CellState& state) {
  detail::expect_kind(cell, CellKind::gru);
  return detail::run_single_step(ps, cell, x, state);
}

// Returns y_t given the input and the previous output y_{t-1}.
inline PointCloudFrame cloudrnn_step(const ParameterSet& ps, const Cell& cell, const PointCloudFrame& x,
                                     const PointCloudFrame& y_prev) {
  detail::expect_kind(cell, CellKind::rnn);
  return detail::run_single_step(ps, cell, x, {y_prev, std::nullopt}).hidden;
}

/// Initial state: zero value rows, coordinate rows copied from `geometry` (channel 0) into every
/// hidden channel. The memory frame, when present, starts the same way.
inline CellState initial_state(const Cell& cell, const PointCloudFrame& geometry) {
  CellState s{replicate_coords(geometry, cell.channels), std::nullopt};
  if (cell.kind == CellKind::lstm) s.memory = s.hidden;
  return s;
}

}  // namespace cloudcast
