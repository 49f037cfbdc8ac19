// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers as arguments to run
// a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cloudcast/cloudcast.hpp"

namespace {

using namespace cloudcast;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kOracleRelTol = 1e-6;
constexpr double kOracleSeconds = 30.0;
constexpr double kPermutationTol = 1e-9;
constexpr double kTransformTol = 1e-9;
constexpr double kGradDConvTol = 1e-4;
constexpr double kGradModelTol = 1e-3;
constexpr double kGradSeconds = 120.0;
constexpr double kScalingFactor = 3.0;
constexpr double kPersistenceMargin = 0.10;
constexpr double kDeskTrainSeconds = 15 * 60.0;
constexpr double kKSpread = 0.15;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// 1 ------------------------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  double worst = 0.0;
  std::size_t n_min = 1000, n_max = 0, k_max = 0, u_max = 0;
  for (int inst = 0; inst < 100; ++inst) {
    // The first instances pin the corners of the ranges.
    std::size_t n = inst == 0 ? 2 : inst == 1 ? 64 : pick(2, 64);
    std::size_t k = inst == 1 ? 9 : pick(1, std::min<std::size_t>(9, n));
    std::size_t u_in = inst == 1 ? 8 : pick(1, 8);
    std::size_t u_out = inst == 0 ? 1 : pick(1, 8);
    const std::size_t h = pick(1, 2), l = pick(1, 3);
    const DConvShape s{u_in, u_out, k, h, l};
    const auto x = random_frame({u_in, n, h, l}, rng);
    DConvParams p(s, inst % 2 == 0);
    dconv_init(p.weights, p.bias, s, rng);
    std::uniform_real_distribution<double> b(-0.5, 0.5);
    for (double& v : p.bias) v = b(rng);
    const auto nbrs = knn_neighbors(x, k);
    const auto fast = dconv_forward_fast(x, p, nbrs);
    const auto naive = dconv_forward_naive(x, p, nbrs);
    for (std::size_t i = 0; i < fast.data().size(); ++i) {
      const double scale = std::max({std::abs(fast.data()[i]), std::abs(naive.data()[i]), 1e-12});
      worst = std::max(worst, std::abs(fast.data()[i] - naive.data()[i]) / scale);
    }
    n_min = std::min(n_min, n);
    n_max = std::max(n_max, n);
    k_max = std::max(k_max, k);
    u_max = std::max(u_max, std::max(u_in, u_out));
  }
  const double secs = seconds_since(start);
  return {worst < kOracleRelTol && secs < kOracleSeconds,
          "100 instances N=" + std::to_string(n_min) + ".." + std::to_string(n_max) + " K<=" + std::to_string(k_max) +
              " U<=" + std::to_string(u_max) + " max_rel_err=" + fmt("%.3g", worst) + " (tol " +
              fmt("%g", kOracleRelTol) + ") time=" + fmt("%.2f", secs) + "s (limit " + fmt("%g", kOracleSeconds) +
              "s)"};
}

ModelSpec small_spec(CellKind kind, bool attention, std::size_t channels) {
  ModelSpec m;
  m.cell_kind = kind;
  m.attention = attention;
  m.stacks = 2;
  m.channels = 3;
  m.k = 5;
  m.embed_k = 4;
  m.input_len = 4;
  m.output_len = 3;
  m.data_channels = channels;
  return m;
}

// Raw (unnormalised) stream with coordinates in kilometres.
StreamSequence raw_stream(std::size_t channels, std::size_t points, std::size_t frames, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-20.0, 35.0), value(0.0, 2.0);
  std::vector<double> xy(points * 2);
  for (double& c : xy) c = coord(rng);
  StreamSequence s{{}, 300.0};
  for (std::size_t t = 0; t < frames; ++t) {
    PointCloudFrame f({channels, points, 1, 2});
    for (std::size_t u = 0; u < channels; ++u)
      for (std::size_t n = 0; n < points; ++n) {
        f.value(u, n, 0) = value(rng);
        f.coord(u, n, 0) = xy[2 * n];
        f.coord(u, n, 1) = xy[2 * n + 1];
      }
    s.frames.push_back(f);
  }
  return s;
}

// 2 ------------------------------------------------------------------------------------------
Outcome permutation_invariance() {
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  int runs = 0;
  for (auto kind : {CellKind::rnn, CellKind::gru, CellKind::lstm})
    for (bool attn : {false, true}) {
      const auto raw = raw_stream(2, 40, 4, rng);
      const auto perm = random_permutation(40, rng);
      const auto model = Seq2SeqModel::create(small_spec(kind, attn, 2), 17 + runs);
      const auto base = model.forecast(normalize_coords(raw));
      const auto moved = model.forecast(normalize_coords(permute_points(raw, perm)));
      for (std::size_t j = 0; j < base.size(); ++j)
        worst = std::max(worst, max_abs_diff(moved.frames[j], permute_points(base.frames[j], perm)));
      ++runs;
    }
  return {worst <= kPermutationTol, std::to_string(runs) + " models (rnn/gru/lstm x attention off/on) max_abs_diff=" +
                                        fmt("%.3g", worst) + " (tol " + fmt("%g", kPermutationTol) + ")"};
}

// 3 ------------------------------------------------------------------------------------------
Outcome information_intactness() {
  std::mt19937_64 rng(3003);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  std::size_t nodes_checked = 0;
  std::string failure;
  for (int cfg = 0; cfg < 50 && failure.empty(); ++cfg) {
    ModelSpec m;
    m.cell_kind = static_cast<CellKind>(pick(0, 2));
    m.attention = pick(0, 1) == 1;
    m.stacks = pick(1, 3);
    m.channels = pick(1, 4);
    m.input_len = pick(1, 4);
    m.output_len = pick(1, 4);
    m.data_channels = pick(1, 3);
    m.value_dim = pick(1, 2);
    m.coord_dim = pick(1, 3);
    m.coord_loss = pick(0, 1) == 1;
    const std::size_t n = pick(2, 30);
    m.k = pick(1, std::min<std::size_t>(9, n));
    m.embed_k = pick(1, std::min<std::size_t>(9, n));
    const auto model = Seq2SeqModel::create(m, 100 + cfg);
    std::vector<PointCloudFrame> hist;
    for (std::size_t t = 0; t < m.input_len; ++t)
      hist.push_back(normalize_coords(random_frame({m.data_channels, n, m.value_dim, m.coord_dim}, rng)));
    Tape tape(model.params());
    const auto unrolled = model.unroll(tape, hist);
    for (std::size_t v = 0; v < tape.size(); ++v, ++nodes_checked)
      if (tape.value(v).points() != n) failure = "config " + std::to_string(cfg) + " layer output " + std::to_string(v);
    const auto out = model.forecast(StreamSequence{hist, 1.0});
    if (unrolled.predictions.size() != m.output_len || out.size() != m.output_len) failure = "wrong step count";
    for (const auto& f : out.frames)
      if (f.points() != n) failure = "config " + std::to_string(cfg) + " forecast frame";
  }
  return {failure.empty(), failure.empty() ? "50 configs, " + std::to_string(nodes_checked) +
                                                 " layer outputs and every forecast step keep N"
                                           : "N changed at " + failure};
}

// 4 ------------------------------------------------------------------------------------------
Outcome transformation_robustness() {
  std::mt19937_64 rng(4004);
  const auto raw = raw_stream(2, 35, 4, rng);
  const auto model = Seq2SeqModel::create(small_spec(CellKind::lstm, true, 2), 44);
  const auto base = model.forecast(normalize_coords(raw));
  double worst = 0.0;
  for (double a : {0.5, 3.0})
    for (double b : {-5.0, 7.0}) {
      StreamSequence moved = raw;
      for (auto& f : moved.frames)
        for (std::size_t u = 0; u < f.channels(); ++u)
          for (std::size_t n = 0; n < f.points(); ++n)
            for (std::size_t l = 0; l < f.coord_dim(); ++l) f.coord(u, n, l) = a * f.coord(u, n, l) + b;
      const auto out = model.forecast(normalize_coords(moved));
      for (std::size_t j = 0; j < out.size(); ++j) worst = std::max(worst, max_abs_diff(out.frames[j], base.frames[j]));
    }
  return {worst <= kTransformTol, "A in {0.5, 3}, B in {-5, 7}: max_abs_diff=" + fmt("%.3g", worst) + " (tol " +
                                      fmt("%g", kTransformTol) + ")"};
}

// 5 ------------------------------------------------------------------------------------------
Outcome gradient_correctness() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& c : gradcheck_suite(5005)) {
    const bool is_dconv = c.name.rfind("dconv", 0) == 0;
    const double tol = is_dconv ? kGradDConvTol : kGradModelTol;
    ok = ok && c.report.passed(tol);
    detail += c.name + "=" + fmt("%.2g", c.report.max_rel_error) + " ";
  }
  const double secs = seconds_since(start);
  ok = ok && secs < kGradSeconds;
  detail += "(tol dconv " + fmt("%g", kGradDConvTol) + ", model " + fmt("%g", kGradModelTol) +
            "; tiny model N=4 M=J=2 C=2) time=" + fmt("%.1f", secs) + "s (limit " + fmt("%g", kGradSeconds) + "s)";
  return {ok, detail};
}

// 6 ------------------------------------------------------------------------------------------
Outcome complexity_scaling() {
  ScalingConfig cfg;
  cfg.trials = 7;
  cfg.min_trial_seconds = 0.05;
  const auto rows = measure_scaling(cfg);
  bool ok = true;
  std::string detail = "N:dconv_ratio/knn_ratio";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Time per unit of modelled work relative to the smallest size; 1 means exact scaling.
    const double d = (rows[i].dconv_seconds / rows[i].dconv_weighting) / (rows[0].dconv_seconds / rows[0].dconv_weighting);
    const double k = (rows[i].knn_seconds / rows[i].knn_pairs) / (rows[0].knn_seconds / rows[0].knn_pairs);
    ok = ok && d <= kScalingFactor && d >= 1.0 / kScalingFactor && k <= kScalingFactor && k >= 1.0 / kScalingFactor;
    detail += " " + std::to_string(rows[i].points) + ":" + fmt("%.2f", d) + "/" + fmt("%.2f", k);
  }
  detail += " (allowed [1/" + fmt("%g", kScalingFactor) + ", " + fmt("%g", kScalingFactor) + "])";
  return {ok, detail};
}

// Desk-scale configuration shared by criteria 7 and 8.
struct DeskRun {
  double test_mae = 0.0;
  double train_seconds = 0.0;
  std::size_t epochs = 0;
};

ModelSpec desk_spec(bool attention, std::size_t k) {
  ModelSpec m;
  m.cell_kind = CellKind::lstm;
  m.attention = attention;
  m.stacks = 1;
  m.channels = 4;
  m.k = k;
  m.embed_k = k;
  m.input_len = 6;
  m.output_len = 6;
  m.data_channels = 4;
  return m;
}

TrainConfig desk_train_config() {
  TrainConfig c;
  c.epochs = 18;
  c.batch_size = 4;
  c.max_batches_per_epoch = 120;
  c.max_eval_windows = 30;
  c.patience = 4;
  c.teacher_forcing = false;
  c.adam.lr = 3e-3;
  c.seed = 1;
  return c;
}

double test_mae(const Seq2SeqModel& model, const StreamSequence& data, const DatasetSplit& split) {
  const auto& s = model.spec();
  std::vector<StreamSequence> preds, truths;
  for (auto start : split.test) {
    const auto w = window_frames(data, start, s.input_len + s.output_len);
    preds.push_back(model.forecast({{w.begin(), w.begin() + s.input_len}, data.timestep_seconds}));
    truths.push_back({{w.begin() + s.input_len, w.end()}, data.timestep_seconds});
  }
  return evaluate(preds, truths).mae;
}

struct DeskBench {
  StreamSequence data = generate_stream(SynthConfig{});
  DatasetSplit split = split_dataset(data, 6, 6);
  std::map<std::pair<bool, std::size_t>, DeskRun> runs;

  const DeskRun& run(bool attention, std::size_t k) {
    auto it = runs.find({attention, k});
    if (it != runs.end()) return it->second;
    auto model = Seq2SeqModel::create(desk_spec(attention, k), 1);
    const auto start = Clock::now();
    const auto result = train(model, data, split, desk_train_config());
    DeskRun r;
    r.train_seconds = seconds_since(start);
    r.epochs = result.history.size();
    r.test_mae = test_mae(model, data, split);
    std::printf("  trained %s K=%zu: %zu epochs, %.0fs, test MAE %.5f\n", model.spec().name().c_str(), k, r.epochs,
                r.train_seconds, r.test_mae);
    std::fflush(stdout);
    return runs[{attention, k}] = r;
  }
};

DeskBench& desk() {
  static DeskBench bench;
  return bench;
}

// 7 ------------------------------------------------------------------------------------------
Outcome desk_scale_forecasting() {
  auto& d = desk();
  ModelSpec p;
  p.persistence = true;
  p.data_channels = 4;
  const double persistence = test_mae(Seq2SeqModel::create(p, 0), d.data, d.split);
  const auto& attn = d.run(true, 9);
  const auto& plain = d.run(false, 9);
  const double gain = 1.0 - attn.test_mae / persistence;
  const double secs = attn.train_seconds + plain.train_seconds;
  const bool ok = gain >= kPersistenceMargin && attn.test_mae <= plain.test_mae && secs < kDeskTrainSeconds;
  return {ok, "test MAE persistence=" + fmt("%.5f", persistence) + " cloudlstm=" + fmt("%.5f", plain.test_mae) +
                  " attn-cloudlstm=" + fmt("%.5f", attn.test_mae) + " (" + fmt("%.1f", 100 * gain) +
                  "% below persistence, need " + fmt("%g", 100 * kPersistenceMargin) + "%) train time=" +
                  fmt("%.0f", secs) + "s (limit " + fmt("%g", kDeskTrainSeconds) + "s)"};
}

// 8 ------------------------------------------------------------------------------------------
Outcome k_insensitivity() {
  std::vector<double> maes;
  std::string detail = "attn-cloudlstm test MAE";
  for (std::size_t k : {3, 6, 9}) {
    maes.push_back(desk().run(true, k).test_mae);
    detail += " K=" + std::to_string(k) + ":" + fmt("%.5f", maes.back());
  }
  const double lo = *std::min_element(maes.begin(), maes.end());
  const double hi = *std::max_element(maes.begin(), maes.end());
  const double spread = (hi - lo) / lo;
  return {spread < kKSpread, detail + " spread=" + fmt("%.1f", 100 * spread) + "% (limit " + fmt("%g", 100 * kKSpread) + "%)"};
}

// 9 ------------------------------------------------------------------------------------------
Outcome metrics_self_consistency() {
  std::mt19937_64 rng(9009);
  StreamSequence s{{}, 1.0};
  for (int t = 0; t < 5; ++t) s.frames.push_back(normalize_coords(random_frame({3, 25, 2, 2}, rng)));
  const auto r = evaluate(s, s);
  const double c1 = (0.1 * 2.0) * (0.1 * 2.0);
  const double c2 = (0.3 * 2.0) * (0.3 * 2.0);
  const bool ok = r.mae == 0.0 && r.rmse == 0.0 && std::abs(r.ssim - 1.0) < 1e-15 && std::isinf(r.psnr) &&
                  r.psnr > 0 && std::abs(kSsimC1 - c1) < 1e-15 && std::abs(kSsimC2 - c2) < 1e-15 &&
                  std::abs(kSsimC1 - 0.04) < 1e-15 && std::abs(kSsimC2 - 0.36) < 1e-15;
  return {ok, "identical inputs: MAE=" + fmt("%g", r.mae) + " RMSE=" + fmt("%g", r.rmse) + " SSIM=" +
                  fmt("%.17g", r.ssim) + " PSNR=" + fmt("%g", r.psnr) + "; c1=" + fmt("%.17g", kSsimC1) +
                  " c2=" + fmt("%.17g", kSsimC2)};
}

// 10 -----------------------------------------------------------------------------------------
Outcome determinism() {
  SynthConfig sc;
  sc.points = 30;
  sc.frames = 150;
  const auto data = generate_stream(sc);
  const auto split = split_dataset(data, 6, 6);
  auto run = [&](std::size_t threads) {
    ModelSpec m = desk_spec(true, 5);
    m.channels = 3;
    auto model = Seq2SeqModel::create(m, 10);
    TrainConfig c = desk_train_config();
    c.epochs = 2;
    c.max_batches_per_epoch = 4;
    c.batch_size = 6;
    c.threads = threads;
    c.reproducible = true;
    train(model, data, split, c);
    std::ostringstream ckpt;
    save_checkpoint(model, ckpt);
    std::vector<StreamSequence> preds, truths;
    for (auto s : split.test) {
      const auto w = window_frames(data, s, 12);
      preds.push_back(model.forecast({{w.begin(), w.begin() + 6}, data.timestep_seconds}));
      truths.push_back({{w.begin() + 6, w.end()}, data.timestep_seconds});
    }
    const auto r = evaluate(preds, truths);
    std::ostringstream report;
    report.precision(17);
    report << r.mae << ' ' << r.rmse << ' ' << r.psnr << ' ' << r.ssim << ' ' << r.mae_std << ' ' << r.rmse_std << ' '
           << r.psnr_std << ' ' << r.ssim_std;
    for (const auto& m : r.per_step) report << ' ' << m.mae << ' ' << m.rmse << ' ' << m.psnr << ' ' << m.ssim;
    for (const auto& m : r.per_service) report << ' ' << m.mae << ' ' << m.rmse << ' ' << m.psnr << ' ' << m.ssim;
    return std::pair{ckpt.str(), report.str()};
  };
  bool ok = true;
  std::string detail;
  for (std::size_t threads : {1u, 3u}) {
    const auto a = run(threads);
    const auto b = run(threads);
    const bool same = a.first == b.first && a.second == b.second;
    ok = ok && same;
    detail += "threads=" + std::to_string(threads) + ": checkpoint " + std::to_string(a.first.size()) + " bytes " +
              (a.first == b.first ? "identical" : "DIFFERENT") + ", report " +
              (a.second == b.second ? "identical" : "DIFFERENT") + "; ";
  }
  return {ok, detail + "two runs each"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "permutation invariance", permutation_invariance},
      {3, "information intactness", information_intactness},
      {4, "transformation robustness", transformation_robustness},
      {5, "gradient correctness", gradient_correctness},
      {6, "complexity scaling", complexity_scaling},
      {7, "desk-scale comparative forecasting", desk_scale_forecasting},
      {8, "K insensitivity", k_insensitivity},
      {9, "metrics self-consistency", metrics_self_consistency},
      {10, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%s\n", failed ? "acceptance: FAILED" : "acceptance: all criteria passed");
  return failed ? 1 : 0;
}
