#pragma once

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cloudcast/cloudcast.hpp"

namespace cloudcast::cli {

inline std::string fmt_exact(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Worker count from CLOUDCAST_THREADS; 1 when unset.
inline std::size_t threads_from_env() {
  const char* raw = std::getenv("CLOUDCAST_THREADS");
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1) throw ArgumentError(std::string("CLOUDCAST_THREADS must be a positive integer, got '") + raw + "'");
  return static_cast<std::size_t>(v);
}

struct GenOptions {
  std::string out;
  SynthConfig synth;
};

struct ModelOptions {
  std::string model = "attn-cloudlstm";
  std::size_t k = 9;
  std::size_t channels = 36;
  std::size_t stacks = 2;
  std::size_t in_len = 6;
  std::size_t out_len = 6;
  std::size_t embed_k = 9;
  std::size_t attn_dim = 0;
  bool coord_loss = false;
};

struct TrainOptions {
  std::string data;
  std::string out;
  std::string history;
  ModelOptions model;
  TrainConfig train;
  double lr = 1e-3;
  bool no_teacher_forcing = false;
};

struct EvalOptions {
  std::string data;
  std::string checkpoint;
  std::string model;  // "persistence" instead of a checkpoint
  std::size_t in_len = 6;
  std::size_t out_len = 6;
  std::size_t max_windows = 0;
  std::string json;
};

struct ForecastOptions {
  std::string data;
  std::string checkpoint;
  std::optional<std::size_t> start;
  std::string out;
};

struct BenchOptions {
  ScalingConfig scaling;
};

inline void log_config(std::ostream& err, const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& fields) {
  err << "[cloudcast] " << command;
  for (const auto& [k, v] : fields) err << ' ' << k << '=' << v;
  err << '\n';
}

inline ModelSpec model_spec_from(const ModelOptions& o, const StreamSequence& data) {
  ModelSpec spec;
  apply_model_name(spec, o.model);
  spec.k = o.k;
  spec.channels = o.channels;
  spec.stacks = o.stacks;
  spec.input_len = o.in_len;
  spec.output_len = o.out_len;
  spec.embed_k = o.embed_k;
  spec.attn_dim = o.attn_dim;
  spec.coord_loss = o.coord_loss;
  const auto& shape = data.shape();
  spec.data_channels = shape.channels;
  spec.value_dim = shape.value_dim;
  spec.coord_dim = shape.coord_dim;
  spec.validate();
  if (!spec.persistence && (spec.k > shape.points || spec.embed_k > shape.points))
    detail::throw_argument("K=", spec.k, " / embed K=", spec.embed_k, " exceed the dataset's N=", shape.points);
  return spec;
}

inline void check_data_matches(const ModelSpec& spec, const StreamSequence& data) {
  const auto& s = data.shape();
  if (s.channels != spec.data_channels || s.value_dim != spec.value_dim || s.coord_dim != spec.coord_dim)
    detail::throw_argument("dataset shape ", to_string(s), " conflicts with the checkpoint (U=", spec.data_channels,
                           ", H=", spec.value_dim, ", L=", spec.coord_dim, ")");
}

inline std::vector<std::pair<std::string, std::string>> spec_fields(const ModelSpec& s) {
  if (s.persistence)
    return {{"model", s.name()}, {"in_len", std::to_string(s.input_len)}, {"out_len", std::to_string(s.output_len)}};
  return {{"model", s.name()},
          {"stacks", std::to_string(s.stacks)},
          {"channels", std::to_string(s.channels)},
          {"k", std::to_string(s.k)},
          {"embed_k", std::to_string(s.embed_k)},
          {"in_len", std::to_string(s.input_len)},
          {"out_len", std::to_string(s.output_len)},
          {"attn_dim", std::to_string(s.attention_dim())},
          {"coord_loss", s.coord_loss ? "1" : "0"}};
}

inline int run_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  const auto& c = o.synth;
  log_config(err, "gen",
             {{"out", o.out},
              {"points", std::to_string(c.points)},
              {"channels", std::to_string(c.channels)},
              {"frames", std::to_string(c.frames)},
              {"sources", std::to_string(c.sources)},
              {"mobility", fmt_exact(c.mobility)},
              {"sigma", fmt_exact(c.source_sigma)},
              {"amplitude", fmt_exact(c.amplitude)},
              {"period", std::to_string(c.period)},
              {"seasonal", fmt_exact(c.seasonal_amplitude)},
              {"noise", fmt_exact(c.noise_std)},
              {"dt", fmt_exact(c.timestep_seconds)},
              {"seed", std::to_string(c.seed)}});
  const auto stream = generate_stream(c);
  write_stream(stream, o.out);
  out << "wrote " << stream.size() << " frames of " << to_string(stream.shape()) << " to " << o.out << '\n';
  return 0;
}

inline int run_train(TrainOptions o, std::ostream& out, std::ostream& err) {
  const auto data = read_stream(o.data);
  const ModelSpec spec = model_spec_from(o.model, data);
  o.train.threads = threads_from_env();
  o.train.adam.lr = o.lr;
  o.train.teacher_forcing = !o.no_teacher_forcing;
  o.train.validate();

  auto fields = spec_fields(spec);
  fields.insert(fields.begin(), {{"data", o.data}, {"out", o.out}});
  for (auto kv : std::vector<std::pair<std::string, std::string>>{
           {"epochs", std::to_string(o.train.epochs)},
           {"batch", std::to_string(o.train.batch_size)},
           {"lr", fmt_exact(o.train.adam.lr)},
           {"patience", std::to_string(o.train.patience)},
           {"teacher_forcing", o.train.teacher_forcing ? "1" : "0"},
           {"max_batches", std::to_string(o.train.max_batches_per_epoch)},
           {"max_eval", std::to_string(o.train.max_eval_windows)},
           {"threads", std::to_string(o.train.threads)},
           {"reproducible", o.train.reproducible ? "1" : "0"},
           {"seed", std::to_string(o.train.seed)}})
    fields.push_back(kv);
  log_config(err, "train", fields);

  const auto split = split_dataset(data, spec.input_len, spec.output_len);
  for (const auto& w : split.warnings) err << "warning: " << w << '\n';
  out << "windows train=" << split.train.size() << " validation=" << split.validation.size()
      << " test=" << split.test.size() << '\n';

  Seq2SeqModel model = Seq2SeqModel::create(spec, o.train.seed);
  out << "parameters " << model.params().scalar_count() << '\n';
  const auto result = train(model, data, split, o.train, [&](const EpochRecord& r) {
    out << "epoch " << r.epoch << " train_mse=" << fmt_short(r.train_loss) << " val_mse=" << fmt_short(r.validation_loss)
        << " seconds=" << fmt_short(r.seconds) << std::endl;
  });
  if (!result.message.empty()) err << result.message << '\n';
  save_checkpoint(model, o.out);
  out << "checkpoint " << o.out << " (best epoch " << result.best_epoch << ")\n";

  if (!o.history.empty()) {
    std::ofstream h(o.history);
    if (!h) throw std::runtime_error("cannot open '" + o.history + "' for writing");
    h << "epoch,train_mse,validation_mse\n";
    for (const auto& r : result.history)
      h << r.epoch << ',' << fmt_exact(r.train_loss) << ',' << fmt_exact(r.validation_loss) << '\n';
  }
  if (result.diverged) {
    err << "error: training diverged; the last finite parameters were saved\n";
    return 3;
  }
  return 0;
}

inline Seq2SeqModel load_model(const std::string& checkpoint, const std::string& model, std::size_t in_len,
                               std::size_t out_len, const StreamSequence& data) {
  if (!checkpoint.empty()) {
    Seq2SeqModel m = load_checkpoint(checkpoint);
    check_data_matches(m.spec(), data);
    return m;
  }
  if (model != "persistence") throw ArgumentError("either --checkpoint or --model persistence is required");
  ModelOptions o;
  o.model = model;
  o.in_len = in_len;
  o.out_len = out_len;
  return Seq2SeqModel::create(model_spec_from(o, data), 0);
}

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return fmt_exact(v);
}

inline nlohmann::json json_values(const MetricValues& m) {
  return {{"mae", json_number(m.mae)},
          {"rmse", json_number(m.rmse)},
          {"psnr", json_number(m.psnr)},
          {"ssim", json_number(m.ssim)}};
}

/// Key=value lines for a report; every real uses 17 significant digits.
inline std::string report_key_values(const MetricReport& r, const std::string& model) {
  std::ostringstream os;
  os << "model=" << model << '\n';
  os << "instances=" << r.instances << '\n';
  os << "v_max=" << fmt_exact(r.v_max) << '\n';
  os << "mae=" << fmt_exact(r.mae) << "\nmae_std=" << fmt_exact(r.mae_std) << '\n';
  os << "rmse=" << fmt_exact(r.rmse) << "\nrmse_std=" << fmt_exact(r.rmse_std) << '\n';
  os << "psnr=" << fmt_exact(r.psnr) << "\npsnr_std=" << fmt_exact(r.psnr_std) << '\n';
  os << "ssim=" << fmt_exact(r.ssim) << "\nssim_std=" << fmt_exact(r.ssim_std) << '\n';
  auto block = [&](const std::string& prefix, const std::vector<MetricValues>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << prefix << i + 1 << ".mae=" << fmt_exact(rows[i].mae) << '\n';
      os << prefix << i + 1 << ".rmse=" << fmt_exact(rows[i].rmse) << '\n';
      os << prefix << i + 1 << ".psnr=" << fmt_exact(rows[i].psnr) << '\n';
      os << prefix << i + 1 << ".ssim=" << fmt_exact(rows[i].ssim) << '\n';
    }
  };
  block("step", r.per_step);
  block("service", r.per_service);
  return os.str();
}

/// Forecasts every given test window and scores the result.
inline MetricReport evaluate_windows(const Seq2SeqModel& model, const StreamSequence& data,
                                     std::span<const std::size_t> starts) {
  if (starts.empty()) throw ArgumentError("no test windows to evaluate; the dataset is too short");
  const auto& spec = model.spec();
  std::vector<StreamSequence> preds, truths;
  for (const auto s : starts) {
    const auto w = window_frames(data, s, spec.input_len + spec.output_len);
    StreamSequence hist{{w.begin(), w.begin() + spec.input_len}, data.timestep_seconds};
    preds.push_back(model.forecast(hist));
    truths.push_back({{w.begin() + spec.input_len, w.end()}, data.timestep_seconds});
  }
  return evaluate(preds, truths);
}

inline int run_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = read_stream(o.data);
  const Seq2SeqModel model = load_model(o.checkpoint, o.model, o.in_len, o.out_len, data);
  const auto& spec = model.spec();
  auto fields = spec_fields(spec);
  fields.insert(fields.begin(), {{"data", o.data}, {"checkpoint", o.checkpoint.empty() ? "-" : o.checkpoint}});
  fields.push_back({"max_windows", std::to_string(o.max_windows)});
  fields.push_back({"json", o.json.empty() ? "-" : o.json});
  log_config(err, "eval", fields);

  const auto split = split_dataset(data, spec.input_len, spec.output_len);
  for (const auto& w : split.warnings) err << "warning: " << w << '\n';
  const auto starts = subsample(split.test, o.max_windows);
  const MetricReport r = evaluate_windows(model, data, starts);

  out << "model       " << spec.name() << '\n';
  out << "test windows " << r.instances << " (J=" << spec.output_len << ")\n";
  out << "MAE         " << fmt_short(r.mae) << " +/- " << fmt_short(r.mae_std) << '\n';
  out << "RMSE        " << fmt_short(r.rmse) << " +/- " << fmt_short(r.rmse_std) << '\n';
  out << "PSNR        " << fmt_short(r.psnr) << " +/- " << fmt_short(r.psnr_std) << '\n';
  out << "SSIM        " << fmt_short(r.ssim) << " +/- " << fmt_short(r.ssim_std) << '\n';
  out << "\n[report]\n" << report_key_values(r, spec.name());

  if (!o.json.empty()) {
    nlohmann::json j;
    j["model"] = spec.name();
    j["instances"] = r.instances;
    j["v_max"] = json_number(r.v_max);
    j["mean"] = json_values({r.mae, r.rmse, r.psnr, r.ssim});
    j["std"] = json_values({r.mae_std, r.rmse_std, r.psnr_std, r.ssim_std});
    j["per_step"] = nlohmann::json::array();
    for (const auto& m : r.per_step) j["per_step"].push_back(json_values(m));
    j["per_service"] = nlohmann::json::array();
    for (const auto& m : r.per_service) j["per_service"].push_back(json_values(m));
    std::ofstream f(o.json);
    if (!f) throw std::runtime_error("cannot open '" + o.json + "' for writing");
    f << j.dump(2) << '\n';
  }
  return 0;
}

inline int run_forecast(const ForecastOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = read_stream(o.data);
  const Seq2SeqModel model = load_checkpoint(o.checkpoint);
  check_data_matches(model.spec(), data);
  const std::size_t m = model.spec().input_len;
  if (data.size() < m) detail::throw_argument("dataset has ", data.size(), " frames, the model needs M=", m);
  const std::size_t start = o.start.value_or(data.size() - m);
  if (start + m > data.size())
    detail::throw_argument("--start ", start, " leaves fewer than M=", m, " frames of history");
  auto fields = spec_fields(model.spec());
  fields.insert(fields.begin(), {{"data", o.data}, {"checkpoint", o.checkpoint}, {"start", std::to_string(start)},
                                 {"out", o.out.empty() ? "-" : o.out}});
  log_config(err, "forecast", fields);

  StreamSequence hist{{data.frames.begin() + static_cast<std::ptrdiff_t>(start),
                       data.frames.begin() + static_cast<std::ptrdiff_t>(start + m)},
                      data.timestep_seconds};
  const auto pred = model.forecast(hist);
  if (o.out.empty())
    write_stream(pred, out);
  else
    write_stream(pred, o.out);
  return 0;
}

inline int run_gradcheck(std::uint64_t seed, std::ostream& out, std::ostream& err) {
  log_config(err, "gradcheck", {{"seed", std::to_string(seed)}, {"fd_step", "1e-05"}});
  bool ok = true;
  for (const auto& c : gradcheck_suite(seed)) {
    ok = ok && c.passed();
    out << (c.passed() ? "PASS " : "FAIL ") << c.name << " max_rel_err=" << fmt_short(c.report.max_rel_error)
        << " tol=" << fmt_short(c.tolerance) << " checked=" << c.report.checked << " worst=" << c.report.worst_tensor
        << '[' << c.report.worst_index << "] analytic=" << fmt_short(c.report.worst_analytic)
        << " numeric=" << fmt_short(c.report.worst_numeric) << '\n';
  }
  out << (ok ? "all gradient checks passed\n" : "gradient check FAILED\n");
  return ok ? 0 : 1;
}

inline int run_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  const auto& c = o.scaling;
  std::string sizes;
  for (auto n : c.sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
  log_config(err, "bench",
             {{"sizes", sizes},
              {"k", std::to_string(c.k)},
              {"channels", std::to_string(c.channels)},
              {"trials", std::to_string(c.trials)},
              {"seed", std::to_string(c.seed)}});
  const auto rows = measure_scaling(c);
  out << "N,knn_seconds,dconv_seconds,dconv_flops,knn_ratio,dconv_ratio\n";
  for (const auto& r : rows) {
    // Time per unit of modelled work, normalised to the first size.
    const double knn_ratio = (r.knn_seconds / r.knn_pairs) / (rows[0].knn_seconds / rows[0].knn_pairs);
    const double dconv_ratio =
        (r.dconv_seconds / r.dconv_weighting) / (rows[0].dconv_seconds / rows[0].dconv_weighting);
    out << r.points << ',' << fmt_short(r.knn_seconds) << ',' << fmt_short(r.dconv_seconds) << ','
        << fmt_short(r.dconv_flops) << ',' << fmt_short(knn_ratio) << ',' << fmt_short(dconv_ratio) << '\n';
  }
  return 0;
}

/// Parses `argv` and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Point-cloud stream forecasting with CloudLSTM models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cloudcast 1.0");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();
  gen_cmd->add_option("--points", gen.synth.points, "Points per frame (N)")->capture_default_str();
  gen_cmd->add_option("--channels", gen.synth.channels, "Services (U)")->capture_default_str();
  gen_cmd->add_option("--frames", gen.synth.frames, "Frames (T)")->capture_default_str();
  gen_cmd->add_option("--sources", gen.synth.sources, "Drifting demand sources")->capture_default_str();
  gen_cmd->add_option("--mobility", gen.synth.mobility, "Source speed per frame")->capture_default_str();
  gen_cmd->add_option("--sigma", gen.synth.source_sigma, "Source spatial spread")->capture_default_str();
  gen_cmd->add_option("--amplitude", gen.synth.amplitude, "Source peak demand")->capture_default_str();
  gen_cmd->add_option("--period", gen.synth.period, "Frames per seasonal cycle")->capture_default_str();
  gen_cmd->add_option("--seasonal", gen.synth.seasonal_amplitude, "Seasonal amplitude")->capture_default_str();
  gen_cmd->add_option("--noise", gen.synth.noise_std, "Noise standard deviation")->capture_default_str();
  gen_cmd->add_option("--dt", gen.synth.timestep_seconds, "Seconds between frames")->capture_default_str();
  gen_cmd->add_option("--seed", gen.synth.seed, "Random seed")->capture_default_str();

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  auto add_model_flags = [](CLI::App* cmd, ModelOptions& m) {
    cmd->add_option("--model", m.model, "cloudrnn | cloudgru | cloudlstm | attn-cloudlstm | persistence")
        ->check(CLI::IsMember({"cloudrnn", "cloudgru", "cloudlstm", "attn-cloudrnn", "attn-cloudgru",
                               "attn-cloudlstm", "persistence"}))
        ->capture_default_str();
    cmd->add_option("--k", m.k, "Neighbours per point in the recurrent cells")->capture_default_str();
    cmd->add_option("--channels", m.channels, "Channels per cell (C)")->capture_default_str();
    cmd->add_option("--stacks", m.stacks, "Encoder/decoder stacks")->capture_default_str();
    cmd->add_option("--in-len", m.in_len, "Observed frames (M)")->capture_default_str();
    cmd->add_option("--out-len", m.out_len, "Forecast frames (J)")->capture_default_str();
    cmd->add_option("--embed-k", m.embed_k, "Neighbours in the input/output layers")->capture_default_str();
    cmd->add_option("--attn-dim", m.attn_dim, "Attention width (0 = channels)")->capture_default_str();
    cmd->add_flag("--coord-loss", m.coord_loss, "Include coordinates in the loss and feed back predicted ones");
  };
  train_cmd->add_option("--data", tr.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  add_model_flags(train_cmd, tr.model);
  train_cmd->add_option("--epochs", tr.train.epochs, "Maximum epochs")->capture_default_str();
  train_cmd->add_option("--batch", tr.train.batch_size, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--patience", tr.train.patience, "Early-stopping patience (epochs)")->capture_default_str();
  train_cmd->add_option("--seed", tr.train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--max-batches", tr.train.max_batches_per_epoch, "Mini-batches per epoch (0 = all)")
      ->capture_default_str();
  train_cmd->add_option("--max-eval", tr.train.max_eval_windows, "Validation windows per epoch (0 = all)")
      ->capture_default_str();
  train_cmd->add_flag("--no-teacher-forcing", tr.no_teacher_forcing, "Feed predictions back while training");
  train_cmd->add_flag("!--nondeterministic", tr.train.reproducible,
                      "Reduce gradients in completion order when several threads are used");
  train_cmd->add_option("--history", tr.history, "Write per-epoch losses to this CSV");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on the test split");
  eval_cmd->add_option("--data", ev.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  auto* ck = eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint path")->check(CLI::ExistingFile);
  eval_cmd->add_option("--model", ev.model, "Use a parameter-free baseline instead of a checkpoint")
      ->check(CLI::IsMember({"persistence"}))
      ->excludes(ck);
  eval_cmd->add_option("--in-len", ev.in_len, "Observed frames for --model")->capture_default_str();
  eval_cmd->add_option("--out-len", ev.out_len, "Forecast frames for --model")->capture_default_str();
  eval_cmd->add_option("--max-windows", ev.max_windows, "Evenly spaced test windows to score (0 = all)")
      ->capture_default_str();
  eval_cmd->add_option("--json", ev.json, "Also write the report as JSON");

  ForecastOptions fc;
  auto* fc_cmd = app.add_subcommand("forecast", "Forecast J frames and print them as CSV");
  fc_cmd->add_option("--data", fc.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fc_cmd->add_option("--checkpoint", fc.checkpoint, "Checkpoint path")->required()->check(CLI::ExistingFile);
  fc_cmd->add_option("--start", fc.start, "First history frame (default: the last M frames)");
  fc_cmd->add_option("--out", fc.out, "Output CSV path (default: stdout)");

  std::uint64_t gc_seed = 1;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  gc_cmd->add_option("--seed", gc_seed, "Random seed")->capture_default_str();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Runtime scaling of knn and dconv");
  bench_cmd->add_option("--sizes", bench.scaling.sizes, "Point counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--k", bench.scaling.k, "Neighbours")->capture_default_str();
  bench_cmd->add_option("--channels", bench.scaling.channels, "Input and output channels")->capture_default_str();
  bench_cmd->add_option("--trials", bench.scaling.trials, "Timing trials per size")->capture_default_str();
  bench_cmd->add_option("--seed", bench.scaling.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen_cmd) return run_gen(gen, out, err);
    if (*train_cmd) return run_train(tr, out, err);
    if (*eval_cmd) return run_eval(ev, out, err);
    if (*fc_cmd) return run_forecast(fc, out, err);
    if (*gc_cmd) return run_gradcheck(gc_seed, out, err);
    if (*bench_cmd) return run_bench(bench, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace cloudcast::cli
