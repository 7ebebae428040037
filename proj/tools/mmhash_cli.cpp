/*
 * Copyright 2026 The mmhash Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: synth, train, encode, eval, sweep.
//
// Exit status 0 on success, 2 for usage errors (bad flags or invalid
// parameter values), 1 for runtime failures. Every failure prints a single
// line starting with "error: " to stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmhash/codec.hpp"
#include "mmhash/dataset.hpp"
#include "mmhash/evaluation.hpp"
#include "mmhash/experiment.hpp"
#include "mmhash/model_io.hpp"

namespace fs = std::filesystem;
using namespace mmhash;

namespace {

// Invalid parameter values detected after parsing; reported as usage errors.
struct UsageError : Error {
  using Error::Error;
};

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  SynthConfig config;
  std::size_t ppc = 200;
  std::size_t test_ppc = 40;
  fs::path out = "data";
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic two-modality dataset (train/ and test/)");
  cmd->add_option("--n", a.config.n, "Dimension of modality X")->capture_default_str();
  cmd->add_option("--nprime", a.config.n_prime, "Dimension of modality Y")->capture_default_str();
  cmd->add_option("--k", a.config.num_classes, "Number of classes")->capture_default_str();
  cmd->add_option("--ppc", a.ppc, "Training points per class and modality")->capture_default_str();
  cmd->add_option("--test-ppc", a.test_ppc, "Test points per class and modality")->capture_default_str();
  cmd->add_option("--noise-low", a.config.noise_std_low, "Lower end of the noise std range")->capture_default_str();
  cmd->add_option("--noise-high", a.config.noise_std_high, "Upper end of the noise std range")->capture_default_str();
  cmd->add_option("--center-std", a.config.center_std, "Std of the class centers")->capture_default_str();
  cmd->add_option("--seed", a.config.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
}

int run_synth(SynthArgs& a) {
  a.config.points_per_class_x = a.config.points_per_class_y = a.ppc;
  try {
    a.config.validate();
    if (a.test_ppc < 1) throw Error("synth config: test points per class must be >= 1");
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto [train, test] = generate_synthetic_split(a.config, a.test_ppc);
  save_csv(train, a.out / "train");
  save_csv(test, a.out / "test");
  std::cout << "wrote " << (a.out / "train").string() << " (" << train.size_x() << " x " << train.dim_x()
            << ", " << train.size_y() << " x " << train.dim_y() << ") and " << (a.out / "test").string() << " ("
            << test.size_x() << " points per modality)\n";
  return 0;
}

// ---- shared training / evaluation flags -------------------------------------

struct TrainFlags {
  TrainConfig config;
  std::string method = "cmdif";
  std::string mode = "min-trace";
  std::string estimator = "marginal";

  void resolve() {
    try {
      config.method = parse_method(method);
      config.mode = parse_projection_mode(mode);
      config.estimator = parse_rate_estimator(estimator);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_method_and_m) {
  if (with_method_and_m) {
    cmd->add_option("--method", f.method, "cmdif or mmkdif")
        ->check(CLI::IsMember({"cmdif", "mmkdif"}))
        ->capture_default_str();
    cmd->add_option("--m", f.config.m, "Hash length")->check(CLI::PositiveNumber)->capture_default_str();
  }
  cmd->add_option("--gamma", f.config.gamma, "False-negative weight")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--levels", f.config.levels, "Threshold grid levels")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  cmd->add_option("--mode", f.mode, "paper-literal or min-trace")
      ->check(CLI::IsMember({"paper-literal", "min-trace"}))
      ->capture_default_str();
  cmd->add_option("--rate-estimator", f.estimator, "marginal or joint")
      ->check(CLI::IsMember({"marginal", "joint"}))
      ->capture_default_str();
  cmd->add_option("--num-pos", f.config.num_pos, "Positive training pairs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--num-neg", f.config.num_neg, "Negative training pairs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--pair-seed", f.config.pair_seed, "Training pair seed")->capture_default_str();
  cmd->add_option("--l", f.config.l, "Basis points in X (mmkdif)")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lprime", f.config.l_prime, "Basis points in Y (mmkdif)")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--basis-seed", f.config.basis_seed, "Basis selection seed")->capture_default_str();
  cmd->add_option("--kernel-bandwidth", f.config.kernel_bandwidth,
                  "Kernel bandwidth multiplier; 0 uses the modality dimension")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

struct EvalFlags {
  EvalConfig config;
  std::string direction = "x2y";

  void resolve() {
    try {
      config.direction = parse_direction(direction);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f) {
  cmd->add_option("--direction", f.direction, "x2y or y2x")->check(CLI::IsMember({"x2y", "y2x"}))->capture_default_str();
  cmd->add_option("--eval-pos", f.config.num_pos, "Positive test pairs for the ROC")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--eval-neg", f.config.num_neg, "Negative test pairs for the ROC")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--eval-seed", f.config.pair_seed, "Test pair seed")->capture_default_str();
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  TrainFlags flags;
  fs::path data;
  fs::path out = "model.json";
  std::optional<fs::path> timing;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train a hash model on a dataset directory");
  cmd->add_option("--data", a.data, "Training dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", a.out, "Model file to write")->capture_default_str();
  cmd->add_option("--timing", a.timing, "Timing CSV (default: <out>.timing.csv)");
  add_train_flags(cmd, a.flags, true);
}

int run_train(TrainArgs& a) {
  a.flags.resolve();
  const auto train = load_csv(a.data);
  const auto outcome = run_training(train, a.flags.config);
  save_model(outcome.file, a.out);
  const fs::path timing = a.timing.value_or(fs::path(a.out.string() + ".timing.csv"));
  auto out = open_output(timing);
  out << "method,m,train_seconds\n"
      << to_string(a.flags.config.method) << ',' << a.flags.config.m << ',' << format_real(outcome.seconds) << '\n';
  finish(out, timing);
  std::cout << "trained " << to_string(a.flags.config.method) << " m=" << a.flags.config.m << " in "
            << outcome.seconds << " s; wrote " << a.out.string() << '\n';
  return 0;
}

// ---- encode -----------------------------------------------------------------

struct EncodeArgs {
  fs::path model;
  fs::path data;
  std::string modality = "x";
  fs::path out = "codes.txt";
};

void add_encode(CLI::App& app, EncodeArgs& a) {
  auto* cmd = app.add_subcommand("encode", "Encode one modality of a dataset into a codes file");
  cmd->add_option("--model", a.model, "Model file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--data", a.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--modality", a.modality, "x or y")->check(CLI::IsMember({"x", "y"}))->capture_default_str();
  cmd->add_option("--out", a.out, "Codes file to write")->capture_default_str();
}

int run_encode(const EncodeArgs& a) {
  const auto file = load_model(a.model);
  const auto data = load_csv(a.data);
  const Modality modality = a.modality == "x" ? Modality::X : Modality::Y;
  const Matrix& pts = data.points(modality);
  const auto expected = model_dim(file.model, modality);
  if (static_cast<std::size_t>(pts.rows()) != expected) {
    throw Error("model expects dimension " + std::to_string(expected) + " for modality " + a.modality +
                ", dataset has " + std::to_string(pts.rows()));
  }
  const auto codes = std::visit([&](const auto& m) { return encode_all(m, pts, modality); }, file.model);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_codes(codes, model_length(file.model), a.out.string());
  std::cout << "wrote " << codes.size() << " codes of length " << model_length(file.model) << " to "
            << a.out.string() << '\n';
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  EvalFlags flags;
  std::optional<fs::path> model;
  fs::path data;
  std::string baseline;
  fs::path metrics = "metrics.csv";
  fs::path roc = "roc.csv";
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Cross-modal retrieval metrics (mAP, EER) on a test set");
  cmd->add_option("--model", a.model, "Model file")->check(CLI::ExistingFile);
  cmd->add_option("--data", a.data, "Test dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--baseline", a.baseline,
                  "Evaluate the unimodal Euclidean baseline in the source modality instead of a model")
      ->check(CLI::IsMember({"euclidean"}));
  cmd->add_option("--metrics", a.metrics, "Metrics CSV to write")->capture_default_str();
  cmd->add_option("--roc", a.roc, "ROC CSV to write")->capture_default_str();
  add_eval_flags(cmd, a.flags);
}

int run_eval(EvalArgs& a) {
  a.flags.resolve();
  if (a.baseline.empty() && !a.model) throw UsageError("eval needs --model or --baseline euclidean");
  if (!a.baseline.empty() && a.model) throw UsageError("--model and --baseline are mutually exclusive");
  const auto test = load_csv(a.data);
  EvalReport report;
  if (a.model) {
    report = evaluate_model(load_model(*a.model).model, test, a.flags.config);
  } else {
    const Modality source = a.flags.config.direction == Direction::kXtoY ? Modality::X : Modality::Y;
    report = evaluate_euclidean(test, source, a.flags.config);
  }
  auto metrics = open_output(a.metrics);
  write_metrics_csv(metrics, report);
  finish(metrics, a.metrics);
  auto roc = open_output(a.roc);
  write_roc_csv(roc, report.roc);
  finish(roc, a.roc);
  std::cout << "map=" << format_real(report.map) << " eer=" << format_real(report.eer) << '\n';
  return 0;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  TrainFlags train;
  EvalFlags eval;
  fs::path train_dir;
  fs::path test_dir;
  std::vector<std::string> methods{"cmdif", "mmkdif"};
  std::vector<std::size_t> lengths{25, 50};
  bool paper_figure = false;
  fs::path out = "sweep.csv";
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* cmd = app.add_subcommand("sweep", "Train and evaluate over methods and hash lengths");
  cmd->add_option("--train", a.train_dir, "Training dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--test", a.test_dir, "Test dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--methods", a.methods, "Comma-separated methods")
      ->delimiter(',')
      ->check(CLI::IsMember({"cmdif", "mmkdif"}))
      ->capture_default_str();
  cmd->add_option("--m", a.lengths, "Comma-separated hash lengths")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--paper-figure", a.paper_figure,
                "Use m = min(n, n') for the linear method when a requested m exceeds it");
  cmd->add_option("--out", a.out, "Sweep CSV to write")->capture_default_str();
  add_train_flags(cmd, a.train, false);
  add_eval_flags(cmd, a.eval);
}

int run_sweep_cmd(SweepArgs& a) {
  a.train.resolve();
  a.eval.resolve();
  if (a.lengths.empty()) throw UsageError("sweep: empty list of hash lengths");
  if (a.methods.empty()) throw UsageError("sweep: empty list of methods");
  SweepConfig config;
  config.methods.clear();
  for (const auto& m : a.methods) config.methods.push_back(parse_method(m));
  config.lengths = a.lengths;
  config.train = a.train.config;
  config.eval = a.eval.config;
  config.paper_figure = a.paper_figure;
  const auto train = load_csv(a.train_dir);
  const auto test = load_csv(a.test_dir);
  const auto rows = run_sweep(train, test, config);
  auto out = open_output(a.out);
  write_sweep_csv(out, rows);
  finish(out, a.out);
  std::cout << "wrote " << rows.size() << " rows to " << a.out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmhash: cross-modal similarity hashing experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  SynthArgs synth;
  TrainArgs train;
  EncodeArgs encode;
  EvalArgs eval;
  SweepArgs sweep;
  add_synth(app, synth);
  add_train(app, train);
  add_encode(app, encode);
  add_eval(app, eval);
  add_sweep(app, sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand("synth")) return run_synth(synth);
    if (app.got_subcommand("train")) return run_train(train);
    if (app.got_subcommand("encode")) return run_encode(encode);
    if (app.got_subcommand("eval")) return run_eval(eval);
    if (app.got_subcommand("sweep")) return run_sweep_cmd(sweep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}
