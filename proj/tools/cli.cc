//
// Copyright 2026 The BinCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "bincp/certify.h"
#include "bincp/conformal.h"
#include "bincp/error.h"
#include "bincp/intervals.h"
#include "bincp/report.h"
#include "bincp/score_io.h"
#include "bincp/simulate.h"

namespace bincp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SchemeFlags {
  std::string scheme = "gaussian";
  double sigma = 0.25;
  double lambda = 0.25;
  bool uniform_exact = false;
  double p_plus = 0.01;
  double p_minus = 0.6;
  std::string ball = "l2";
  double r = 0.0;
  std::uint32_t ra = 0;
  std::uint32_t rd = 0;

  SmoothingScheme make_scheme() const {
    if (scheme == "gaussian") return SmoothingScheme::Gaussian(sigma);
    if (scheme == "uniform") return SmoothingScheme::Uniform(lambda, uniform_exact);
    return SmoothingScheme::SparseBernoulli(p_plus, p_minus);
  }
  ThreatModel make_ball() const {
    if (ball == "l2") return ThreatModel::L2(r);
    if (ball == "l1") return ThreatModel::L1(r);
    return ThreatModel::BinaryFlip(ra, rd);
  }
};

void AddSchemeFlags(CLI::App* app, SchemeFlags& f) {
  app->add_option("--scheme", f.scheme, "Smoothing scheme")
      ->check(CLI::IsMember({"gaussian", "uniform", "sparse"}))
      ->capture_default_str();
  app->add_option("--sigma", f.sigma, "Gaussian noise level")
      ->capture_default_str();
  app->add_option("--lambda", f.lambda, "Uniform noise half-width")
      ->capture_default_str();
  app->add_flag("--uniform-exact", f.uniform_exact,
                "Uniform smoothing evaluated de-randomized");
  app->add_option("--p-plus", f.p_plus, "Sparse 0->1 flip probability")
      ->capture_default_str();
  app->add_option("--p-minus", f.p_minus, "Sparse 1->0 flip probability")
      ->capture_default_str();
  app->add_option("--ball", f.ball, "Threat model")
      ->check(CLI::IsMember({"l2", "l1", "binary-flip"}))
      ->capture_default_str();
  app->add_option("--r", f.r, "Radius of an l1 / l2 ball")
      ->capture_default_str();
  app->add_option("--ra", f.ra, "Binary-flip additions")->capture_default_str();
  app->add_option("--rd", f.rd, "Binary-flip deletions")->capture_default_str();
}

struct CalibrationFlags {
  double alpha = 0.1;
  double eta = 0.01;
  std::string mode = "fixed-tau";
  double p = 0.5;
  double tau = 0.5;
  bool exact = false;
};

void AddCalibrationFlags(CLI::App* app, CalibrationFlags& f,
                         const std::string& mode_flag) {
  app->add_option("--alpha", f.alpha, "Target miscoverage")
      ->capture_default_str();
  app->add_option("--eta", f.eta,
                  "Failure budget of the finite-sample correction")
      ->capture_default_str();
  app->add_option(mode_flag, f.mode, "Calibration parameterization")
      ->check(CLI::IsMember({"fixed-p", "fixed-tau"}))
      ->capture_default_str();
  app->add_option("--p", f.p, "Pass probability for fixed-p")
      ->capture_default_str();
  app->add_option("--tau", f.tau, "Score threshold for fixed-tau")
      ->capture_default_str();
  app->add_flag("--exact", f.exact,
                "Treat pass fractions as exact (no correction, eta ignored)");
}

CalibrationConfig MakeCalibrationConfig(const CalibrationFlags& f,
                                        const SchemeFlags& s) {
  CalibrationConfig config;
  config.alpha = f.alpha;
  config.eta = f.exact ? 0.0 : f.eta;
  config.mode = calibration_mode_from_string(f.mode);
  config.p = f.p;
  config.tau = f.tau;
  config.exact = f.exact;
  config.scheme = s.make_scheme();
  config.ball = s.make_ball();
  return config;
}

void AddGeneratorFlags(CLI::App* app, GeneratorSpec& g) {
  app->add_option("--n", g.n_points, "Calibration points")
      ->capture_default_str();
  app->add_option("--n-test", g.n_test, "Test points")->capture_default_str();
  app->add_option("--k", g.n_classes, "Classes")->capture_default_str();
  app->add_option("--m", g.m_samples, "Monte-Carlo samples per point")
      ->capture_default_str();
  app->add_option("--beta-a", g.beta_a, "True-class mean ~ Beta(a, b): a")
      ->capture_default_str();
  app->add_option("--beta-b", g.beta_b, "True-class mean ~ Beta(a, b): b")
      ->capture_default_str();
  app->add_option("--off-class-scale", g.off_class_scale,
                  "Off-class means ~ U(0, p * scale)")
      ->capture_default_str();
  app->add_flag("--continuous", g.continuous,
                "Beta-distributed raw scores instead of pass indicators");
  app->add_option("--concentration", g.concentration,
                  "Concentration of continuous score laws")
      ->capture_default_str();
  // No default: every random run must name its seed.
  app->add_option("--seed", g.seed, "Seed of every random stream")->required();
}

std::string OneLine(std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return message;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir.string() +
                  "': " + ec.message());
  }
}

// Drops the keys of subcommands other than `name` from a CLI11 config dump.
std::string KeepSection(const std::string& dump, const std::string& name) {
  std::istringstream in(dump);
  std::string kept;
  for (std::string line; std::getline(in, line);) {
    const std::string key = line.substr(0, line.find('='));
    if (key.find('.') == std::string::npos || key.starts_with(name + ".")) {
      kept += line + '\n';
    }
  }
  return kept;
}

std::string Number(double v) { return format_double(v); }

// p values from "start:stop:step" or a comma-separated list.
std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> out;
  auto parse = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw ValidationError("bad number '" + s + "' in --p-grid");
    }
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) {
      throw ValidationError("--p-grid expects start:stop:step");
    }
    const double start = parse(parts[0]);
    const double stop = parse(parts[1]);
    const double step = parse(parts[2]);
    if (!(step > 0.0)) throw ValidationError("--p-grid step must be > 0");
    const auto count =
        static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
    for (std::int64_t i = 0; i <= count; ++i) {
      out.push_back(round_significant(start + static_cast<double>(i) * step));
    }
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
      out.push_back(parse(part));
    }
  }
  return out;
}

std::vector<double> Linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out;
  if (points == 1) return {lo};
  for (std::size_t i = 0; i < points; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(points - 1));
  }
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int Run(int argc, const char* const* argv) {
    CLI::App app{"Binarized conformal prediction", "bincp"};
    app.set_config("--config", "", "TOML file with flag values");
    app.require_subcommand(1);
    app.add_option("--out-dir", out_dir_, "Directory for outputs")
        ->capture_default_str();
    app.add_flag("-v,--verbose", verbose_, "Print progress to stderr");

    Setup(app);
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return kExitOk;
      err_ << "error: " << OneLine(e.what()) << '\n';
      return kExitValidation;
    }

    try {
      for (CLI::App* sub : app.get_subcommands()) {
        snapshot_ = KeepSection(
            app.config_to_str(/*default_also=*/true,
                              /*write_description=*/false),
            sub->get_name());
        handlers_.at(sub->get_name())();
      }
    } catch (const IoError& e) {
      err_ << "error: " << OneLine(e.what()) << '\n';
      return kExitIo;
    } catch (const fs::filesystem_error& e) {
      err_ << "error: " << OneLine(e.what()) << '\n';
      return kExitIo;
    } catch (const std::exception& e) {
      err_ << "error: " << OneLine(e.what()) << '\n';
      return kExitValidation;
    }
    return kExitOk;
  }

 private:
  void Setup(CLI::App& app) {
    SetupCalibrate(app);
    SetupPredict(app);
    SetupCertify(app);
    SetupSimulate(app);
    SetupEvaluate(app);
    SetupCompareIntervals(app);
  }

  void Log(const std::string& line) {
    if (verbose_) err_ << line << '\n';
  }

  // Resolved configuration next to the outputs of `name`.
  void WriteSnapshot(const fs::path& dir, const std::string& name) {
    EnsureDirectory(dir);
    write_text_file(dir / (name + ".config.toml"), snapshot_);
  }

  fs::path OutPath(const std::string& given, const std::string& fallback) {
    return given.empty() ? fs::path(out_dir_) / fallback : fs::path(given);
  }

  void SetupCalibrate(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("calibrate",
                                       "Calibrate (p, tau) on labeled scores");
    sub->add_option("--scores", cal_scores_, "Score tensor (.csv or .bin)")
        ->required();
    sub->add_option("--labels", cal_labels_,
                    "Labels sidecar (default: labels.csv next to the scores)");
    sub->add_flag("--exact-scores", cal_exact_scores_,
                  "Scores hold exact probabilities (one sample each)");
    sub->add_option("--output", cal_output_,
                    "Calibration JSON (default: <out-dir>/calibration.json)");
    AddCalibrationFlags(sub, cal_flags_, "--mode");
    AddSchemeFlags(sub, cal_scheme_);
    handlers_["calibrate"] = [this] { Calibrate(); };
  }

  void Calibrate() {
    const CalibrationConfig config =
        MakeCalibrationConfig(cal_flags_, cal_scheme_);
    config.validate();
    const fs::path scores(cal_scores_);
    const ScoreFormat format = format_from_path(scores);
    std::optional<fs::path> labels;
    if (!cal_labels_.empty()) {
      labels = cal_labels_;
    } else if (format == ScoreFormat::kCsv &&
               fs::exists(default_labels_path(scores))) {
      labels = default_labels_path(scores);
    }
    const ScoreSamples samples =
        load_score_samples(scores, format, labels, cal_exact_scores_);
    const CalibrationResult result = corrected_calibrate(samples, config);
    for (const std::string& w : result.warnings) err_ << "warning: " << w << '\n';
    const fs::path output = OutPath(cal_output_, "calibration.json");
    if (output.has_parent_path()) EnsureDirectory(output.parent_path());
    write_text_file(output, calibration_to_json(result).dump(2) + "\n");
    WriteSnapshot(output.parent_path().empty() ? fs::path(".")
                                               : output.parent_path(),
                  "calibrate");
    out_ << "p_alpha=" << Number(result.p_alpha)
         << " tau_alpha=" << Number(result.tau_alpha)
         << " p_alpha_down=" << Number(result.p_alpha_down)
         << " cert_threshold=" << Number(result.cert_threshold) << '\n';
  }

  void SetupPredict(CLI::App& app) {
    CLI::App* sub =
        app.add_subcommand("predict", "Build prediction sets for test scores");
    sub->add_option("--calibration", pred_calibration_, "Calibration JSON")
        ->required();
    sub->add_option("--scores", pred_scores_, "Test score tensor")->required();
    sub->add_flag("--exact-scores", pred_exact_scores_,
                  "Scores hold exact probabilities (one sample each)");
    sub->add_option("--output", pred_output_,
                    "Prediction CSV (default: <out-dir>/predictions.csv)");
    handlers_["predict"] = [this] { Predict(); };
  }

  void Predict() {
    std::ifstream in(pred_calibration_);
    if (!in) throw IoError("cannot open '" + pred_calibration_ + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed calibration file: ") +
                            e.what());
    }
    const CalibrationResult calibration = calibration_from_json(doc);
    const fs::path scores(pred_scores_);
    const ScoreSamples test = load_score_samples(
        scores, format_from_path(scores), std::nullopt, pred_exact_scores_);
    const std::vector<PredictionSet> sets = predict(calibration, test);

    std::ostringstream csv;
    csv << "point,class,fraction,bound,included\n";
    std::size_t total = 0;
    for (const PredictionSet& set : sets) {
      for (std::size_t y = 0; y < set.per_class_bound.size(); ++y) {
        const bool included = set.contains(static_cast<std::uint32_t>(y));
        csv << set.point << ',' << y << ','
            << Number(set.per_class_fraction[y]) << ','
            << Number(set.per_class_bound[y]) << ',' << (included ? 1 : 0)
            << '\n';
      }
      total += set.classes.size();
    }
    const fs::path output = OutPath(pred_output_, "predictions.csv");
    if (output.has_parent_path()) EnsureDirectory(output.parent_path());
    write_text_file(output, csv.str());
    WriteSnapshot(output.parent_path().empty() ? fs::path(".")
                                               : output.parent_path(),
                  "predict");
    out_ << "points=" << sets.size() << " mean_set_size="
         << Number(sets.empty() ? 0.0
                                : static_cast<double>(total) /
                                      static_cast<double>(sets.size()))
         << '\n';
  }

  void SetupCertify(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "certify", "Binary certificates c_down[p, B] and c_up[p, B^-1]");
    AddSchemeFlags(sub, cert_scheme_);
    auto* p = sub->add_option("--p", cert_p_, "Clean pass probabilities");
    auto* grid = sub->add_option("--p-grid", cert_grid_,
                                 "start:stop:step or a comma-separated list");
    p->excludes(grid);
    sub->add_option("--output", cert_output_,
                    "CSV path (default: standard output)");
    handlers_["certify"] = [this] { Certify(); };
  }

  void Certify() {
    const SmoothingScheme scheme = cert_scheme_.make_scheme();
    const ThreatModel ball = cert_scheme_.make_ball();
    check_compatible(scheme, ball);
    std::vector<double> ps = cert_p_;
    if (!cert_grid_.empty()) ps = ParseGrid(cert_grid_);
    if (ps.empty()) throw ValidationError("one of --p or --p-grid is required");
    const ThreatModel inverse = invert_ball(ball);
    std::ostringstream csv;
    csv << "p,cert_lower,cert_upper\n";
    for (double p : ps) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("p outside [0, 1]: " + Number(p));
      }
      csv << Number(p) << ',' << Number(cert_lower(p, scheme, ball).value())
          << ',' << Number(cert_upper(p, scheme, inverse).value()) << '\n';
    }
    if (cert_output_.empty()) {
      out_ << csv.str();
      return;
    }
    const fs::path output(cert_output_);
    if (output.has_parent_path()) EnsureDirectory(output.parent_path());
    write_text_file(output, csv.str());
    WriteSnapshot(output.parent_path().empty() ? fs::path(".")
                                               : output.parent_path(),
                  "certify");
  }

  void SetupSimulate(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "simulate", "Write a synthetic calibration / test pair");
    AddGeneratorFlags(sub, sim_spec_);
    sub->add_option("--trial", sim_trial_, "Trial index of the draw")
        ->capture_default_str();
    sub->add_option("--format", sim_format_, "Tensor format")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    handlers_["simulate"] = [this] { Simulate(); };
  }

  void Simulate() {
    const SyntheticData data = generate(sim_spec_, sim_trial_);
    const fs::path root(out_dir_);
    const ScoreFormat format =
        sim_format_ == "bin" ? ScoreFormat::kBin : ScoreFormat::kCsv;
    const std::string file = "scores." + sim_format_;
    for (const auto& [split, samples] :
         {std::pair<const char*, const ScoreSamples*>{"calibration",
                                                      &data.calibration},
          {"test", &data.test}}) {
      EnsureDirectory(root / split);
      save_score_samples(*samples, root / split / file, format);
    }
    std::ostringstream laws;
    laws << "split,point,class,mean\n";
    const std::size_t k = data.laws.n_classes;
    for (std::size_t i = 0; i < data.laws.n_cal + data.laws.n_test; ++i) {
      const bool cal = i < data.laws.n_cal;
      for (std::size_t c = 0; c < k; ++c) {
        laws << (cal ? "calibration" : "test") << ','
             << (cal ? i : i - data.laws.n_cal) << ',' << c << ','
             << Number(data.laws.law(i, c).mean()) << '\n';
      }
    }
    write_text_file(root / "laws.csv", laws.str());
    WriteSnapshot(root, "simulate");
    out_ << "wrote " << (root / "calibration" / file).string() << " and "
         << (root / "test" / file).string() << '\n';
  }

  void SetupEvaluate(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "evaluate", "Coverage / set-size / runtime over repeated trials");
    AddGeneratorFlags(sub, eval_spec_);
    AddCalibrationFlags(sub, eval_flags_, "--calibration-mode");
    AddSchemeFlags(sub, eval_scheme_);
    sub->add_option("--mode", eval_mode_, "Pipeline")
        ->check(CLI::IsMember({"vanilla", "bincp", "bincp-robust", "rscp"}))
        ->capture_default_str();
    sub->add_option("--adversary", eval_adversary_, "Test-time adversary")
        ->check(CLI::IsMember({"none", "worst"}))
        ->capture_default_str();
    sub->add_option("--trials", eval_trials_, "Number of trials")
        ->capture_default_str();
    sub->add_option("--threads", eval_threads_,
                    "Worker threads (0: all cores)")
        ->envname("BINCP_THREADS")
        ->capture_default_str();
    sub->add_option("--format", eval_format_, "Report format")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    handlers_["evaluate"] = [this] { Evaluate(); };
  }

  void Evaluate() {
    EvalConfig config;
    config.generator = eval_spec_;
    config.pipeline = pipeline_mode_from_string(eval_mode_);
    config.adversary = adversary_mode_from_string(eval_adversary_);
    config.calibration = MakeCalibrationConfig(eval_flags_, eval_scheme_);
    config.trials = eval_trials_;
    config.threads =
        eval_threads_ > 0
            ? eval_threads_
            : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    Log("evaluate: " + std::to_string(config.trials) + " trials on " +
        std::to_string(config.threads) + " threads");
    const Report report = evaluate(config);

    const fs::path root(out_dir_);
    EnsureDirectory(root);
    const json config_doc = {
        {"mode", eval_mode_},
        {"adversary", eval_adversary_},
        {"trials", eval_trials_},
        {"seed", eval_spec_.seed},
        {"n", eval_spec_.n_points},
        {"n_test", eval_spec_.n_test},
        {"k", eval_spec_.n_classes},
        {"m", eval_spec_.m_samples},
        {"alpha", config.calibration.alpha},
        {"eta", config.calibration.eta},
        {"exact", config.calibration.exact},
        {"calibration_mode", eval_flags_.mode},
        {"scheme", scheme_to_json(config.calibration.scheme)},
        {"ball", ball_to_json(config.calibration.ball)}};
    if (eval_format_ != "json") {
      emit_report(report, ReportFormat::kCsv, root / "report.csv");
      std::ostringstream summary;
      write_csv(summary_table(report), summary);
      write_text_file(root / "summary.csv", summary.str());
    }
    if (eval_format_ != "csv") {
      emit_report(report, ReportFormat::kJson, root / "report.json",
                  config_doc);
    }
    WriteSnapshot(root, "evaluate");
    write_csv(summary_table(report), out_);
  }

  void SetupCompareIntervals(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "compare-intervals",
        "Clopper-Pearson vs Hoeffding / Bernstein grids as CSV");
    sub->add_option("--a", ci_a_, "Beta(a, b) score law: a")
        ->capture_default_str();
    sub->add_option("--b", ci_b_, "Beta(a, b) score law: b")
        ->capture_default_str();
    sub->add_option("--eta", ci_eta_, "Failure probability")
        ->capture_default_str();
    sub->add_option("--m-min", ci_m_min_)->capture_default_str();
    sub->add_option("--m-max", ci_m_max_)->capture_default_str();
    sub->add_option("--m-step", ci_m_step_)->capture_default_str();
    sub->add_option("--tau-min", ci_tau_min_)->capture_default_str();
    sub->add_option("--tau-max", ci_tau_max_)->capture_default_str();
    sub->add_option("--tau-points", ci_tau_points_)->capture_default_str();
    sub->add_option("--p-hat", ci_p_hat_,
                    "Empirical means for the bound-width table")
        ->capture_default_str();
    handlers_["compare-intervals"] = [this] { CompareIntervals(); };
  }

  void CompareIntervals() {
    if (ci_m_min_ == 0 || ci_m_step_ == 0 || ci_m_max_ < ci_m_min_) {
      throw ValidationError("need 1 <= m-min <= m-max and m-step >= 1");
    }
    if (ci_tau_points_ == 0) throw ValidationError("tau-points must be >= 1");
    const std::vector<double> taus =
        Linspace(ci_tau_min_, ci_tau_max_, ci_tau_points_);
    std::ostringstream dominance;
    dominance << "a,b,eta,m,tau,expected,break_point,cp_better,"
                 "hoeffding_better\n";
    double worst = 0.0;
    std::ostringstream bounds;
    bounds << "m,eta,p_hat,clopper_pearson,hoeffding,bernstein,normal\n";
    for (std::size_t m = ci_m_min_; m <= ci_m_max_; m += ci_m_step_) {
      const ClopperPearsonTable table(m, ci_eta_);
      for (double tau : taus) {
        const DominanceResult r = cp_vs_hoeffding(ci_a_, ci_b_, tau, table);
        worst = std::max(worst, 1.0 - r.probability);
        dominance << Number(ci_a_) << ',' << Number(ci_b_) << ','
                  << Number(ci_eta_) << ',' << m << ',' << Number(tau) << ','
                  << Number(r.expected) << ',' << r.break_point << ','
                  << Number(r.probability) << ','
                  << Number(1.0 - r.probability) << '\n';
      }
      for (double p_hat : ci_p_hat_) {
        if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
          throw ValidationError("p-hat outside [0, 1]");
        }
        const auto successes = static_cast<std::uint64_t>(
            std::llround(p_hat * static_cast<double>(m)));
        const double p = static_cast<double>(successes) /
                         static_cast<double>(m);
        // Unbiased variance of m binary samples with mean p.
        const double var = m > 1 ? p * (1.0 - p) * static_cast<double>(m) /
                                       static_cast<double>(m - 1)
                                 : 0.0;
        bounds << m << ',' << Number(ci_eta_) << ',' << Number(p) << ','
               << Number(table.upper(successes) - p) << ','
               << Number(hoeffding_bound(m, ci_eta_)) << ','
               << (m > 1 ? Number(bernstein_bound(m, var, ci_eta_)) : "nan")
               << ',' << Number(normal_approx_margin(p, m, ci_eta_)) << '\n';
      }
    }
    const fs::path root(out_dir_);
    EnsureDirectory(root);
    write_text_file(root / "dominance.csv", dominance.str());
    write_text_file(root / "bounds.csv", bounds.str());
    WriteSnapshot(root, "compare-intervals");
    out_ << "max_hoeffding_better=" << Number(worst) << '\n';
  }

  std::ostream& out_;
  std::ostream& err_;
  std::string out_dir_ = ".";
  bool verbose_ = false;
  std::string snapshot_;
  std::map<std::string, std::function<void()>> handlers_;

  std::string cal_scores_, cal_labels_, cal_output_;
  bool cal_exact_scores_ = false;
  CalibrationFlags cal_flags_;
  SchemeFlags cal_scheme_;

  std::string pred_calibration_, pred_scores_, pred_output_;
  bool pred_exact_scores_ = false;

  SchemeFlags cert_scheme_;
  std::vector<double> cert_p_;
  std::string cert_grid_, cert_output_;

  GeneratorSpec sim_spec_;
  std::uint64_t sim_trial_ = 0;
  std::string sim_format_ = "csv";

  GeneratorSpec eval_spec_;
  CalibrationFlags eval_flags_;
  SchemeFlags eval_scheme_;
  std::string eval_mode_ = "bincp-robust";
  std::string eval_adversary_ = "none";
  std::size_t eval_trials_ = 100;
  std::size_t eval_threads_ = 0;
  std::string eval_format_ = "both";

  double ci_a_ = 2.0, ci_b_ = 2.0, ci_eta_ = 0.01;
  std::size_t ci_m_min_ = 20, ci_m_max_ = 500, ci_m_step_ = 20;
  double ci_tau_min_ = 0.01, ci_tau_max_ = 0.99;
  std::size_t ci_tau_points_ = 50;
  std::vector<double> ci_p_hat_ = {0.1, 0.5, 0.9};
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  Runner runner(out, err);
  return runner.Run(argc, argv);
}

}  // namespace bincp::cli
