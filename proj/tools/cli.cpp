#include "cli.hpp"

#include "manifest.hpp"

#include "graphmarkov/graphmarkov.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace gmn::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SimulateOptions {
  long long nodes = 10;
  long long steps = 5000;
  double gamma = 0.9;
  double noise = 0.01;
  double edge_prob = 0.1;
  std::uint64_t seed = 0;
  std::string out = ".";
};

struct TrainOptions {
  std::string model = "sgmn";
  int n = 10;
  double gamma = 0.9;
  double missing_rate = 0.0;
  int batch_size = 64;
  double lr = 1e-3;
  double lr_floor = 1e-5;
  int lr_patience = 4;
  int stop_patience = 5;
  double min_delta = 1e-5;
  int max_epochs = 200;
  std::uint64_t seed = 0;
  std::string speed;
  std::string adjacency;
  std::string out = ".";
  std::string split = "6:2:2";
};

struct EvalOptions {
  std::string checkpoint;
  std::string speed;
  std::string adjacency;
  std::string out = ".";
  std::string residuals;
  std::optional<double> missing_rate;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> split;
  int batch_size = 64;
};

struct InfluenceOptions {
  std::string checkpoint;
  int k = 1;
  int top = 0;
  std::string mode = "row";
  std::string out = ".";
};

std::string fmt(double value) { return format_double(value); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct PreparedData {
  Graph graph;
  NormStats stats;
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

/// ingest -> inject -> split -> normalize with training statistics -> window.
/// Inputs come from the injected series and labels from the original one.
PreparedData prepare_data(const std::string& speed_path, const Matrix& adjacency, double missing_rate,
                          std::uint64_t injection_seed, const SplitSpec& split_spec, int n,
                          std::optional<NormStats> stats) {
  PreparedData data;
  data.graph = build_graph(adjacency);
  const StateSeries series = ingest_csv(speed_path);
  if (series.sensors() != data.graph.size()) {
    throw std::invalid_argument("speed file has " + std::to_string(series.sensors()) + " sensors but adjacency has " +
                                std::to_string(data.graph.size()) + " vertices");
  }
  const StateSeries corrupted = inject_missing(series, missing_rate, injection_seed);
  const SeriesSplit original_parts = split(series, split_spec, n + 1);
  const SeriesSplit corrupted_parts = split(corrupted, split_spec, n + 1);
  data.stats = stats ? *stats : normalize(original_parts.train).second;

  const auto make = [&](const StateSeries& inputs, const StateSeries& labels) {
    return window(normalize(inputs, data.stats).first, normalize(labels, data.stats).first, n);
  };
  data.train = make(corrupted_parts.train, original_parts.train);
  data.val = make(corrupted_parts.val, original_parts.val);
  data.test = make(corrupted_parts.test, original_parts.test);
  return data;
}

void check_open_unit(double value, const std::string& name) {
  if (!(value > 0.0 && value < 1.0)) throw UsageError(name + " must lie in (0, 1), got " + fmt(value));
}

SplitSpec parse_split(const std::string& text) {
  try {
    return SplitSpec::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void check_missing_rate(double value) {
  if (!(value >= 0.0 && value < 1.0)) throw UsageError("--missing-rate must lie in [0, 1), got " + fmt(value));
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  check_open_unit(opt.gamma, "--gamma");
  if (opt.nodes < 1) throw UsageError("--nodes must be >= 1");
  if (opt.steps < 2) throw UsageError("--steps must be >= 2");
  if (!(opt.noise >= 0.0)) throw UsageError("--noise must be >= 0");
  if (!(opt.edge_prob >= 0.0 && opt.edge_prob <= 1.0)) throw UsageError("--edge-prob must lie in [0, 1]");

  RunManifest manifest("simulate");
  ensure_dir(opt.out);
  // Independent streams for topology, transition and noise.
  const Graph graph = random_ring_graph(opt.nodes, opt.edge_prob, opt.seed);
  const TransitionSpec spec = random_transition(graph, opt.seed + 1, opt.gamma, opt.noise);
  const StateSeries series = simulate_gmp(graph, spec, opt.steps, opt.seed + 2);

  const fs::path speed_path = fs::path(opt.out) / "speed.csv";
  const fs::path adjacency_path = fs::path(opt.out) / "adjacency.csv";
  const fs::path transition_path = fs::path(opt.out) / "transition.csv";
  {
    auto speed_out = open_output(speed_path);
    write_series_csv(speed_out, series);
  }
  write_matrix_csv(adjacency_path, graph.adjacency());
  write_matrix_csv(transition_path, spec.transition);

  manifest.set("nodes", std::to_string(opt.nodes));
  manifest.set("steps", std::to_string(opt.steps));
  manifest.set("gamma", fmt(opt.gamma));
  manifest.set("noise", fmt(opt.noise));
  manifest.set("edge-prob", fmt(opt.edge_prob));
  manifest.set("seed", std::to_string(opt.seed));
  manifest.set("out", opt.out);
  manifest.set("output.speed", speed_path.string());
  manifest.set("output.adjacency", adjacency_path.string());
  manifest.set("output.transition", transition_path.string());
  manifest.add_digest("speed", speed_path);
  manifest.add_digest("adjacency", adjacency_path);
  manifest.append_to(fs::path(opt.out) / "manifest.txt");

  out << "wrote " << speed_path.string() << " (" << series.steps() << " x " << series.sensors() << ") and "
      << adjacency_path.string() << '\n';
  return 0;
}

int cmd_train(const TrainOptions& opt, std::ostream& out) {
  ModelKind kind;
  try {
    kind = parse_model_kind(opt.model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.n < 1) throw UsageError("--n must be >= 1, got " + std::to_string(opt.n));
  check_open_unit(opt.gamma, "--gamma");
  check_missing_rate(opt.missing_rate);
  if (opt.batch_size < 1) throw UsageError("--batch-size must be >= 1");
  if (!(opt.lr > 0.0)) throw UsageError("--lr must be positive");
  const SplitSpec split_spec = parse_split(opt.split);

  TrainConfig config;
  config.batch_size = opt.batch_size;
  config.lr_init = opt.lr;
  config.lr_floor = std::min(opt.lr_floor, opt.lr);
  config.lr_patience = opt.lr_patience;
  config.stop_patience = opt.stop_patience;
  config.min_delta = opt.min_delta;
  config.max_epochs = opt.max_epochs;
  config.seed = opt.seed;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  RunManifest manifest("train");
  ensure_dir(opt.out);
  const Matrix adjacency = read_matrix_csv(opt.adjacency);
  const PreparedData data =
      prepare_data(opt.speed, adjacency, opt.missing_rate, opt.seed, split_spec, opt.n, std::nullopt);

  const ModelParams initial = init_params(kind, data.graph, opt.n, opt.gamma);
  const TrainResult result = train(initial, data.train, data.val, config, [&out](const EpochRecord& r) {
    char line[256];
    std::snprintf(line, sizeof(line), "epoch=%d train_loss=%.6e val_loss=%.6e lr=%.1e seconds=%.3f", r.epoch,
                  r.train_loss, r.val_loss, r.lr, r.seconds);
    out << line << '\n';
  });

  Checkpoint checkpoint;
  checkpoint.params = result.params;
  checkpoint.adjacency = data.graph.adjacency();
  checkpoint.norm = data.stats;
  checkpoint.set_meta("tool", "graphmarkov " GRAPHMARKOV_VERSION);
  checkpoint.set_meta("missing_rate", fmt(opt.missing_rate));
  checkpoint.set_meta("injection_seed", std::to_string(opt.seed));
  checkpoint.set_meta("shuffle_seed", std::to_string(opt.seed));
  checkpoint.set_meta("split", opt.split);
  checkpoint.set_meta("batch_size", std::to_string(opt.batch_size));
  checkpoint.set_meta("lr", fmt(opt.lr));
  checkpoint.set_meta("best_epoch", std::to_string(result.history.best_epoch));
  checkpoint.set_meta("epochs_run", std::to_string(result.history.epochs.size()));
  checkpoint.set_meta("train_samples", std::to_string(data.train.size()));
  checkpoint.set_meta("val_samples", std::to_string(data.val.size()));
  checkpoint.set_meta("speed_sha256", sha256_file(opt.speed));
  checkpoint.set_meta("adjacency_sha256", sha256_file(opt.adjacency));

  const fs::path checkpoint_path = fs::path(opt.out) / "checkpoint.txt";
  const fs::path history_path = fs::path(opt.out) / "history.csv";
  const fs::path timing_path = fs::path(opt.out) / "timing.csv";
  save_checkpoint(checkpoint_path, checkpoint);
  {
    auto history_out = open_output(history_path);
    history_out << "epoch,train_loss,val_loss,lr\n";
    for (const auto& r : result.history.epochs) {
      history_out << r.epoch << ',' << fmt(r.train_loss) << ',' << fmt(r.val_loss) << ',' << fmt(r.lr) << '\n';
    }
    auto timing_out = open_output(timing_path);
    timing_out << "epoch,seconds\n";
    for (const auto& r : result.history.epochs) timing_out << r.epoch << ',' << fmt(r.seconds) << '\n';
  }

  manifest.set("model", opt.model);
  manifest.set("n", std::to_string(opt.n));
  manifest.set("gamma", fmt(opt.gamma));
  manifest.set("missing-rate", fmt(opt.missing_rate));
  manifest.set("batch-size", std::to_string(opt.batch_size));
  manifest.set("lr", fmt(opt.lr));
  manifest.set("lr-floor", fmt(config.lr_floor));
  manifest.set("lr-patience", std::to_string(opt.lr_patience));
  manifest.set("stop-patience", std::to_string(opt.stop_patience));
  manifest.set("min-delta", fmt(opt.min_delta));
  manifest.set("max-epochs", std::to_string(opt.max_epochs));
  manifest.set("seed", std::to_string(opt.seed));
  manifest.set("injection_seed", std::to_string(opt.seed));
  manifest.set("speed", opt.speed);
  manifest.set("adjacency", opt.adjacency);
  manifest.set("split", opt.split);
  manifest.set("out", opt.out);
  manifest.add_digest("speed", opt.speed);
  manifest.add_digest("adjacency", opt.adjacency);
  manifest.set("output.checkpoint", checkpoint_path.string());
  manifest.set("output.history", history_path.string());
  manifest.set("best_epoch", std::to_string(result.history.best_epoch));
  manifest.append_to(fs::path(opt.out) / "manifest.txt");

  out << "best epoch " << result.history.best_epoch << "; wrote " << checkpoint_path.string() << '\n';
  return 0;
}

void write_metrics_row(std::ostream& csv, const std::string& name, const MetricsReport& r) {
  csv << name << ',' << fmt(r.mae) << ',' << fmt(r.mape) << ',' << fmt(r.rmse) << ',' << r.evaluated_count << ','
      << r.excluded_zero_truth_count << '\n';
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  std::optional<Grouping> grouping;
  if (!opt.residuals.empty()) {
    try {
      grouping = parse_grouping(opt.residuals);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (opt.missing_rate) check_missing_rate(*opt.missing_rate);
  if (opt.batch_size < 1) throw UsageError("--batch-size must be >= 1");
  const std::string checkpoint_path =
      opt.checkpoint.empty() ? (fs::path(opt.out) / "checkpoint.txt").string() : opt.checkpoint;

  RunManifest manifest("eval");
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  const Index model_size = sensors_of(checkpoint.params);
  const int n = history_of(checkpoint.params);
  if (!checkpoint.norm) throw std::invalid_argument("checkpoint carries no normalization statistics");

  const Matrix adjacency = read_matrix_csv(opt.adjacency);
  if (adjacency.rows() != model_size) {
    throw std::invalid_argument("checkpoint has S=" + std::to_string(model_size) + " but adjacency has " +
                                std::to_string(adjacency.rows()) + " vertices");
  }
  if (build_graph(adjacency).adjacency() != checkpoint.adjacency) {
    throw std::invalid_argument("adjacency differs from the graph stored in the checkpoint");
  }

  const auto meta_or = [&](const std::string& key, const std::string& fallback) {
    return checkpoint.meta(key).value_or(fallback);
  };
  const double missing_rate = opt.missing_rate ? *opt.missing_rate : std::stod(meta_or("missing_rate", "0"));
  const std::uint64_t injection_seed =
      opt.seed ? *opt.seed : static_cast<std::uint64_t>(std::stoull(meta_or("injection_seed", "0")));
  const std::string split_text = opt.split ? *opt.split : meta_or("split", "6:2:2");

  PreparedData data;
  try {
    data = prepare_data(opt.speed, adjacency, missing_rate, injection_seed, parse_split(split_text), n,
                        checkpoint.norm);
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).find("sensors but adjacency") != std::string::npos) {
      throw std::invalid_argument(std::string("checkpoint/data incompatibility: ") + e.what());
    }
    throw;
  }

  const Matrix pred = predict(checkpoint.params, data.test, opt.batch_size);
  const Matrix truth = stack_labels(data.test);
  const Matrix truth_mask = stack_label_masks(data.test);
  const MetricsReport model_report = metrics(pred, truth, truth_mask, data.stats);
  const MetricsReport baseline_report = persistence_baseline(data.test, data.stats);
  const std::string model_name =
      to_string(kind_of(checkpoint.params)) + "-" + std::to_string(n);

  ensure_dir(opt.out);
  const fs::path metrics_path = fs::path(opt.out) / "metrics.csv";
  {
    auto csv = open_output(metrics_path);
    csv << "model,mae,mape,rmse,evaluated_count,excluded_zero_truth_count\n";
    write_metrics_row(csv, model_name, model_report);
    write_metrics_row(csv, "persistence", baseline_report);
  }

  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %10s %10s %10s %10s\n", "model", "MAE", "MAPE(%)", "RMSE", "N");
  out << line;
  for (const auto& [name, r] : {std::pair{model_name, model_report}, std::pair{std::string("persistence"), baseline_report}}) {
    std::snprintf(line, sizeof(line), "%-12s %10.4f %10.4f %10.4f %10lld\n", name.c_str(), r.mae, r.mape, r.rmse,
                  r.evaluated_count);
    out << line;
  }

  if (grouping) {
    const ResidualSummary summary =
        residual_summary(denormalize(pred, data.stats), denormalize(truth, data.stats), truth_mask,
                         label_times(data.test), *grouping);
    const fs::path residual_path = fs::path(opt.out) / ("residuals_" + to_string(*grouping) + ".csv");
    auto csv = open_output(residual_path);
    csv << to_string(*grouping) << ",count,mean,stddev,q1,median,q3\n";
    for (const auto& g : summary.groups) {
      csv << g.key << ',' << g.count;
      for (const double v : {g.mean, g.stddev, g.q1, g.median, g.q3}) {
        csv << ',';
        if (g.count > 0) csv << fmt(v);
      }
      csv << '\n';
    }
    manifest.set("output.residuals", residual_path.string());
  }

  manifest.set("checkpoint", checkpoint_path);
  manifest.set("speed", opt.speed);
  manifest.set("adjacency", opt.adjacency);
  manifest.set("missing-rate", fmt(missing_rate));
  manifest.set("injection_seed", std::to_string(injection_seed));
  manifest.set("split", split_text);
  manifest.set("batch-size", std::to_string(opt.batch_size));
  manifest.set("residuals", opt.residuals);
  manifest.set("out", opt.out);
  manifest.add_digest("checkpoint", checkpoint_path);
  manifest.add_digest("speed", opt.speed);
  manifest.add_digest("adjacency", opt.adjacency);
  manifest.set("output.metrics", metrics_path.string());
  manifest.append_to(fs::path(opt.out) / "manifest.txt");
  return 0;
}

int cmd_influence(const InfluenceOptions& opt, std::ostream& out) {
  InfluenceMode mode;
  try {
    mode = parse_influence_mode(opt.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.top < 0) throw UsageError("--top must be >= 0");

  RunManifest manifest("influence");
  const Checkpoint checkpoint = load_checkpoint(opt.checkpoint);
  const int n = history_of(checkpoint.params);
  if (opt.k < 1 || opt.k > n) {
    throw UsageError("--k " + std::to_string(opt.k) + " is outside 1.." + std::to_string(n));
  }
  const InfluenceTable table = influence_scores(checkpoint.params, opt.k, mode);

  ensure_dir(opt.out);
  const fs::path path = fs::path(opt.out) / "influence.csv";
  const auto rows = opt.top > 0 ? std::min<std::size_t>(static_cast<std::size_t>(opt.top), table.ranked_order.size())
                                : table.ranked_order.size();
  {
    auto csv = open_output(path);
    csv << "rank,vertex,score\n";
    for (std::size_t r = 0; r < rows; ++r) {
      const Index v = table.ranked_order[r];
      csv << (r + 1) << ',' << v << ',' << fmt(table.scores(v)) << '\n';
    }
  }
  for (std::size_t r = 0; r < std::min<std::size_t>(rows, 10); ++r) {
    const Index v = table.ranked_order[r];
    out << "#" << (r + 1) << " vertex " << v << " score " << table.scores(v) << '\n';
  }

  manifest.set("checkpoint", opt.checkpoint);
  manifest.set("k", std::to_string(opt.k));
  manifest.set("top", std::to_string(opt.top));
  manifest.set("mode", opt.mode);
  manifest.set("out", opt.out);
  manifest.add_digest("checkpoint", opt.checkpoint);
  manifest.set("output.influence", path.string());
  manifest.append_to(fs::path(opt.out) / "manifest.txt");
  return 0;
}

std::string first_line(const std::string& text) {
  const auto newline = text.find('\n');
  return newline == std::string::npos ? text : text.substr(0, newline);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> result;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      result.push_back(args[i]);
    }
  }
  if (!config_path) return result;

  std::ifstream in(*config_path);
  if (!in) throw UsageError("cannot open config file " + *config_path);
  const auto given = [&](const std::string& key) {
    for (const auto& arg : result) {
      if (arg == "--" + key || arg.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("malformed config line '" + line + "'");
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (!given(key)) {
      result.push_back("--" + key);
      result.push_back(value);
    }
  }
  return result;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph Markov network forecasting toolkit", "gmn"};
  app.require_subcommand(1);
  app.add_flag_function("--version", [&out](std::int64_t) {
    out << "gmn " GRAPHMARKOV_VERSION "\n";
    throw CLI::Success();
  }, "Print version and exit");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic graph Markov process");
  simulate->add_option("--nodes", sim.nodes, "Number of graph vertices")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Number of time steps T")->capture_default_str();
  simulate->add_option("--gamma", sim.gamma, "Decay rate in (0, 1)")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Gaussian noise standard deviation")->capture_default_str();
  simulate->add_option("--edge-prob", sim.edge_prob, "Chord probability on top of the ring")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a GMN or SGMN model");
  train_cmd->add_option("--model", tr.model, "gmn or sgmn")->capture_default_str();
  train_cmd->add_option("--n", tr.n, "History length")->capture_default_str();
  train_cmd->add_option("--gamma", tr.gamma, "Decay rate in (0, 1)")->capture_default_str();
  train_cmd->add_option("--missing-rate", tr.missing_rate, "Injected missing fraction in [0, 1)")->capture_default_str();
  train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--lr-floor", tr.lr_floor, "Lowest learning rate")->capture_default_str();
  train_cmd->add_option("--lr-patience", tr.lr_patience, "Epochs without improvement before decay")->capture_default_str();
  train_cmd->add_option("--stop-patience", tr.stop_patience, "Epochs without improvement before stopping")
      ->capture_default_str();
  train_cmd->add_option("--min-delta", tr.min_delta, "Minimum validation improvement")->capture_default_str();
  train_cmd->add_option("--max-epochs", tr.max_epochs, "Epoch cap")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Seed for injection and shuffling")->capture_default_str();
  train_cmd->add_option("--speed", tr.speed, "Speed CSV")->required();
  train_cmd->add_option("--adjacency", tr.adjacency, "Adjacency CSV")->required();
  train_cmd->add_option("--out", tr.out, "Output directory")->capture_default_str();
  train_cmd->add_option("--split", tr.split, "Train:val:test ratio")->capture_default_str();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against the persistence baseline");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file (default OUT/checkpoint.txt)");
  eval_cmd->add_option("--speed", ev.speed, "Speed CSV")->required();
  eval_cmd->add_option("--adjacency", ev.adjacency, "Adjacency CSV")->required();
  eval_cmd->add_option("--out", ev.out, "Output directory")->capture_default_str();
  eval_cmd->add_option("--residuals", ev.residuals, "Residual grouping: hour or weekday");
  eval_cmd->add_option("--missing-rate", ev.missing_rate, "Override the injected missing fraction");
  eval_cmd->add_option("--seed", ev.seed, "Override the injection seed");
  eval_cmd->add_option("--split", ev.split, "Override the train:val:test ratio");
  eval_cmd->add_option("--batch-size", ev.batch_size, "Evaluation batch size")->capture_default_str();

  InfluenceOptions inf;
  auto* influence = app.add_subcommand("influence", "Rank vertices by influence score");
  influence->add_option("--checkpoint", inf.checkpoint, "Checkpoint file")->required();
  influence->add_option("--k", inf.k, "Weight step index in 1..n")->capture_default_str();
  influence->add_option("--top", inf.top, "Keep only the top rows (0 = all)")->capture_default_str();
  influence->add_option("--mode", inf.mode, "row or column")->capture_default_str();
  influence->add_option("--out", inf.out, "Output directory")->capture_default_str();

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Success&) {
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << first_line(e.what()) << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << first_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (influence->parsed()) return cmd_influence(inf, out);
  } catch (const UsageError& e) {
    err << "error: " << first_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << first_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace gmn::cli
