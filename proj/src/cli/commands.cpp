#include "hypernp/cli/commands.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hypernp/cli/run_config.hpp"
#include "hypernp/evaluation.hpp"
#include "hypernp/inference.hpp"
#include "hypernp/io/archive.hpp"
#include "hypernp/io/binary.hpp"
#include "hypernp/service/protocol.hpp"
#include "hypernp/service/server.hpp"
#include "hypernp/stability.hpp"

namespace hypernp::cli {
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return 2;
    case ErrorKind::dimension_mismatch: return 3;
    case ErrorKind::io: return 4;
    case ErrorKind::format: return 5;
    case ErrorKind::numeric: return 6;
    case ErrorKind::unsupported: return 7;
  }
  return kInternalExit;
}

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

// Everything a finished training run left behind.
struct RunDirectory {
  fs::path dir;
  RunConfig config;
  NetworkModel model;
  std::vector<std::size_t> subset;

  static RunDirectory open(const fs::path& dir) {
    RunDirectory run;
    run.dir = dir;
    if (!fs::is_directory(dir)) fail(ErrorKind::io, "run directory " + dir.string() + " does not exist");
    run.config = RunConfig::parse(binary::read_file(dir / "config.json"));
    run.model = load_model(dir / "model.hnpm");
    const auto archive = read_archive(dir / "corpus.hnpt");
    if (archive.records.empty()) fail(ErrorKind::format, "corpus archive has no records");
    run.subset.assign(archive.records.front().indices.begin(), archive.records.front().indices.end());
    return run;
  }

  Dataset dataset() const {
    Dataset ds = load_dataset(config.dataset);
    if (ds.fingerprint != model.dataset_fingerprint) {
      fail(ErrorKind::invalid_argument, "dataset fingerprint " + ds.fingerprint + " does not match the model's " +
                                            model.dataset_fingerprint);
    }
    return ds;
  }
};

std::vector<std::size_t> split_rows(const std::string& split, std::size_t n, const std::vector<std::size_t>& subset) {
  if (split == "train") return subset;
  std::vector<std::size_t> rows;
  if (split == "all") {
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  if (split == "heldout") {
    std::vector<bool> taken(n, false);
    for (const auto r : subset) taken.at(r) = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) rows.push_back(i);
    }
    if (rows.empty()) fail(ErrorKind::invalid_argument, "held-out split is empty");
    return rows;
  }
  fail(ErrorKind::invalid_argument, "split must be train, heldout or all, got '" + split + "'");
}

std::vector<std::size_t> cap_rows(std::vector<std::size_t> rows, std::size_t max_points, std::uint64_t seed) {
  if (max_points == 0 || rows.size() <= max_points) return rows;
  Rng rng(mix_seed(seed, 0xca9));
  rng.shuffle(rows.begin(), rows.end());
  rows.resize(max_points);
  std::sort(rows.begin(), rows.end());
  return rows;
}

// "5,15,25" for scalar models; "1,0,1;0.5,1,1" for vectors.
std::vector<HyperValue> parse_h_values(const std::string& text, std::size_t arity) {
  std::vector<HyperValue> out;
  if (text.empty()) fail(ErrorKind::invalid_argument, "empty h list");
  if (arity == 1 && text.find(';') == std::string::npos) {
    for (const double v : protocol::parse_hyper_list(text)) out.push_back({v});
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(';', pos), text.size());
    out.push_back(protocol::parse_hyper_list(std::string_view(text).substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

HyperValue parse_single_h(const std::string& text) { return protocol::parse_hyper_list(text); }

void write_layout(const fs::path& path, const InferenceResult& result, const std::string& format) {
  if (format == "bin") {
    write_layout_binary(path, result);
  } else if (format == "csv") {
    write_layout_text(path, result, ',');
  } else {
    fail(ErrorKind::invalid_argument, "format must be bin or csv, got '" + format + "'");
  }
}

// Artifacts go to a hidden sibling first and are renamed into place at the end.
class Staging {
 public:
  explicit Staging(fs::path target) : target_(std::move(target)) {
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + parent.string() + ": " + ec.message());
    staging_ = parent / ("." + target_.filename().string() + ".staging-" + std::to_string(::getpid()));
    fs::remove_all(staging_, ec);
    if (!fs::create_directory(staging_, ec)) fail(ErrorKind::io, "cannot create " + staging_.string());
  }
  ~Staging() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }
  const fs::path& path() const { return staging_; }
  void commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::rename(staging_, target_, ec);
    if (ec) fail(ErrorKind::io, "cannot move artifacts to " + target_.string() + ": " + ec.message());
    committed_ = true;
  }

 private:
  fs::path target_, staging_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) { binary::write_file(path, text); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct ConfigArgs {
  std::optional<std::string> file;
  std::vector<std::string> overrides;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", file, "JSON run config");
    app->add_option("--set", overrides, "override a config field, e.g. --set grid.gap=5")->take_all();
    app->add_option("-o,--output", output, "output directory (relative paths honor $HYPERNP_OUTPUT_ROOT)");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--engine", engine, "tsne | isomap | weighted_pca | archive");
  }

  RunConfig load() const {
    auto all = overrides;
    if (output) all.push_back("output=" + nlohmann_quote(*output));
    if (seed) all.push_back("seed=" + std::to_string(*seed));
    if (engine) all.push_back("engine=" + nlohmann_quote(*engine));
    return load_run_config(file ? std::optional<fs::path>(*file) : std::nullopt, all);
  }

  static std::string nlohmann_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  }
};

int cmd_train(const ConfigArgs& args, std::ostream& out) {
  const RunConfig config = args.load();
  const fs::path target = resolve_output(config.output);
  Staging staging(target);

  const Dataset dataset = load_dataset(config.dataset);
  const auto engine = make_config_engine(config);
  std::vector<std::size_t> subset;
  std::vector<HyperValue> grid;
  if (const auto* archived = dynamic_cast<const ArchiveEngine*>(engine.get())) {
    archived->archive().check_dataset(dataset);
    subset = archived->subset();
    grid = archived->hyperparameter_values();
  } else {
    subset = sample_training_subset(dataset, config.fraction, config.seed, config.stratify);
    grid = config.hyperparameter_grid().expand(dataset.dims(), config.seed);
  }

  std::ostringstream log;
  log << "dataset " << dataset.fingerprint << " rows " << dataset.size() << " dims " << dataset.dims() << "\n";
  log << "engine " << engine->id() << " grid " << grid.size() << " values, subset " << subset.size() << " rows\n";
  const TrainingCorpus corpus = build_corpus(dataset, subset, grid, *engine, config.seed);
  for (const auto& w : corpus.warnings) log << "warning: " << w << "\n";
  const TrainedModel trained = train_hypernp(corpus, config.network_spec(), config.fit_config());

  std::ostringstream history;
  history << "epoch\ttrain_loss\tvalidation_loss\n";
  for (const auto& e : trained.history) {
    history << e.epoch << '\t' << format_double(e.train_loss) << '\t' << format_double(e.validation_loss) << '\n';
  }
  const auto& best = trained.history.at(trained.best_epoch);
  log << "best epoch " << trained.best_epoch << " of " << trained.history.size() - 1 << ", train "
      << format_double(best.train_loss) << ", validation " << format_double(best.validation_loss) << "\n";

  save_model(staging.path() / "model.hnpm", trained.model);
  write_archive(staging.path() / "corpus.hnpt", corpus_archive(corpus));
  write_text(staging.path() / "history.tsv", history.str());
  write_text(staging.path() / "config.json", config.dump());
  write_text(staging.path() / "train.log", log.str());
  staging.commit();

  out << log.str() << "wrote " << target.string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& run_dir, const std::string& split, const std::string& h_text, std::size_t k,
                 std::size_t max_points, const std::string& out_path, std::ostream& out) {
  if (k == 0) fail(ErrorKind::invalid_argument, "K must be at least 1");
  const RunDirectory run = RunDirectory::open(run_dir);
  const Dataset dataset = run.dataset();
  const auto engine = make_config_engine(run.config);
  const bool archived = dynamic_cast<const ArchiveEngine*>(engine.get()) != nullptr;
  if (archived && split != "train") {
    fail(ErrorKind::unsupported, "archived projections only cover the training split");
  }
  std::vector<std::size_t> rows = split_rows(split, dataset.size(), run.subset);
  if (!archived) rows = cap_rows(std::move(rows), max_points, run.config.seed);
  metrics::check_neighbors(rows.size(), k);
  const std::vector<HyperValue> h_values =
      h_text.empty() ? run.model.trained_values : parse_h_values(h_text, run.model.hyperparameter_names.size());

  const Matrix<double> data = select_rows(dataset.features, rows);
  MetricReport report = evaluate_model(run.model, data, *engine, h_values, k, run.config.seed);
  report.split = split;

  std::ostringstream tsv;
  report.write_tsv(tsv);
  const fs::path target = out_path.empty() ? run.dir / ("metrics-" + split + ".tsv") : fs::path(out_path);
  write_text(target, tsv.str());
  out << "split " << split << ", " << rows.size() << " rows, K = " << k << ", " << h_values.size() << " h values\n";
  out << report.summary();
  out << "wrote " << target.string() << "\n";
  return 0;
}

int cmd_bench(const std::string& run_dir, const std::string& sizes_text, std::size_t batch_size, std::size_t repeats,
              const std::string& out_path, std::ostream& out) {
  std::vector<std::size_t> sizes;
  for (const double v : protocol::parse_hyper_list(sizes_text.empty() ? "x" : sizes_text)) {
    if (v < 1 || v != std::floor(v)) fail(ErrorKind::invalid_argument, "sizes must be positive integers");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (repeats == 0 || batch_size == 0) fail(ErrorKind::invalid_argument, "repeats and batch size must be positive");
  const RunDirectory run = RunDirectory::open(run_dir);
  const Dataset dataset = run.dataset();
  const auto& norm = run.model.normalization;
  HyperValue h(norm.hyper_count());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = 0.5 * (norm.hyper_min[j] + norm.hyper_max[j]);

  InferenceOptions options;
  options.batch_size = batch_size;
  std::vector<TimingRecord> records;
  for (const std::size_t n : sizes) {
    // Oversample by cycling through the dataset.
    Matrix<double> rows(n, dataset.dims());
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = dataset.features.row(i % dataset.size());
      std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
    PreparedInputs prepared(run.model, rows);
    run_inference(run.model, prepared, h, options);  // warm-up
    std::vector<double> seconds;
    for (std::size_t r = 0; r < repeats; ++r) seconds.push_back(run_inference(run.model, prepared, h, options).timing.seconds);
    std::sort(seconds.begin(), seconds.end());
    const double median = seconds[seconds.size() / 2];
    records.push_back({n, median, static_cast<double>(n) / median});
  }

  std::ostringstream table;
  table << "rows\tseconds\trows_per_second\n";
  for (const auto& r : records) table << r.rows << '\t' << format_double(r.seconds) << '\t' << format_double(r.rows_per_second) << '\n';
  out << table.str();
  if (records.size() >= 2) out << "linear fit R^2 = " << format_double(linear_fit_r2(records)) << "\n";
  if (!out_path.empty()) write_text(out_path, table.str());
  return 0;
}

int cmd_infer(const std::string& run_dir, const std::string& h_text, const std::string& split,
              const std::string& input, const std::string& out_path, const std::string& format, bool denormalize,
              bool allow_extrapolation, std::size_t batch_size, std::ostream& out) {
  const RunDirectory run = RunDirectory::open(run_dir);
  Matrix<double> rows;
  if (!input.empty()) {
    DelimitedOptions options;
    options.delimiter = run.config.dataset.delimiter.empty() ? ',' : run.config.dataset.delimiter[0];
    options.header = run.config.dataset.header;
    if (run.config.dataset.label_column >= 0) options.label_column = static_cast<std::size_t>(run.config.dataset.label_column);
    rows = load_delimited(input, options).features;
  } else {
    const Dataset dataset = run.dataset();
    rows = select_rows(dataset.features, split_rows(split, dataset.size(), run.subset));
  }
  InferenceOptions options;
  options.denormalize = denormalize;
  options.allow_extrapolation = allow_extrapolation;
  options.batch_size = batch_size;
  const auto result = infer(run.model, rows, parse_single_h(h_text), options);
  write_layout(out_path, result, format);
  out << rows.rows() << " rows at h = " << format_hyper(result.hyperparameter) << (result.extrapolated ? " (extrapolated)" : "")
      << " in " << format_double(result.timing.seconds) << " s\nwrote " << out_path << "\n";
  return 0;
}

int cmd_project(const ConfigArgs& args, const std::string& h_text, const std::string& rows_choice,
                const std::string& out_path, const std::string& format, std::ostream& out) {
  const RunConfig config = args.load();
  const Dataset dataset = load_dataset(config.dataset);
  const auto engine = make_config_engine(config);
  std::vector<std::size_t> rows;
  if (const auto* archived = dynamic_cast<const ArchiveEngine*>(engine.get())) {
    archived->archive().check_dataset(dataset);
    rows = archived->subset();
  } else if (rows_choice == "subset") {
    rows = sample_training_subset(dataset, config.fraction, config.seed, config.stratify);
  } else if (rows_choice == "all") {
    rows = split_rows("all", dataset.size(), {});
  } else {
    fail(ErrorKind::invalid_argument, "rows must be all or subset, got '" + rows_choice + "'");
  }
  const Matrix<double> data = select_rows(dataset.features, rows);
  const HyperValue h = parse_single_h(h_text);
  engine->check_hyperparameter(h, data.rows(), data.cols());
  const auto start = std::chrono::steady_clock::now();
  const Embedding2D embedding = engine->project(data, h, nullptr, config.seed);
  InferenceResult result;
  result.coords = matrix_cast<float>(embedding.coords);
  result.hyperparameter = h;
  result.timing.rows = data.rows();
  result.timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.timing.rows_per_second = static_cast<double>(data.rows()) / std::max(result.timing.seconds, 1e-12);
  write_layout(out_path, result, format);
  if (!embedding.warning.empty()) out << "warning: " << embedding.warning << "\n";
  out << engine->id() << " at h = " << format_hyper(h) << ", objective " << format_double(embedding.objective) << "\nwrote "
      << out_path << "\n";
  return 0;
}

int cmd_serve(const std::string& run_dir, const std::string& split, const ServiceOptions& options,
              bool allow_extrapolation, std::ostream& out) {
  const RunDirectory run = RunDirectory::open(run_dir);
  const Dataset dataset = run.dataset();
  Dataset served = split == "all" ? dataset : dataset.subset(split_rows(split, dataset.size(), run.subset));
  auto service = std::make_shared<const LayoutService>(run.model, std::move(served), allow_extrapolation);
  Server server(service, options);
  server.start();
  out << "http://" << options.host << ":" << server.http_port() << " stream ws://" << options.host << ":"
      << server.stream_port() << "/" << std::endl;
  g_interrupted = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  out << "stopped" << std::endl;
  return 0;
}

int cmd_export(const std::string& run_dir, const std::string& source, const std::string& h_text,
               const std::string& split, const std::string& out_path, const std::string& format, std::ostream& out) {
  const RunDirectory run = RunDirectory::open(run_dir);
  ProjectionArchive archive;
  if (source == "corpus") {
    archive = read_archive(run.dir / "corpus.hnpt");
  } else if (source == "model" || source == "truth") {
    const Dataset dataset = run.dataset();
    const auto rows = split_rows(split, dataset.size(), run.subset);
    const Matrix<double> data = select_rows(dataset.features, rows);
    std::vector<HyperValue> h_values =
        h_text.empty() ? run.model.trained_values : parse_h_values(h_text, run.model.hyperparameter_names.size());
    std::sort(h_values.begin(), h_values.end());
    archive.dataset_fingerprint = dataset.fingerprint;
    archive.hyperparameter_names = run.model.hyperparameter_names;
    archive.seed = run.config.seed;
    archive.aligned = true;
    std::vector<std::uint32_t> indices(rows.begin(), rows.end());
    if (source == "model") {
      archive.engine = "hypernp-" + run.model.engine;
      for (auto& result : sweep(run.model, data, h_values)) {
        archive.records.push_back({result.hyperparameter, indices, std::move(result.coords)});
      }
    } else {
      const auto engine = make_config_engine(run.config);
      archive.engine = engine->id();
      for (const auto& e : seeded_chain(*engine, data, h_values, run.config.seed)) {
        archive.records.push_back({e.hyperparameter, indices, matrix_cast<float>(e.coords)});
      }
    }
  } else {
    fail(ErrorKind::invalid_argument, "source must be corpus, model or truth, got '" + source + "'");
  }

  if (format == "archive") {
    write_archive(out_path, archive);
  } else if (format == "csv") {
    std::ostringstream text;
    for (std::size_t j = 0; j < archive.hyperparameter_names.size(); ++j) text << archive.hyperparameter_names[j] << ',';
    text << "index,x,y\n";
    char buf[96];
    for (const auto& record : archive.records) {
      std::string prefix;
      for (const double v : record.hyperparameter) prefix += format_double(v) + ",";
      for (std::size_t i = 0; i < record.indices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%u,%.9g,%.9g\n", record.indices[i], record.coords(i, 0), record.coords(i, 1));
        text << prefix << buf;
      }
    }
    write_text(out_path, text.str());
  } else {
    fail(ErrorKind::invalid_argument, "format must be archive or csv, got '" + format + "'");
  }
  out << archive.records.size() << " projections from " << source << "\nwrote " << out_path << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train, evaluate and serve hyperparameter-conditioned projection networks"};
  app.require_subcommand(1);

  ConfigArgs train_args;
  auto* train = app.add_subcommand("train", "build the training corpus and fit a model");
  train_args.attach(train);

  std::string run_dir, split = "heldout", h_text, out_path, format = "bin", source = "model";
  std::size_t k = metrics::kDefaultNeighbors, max_points = 0, batch_size = 20000, repeats = 3;
  bool denormalize = false, allow_extrapolation = false;

  auto* evaluate = app.add_subcommand("evaluate", "trustworthiness and continuity against ground truth");
  evaluate->add_option("--run", run_dir, "training output directory")->required();
  evaluate->add_option("--split", split, "heldout | train | all")->capture_default_str();
  evaluate->add_option("--hyper", h_text, "h values, e.g. 5,15,25 or 1,0;0,1 (default: trained grid)");
  evaluate->add_option("-k,--neighbors", k, "neighborhood size K")->capture_default_str();
  evaluate->add_option("--max-points", max_points, "random cap on evaluated rows, 0 for none");
  evaluate->add_option("--out", out_path, "TSV report path");

  std::string sizes = "10000,20000,40000,80000";
  auto* bench = app.add_subcommand("bench", "inference wall time over oversampled row counts");
  bench->add_option("--run", run_dir, "training output directory")->required();
  bench->add_option("--sizes", sizes, "comma-separated row counts")->capture_default_str();
  bench->add_option("--batch-size", batch_size, "inference batch size")->capture_default_str();
  bench->add_option("--repeats", repeats, "timed runs per size (median reported)")->capture_default_str();
  bench->add_option("--out", out_path, "TSV table path");

  std::string input;
  std::string infer_split = "all";
  auto* infer_cmd = app.add_subcommand("infer", "layout for one h from a trained model");
  infer_cmd->add_option("--run", run_dir, "training output directory")->required();
  infer_cmd->add_option("--hyper", h_text, "hyperparameter value (comma-separated for vectors)")->required();
  infer_cmd->add_option("--split", infer_split, "dataset rows to project: all | train | heldout")->capture_default_str();
  infer_cmd->add_option("--input", input, "delimited file of new samples instead of the dataset");
  infer_cmd->add_option("--out", out_path, "layout path")->required();
  infer_cmd->add_option("--format", format, "bin | csv")->capture_default_str();
  infer_cmd->add_option("--batch-size", batch_size, "inference batch size")->capture_default_str();
  infer_cmd->add_flag("--denormalize", denormalize, "map back to the training layout frame");
  infer_cmd->add_flag("--allow-extrapolation", allow_extrapolation, "accept h outside the trained bounds");

  ConfigArgs project_args;
  std::string rows_choice = "all";
  auto* project = app.add_subcommand("project", "ground-truth projection from the configured engine");
  project_args.attach(project);
  project->add_option("--hyper", h_text, "hyperparameter value")->required();
  project->add_option("--rows", rows_choice, "all | subset")->capture_default_str();
  project->add_option("--out", out_path, "layout path")->required();
  project->add_option("--format", format, "bin | csv")->capture_default_str();

  ServiceOptions serve_options;
  std::string serve_split = "all";
  auto* serve = app.add_subcommand("serve", "HTTP metadata/layout endpoints plus a WebSocket stream");
  serve->add_option("--run", run_dir, "training output directory")->required();
  serve->add_option("--host", serve_options.host, "IPv4 address to bind")->capture_default_str();
  serve->add_option("--port", serve_options.http_port, "HTTP port, 0 for any")->capture_default_str();
  serve->add_option("--stream-port", serve_options.stream_port, "WebSocket port, 0 for any")->capture_default_str();
  serve->add_option("--split", serve_split, "dataset rows to serve: all | train | heldout")->capture_default_str();
  serve->add_flag("--allow-extrapolation", allow_extrapolation, "accept h outside the trained bounds");

  std::string export_split = "all";
  std::string export_format = "archive";
  auto* export_cmd = app.add_subcommand("export", "write projections as an archive or delimited text");
  export_cmd->add_option("--run", run_dir, "training output directory")->required();
  export_cmd->add_option("--source", source, "corpus | model | truth")->capture_default_str();
  export_cmd->add_option("--hyper", h_text, "h values (default: trained grid)");
  export_cmd->add_option("--split", export_split, "all | train | heldout")->capture_default_str();
  export_cmd->add_option("--out", out_path, "output path")->required();
  export_cmd->add_option("--format", export_format, "archive | csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return kUsageExit;
  }

  try {
    if (*train) return cmd_train(train_args, out);
    if (*evaluate) return cmd_evaluate(run_dir, split, h_text, k, max_points, out_path, out);
    if (*bench) return cmd_bench(run_dir, sizes, batch_size, repeats, out_path, out);
    if (*infer_cmd) {
      return cmd_infer(run_dir, h_text, infer_split, input, out_path, format, denormalize, allow_extrapolation,
                       batch_size, out);
    }
    if (*project) return cmd_project(project_args, h_text, rows_choice, out_path, format, out);
    if (*serve) return cmd_serve(run_dir, serve_split, serve_options, allow_extrapolation, out);
    if (*export_cmd) return cmd_export(run_dir, source, h_text, export_split, out_path, export_format, out);
  } catch (const Error& e) {
    err << "error[" << error_kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return kInternalExit;
  }
  return kUsageExit;
}

}  // namespace hypernp::cli
