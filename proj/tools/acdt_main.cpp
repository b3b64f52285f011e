// Command-line front end: each pipeline stage is runnable on its own
// (mine/adapt/fit/predict), plus end-to-end run, benchmark, synthetic-data,
// and 2-D projection subcommands. Exit codes: 0 success, 1 usage or config
// error, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "acdt/acdt.hpp"

namespace {

struct CliOptions {
  acdt::RunConfig cfg;
  std::string partition_rule = "last-sweep";
  std::string out = ".";
  std::string trace_path;
  std::string bundle_path;
  std::string mode = "transferred";
  std::string config_path;
  bool no_split = false;

  int repeats = 1;
  std::string data_dir;
  std::string datasets = "forest,student,slump,stockTL,stockUSD,airfoil";

  std::string sizes = "100,100";
  std::string atoms = "2,3;-2,-3";
  std::string means;
  double noise = 0.1;
  double feature_std = 1.0;
};

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const std::string& item : split_list(s, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + item +
                                  "' as an integer");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

std::vector<Eigen::VectorXd> parse_vector_list(const std::string& s,
                                               const char* what) {
  std::vector<Eigen::VectorXd> out;
  for (const std::string& group : split_list(s, ';')) {
    std::vector<double> values;
    for (const std::string& item : split_list(group, ',')) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": cannot parse '" +
                                    item + "' as a real number");
      }
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = values[i];
    }
    out.push_back(std::move(v));
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

// The test CSV may or may not carry the response column; peek at the header.
acdt::Dataset load_test_csv(const std::string& path,
                            const std::string& response) {
  if (!std::filesystem::exists(path)) {
    throw std::invalid_argument("test file does not exist: " + path);
  }
  std::ifstream in(path);
  std::string header_line;
  std::getline(in, header_line);
  in.close();
  const std::vector<std::string> header = acdt::detail::split_csv_line(header_line);
  const bool has_response =
      std::find(header.begin(), header.end(), response) != header.end();
  return acdt::load_csv(path, has_response ? response : "", acdt::Role::test);
}

std::filesystem::path ensure_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + out + ": " +
                             ec.message());
  }
  return dir;
}

void write_trace_csv(const std::vector<acdt::TraceRow>& trace,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out << "sweep,m,sigma,nu\n";
  for (const acdt::TraceRow& row : trace) {
    out << row.sweep << "," << row.m << "," << acdt::format_double(row.sigma)
        << "," << acdt::format_double(row.nu) << "\n";
  }
}

void write_predictions_csv(const Eigen::VectorXd& pred_z,
                           const Eigen::VectorXd& pred_raw,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out << "index,pred_z,pred_raw\n";
  for (Eigen::Index i = 0; i < pred_z.size(); ++i) {
    out << i << "," << acdt::format_double(pred_z[i]) << ","
        << acdt::format_double(pred_raw[i]) << "\n";
  }
}

void write_partition_csv(const std::vector<int>& labels,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << "," << labels[i] << "\n";
  }
}

void write_atoms_csv(const std::vector<Eigen::VectorXd>& atoms,
                     const std::vector<std::string>& feature_names,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out << "intercept";
  for (const std::string& name : feature_names) {
    out << "," << name;
  }
  out << "\n";
  for (const Eigen::VectorXd& atom : atoms) {
    for (Eigen::Index j = 0; j < atom.size(); ++j) {
      out << (j ? "," : "") << acdt::format_double(atom[j]);
    }
    out << "\n";
  }
}

void print_domain_summary(const std::vector<int>& sizes) {
  const int m = static_cast<int>(sizes.size()) - 1;
  std::cout << "latent domains: " << m << " (sizes";
  for (int k = 0; k < m; ++k) {
    std::cout << " " << sizes[static_cast<std::size_t>(k)];
  }
  std::cout << "), target size " << sizes.back() << "\n";
}

// Shared flag block; every numeric default matches the library defaults.
void add_pipeline_flags(CLI::App* sub, CliOptions& opt, bool with_gibbs,
                        bool with_transfer) {
  sub->add_option("--response", opt.cfg.response, "response column name");
  sub->add_option("--name", opt.cfg.name, "dataset label used in reports");
  sub->add_option("--ridge-lambda", opt.cfg.ridge_lambda,
                  "ridge penalty (intercept unpenalized)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--split", opt.cfg.split,
                  "training fraction when no test file is given");
  sub->add_option("--split-seed", opt.cfg.split_seed, "split shuffle seed");
  if (with_gibbs) {
    sub->add_option("--sweeps", opt.cfg.gibbs.sweeps, "Gibbs sweeps");
    sub->add_option("--burn-in", opt.cfg.gibbs.burn_in, "burn-in sweeps");
    sub->add_option("--seed", opt.cfg.gibbs.seed, "chain seed");
    sub->add_option("--partition-rule", opt.partition_rule,
                    "last-sweep or modal");
    sub->add_option("--merge-floor", opt.cfg.merge_floor,
                    "merge clusters smaller than this (0 disables)");
    sub->add_option("--a0", opt.cfg.a0, "residual-precision prior shape");
    sub->add_option("--b0", opt.cfg.b0, "residual-precision prior rate");
    sub->add_option("--av", opt.cfg.av, "concentration prior shape");
    sub->add_option("--bv", opt.cfg.bv, "concentration prior rate");
    sub->add_option("--ai", opt.cfg.ai, "coefficient-scale prior shape");
    sub->add_option("--bi", opt.cfg.bi, "coefficient-scale prior rate");
  }
  if (with_transfer) {
    sub->add_option("--alpha", opt.cfg.transfer.alpha, "response shrink");
    sub->add_option("--beta", opt.cfg.transfer.beta, "response-row weight in J");
    sub->add_option("--mu", opt.cfg.transfer.mu, "regularizer weight");
    sub->add_option("--tau", opt.cfg.transfer.tau, "graph weight");
    sub->add_option("--q", opt.cfg.transfer.q, "output dimension");
    sub->add_option("--knn", opt.cfg.transfer.knn, "neighbor count");
    sub->add_option("--jitter", opt.cfg.transfer.jitter,
                    "relative conditioning jitter");
  }
  sub->add_option("--out", opt.out, "output directory");
  sub->add_option("--config", opt.config_path,
                  "flat key=value config file; explicit flags win");
}

template <typename T>
std::function<void(const std::string&)> config_setter(T& target,
                                                      const char* key) {
  return [&target, key](const std::string& value) {
    T parsed{};
    if (!CLI::detail::lexical_cast(value, parsed)) {
      throw std::invalid_argument(std::string("config file: key '") + key +
                                  "': cannot parse '" + value + "'");
    }
    target = parsed;
  };
}

// Flat key=value settings applied beneath whatever the command line set.
// Keys mirror the long flag names; '#' starts a comment.
void apply_config_file(CLI::App* sub, CliOptions& opt) {
  if (opt.config_path.empty()) {
    return;
  }
  std::vector<std::pair<std::string, std::function<void(const std::string&)>>>
      keys;
  auto reg = [&](const char* key, auto& target) {
    keys.emplace_back(key, config_setter(target, key));
  };
  reg("response", opt.cfg.response);
  reg("name", opt.cfg.name);
  reg("ridge-lambda", opt.cfg.ridge_lambda);
  reg("split", opt.cfg.split);
  reg("split-seed", opt.cfg.split_seed);
  reg("sweeps", opt.cfg.gibbs.sweeps);
  reg("burn-in", opt.cfg.gibbs.burn_in);
  reg("seed", opt.cfg.gibbs.seed);
  reg("partition-rule", opt.partition_rule);
  reg("merge-floor", opt.cfg.merge_floor);
  reg("a0", opt.cfg.a0);
  reg("b0", opt.cfg.b0);
  reg("av", opt.cfg.av);
  reg("bv", opt.cfg.bv);
  reg("ai", opt.cfg.ai);
  reg("bi", opt.cfg.bi);
  reg("alpha", opt.cfg.transfer.alpha);
  reg("beta", opt.cfg.transfer.beta);
  reg("mu", opt.cfg.transfer.mu);
  reg("tau", opt.cfg.transfer.tau);
  reg("q", opt.cfg.transfer.q);
  reg("knn", opt.cfg.transfer.knn);
  reg("jitter", opt.cfg.transfer.jitter);
  reg("out", opt.out);

  std::ifstream in(opt.config_path);
  if (!in) {
    throw std::invalid_argument("config file: cannot open " + opt.config_path);
  }
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config file: line " +
                                  std::to_string(lineno) +
                                  ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it =
        std::find_if(keys.begin(), keys.end(),
                     [&](const auto& entry) { return entry.first == key; });
    if (it == keys.end()) {
      throw std::invalid_argument("config file: unknown key '" + key + "'");
    }
    const CLI::Option* flag = sub->get_option_no_throw("--" + key);
    if (flag != nullptr && flag->count() > 0) {
      continue;  // an explicit flag outranks the file
    }
    it->second(value);
  }
}

void finalize_config(CliOptions& opt) {
  opt.cfg.gibbs.partition_rule = acdt::parse_partition_rule(opt.partition_rule);
}

std::pair<acdt::Dataset, acdt::Dataset> load_train_test(const CliOptions& opt) {
  if (opt.cfg.response.empty()) {
    throw std::invalid_argument("--response is required");
  }
  acdt::Dataset full =
      acdt::load_csv(opt.cfg.train_path, opt.cfg.response, acdt::Role::train);
  if (!opt.cfg.test_path.empty()) {
    return {std::move(full), load_test_csv(opt.cfg.test_path, opt.cfg.response)};
  }
  if (opt.no_split) {
    acdt::Dataset empty;
    empty.role = acdt::Role::test;
    empty.features.resize(0, full.p());
    empty.names = full.names;
    return {std::move(full), std::move(empty)};
  }
  return acdt::split_dataset(full, opt.cfg.split, opt.cfg.split_seed);
}

int cmd_mine(CliOptions& opt) {
  finalize_config(opt);
  const acdt::Dataset train =
      acdt::load_csv(opt.cfg.train_path, opt.cfg.response.empty() ? "" : opt.cfg.response,
                     acdt::Role::train);
  const acdt::GibbsResult mined = acdt::mine_domains(train, opt.cfg);
  const auto dir = ensure_out_dir(opt.out);
  write_partition_csv(mined.partition, (dir / "partition.csv").string());
  write_atoms_csv(mined.atoms, train.names, (dir / "atoms.csv").string());
  write_trace_csv(mined.trace, (dir / "trace.csv").string());
  int m = 0;
  for (int label : mined.partition) {
    m = std::max(m, label);
  }
  std::vector<int> sizes(static_cast<std::size_t>(m), 0);
  for (int label : mined.partition) {
    ++sizes[static_cast<std::size_t>(label - 1)];
  }
  std::cout << "mined " << m << " latent domain(s) from " << train.n()
            << " instances (sizes";
  for (int s : sizes) {
    std::cout << " " << s;
  }
  std::cout << ")\n";
  std::cout << "wrote " << (dir / "partition.csv").string() << ", "
            << (dir / "atoms.csv").string() << ", "
            << (dir / "trace.csv").string() << "\n";
  return 0;
}

int cmd_adapt(CliOptions& opt) {
  finalize_config(opt);
  auto [train, test] = load_train_test(opt);
  const acdt::GibbsResult mined = acdt::mine_domains(train, opt.cfg);
  const acdt::PipelineResult fit =
      acdt::fit_from_partition(opt.cfg, train, test, mined.partition, mined.atoms);
  acdt::ModelBundle bundle =
      acdt::make_bundle(fit, opt.cfg, train.names, opt.cfg.response);
  bundle.ridge.reset();  // adapt stops before the regression head
  const auto dir = ensure_out_dir(opt.out);
  save_bundle(bundle, (dir / "bundle.json").string());
  if (!opt.trace_path.empty()) {
    write_trace_csv(mined.trace, opt.trace_path);
  }
  print_domain_summary(fit.domain_sizes);
  std::cout << "selected eigenvalues:";
  for (Eigen::Index i = 0; i < fit.eigvals.size(); ++i) {
    std::cout << " " << fit.eigvals[i];
  }
  std::cout << "\nwrote " << (dir / "bundle.json").string() << "\n";
  return 0;
}

int cmd_fit(CliOptions& opt) {
  finalize_config(opt);
  auto [train, test] = load_train_test(opt);
  const acdt::GibbsResult mined = acdt::mine_domains(train, opt.cfg);
  const acdt::PipelineResult fit =
      acdt::fit_from_partition(opt.cfg, train, test, mined.partition, mined.atoms);
  const acdt::ModelBundle bundle =
      acdt::make_bundle(fit, opt.cfg, train.names, opt.cfg.response);
  const auto dir = ensure_out_dir(opt.out);
  save_bundle(bundle, (dir / "bundle.json").string());
  if (!opt.trace_path.empty()) {
    write_trace_csv(mined.trace, opt.trace_path);
  }
  print_domain_summary(fit.domain_sizes);
  std::cout << "wrote " << (dir / "bundle.json").string() << "\n";
  return 0;
}

int cmd_run(CliOptions& opt) {
  finalize_config(opt);
  auto [train, test] = load_train_test(opt);
  const acdt::GibbsResult mined = acdt::mine_domains(train, opt.cfg);
  const acdt::PipelineResult fit =
      acdt::fit_from_partition(opt.cfg, train, test, mined.partition, mined.atoms);
  const acdt::ModelBundle bundle =
      acdt::make_bundle(fit, opt.cfg, train.names, opt.cfg.response);
  const auto dir = ensure_out_dir(opt.out);
  save_bundle(bundle, (dir / "bundle.json").string());
  write_predictions_csv(fit.pred_z, fit.pred_raw,
                        (dir / "predictions.csv").string());
  if (!opt.trace_path.empty()) {
    write_trace_csv(mined.trace, opt.trace_path);
  }
  print_domain_summary(fit.domain_sizes);
  if (fit.rmse_z) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", *fit.rmse_z);
    std::cout << "rmse (z-scored response): " << buf << "\n";
  } else {
    std::cout << "no test truth available; skipped rmse\n";
  }
  std::cout << "wrote " << (dir / "bundle.json").string() << " and "
            << (dir / "predictions.csv").string() << "\n";
  return 0;
}

int cmd_predict(CliOptions& opt) {
  const acdt::ModelBundle bundle = acdt::load_bundle(opt.bundle_path);
  const std::string response =
      opt.cfg.response.empty() ? bundle.config.response : opt.cfg.response;
  const acdt::Dataset test = load_test_csv(opt.cfg.test_path, response);
  const acdt::BundlePrediction pred = acdt::predict_with_bundle(bundle, test);
  const auto dir = ensure_out_dir(opt.out);
  write_predictions_csv(pred.pred_z, pred.pred_raw,
                        (dir / "predictions.csv").string());
  if (pred.rmse_z) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", *pred.rmse_z);
    std::cout << "rmse (z-scored response): " << buf << "\n";
  }
  std::cout << "wrote " << (dir / "predictions.csv").string() << "\n";
  return 0;
}

int cmd_synth(CliOptions& opt) {
  acdt::SynthSpec spec;
  spec.sizes = parse_int_list(opt.sizes, "--sizes");
  spec.atoms = parse_vector_list(opt.atoms, "--atoms");
  if (!opt.means.empty()) {
    spec.means = parse_vector_list(opt.means, "--means");
  }
  spec.noise_std = opt.noise;
  spec.feature_std = opt.feature_std;
  acdt::Rng rng(opt.cfg.gibbs.seed);
  const acdt::SynthData data = acdt::generate_synth(rng, spec);
  const auto dir = ensure_out_dir(opt.out);
  const acdt::Dataset d = acdt::to_dataset(data);
  acdt::write_csv(d, (dir / "synth.csv").string(), "y");
  write_partition_csv(data.labels, (dir / "labels.csv").string());
  std::cout << "generated " << d.n() << " instances over " << spec.sizes.size()
            << " planted domain(s)\n";
  std::cout << "wrote " << (dir / "synth.csv").string() << " and "
            << (dir / "labels.csv").string() << "\n";
  return 0;
}

int cmd_bench(CliOptions& opt) {
  finalize_config(opt);
  if (opt.data_dir.empty()) {
    throw std::invalid_argument("--data-dir is required");
  }
  if (opt.cfg.response.empty()) {
    opt.cfg.response = "y";
  }
  std::vector<acdt::RunConfig> configs;
  for (const std::string& name : split_list(opt.datasets, ',')) {
    acdt::RunConfig cfg = opt.cfg;
    cfg.name = name;
    cfg.train_path =
        (std::filesystem::path(opt.data_dir) / (name + ".csv")).string();
    cfg.test_path.clear();
    configs.push_back(std::move(cfg));
  }
  const std::vector<acdt::BenchRow> rows =
      acdt::run_bench(configs, opt.repeats, std::cerr);
  const auto dir = ensure_out_dir(opt.out);
  const std::string table_path = (dir / "bench_results.csv").string();
  acdt::write_bench_csv(rows, table_path);
  acdt::print_bench_summary(rows, std::cout);
  std::cout << "wrote " << table_path << "\n";
  return 0;
}

int cmd_project(CliOptions& opt) {
  const acdt::ModelBundle bundle = acdt::load_bundle(opt.bundle_path);
  const std::string response =
      opt.cfg.response.empty() ? bundle.config.response : opt.cfg.response;
  acdt::Dataset train =
      acdt::load_csv(opt.cfg.train_path, response, acdt::Role::train);
  acdt::Dataset test;
  test.role = acdt::Role::test;
  test.features.resize(0, train.p());
  test.names = train.names;
  if (!opt.cfg.test_path.empty()) {
    test = load_test_csv(opt.cfg.test_path, response);
  }
  if (bundle.labels.size() != static_cast<std::size_t>(train.n())) {
    // the bundle was fit on a seeded split of this file; reproduce it
    auto [tr, te] = acdt::split_dataset(train, bundle.config.split,
                                        bundle.config.split_seed);
    if (bundle.labels.size() == static_cast<std::size_t>(tr.n())) {
      train = std::move(tr);
      if (opt.cfg.test_path.empty()) {
        test = std::move(te);
      }
    }
  }
  const acdt::ProjectionData proj = acdt::project_points(
      bundle, train, test, acdt::parse_projection_mode(opt.mode));
  const auto dir = ensure_out_dir(opt.out);
  const std::string path = (dir / "projection.csv").string();
  acdt::write_projection_csv(proj, path);
  std::cout << "wrote " << path << " (" << proj.coords.rows() << " points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-domain mining and cross-domain transfer for linear regression"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* mine = app.add_subcommand("mine", "mine latent domains in training data");
  mine->add_option("--train", opt.cfg.train_path, "training CSV")->required();
  add_pipeline_flags(mine, opt, true, false);

  CLI::App* adapt = app.add_subcommand("adapt", "mine domains and learn the shared feature space");
  adapt->add_option("--train", opt.cfg.train_path, "training CSV")->required();
  adapt->add_option("--test", opt.cfg.test_path, "target-domain CSV");
  adapt->add_flag("--no-split", opt.no_split, "use all rows for training when no test file is given");
  adapt->add_option("--trace", opt.trace_path, "write the chain trace CSV here");
  add_pipeline_flags(adapt, opt, true, true);

  CLI::App* fit = app.add_subcommand("fit", "fit the full model and save a bundle");
  fit->add_option("--train", opt.cfg.train_path, "training CSV")->required();
  fit->add_option("--test", opt.cfg.test_path, "target-domain CSV");
  fit->add_flag("--no-split", opt.no_split, "use all rows for training when no test file is given");
  fit->add_option("--trace", opt.trace_path, "write the chain trace CSV here");
  add_pipeline_flags(fit, opt, true, true);

  CLI::App* predict = app.add_subcommand("predict", "score new rows with a saved bundle");
  predict->add_option("--bundle", opt.bundle_path, "bundle JSON")->required();
  predict->add_option("--test", opt.cfg.test_path, "rows to score")->required();
  predict->add_option("--response", opt.cfg.response, "response column, for rmse when present");
  predict->add_option("--out", opt.out, "output directory");

  CLI::App* run = app.add_subcommand("run", "mine, adapt, fit, and predict in one go");
  run->add_option("--train", opt.cfg.train_path, "training CSV")->required();
  run->add_option("--test", opt.cfg.test_path, "target-domain CSV");
  run->add_flag("--no-split", opt.no_split, "use all rows for training when no test file is given");
  run->add_option("--trace", opt.trace_path, "write the chain trace CSV here");
  add_pipeline_flags(run, opt, true, true);

  CLI::App* bench = app.add_subcommand("bench", "two-arm benchmark over prepared datasets");
  bench->add_option("--data-dir", opt.data_dir, "directory holding <name>.csv files")->required();
  bench->add_option("--datasets", opt.datasets, "comma-separated dataset names");
  bench->add_option("--repeats", opt.repeats, "repeats with stepped seeds")
      ->check(CLI::PositiveNumber);
  add_pipeline_flags(bench, opt, true, true);

  CLI::App* synth = app.add_subcommand("synth", "generate planted-domain data");
  synth->add_option("--sizes", opt.sizes, "per-domain instance counts, e.g. 100,100");
  synth->add_option("--atoms", opt.atoms,
                    "per-domain coefficients, intercept first, e.g. 2,3;-2,-3");
  synth->add_option("--means", opt.means, "per-domain feature centers, e.g. 0;3");
  synth->add_option("--noise", opt.noise, "response noise std")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--feature-std", opt.feature_std, "feature spread")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", opt.cfg.gibbs.seed, "generator seed");
  synth->add_option("--out", opt.out, "output directory");

  CLI::App* project = app.add_subcommand("project", "2-D scatter data from a fitted bundle");
  project->add_option("--bundle", opt.bundle_path, "bundle JSON")->required();
  project->add_option("--train", opt.cfg.train_path, "training CSV the bundle was fit on")->required();
  project->add_option("--test", opt.cfg.test_path, "target-domain CSV");
  project->add_option("--mode", opt.mode, "pca or transferred");
  project->add_option("--response", opt.cfg.response, "response column override");
  project->add_option("--out", opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (CLI::App* sub : {mine, adapt, fit, run, bench}) {
      if (sub->parsed()) {
        apply_config_file(sub, opt);
      }
    }
    if (mine->parsed()) {
      return cmd_mine(opt);
    }
    if (adapt->parsed()) {
      return cmd_adapt(opt);
    }
    if (fit->parsed()) {
      return cmd_fit(opt);
    }
    if (predict->parsed()) {
      return cmd_predict(opt);
    }
    if (run->parsed()) {
      return cmd_run(opt);
    }
    if (bench->parsed()) {
      return cmd_bench(opt);
    }
    if (synth->parsed()) {
      return cmd_synth(opt);
    }
    if (project->parsed()) {
      return cmd_project(opt);
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
