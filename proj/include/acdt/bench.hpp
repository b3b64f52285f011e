#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acdt/dataset.hpp"
#include "acdt/bundle.hpp"
#include "acdt/pipeline.hpp"

namespace acdt {

// Published RMSE reference points (plain ridge, transfer pipeline) for the
// six canonical benchmark names; shown alongside our numbers, never as targets.
inline const std::map<std::string, std::pair<double, double>>& published_references() {
  static const std::map<std::string, std::pair<double, double>> refs = {
      {"forest", {0.4650, 0.3761}},
      {"student", {0.8091, 0.7542}},
      {"slump", {0.3666, 0.3556}},
      {"stockTL", {0.6717, 0.6703}},
      {"stockUSD", {0.6793, 0.6506}},
      {"airfoil", {0.7067, 0.7039}},
  };
  return refs;
}

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Digest of every setting except the two seeds (those get their own table
// columns). Fixed key order makes the digest canonical.
inline std::string settings_digest(const RunConfig& cfg) {
  std::string s;
  auto add = [&s](const std::string& key, const std::string& value) {
    s += key;
    s += '=';
    s += value;
    s += '\n';
  };
  add("a0", format_double(cfg.a0));
  add("ai", format_double(cfg.ai));
  add("alpha", format_double(cfg.transfer.alpha));
  add("av", format_double(cfg.av));
  add("b0", format_double(cfg.b0));
  add("beta", format_double(cfg.transfer.beta));
  add("bi", format_double(cfg.bi));
  add("burn_in", std::to_string(cfg.gibbs.burn_in));
  add("bv", format_double(cfg.bv));
  add("jitter", format_double(cfg.transfer.jitter));
  add("knn", std::to_string(cfg.transfer.knn));
  add("merge_floor", std::to_string(cfg.merge_floor));
  add("mu", format_double(cfg.transfer.mu));
  add("partition_rule", partition_rule_name(cfg.gibbs.partition_rule));
  add("q", std::to_string(cfg.transfer.q));
  add("response", cfg.response);
  add("ridge_lambda", format_double(cfg.ridge_lambda));
  add("split", format_double(cfg.split));
  add("sweeps", std::to_string(cfg.gibbs.sweeps));
  add("tau", format_double(cfg.transfer.tau));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(s)));
  return buf;
}

struct BenchRow {
  std::string dataset;
  std::string method;  // "RR" or "ACDT"
  double rmse = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::string digest;
  std::optional<double> reference;
  bool ok = false;
};

// One dataset, one repeat: both arms on the identical split. A failing arm
// yields a failed row instead of aborting the table.
inline void bench_one(const RunConfig& base, int repeat,
                      std::vector<BenchRow>& rows, std::ostream& log) {
  RunConfig cfg = base;
  cfg.gibbs.seed = base.gibbs.seed + static_cast<std::uint64_t>(repeat);
  cfg.split_seed = base.split_seed + static_cast<std::uint64_t>(repeat);
  const std::string digest = settings_digest(base);
  const auto& refs = published_references();
  const auto ref = refs.find(cfg.name);

  BenchRow rr_row{cfg.name, "RR", std::numeric_limits<double>::quiet_NaN(),
                  cfg.gibbs.seed, cfg.split_seed, digest,
                  ref != refs.end() ? std::optional<double>(ref->second.first)
                                    : std::nullopt,
                  false};
  BenchRow acdt_row = rr_row;
  acdt_row.method = "ACDT";
  acdt_row.reference = ref != refs.end()
                           ? std::optional<double>(ref->second.second)
                           : std::nullopt;
  try {
    const Dataset full = load_csv(cfg.train_path, cfg.response, Role::train);
    Dataset train;
    Dataset test;
    if (cfg.test_path.empty()) {
      std::tie(train, test) = split_dataset(full, cfg.split, cfg.split_seed);
    } else {
      train = full;
      test = load_csv(cfg.test_path, cfg.response, Role::test);
    }
    try {
      const BaselineResult rr = rr_baseline(train, test, cfg.ridge_lambda);
      if (rr.rmse_z) {
        rr_row.rmse = *rr.rmse_z;
        rr_row.ok = true;
      }
    } catch (const std::exception& e) {
      log << cfg.name << " RR failed: " << e.what() << "\n";
    }
    try {
      const PipelineResult fit = run_pipeline(cfg, train, test);
      if (fit.rmse_z) {
        acdt_row.rmse = *fit.rmse_z;
        acdt_row.ok = true;
      }
    } catch (const std::exception& e) {
      log << cfg.name << " ACDT failed: " << e.what() << "\n";
    }
  } catch (const std::exception& e) {
    log << cfg.name << " failed before either arm ran: " << e.what() << "\n";
  }
  rows.push_back(std::move(rr_row));
  rows.push_back(std::move(acdt_row));
}

inline std::vector<BenchRow> run_bench(const std::vector<RunConfig>& configs,
                                       int repeats, std::ostream& log) {
  if (repeats < 1) {
    throw std::invalid_argument("run_bench: repeats must be >= 1");
  }
  std::vector<BenchRow> rows;
  rows.reserve(configs.size() * static_cast<std::size_t>(repeats) * 2);
  for (const RunConfig& cfg : configs) {
    for (int r = 0; r < repeats; ++r) {
      bench_one(cfg, r, rows, log);
    }
  }
  return rows;
}

inline void write_bench_csv(const std::vector<BenchRow>& rows,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_bench_csv: cannot open " + path);
  }
  out << "dataset,method,rmse,seed,split_seed,settings_digest,reference,status\n";
  char buf[64];
  for (const BenchRow& row : rows) {
    out << row.dataset << "," << row.method << ",";
    if (row.ok) {
      std::snprintf(buf, sizeof(buf), "%.6f", row.rmse);
      out << buf;
    }
    out << "," << row.seed << "," << row.split_seed << "," << row.digest << ",";
    if (row.reference) {
      std::snprintf(buf, sizeof(buf), "%.4f", *row.reference);
      out << buf;
    }
    out << "," << (row.ok ? "ok" : "failed") << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_bench_csv: write failed for " + path);
  }
}

// Mean and spread per dataset/method over the repeat rows, in first-seen
// order. Failed rows are counted but excluded from the statistics.
inline void print_bench_summary(const std::vector<BenchRow>& rows,
                                std::ostream& out) {
  struct Acc {
    std::vector<double> values;
    int failed = 0;
    std::optional<double> reference;
  };
  std::vector<std::pair<std::string, Acc>> groups;
  for (const BenchRow& row : rows) {
    const std::string key = row.dataset + " " + row.method;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, Acc{}});
      it = groups.end() - 1;
    }
    if (row.ok) {
      it->second.values.push_back(row.rmse);
    } else {
      ++it->second.failed;
    }
    it->second.reference = row.reference;
  }
  char buf[128];
  for (const auto& [key, acc] : groups) {
    if (acc.values.empty()) {
      out << key << ": all " << acc.failed << " run(s) failed\n";
      continue;
    }
    double mean = 0.0;
    for (double v : acc.values) {
      mean += v;
    }
    mean /= static_cast<double>(acc.values.size());
    double var = 0.0;
    for (double v : acc.values) {
      var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(acc.values.size());
    std::snprintf(buf, sizeof(buf), "%s: rmse %.6f +- %.6f over %zu run(s)",
                  key.c_str(), mean, std::sqrt(var), acc.values.size());
    out << buf;
    if (acc.reference) {
      std::snprintf(buf, sizeof(buf), " (reference %.4f)", *acc.reference);
      out << buf;
    }
    if (acc.failed > 0) {
      out << " [" << acc.failed << " failed]";
    }
    out << "\n";
  }
}

}  // namespace acdt
