#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tensorprobe/csv.hpp"
#include "tensorprobe/dense_tensor.hpp"
#include "tensorprobe/errors.hpp"
#include "tensorprobe/estimators.hpp"
#include "tensorprobe/numeric.hpp"
#include "tensorprobe/oracle.hpp"
#include "tensorprobe/probes.hpp"
#include "tensorprobe/rng.hpp"
#include "tensorprobe/svg.hpp"
#include "tensorprobe/synth.hpp"
#include "tensorprobe/threading.hpp"
#include "tensorprobe/variance.hpp"

namespace tensorprobe {

// Dense-tensor entry count above which generation refuses without an
// explicit opt-in (dim 100 stays legal through order 3; order 4 needs it).
constexpr std::size_t kHugeEntryThreshold = 10'000'000;

// Targets whose magnitude falls below this are reported with absolute
// instead of relative errors.
constexpr double kRelativeErrorFloor = 1e-12;

struct ExperimentConfig {
  std::vector<int> orders{2, 3, 4};
  std::vector<double> alphas{0.2, 0.4, 0.6, 0.8};
  std::vector<ProbeDistribution> dists{ProbeDistribution::kRademacher,
                                       ProbeDistribution::kGaussian};
  std::vector<int> ks{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  int runs = 100;
  int dim = 30;
  std::uint64_t base_seed = 42;
  std::optional<int> diag_index;  // fixed target index; otherwise per-cell random
  std::string output_dir = "out";
  char delimiter = ',';
  unsigned threads = 1;
  bool allow_huge = false;
  bool emit_svg = true;
};

inline void validate(const ExperimentConfig& c) {
  if (c.orders.empty()) throw std::invalid_argument("experiment: orders list is empty");
  for (int n : c.orders)
    if (n < 2) throw std::invalid_argument("experiment: orders must be at least 2");
  if (c.alphas.empty()) throw std::invalid_argument("experiment: alphas list is empty");
  for (double a : c.alphas)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("experiment: alphas must lie strictly in (0,1)");
  if (c.dists.empty()) throw std::invalid_argument("experiment: distributions list is empty");
  if (c.ks.empty()) throw std::invalid_argument("experiment: ks list is empty");
  for (std::size_t i = 0; i < c.ks.size(); ++i) {
    if (c.ks[i] < 1) throw std::invalid_argument("experiment: ks must be at least 1");
    if (i > 0 && c.ks[i] <= c.ks[i - 1])
      throw std::invalid_argument("experiment: ks must be strictly ascending");
  }
  if (c.runs < 1) throw std::invalid_argument("experiment: runs must be at least 1");
  if (c.dim < 2) throw std::invalid_argument("experiment: dim must be at least 2");
  if (c.diag_index && (*c.diag_index < 0 || *c.diag_index >= c.dim))
    throw std::invalid_argument("experiment: diag_index outside [0,dim)");
  for (int n : c.orders) {
    const std::size_t entries = tensor_entry_count(n, c.dim);
    if (entries > kHugeEntryThreshold && !c.allow_huge)
      throw std::invalid_argument(
          "experiment: dim^order exceeds " + std::to_string(kHugeEntryThreshold) +
          " entries for order " + std::to_string(n) +
          "; rerun with allow_huge or use a CP-backed oracle");
  }
}

struct ResultRow {
  int order = 0;
  double alpha = 0.0;
  ProbeDistribution dist = ProbeDistribution::kRademacher;
  int k = 0;
  EstimateKind target = EstimateKind::kTrace;
  int diag_index = 0;
  bool absolute_error = false;
  double mare = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;
};

namespace detail {

struct CellInfo {
  int order = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int diag_index = 0;
  double exact_trace = 0.0;
  double exact_diag = 0.0;
  bool trace_absolute = false;
  bool diag_absolute = false;
};

}  // namespace detail

// Mean absolute relative error of the K-sample mean estimate over repeated
// runs, across the (order, alpha, distribution, K, target) grid. Every random
// stream derives from base_seed, cells share one tensor seed (raw draws are
// shared across cells where shapes allow), and rows assemble in a fixed
// order, so the output is identical for every thread count.
inline std::vector<ResultRow> run_mare_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t n_orders = cfg.orders.size();
  const std::size_t n_alphas = cfg.alphas.size();
  const std::size_t n_cells = n_orders * n_alphas;
  const std::size_t n_dists = cfg.dists.size();
  const std::size_t n_ks = cfg.ks.size();
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);
  const int kmax = cfg.ks.back();

  const std::uint64_t tensor_seed = derive_run_seed(cfg.base_seed, 0, 0);

  std::vector<DenseTensor> tensors;
  tensors.reserve(n_cells);
  std::vector<detail::CellInfo> cells(n_cells);
  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    auto& cell = cells[ci];
    cell.order = cfg.orders[ci / n_alphas];
    cell.alpha = cfg.alphas[ci % n_alphas];
    cell.seed = derive_run_seed(cfg.base_seed, 1 + ci, 0);
    tensors.push_back(
        generate_with_alpha({cell.order, cfg.dim, cell.alpha, tensor_seed}));
    const DenseTensor& t = tensors.back();
    cell.diag_index = cfg.diag_index
                          ? *cfg.diag_index
                          : static_cast<int>(derive_run_seed(cell.seed, 0, 0) %
                                             static_cast<std::uint64_t>(cfg.dim));
    cell.exact_trace = trace(t);
    cell.exact_diag = t.diag_entry(cell.diag_index);
    cell.trace_absolute = std::abs(cell.exact_trace) < kRelativeErrorFloor;
    cell.diag_absolute = std::abs(cell.exact_diag) < kRelativeErrorFloor;
  }

  // Signed per-run errors, indexed [cell][dist][k][target][run].
  const auto err_index = [&](std::size_t ci, std::size_t di, std::size_t ki, std::size_t target,
                             std::size_t run) {
    return (((ci * n_dists + di) * n_ks + ki) * 2 + target) * runs + run;
  };
  std::vector<double> errors(n_cells * n_dists * n_ks * 2 * runs, 0.0);

  parallel_for(n_cells * runs, cfg.threads, [&](std::size_t item) {
    const std::size_t ci = item / runs;
    const std::size_t run = item % runs;
    const auto& cell = cells[ci];
    const DenseOracle oracle(tensors[ci]);
    for (std::size_t di = 0; di < n_dists; ++di) {
      const ProbeDistribution dist = cfg.dists[di];
      double trace_sum = 0.0;
      double diag_sum = 0.0;
      std::size_t next_k = 0;
      for (int s = 0; s < kmax; ++s) {
        const std::uint64_t probe_seed =
            derive_run_seed(cell.seed, 1 + run,
                            (static_cast<std::uint64_t>(s) << 1) | static_cast<std::uint64_t>(di));
        const auto ps = sample_probe_set(dist, cfg.dim, cell.order - 1, probe_seed);
        const auto est = estimate_both_once(oracle, ps);
        trace_sum += est.trace;
        diag_sum += est.diagonal[static_cast<std::size_t>(cell.diag_index)];
        if (next_k < n_ks && s + 1 == cfg.ks[next_k]) {
          const double k = static_cast<double>(s + 1);
          const double trace_err = trace_sum / k - cell.exact_trace;
          const double diag_err = diag_sum / k - cell.exact_diag;
          errors[err_index(ci, di, next_k, 0, run)] =
              cell.trace_absolute ? trace_err : trace_err / std::abs(cell.exact_trace);
          errors[err_index(ci, di, next_k, 1, run)] =
              cell.diag_absolute ? diag_err : diag_err / std::abs(cell.exact_diag);
          ++next_k;
        }
      }
    }
  });

  std::vector<ResultRow> rows;
  rows.reserve(n_cells * n_dists * n_ks * 2);
  std::vector<double> signed_errs(runs);
  for (std::size_t ci = 0; ci < n_cells; ++ci)
    for (std::size_t di = 0; di < n_dists; ++di)
      for (std::size_t ki = 0; ki < n_ks; ++ki)
        for (std::size_t target = 0; target < 2; ++target) {
          for (std::size_t run = 0; run < runs; ++run)
            signed_errs[run] = errors[err_index(ci, di, ki, target, run)];
          ResultRow row;
          row.order = cells[ci].order;
          row.alpha = cells[ci].alpha;
          row.dist = cfg.dists[di];
          row.k = cfg.ks[ki];
          row.target = target == 0 ? EstimateKind::kTrace : EstimateKind::kDiagonal;
          row.diag_index = cells[ci].diag_index;
          row.absolute_error =
              target == 0 ? cells[ci].trace_absolute : cells[ci].diag_absolute;
          row.mare = pairwise_sum(runs, [&](std::size_t r) { return std::abs(signed_errs[r]); }) /
                     static_cast<double>(runs);
          std::sort(signed_errs.begin(), signed_errs.end());
          row.q1 = quantile_sorted(signed_errs, 0.25);
          row.median = quantile_sorted(signed_errs, 0.5);
          row.q3 = quantile_sorted(signed_errs, 0.75);
          row.runs = cfg.runs;
          row.seed = cells[ci].seed;
          rows.push_back(row);
        }
  return rows;
}

inline const std::vector<std::string>& mare_csv_header() {
  static const std::vector<std::string> kHeader = {
      "order", "alpha", "dist", "k",      "target", "diag_index", "error_kind",
      "mare",  "q1",    "median", "q3",   "runs",   "seed"};
  return kHeader;
}

inline void write_mare_csv(std::ostream& os, const std::vector<ResultRow>& rows, char delimiter) {
  write_delimited_row(os, std::span<const std::string>(mare_csv_header()), delimiter);
  for (const auto& r : rows) {
    const std::vector<std::string> cells = {
        std::to_string(r.order),
        format_double(r.alpha),
        to_string(r.dist),
        std::to_string(r.k),
        to_string(r.target),
        std::to_string(r.diag_index),
        r.absolute_error ? "absolute" : "relative",
        format_double(r.mare),
        format_double(r.q1),
        format_double(r.median),
        format_double(r.q3),
        std::to_string(r.runs),
        format_u64(r.seed)};
    write_delimited_row(os, cells, delimiter);
  }
}

namespace detail {

inline std::string cell_file_tag(EstimateKind target, int order, double alpha) {
  return std::string(to_string(target)) + "_N" + std::to_string(order) + "_a" +
         format_double(alpha);
}

}  // namespace detail

// mare.csv plus, per (order, alpha, target), a MARE-vs-K line chart and a
// quartile band chart, one series per distribution. Charts are derived views
// of the CSV rows and never feed back into them.
inline std::filesystem::path write_mare_outputs(const ExperimentConfig& cfg,
                                                const std::vector<ResultRow>& rows) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const auto csv_path = dir / "mare.csv";
  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    write_mare_csv(os, rows, cfg.delimiter);
    if (!os) throw IoError("failed writing '" + csv_path.string() + "'");
  }
  if (!cfg.emit_svg) return csv_path;

  for (int order : cfg.orders)
    for (double alpha : cfg.alphas)
      for (EstimateKind target : {EstimateKind::kTrace, EstimateKind::kDiagonal}) {
        std::vector<SvgSeries> lines;
        std::vector<SvgBandSeries> bands;
        for (ProbeDistribution dist : cfg.dists) {
          SvgSeries line;
          SvgBandSeries band;
          line.label = to_string(dist);
          band.label = to_string(dist);
          for (const auto& r : rows) {
            if (r.order != order || r.alpha != alpha || r.dist != dist || r.target != target)
              continue;
            line.xs.push_back(r.k);
            line.ys.push_back(r.mare);
            band.xs.push_back(r.k);
            band.lo.push_back(r.q1);
            band.mid.push_back(r.median);
            band.hi.push_back(r.q3);
          }
          lines.push_back(std::move(line));
          bands.push_back(std::move(band));
        }
        const std::string tag = detail::cell_file_tag(target, order, alpha);
        const std::string head = std::string(to_string(target)) + ", N=" +
                                 std::to_string(order) + ", alpha=" + format_double(alpha);
        write_line_chart_file((dir / ("mare_" + tag + ".svg")).string(), "MARE vs K (" + head + ")",
                              "K", "MARE", lines);
        write_band_chart_file((dir / ("band_" + tag + ".svg")).string(),
                              "signed relative error quartiles (" + head + ")", "K",
                              "signed error", bands);
      }
  return csv_path;
}

struct TightnessRow {
  int order = 0;
  int dim = 0;
  double ratio = 0.0;
};

inline std::vector<TightnessRow> run_tightness_experiment(const std::vector<int>& orders,
                                                          const std::vector<int>& dims) {
  if (orders.empty()) throw std::invalid_argument("tightness: orders list is empty");
  if (dims.empty()) throw std::invalid_argument("tightness: dims list is empty");
  std::vector<TightnessRow> rows;
  rows.reserve(orders.size() * dims.size());
  for (int n : orders)
    for (int d : dims) rows.push_back({n, d, tightness_ratio_all_ones(n, d)});
  return rows;
}

inline void write_tightness_csv(std::ostream& os, const std::vector<TightnessRow>& rows,
                                char delimiter) {
  write_delimited_row(os, {"order", "dim", "ratio"}, delimiter);
  for (const auto& r : rows)
    write_delimited_row(
        os, {std::to_string(r.order), std::to_string(r.dim), format_double(r.ratio)}, delimiter);
}

inline std::filesystem::path write_tightness_outputs(const std::string& output_dir, char delimiter,
                                                     const std::vector<TightnessRow>& rows,
                                                     bool emit_svg = true) {
  const std::filesystem::path dir(output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto csv_path = dir / "tightness.csv";
  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    write_tightness_csv(os, rows, delimiter);
  }
  if (emit_svg) {
    std::map<int, SvgSeries> by_order;
    for (const auto& r : rows) {
      auto& s = by_order[r.order];
      s.label = "N=" + std::to_string(r.order);
      s.xs.push_back(r.dim);
      s.ys.push_back(r.ratio);
    }
    std::vector<SvgSeries> series;
    for (auto& [n, s] : by_order) series.push_back(std::move(s));
    write_line_chart_file((dir / "tightness.svg").string(),
                          "exact-to-bound variance ratio, all-ones tensor", "dim", "ratio",
                          series);
  }
  return csv_path;
}

// --- config file and CLI list parsing -------------------------------------

inline std::uint64_t parse_seed(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("seed: empty string");
  try {
    std::size_t pos = 0;
    const int base = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X') ? 16 : 10;
    const std::uint64_t v = std::stoull(base == 16 ? s.substr(2) : s, &pos, base);
    if (pos != (base == 16 ? s.size() - 2 : s.size()))
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("seed '" + s + "' is not a decimal or 0x-hex 64-bit integer");
  }
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + s + "' is not an integer");
  }
}

inline double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + s + "' is not a number");
  }
}

}  // namespace detail

// Comma list of integers; an a-b element expands to the inclusive range.
inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& part : detail::split(s, ',')) {
    const auto dash = part.find('-', 1);  // allow a leading minus sign
    if (dash != std::string::npos) {
      const int lo = detail::parse_int(part.substr(0, dash), what);
      const int hi = detail::parse_int(part.substr(dash + 1), what);
      if (hi < lo) throw std::invalid_argument(what + ": descending range '" + part + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(detail::parse_int(part, what));
    }
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : detail::split(s, ',')) out.push_back(detail::parse_real(part, what));
  return out;
}

inline std::vector<ProbeDistribution> parse_dist_list(const std::string& s) {
  std::vector<ProbeDistribution> out;
  for (const auto& part : detail::split(s, ',')) out.push_back(parse_distribution(part));
  return out;
}

inline char parse_format(const std::string& s) {
  if (s == "csv") return ',';
  if (s == "tsv") return '\t';
  throw std::invalid_argument("unknown format '" + s + "' (expected csv or tsv)");
}

// Flat key=value file; '#' starts a comment, blank lines are skipped.
inline std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : s.substr(from, to - from + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config file '" + path + "' line " + std::to_string(lineno) +
                    ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "orders") cfg.orders = parse_int_list(value, "orders");
  else if (key == "alphas") cfg.alphas = parse_real_list(value, "alphas");
  else if (key == "dists") cfg.dists = parse_dist_list(value);
  else if (key == "ks") cfg.ks = parse_int_list(value, "ks");
  else if (key == "runs") cfg.runs = detail::parse_int(value, "runs");
  else if (key == "dim") cfg.dim = detail::parse_int(value, "dim");
  else if (key == "seed") cfg.base_seed = parse_seed(value);
  else if (key == "diag_index") {
    if (value == "random") cfg.diag_index.reset();
    else cfg.diag_index = detail::parse_int(value, "diag_index");
  } else if (key == "out") cfg.output_dir = value;
  else if (key == "format") cfg.delimiter = parse_format(value);
  else if (key == "threads") cfg.threads = static_cast<unsigned>(detail::parse_int(value, "threads"));
  else if (key == "allow_huge") cfg.allow_huge = value == "1" || value == "true";
  else if (key == "emit_svg") cfg.emit_svg = value == "1" || value == "true";
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : parse_key_value_file(path)) apply_config_entry(cfg, k, v);
  return cfg;
}

}  // namespace tensorprobe
