// Command line front end: tensor generation, exact and estimated trace or
// diagonal queries, variance reports, query-budget calculators, and the
// experiment harness. Exit codes: 0 ok, 1 usage, 2 I/O, 3 numeric.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "tensorprobe/tensorprobe.hpp"

namespace tp = tensorprobe;

namespace {

struct SeedValue {
  std::uint64_t value = 0;
};

// --seed accepts decimal or 0x-prefixed hex.
void add_seed_option(CLI::App* cmd, SeedValue& seed, const std::string& desc) {
  cmd->add_option_function<std::string>(
         "--seed", [&seed](const std::string& s) { seed.value = tp::parse_seed(s); }, desc)
      ->default_str("42");
}

tp::AnyTensor load_tensor(const std::string& path) { return tp::read_tensor_file(path); }

tp::DenseTensor load_dense(const std::string& path) {
  auto any = load_tensor(path);
  if (std::holds_alternative<tp::DenseTensor>(any)) return std::get<tp::DenseTensor>(std::move(any));
  return std::get<tp::CpTensor>(any).densify();
}

std::string join_values(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(' ');
    out += tp::format_double(v[i]);
  }
  return out;
}

void write_report_rows(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw tp::IoError("cannot open '" + out_path + "' for writing");
  os << text;
  if (!os) throw tp::IoError("failed writing '" + out_path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic trace and diagonal estimation for cubical tensors"};
  app.require_subcommand(1);

  try {
    // gen-tensor -----------------------------------------------------------
    auto* gen = app.add_subcommand("gen-tensor", "write a synthetic TNSR1 tensor");
    int gen_order = 3, gen_dim = 10;
    double gen_alpha = 0.5;
    SeedValue gen_seed{42};
    std::string gen_out;
    bool gen_allow_huge = false;
    gen->add_option("--order", gen_order, "tensor order (>= 2)")->required();
    gen->add_option("--dim", gen_dim, "mode dimension (>= 2)")->required();
    gen->add_option("--alpha", gen_alpha, "diagonal share of squared mass, in (0,1)")->required();
    add_seed_option(gen, gen_seed, "generator seed (decimal or 0x-hex)");
    gen->add_option("--out", gen_out, "output TNSR1 path")->required();
    gen->add_flag("--allow-huge", gen_allow_huge, "permit very large dense tensors");
    gen->callback([&] {
      if (!gen_allow_huge &&
          tp::tensor_entry_count(gen_order, gen_dim) > tp::kHugeEntryThreshold)
        throw std::invalid_argument(
            "gen-tensor: dim^order exceeds " + std::to_string(tp::kHugeEntryThreshold) +
            " entries; pass --allow-huge to proceed");
      const auto t = tp::generate_with_alpha({gen_order, gen_dim, gen_alpha, gen_seed.value});
      tp::write_dense_file(gen_out, t);
      std::cerr << "wrote " << gen_out << "\n";
    });

    // exact ------------------------------------------------------------------
    auto* exact = app.add_subcommand("exact", "exact trace or diagonal via basis queries");
    std::string exact_target = "trace", exact_file;
    exact->add_option("--target", exact_target, "trace or diag")
        ->check(CLI::IsMember({"trace", "diag"}));
    exact->add_option("file", exact_file, "TNSR1 or TCPD1 tensor file")->required();
    exact->callback([&] {
      const auto any = load_tensor(exact_file);
      const auto run = [&](const tp::TensorOracle& oracle) {
        if (tp::parse_estimate_kind(exact_target) == tp::EstimateKind::kTrace)
          std::cout << tp::format_double(tp::exact_trace(oracle)) << "\n";
        else
          std::cout << join_values(tp::exact_diagonal(oracle)) << "\n";
        std::cerr << "queries: " << oracle.query_count() << "\n";
      };
      if (std::holds_alternative<tp::DenseTensor>(any))
        run(tp::DenseOracle(std::get<tp::DenseTensor>(any)));
      else
        run(tp::CpOracle(std::get<tp::CpTensor>(any)));
    });

    // estimate ---------------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "stochastic trace or diagonal estimate");
    std::string est_target = "trace", est_dist = "rademacher", est_file, est_probe_file;
    int est_k = 1;
    std::optional<int> est_mom;
    SeedValue est_seed{42};
    est->add_option("--target", est_target, "trace or diag")
        ->check(CLI::IsMember({"trace", "diag"}));
    est->add_option("--dist", est_dist, "rademacher or gaussian")
        ->check(CLI::IsMember({"rademacher", "gaussian"}));
    est->add_option("--k", est_k, "number of samples (>= 1)")->check(CLI::PositiveNumber);
    add_seed_option(est, est_seed, "probe stream seed (decimal or 0x-hex)");
    est->add_option("--mom", est_mom, "also report a median of means over this many groups")
        ->check(CLI::PositiveNumber);
    est->add_option("--probe-file", est_probe_file,
                    "text file with order-1 probe rows; requires --k 1");
    est->add_option("file", est_file, "TNSR1 or TCPD1 tensor file")->required();
    est->callback([&] {
      const auto kind = tp::parse_estimate_kind(est_target);
      const auto dist = tp::parse_distribution(est_dist);
      const auto any = load_tensor(est_file);
      const auto run = [&](const tp::TensorOracle& oracle) {
        if (!est_probe_file.empty()) {
          if (est_k != 1)
            throw std::invalid_argument("estimate: --probe-file supplies one probe set; use --k 1");
          const auto probes = tp::read_probe_file(est_probe_file, oracle.order(), oracle.dim());
          const auto ps = tp::make_probe_set(dist, probes);
          if (kind == tp::EstimateKind::kTrace)
            std::cout << tp::format_double(tp::estimate_trace_once(oracle, ps)) << "\n";
          else
            std::cout << join_values(tp::estimate_diagonal_once(oracle, ps)) << "\n";
        } else if (kind == tp::EstimateKind::kTrace) {
          const auto series = tp::run_trace_samples(oracle, dist, est_k, est_seed.value, 0, est_mom);
          std::cout << tp::format_double(series.mean) << "\n";
          if (series.median_of_means)
            std::cout << tp::format_double(*series.median_of_means) << "\n";
        } else {
          const auto series =
              tp::run_diagonal_samples(oracle, dist, est_k, est_seed.value, 0, est_mom);
          std::cout << join_values(series.mean) << "\n";
          if (series.median_of_means) std::cout << join_values(*series.median_of_means) << "\n";
        }
        std::cerr << "queries: " << oracle.query_count() << "\n";
      };
      if (std::holds_alternative<tp::DenseTensor>(any))
        run(tp::DenseOracle(std::get<tp::DenseTensor>(any)));
      else
        run(tp::CpOracle(std::get<tp::CpTensor>(any)));
    });

    // variance ----------------------------------------------------------------
    auto* var = app.add_subcommand("variance", "exact one-sample variance and upper bound");
    std::string var_target = "trace", var_dist = "rademacher", var_file, var_out, var_format = "csv";
    int var_index = 0;
    var->add_option("--target", var_target, "trace or diag")
        ->check(CLI::IsMember({"trace", "diag"}));
    var->add_option("--index", var_index, "diagonal index for --target diag");
    var->add_option("--dist", var_dist, "rademacher or gaussian")
        ->check(CLI::IsMember({"rademacher", "gaussian"}));
    var->add_option("--out", var_out, "write the CSV here instead of stdout");
    var->add_option("--format", var_format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    var->add_option("file", var_file, "TNSR1 or TCPD1 tensor file")->required();
    var->callback([&] {
      const auto kind = tp::parse_estimate_kind(var_target);
      const auto dist = tp::parse_distribution(var_dist);
      const char delim = tp::parse_format(var_format);
      const auto t = load_dense(var_file);
      std::optional<int> index;
      if (kind == tp::EstimateKind::kDiagonal) index = var_index;
      const auto rep = tp::make_variance_report(t, kind, index, dist);
      std::ostringstream os;
      tp::write_delimited_row(os, {"target", "dist", "exact", "upper", "ratio"}, delim);
      tp::write_delimited_row(os,
                              {std::string(tp::to_string(rep.target)),
                               std::string(tp::to_string(rep.distribution)),
                               tp::format_double(rep.exact),
                               rep.upper ? tp::format_double(*rep.upper) : std::string(),
                               rep.ratio ? tp::format_double(*rep.ratio) : std::string()},
                              delim);
      write_report_rows(var_out, os.str());
    });

    // sample-size ---------------------------------------------------------------
    auto* ss = app.add_subcommand("sample-size", "query count for a relative-error guarantee");
    std::string ss_target = "trace", ss_dist = "rademacher", ss_agg = "mean", ss_file, ss_out,
                ss_format = "csv";
    int ss_index = 0;
    double ss_eps = 0.1, ss_delta = 0.05, ss_rconst = 1.0;
    ss->add_option("--target", ss_target, "trace or diag")->check(CLI::IsMember({"trace", "diag"}));
    ss->add_option("--index", ss_index, "diagonal index for --target diag");
    ss->add_option("--dist", ss_dist, "rademacher or gaussian")
        ->check(CLI::IsMember({"rademacher", "gaussian"}));
    ss->add_option("--aggregator", ss_agg, "mean or mom")->check(CLI::IsMember({"mean", "mom"}));
    ss->add_option("--eps", ss_eps, "relative error bound (> 0)")->required();
    ss->add_option("--delta", ss_delta, "failure probability, in (0,1)")->required();
    ss->add_option("--r-const", ss_rconst, "hypercontractivity constant R (> 0)");
    ss->add_option("--out", ss_out, "write the CSV here instead of stdout");
    ss->add_option("--format", ss_format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    ss->add_option("file", ss_file, "TNSR1 or TCPD1 tensor file")->required();
    ss->callback([&] {
      const auto kind = tp::parse_estimate_kind(ss_target);
      const auto dist = tp::parse_distribution(ss_dist);
      const auto agg = tp::parse_aggregator(ss_agg);
      const char delim = tp::parse_format(ss_format);
      const auto t = load_dense(ss_file);
      std::optional<int> index;
      if (kind == tp::EstimateKind::kDiagonal) index = ss_index;
      const auto stats = tp::compute_tensor_stats(t, index);
      const auto bound = tp::sample_size_bound(kind, dist, agg, stats, ss_eps, ss_delta, ss_rconst);
      std::ostringstream os;
      tp::write_delimited_row(
          os, {"target", "dist", "aggregator", "eps", "delta", "r_const", "variance_term", "k",
               "r_groups"},
          delim);
      tp::write_delimited_row(
          os,
          {std::string(tp::to_string(bound.target)), std::string(tp::to_string(bound.distribution)),
           std::string(tp::to_string(bound.aggregator)), tp::format_double(bound.epsilon),
           tp::format_double(bound.delta), tp::format_double(bound.r_const),
           tp::format_double(bound.variance_term), std::to_string(bound.k),
           bound.r_groups ? std::to_string(*bound.r_groups) : std::string()},
          delim);
      write_report_rows(ss_out, os.str());
    });

    // experiment -----------------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "paper-style experiment harness");
    exp->require_subcommand(1);

    auto* mare = exp->add_subcommand("mare", "mean absolute relative error grid");
    std::string mare_config, mare_orders, mare_alphas, mare_dists, mare_ks, mare_out,
        mare_format, mare_diag_index;
    int mare_runs = 0, mare_dim = 0;
    SeedValue mare_seed{42};
    unsigned mare_threads = 0;
    bool mare_allow_huge = false, mare_no_svg = false;
    mare->add_option("--config", mare_config, "key=value config file; flags override");
    mare->add_option("--orders", mare_orders, "comma list, e.g. 2,3,4");
    mare->add_option("--alphas", mare_alphas, "comma list in (0,1)");
    mare->add_option("--dists", mare_dists, "comma list of rademacher,gaussian");
    mare->add_option("--ks", mare_ks, "comma list of sample counts, ascending");
    mare->add_option("--runs", mare_runs, "independent runs per cell")->check(CLI::PositiveNumber);
    mare->add_option("--dim", mare_dim, "mode dimension")->check(CLI::PositiveNumber);
    add_seed_option(mare, mare_seed, "base seed (decimal or 0x-hex)");
    mare->add_option("--diag-index", mare_diag_index, "fixed diagonal index, or 'random'");
    mare->add_option("--out", mare_out, "output directory");
    mare->add_option("--format", mare_format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    mare->add_option("--threads", mare_threads, "worker threads (0 = hardware)");
    mare->add_flag("--allow-huge", mare_allow_huge, "permit very large dense tensors");
    mare->add_flag("--no-svg", mare_no_svg, "skip chart emission");
    mare->callback([&] {
      tp::ExperimentConfig cfg;
      if (!mare_config.empty()) cfg = tp::load_experiment_config(mare_config);
      if (mare->count("--orders")) cfg.orders = tp::parse_int_list(mare_orders, "orders");
      if (mare->count("--alphas")) cfg.alphas = tp::parse_real_list(mare_alphas, "alphas");
      if (mare->count("--dists")) cfg.dists = tp::parse_dist_list(mare_dists);
      if (mare->count("--ks")) cfg.ks = tp::parse_int_list(mare_ks, "ks");
      if (mare->count("--runs")) cfg.runs = mare_runs;
      if (mare->count("--dim")) cfg.dim = mare_dim;
      if (mare->count("--seed")) cfg.base_seed = mare_seed.value;
      if (mare->count("--diag-index")) {
        if (mare_diag_index == "random") cfg.diag_index.reset();
        else cfg.diag_index = tp::detail::parse_int(mare_diag_index, "diag-index");
      }
      if (mare->count("--out")) cfg.output_dir = mare_out;
      if (mare->count("--format")) cfg.delimiter = tp::parse_format(mare_format);
      if (mare->count("--threads")) cfg.threads = mare_threads;
      if (mare_allow_huge) cfg.allow_huge = true;
      if (mare_no_svg) cfg.emit_svg = false;
      const auto rows = tp::run_mare_experiment(cfg);
      const auto path = tp::write_mare_outputs(cfg, rows);
      std::cerr << "wrote " << path.string() << "\n";
    });

    auto* tight = exp->add_subcommand("tightness", "exact-to-bound variance ratio grid");
    std::string tight_orders = "2,3,4,5,6", tight_dims = "2-100", tight_out = "out",
                tight_format = "csv";
    bool tight_no_svg = false;
    tight->add_option("--orders", tight_orders, "comma list of orders");
    tight->add_option("--dims", tight_dims, "comma list; a-b expands to a range");
    tight->add_option("--out", tight_out, "output directory");
    tight->add_option("--format", tight_format, "csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
    tight->add_flag("--no-svg", tight_no_svg, "skip chart emission");
    tight->callback([&] {
      const auto rows = tp::run_tightness_experiment(tp::parse_int_list(tight_orders, "orders"),
                                                     tp::parse_int_list(tight_dims, "dims"));
      const auto path = tp::write_tightness_outputs(tight_out, tp::parse_format(tight_format), rows,
                                                    !tight_no_svg);
      std::cerr << "wrote " << path.string() << "\n";
    });

    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const tp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
