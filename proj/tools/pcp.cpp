// pcp: command-line front end for Poisson CP decompositions of count tensors.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pcp/config.hpp"
#include "pcp/error.hpp"
#include "pcp/experiment.hpp"
#include "pcp/hybrid.hpp"
#include "pcp/io.hpp"
#include "pcp/objective.hpp"
#include "pcp/report.hpp"
#include "pcp/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kOutputEnv = "PCP_OUTPUT_DIR";

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Base seed for every random stream");
  cmd->add_option("--threads", f.threads, "Worker threads for multi-start runs (0: all cores)");
  cmd->add_flag("--deterministic", f.deterministic,
                "Require bitwise reproducible results (the default behavior; kept for scripts)");
}

fs::path default_output(const fs::path& from_config) {
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return from_config;
}

pcp::ExperimentConfig build_config(const std::string& config_path,
                                   const std::vector<std::string>& overrides,
                                   const CommonFlags& common) {
  pcp::ExperimentConfig cfg =
      config_path.empty() ? pcp::ExperimentConfig{} : pcp::load_config(config_path);
  for (const auto& o : overrides) pcp::apply_override(cfg, o);
  if (common.seed) cfg.seed = *common.seed;
  if (common.threads) cfg.threads = *common.threads;
  return cfg;
}

void write_trace_csv(const fs::path& path, const pcp::SolveTrace& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) pcp::fail(pcp::ErrorKind::kIoError, "cannot write '" + path.string() + "'");
  out << "cycle,stage,work_units,nll,nll_is_estimate,kkt_violation,learning_rate\n";
  for (const auto& e : t.entries) {
    out << e.cycle << ',' << pcp::to_string(e.stage) << ',' << e.work_units << ','
        << pcp::format_double(e.nll) << ',' << (e.nll_is_estimate ? 1 : 0) << ','
        << pcp::format_double(e.kkt_violation) << ',' << pcp::format_double(e.learning_rate)
        << '\n';
  }
}

int run_gen(const CommonFlags& common, const std::vector<std::size_t>& shape,
            std::size_t rank, std::size_t nnz, double density, const fs::path& out,
            const fs::path& truth_out) {
  pcp::ProblemSpec spec;
  spec.shape = shape;
  spec.rank = rank;
  spec.target_nnz = nnz;
  spec.density = density;
  spec.seed = common.seed.value_or(1);
  pcp::Rng rng(spec.seed);
  const pcp::Problem p = pcp::create_problem(spec, rng);
  pcp::write_frostt(out, p.data);
  if (!truth_out.empty()) pcp::write_model(truth_out, p.truth);
  std::cout << "wrote " << out.string() << ": nnz " << p.data.nnz() << ", total count "
            << p.data.total_count() << '\n';
  return kExitOk;
}

int run_decompose(const CommonFlags& common, const std::string& config_path,
                  const std::vector<std::string>& overrides, const fs::path& tensor,
                  std::size_t rank, const std::string& method, const fs::path& init_path,
                  fs::path out, const fs::path& trace_out) {
  pcp::ExperimentConfig cfg = build_config(config_path, overrides, common);
  if (!tensor.empty()) cfg.tensor = tensor;
  if (rank != 0) cfg.rank = rank;
  if (!method.empty()) cfg.method = pcp::parse_run_method(method);
  if (cfg.method == pcp::RunMethod::kSweep) {
    pcp::fail(pcp::ErrorKind::kInvalidArgument, "decompose runs cpapr, gcp or cgc; use sweep");
  }
  cfg.validate();
  const pcp::ExperimentData data = pcp::load_data(cfg);
  const std::size_t r = cfg.effective_rank();
  const std::uint64_t run_seed = pcp::start_seed(cfg.seed, pcp::StartFamily::kPrimary, 0);
  const pcp::KruskalModel init =
      init_path.empty() ? pcp::start_guess(data.tensor, r, run_seed) : pcp::read_model(init_path);

  pcp::SolveTrace trace;
  switch (cfg.method) {
    case pcp::RunMethod::kCpapr:
      trace = pcp::cpapr_mu(data.tensor, r, init, cfg.cpapr);
      break;
    case pcp::RunMethod::kGcp: {
      pcp::Rng rng(pcp::stage_seed(run_seed, 0, pcp::Stage::kStochastic));
      trace = pcp::gcp_adam(data.tensor, r, init, cfg.gcp, rng);
      break;
    }
    default: {
      pcp::Strategy strat;
      strat.cycles.assign(cfg.cycles, pcp::CycleSpec{std::string(pcp::kGcpAdam),
                                                     std::string(pcp::kCpaprMu), cfg.gcp,
                                                     cfg.cpapr});
      trace = pcp::cgc(data.tensor, r, cfg.cycles, std::move(strat), init, run_seed);
      break;
    }
  }
  if (out.empty()) out = default_output(cfg.output) / "model.txt";
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  pcp::write_model(out, trace.model);
  if (!trace_out.empty()) write_trace_csv(trace_out, trace);
  std::cout << "nll " << pcp::format_double(pcp::poisson_nll(data.tensor, trace.model).value)
            << "\nwork_units " << trace.work_units << "\nconverged "
            << (trace.converged ? "true" : "false") << "\nmodel " << out.string() << '\n';
  return kExitOk;
}

pcp::ReportOptions report_options(const pcp::ExperimentConfig& cfg) {
  return {cfg.report_eps, cfg.t_grid(), cfg.report_tau};
}

int run_sweep(const CommonFlags& common, const std::string& config_path,
              const std::vector<std::string>& overrides, fs::path out, bool no_report) {
  pcp::ExperimentConfig cfg = build_config(config_path, overrides, common);
  if (out.empty()) out = default_output(cfg.output);
  cfg.output = out;
  cfg.validate();
  fs::create_directories(out);
  {
    std::ofstream c(out / "config.txt", std::ios::binary);
    c << pcp::format_config(cfg);
  }
  const pcp::ExperimentData data = pcp::load_data(cfg);
  if (cfg.tensor.empty()) pcp::write_frostt(out / "data.tns", data.tensor);
  if (data.truth) pcp::write_model(out / "truth.txt", *data.truth);

  const pcp::ExperimentResults res = pcp::run_multistart(cfg, data.tensor, out);
  pcp::save_results(out, res);
  std::size_t n = 0;
  for (const auto* s : res.sets()) n += s->size();
  std::cout << "solves " << n << "\nresults " << out.string() << '\n';
  if (!no_report) {
    const pcp::Report rep = pcp::make_report(res, report_options(cfg));
    pcp::write_report(out, rep);
    std::cout << "approximate MLE " << rep.mle_run_id << " nll "
              << pcp::format_double(rep.mle_nll) << '\n';
  }
  return kExitOk;
}

int run_report(const CommonFlags& common, const fs::path& dir, const std::string& config_path,
               const std::vector<std::string>& overrides, fs::path out) {
  std::string cfg_file = config_path;
  if (cfg_file.empty() && fs::exists(dir / "config.txt")) cfg_file = (dir / "config.txt").string();
  const pcp::ExperimentConfig cfg = build_config(cfg_file, overrides, common);
  cfg.validate();
  if (out.empty()) out = dir;
  const pcp::ExperimentResults res = pcp::load_results(dir);
  const pcp::Report rep = pcp::make_report(res, report_options(cfg));
  pcp::write_report(out, rep);
  std::cout << "approximate MLE " << rep.mle_run_id << " nll " << pcp::format_double(rep.mle_nll)
            << "\nreport " << out.string() << '\n';
  return kExitOk;
}

int run_convert(const fs::path& in, const fs::path& out, const std::string& kind) {
  if (kind == "tensor") {
    pcp::write_frostt(out, pcp::read_frostt(in));
  } else {
    pcp::write_model(out, pcp::read_model(in));
  }
  return kExitOk;
}

int exit_code_for(pcp::ErrorKind kind) {
  switch (kind) {
    case pcp::ErrorKind::kNonFiniteEncountered:
    case pcp::ErrorKind::kDivisionByZero:
      return kExitNumerical;
    case pcp::ErrorKind::kInvalidArgument:
    case pcp::ErrorKind::kUnknownMethod:
    case pcp::ErrorKind::kOptionsTypeMismatch:
    case pcp::ErrorKind::kBudgetOutOfRange:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson CP decompositions of sparse count tensors"};
  app.require_subcommand(1);

  CommonFlags common;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic low-rank Poisson problem");
  std::vector<std::size_t> shape;
  std::size_t gen_rank = 0;
  std::size_t gen_nnz = 0;
  double gen_density = 0.0;
  fs::path gen_out, gen_truth;
  gen->add_option("--shape", shape, "Mode sizes, e.g. --shape 50 50 50")->required();
  gen->add_option("--rank", gen_rank, "Rank of the true model")->required();
  auto* nnz_opt = gen->add_option("--nnz", gen_nnz, "Target number of nonzeros");
  gen->add_option("--density", gen_density, "Target density in (0, 1]")->excludes(nnz_opt);
  gen->add_option("--out", gen_out, "Output .tns file")->required();
  gen->add_option("--truth", gen_truth, "Also write the true model here");
  add_common(gen, common);

  auto* dec = app.add_subcommand("decompose", "Single solve with cpapr, gcp or cgc");
  std::string dec_config, dec_method;
  std::vector<std::string> dec_set;
  fs::path dec_tensor, dec_init, dec_out, dec_trace;
  std::size_t dec_rank = 0;
  dec->add_option("--config", dec_config, "Experiment configuration file");
  dec->add_option("--set", dec_set, "Configuration override key=value (repeatable)");
  dec->add_option("--tensor", dec_tensor, "Input .tns file");
  dec->add_option("--rank", dec_rank, "Decomposition rank");
  dec->add_option("--method", dec_method, "cpapr, gcp or cgc");
  dec->add_option("--init", dec_init, "Initial model (default: random guess from --seed)");
  dec->add_option("--out", dec_out, "Output model file");
  dec->add_option("--trace", dec_trace, "Write the solve trace as CSV");
  add_common(dec, common);

  auto* sweep = app.add_subcommand("sweep", "Multi-start experiment described by a config file");
  std::string sweep_config;
  std::vector<std::string> sweep_set;
  fs::path sweep_out;
  bool no_report = false;
  sweep->add_option("--config", sweep_config, "Experiment configuration file");
  sweep->add_option("--set", sweep_set, "Configuration override key=value (repeatable)");
  sweep->add_option("--out", sweep_out,
                    std::string("Output directory (default: $") + kOutputEnv + " or config)");
  sweep->add_flag("--no-report", no_report, "Skip the metric report");
  add_common(sweep, common);

  auto* report = app.add_subcommand("report", "Metric report over a results directory");
  fs::path report_dir, report_out;
  std::string report_config;
  std::vector<std::string> report_set;
  report->add_option("--dir", report_dir, "Results directory written by sweep")->required();
  report->add_option("--config", report_config, "Configuration with report.* keys");
  report->add_option("--set", report_set, "Configuration override key=value (repeatable)");
  report->add_option("--out", report_out, "Directory for the CSV files (default: --dir)");
  add_common(report, common);

  auto* convert = app.add_subcommand("convert", "Read and rewrite a tensor or model file");
  fs::path conv_in, conv_out;
  std::string conv_kind = "tensor";
  convert->add_option("--in", conv_in, "Input file")->required();
  convert->add_option("--out", conv_out, "Output file")->required();
  convert->add_option("--kind", conv_kind, "tensor or model")
      ->check(CLI::IsMember({"tensor", "model"}));
  add_common(convert, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return run_gen(common, shape, gen_rank, gen_nnz, gen_density, gen_out, gen_truth);
    if (*dec) {
      return run_decompose(common, dec_config, dec_set, dec_tensor, dec_rank, dec_method,
                           dec_init, dec_out, dec_trace);
    }
    if (*sweep) return run_sweep(common, sweep_config, sweep_set, sweep_out, no_report);
    if (*report) return run_report(common, report_dir, report_config, report_set, report_out);
    if (*convert) return run_convert(conv_in, conv_out, conv_kind);
  } catch (const pcp::Error& e) {
    std::cerr << "pcp: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "pcp: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
