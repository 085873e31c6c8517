#include "pcp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "pcp/error.hpp"
#include "pcp/hybrid.hpp"
#include "pcp/io.hpp"
#include "pcp/objective.hpp"
#include "pcp/synth.hpp"

namespace pcp {

namespace {

constexpr std::uint64_t kGuessStream = 0x67756573;
constexpr const char* kRecordsHeader =
    "set,run_id,seed,method,options_digest,j,k,nll,work_units,converged,"
    "trace_length,model_file";

// One unit of work for the harness.
struct Task {
  char set;  // 'G', 'C' or 'H'
  StartFamily family;
  std::size_t start;
  long long j = -1;
  long long k = -1;
};

std::string run_id(const Task& t) {
  char buf[64];
  if (t.j >= 0 && t.set == 'H') {
    std::snprintf(buf, sizeof(buf), "%c-j%03lld-k%03lld-n%04zu", t.set, t.j, t.k, t.start);
  } else {
    std::snprintf(buf, sizeof(buf), "%c-n%04zu", t.set, t.start);
  }
  return buf;
}

std::vector<Task> plan(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  auto add_set = [&](char set, StartFamily fam, std::size_t n, long long j, long long k) {
    for (std::size_t s = 0; s < n; ++s) tasks.push_back({set, fam, s, j, k});
  };
  switch (cfg.method) {
    case RunMethod::kCpapr:
      add_set('C', StartFamily::kPrimary, cfg.starts, -1, -1);
      break;
    case RunMethod::kGcp:
      add_set('G', StartFamily::kPrimary, cfg.starts, -1, -1);
      break;
    case RunMethod::kCgc:
      add_set('H', StartFamily::kPrimary, cfg.starts,
              static_cast<long long>(cfg.gcp.max_epochs),
              static_cast<long long>(cfg.cpapr.max_outer_iters));
      break;
    case RunMethod::kSweep: {
      add_set('G', StartFamily::kBaselineGcp, cfg.baseline_gcp_starts, -1, -1);
      add_set('C', StartFamily::kBaselineCpapr, cfg.baseline_cpapr_starts, -1, -1);
      std::vector<long long> js = cfg.j_values;
      if (js.empty()) {
        for (long long j = 0; j <= cfg.total_work; ++j) js.push_back(j);
      }
      for (long long j : js) add_set('H', StartFamily::kPrimary, cfg.starts, j, cfg.total_work - j);
      break;
    }
  }
  return tasks;
}

SolveRecord solve_one(const ExperimentConfig& cfg, const SparseCountTensor& x,
                      const Task& t) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t rank = cfg.effective_rank();
  const bool baseline = t.family != StartFamily::kPrimary;
  SolveRecord rec;
  rec.run_id = run_id(t);
  rec.seed = start_seed(cfg.seed, t.family, t.start);
  const KruskalModel guess = start_guess(x, rank, rec.seed);

  SolveTrace trace;
  if (t.set == 'C') {
    const CpaprOptions& o = baseline ? cfg.baseline_cpapr : cfg.cpapr;
    rec.method = std::string(kCpaprMu);
    rec.options_digest = options_digest(o);
    trace = cpapr_mu(x, rank, guess, o);
  } else if (t.set == 'G') {
    const GcpOptions& o = baseline ? cfg.baseline_gcp : cfg.gcp;
    rec.method = std::string(kGcpAdam);
    rec.options_digest = options_digest(o);
    Rng rng(stage_seed(rec.seed, 0, Stage::kStochastic));
    trace = gcp_adam(x, rank, guess, o, rng);
  } else {
    Strategy strat;
    std::size_t cycles = 1;
    if (cfg.method == RunMethod::kSweep) {
      strat = constant_work_strategy(cfg.total_work, t.j, cfg.gcp, cfg.cpapr);
    } else {
      cycles = cfg.cycles;
      strat.cycles.assign(cycles, CycleSpec{std::string(kGcpAdam), std::string(kCpaprMu),
                                            cfg.gcp, cfg.cpapr});
    }
    rec.method = "cgc";
    rec.options_digest = options_digest(strat.cycles.front().s_opts) + "-" +
                         options_digest(strat.cycles.front().d_opts);
    rec.j = t.j;
    rec.k = t.k;
    trace = cgc(x, rank, cycles, std::move(strat), guess, rec.seed);
  }

  rec.nll = poisson_nll(x, trace.model).value;
  rec.work_units = trace.work_units;
  rec.converged = trace.converged;
  rec.trace_length = trace.entries.size();
  rec.model = std::move(trace.model);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string record_line(char set, const SolveRecord& r) {
  std::string s;
  s += set;
  s += ',' + r.run_id + ',' + std::to_string(r.seed) + ',' + r.method + ',' +
       r.options_digest + ',';
  if (r.j >= 0) s += std::to_string(r.j);
  s += ',';
  if (r.k >= 0) s += std::to_string(r.k);
  s += ',' + format_double(r.nll) + ',' + std::to_string(r.work_units) + ',' +
       (r.converged ? "1" : "0") + ',' + std::to_string(r.trace_length) +
       ",models/" + r.run_id + ".txt";
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& p, std::ios::openmode extra = {}) {
  std::ofstream out(p, std::ios::binary | extra);
  if (!out) fail(ErrorKind::kIoError, "cannot write '" + p.string() + "'");
  return out;
}

}  // namespace

std::vector<const ResultSet*> ExperimentResults::sets() const {
  std::vector<const ResultSet*> out;
  for (const ResultSet* s : {&gcp, &cpapr, &hybrid}) {
    if (!s->empty()) out.push_back(s);
  }
  return out;
}

ExperimentData load_data(const ExperimentConfig& cfg) {
  if (!cfg.tensor.empty()) return {read_frostt(cfg.tensor), std::nullopt};
  Rng rng(cfg.problem.seed);
  Problem p = create_problem(cfg.problem, rng);
  return {std::move(p.data), std::move(p.truth)};
}

std::uint64_t start_seed(std::uint64_t base_seed, StartFamily family, std::size_t n) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(family), n});
}

KruskalModel start_guess(const SparseCountTensor& x, std::size_t rank,
                         std::uint64_t run_seed) {
  Rng rng(derive_seed(run_seed, {kGuessStream}));
  const double total = x.total_count() > 0 ? static_cast<double>(x.total_count()) : 1.0;
  return create_guess(x.shape(), rank, rng, total);
}

ExperimentResults run_multistart(const ExperimentConfig& cfg,
                                 const SparseCountTensor& x,
                                 const std::filesystem::path& out_dir) {
  cfg.validate();
  const std::vector<Task> tasks = plan(cfg);
  std::vector<std::optional<SolveRecord>> slots(tasks.size());

  std::ofstream journal;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir / "models");
    journal = open_for_write(out_dir / "journal.log");
  }
  std::mutex journal_mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr error;

  auto worker = [&] {
    while (!abort) {
      const std::size_t i = next++;
      if (i >= tasks.size()) return;
      try {
        SolveRecord rec = solve_one(cfg, x, tasks[i]);
        if (!out_dir.empty()) {
          write_model(out_dir / "models" / (rec.run_id + ".txt"), rec.model);
          std::lock_guard lock(journal_mu);
          journal << record_line(tasks[i].set, rec) << '\n' << std::flush;
        }
        slots[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(journal_mu);
        if (!error) error = std::current_exception();
        abort = true;
      }
    }
  };

  std::size_t workers = cfg.threads != 0 ? cfg.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(tasks.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  ExperimentResults out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    ResultSet& set = tasks[i].set == 'G' ? out.gcp : tasks[i].set == 'C' ? out.cpapr : out.hybrid;
    set.records.push_back(std::move(*slots[i]));
  }
  return out;
}

void save_results(const std::filesystem::path& dir, const ExperimentResults& r) {
  std::filesystem::create_directories(dir / "models");
  auto index = open_for_write(dir / "records.csv");
  auto timings = open_for_write(dir / "wall_times.txt");
  index << kRecordsHeader << '\n';
  timings << "# run_id wall_seconds\n";
  for (const ResultSet* s : r.sets()) {
    for (const SolveRecord& rec : s->records) {
      index << record_line(s->label.front(), rec) << '\n';
      timings << rec.run_id << ' ' << format_double(rec.wall_seconds) << '\n';
      write_model(dir / "models" / (rec.run_id + ".txt"), rec.model);
    }
  }
}

ExperimentResults load_results(const std::filesystem::path& dir) {
  std::ifstream in(dir / "records.csv", std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open '" + (dir / "records.csv").string() + "'");
  std::string line;
  std::getline(in, line);
  if (line != kRecordsHeader) throw ParseError(1, "unexpected records.csv header");

  std::unordered_map<std::string, double> walls;
  if (std::ifstream t(dir / "wall_times.txt", std::ios::binary); t) {
    std::string id;
    double secs = 0.0;
    t.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    while (t >> id >> secs) walls[id] = secs;
  }

  ExperimentResults out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 12 || c[0].size() != 1) {
      throw ParseError(line_no, "expected 12 fields in records.csv");
    }
    SolveRecord rec;
    try {
      rec.run_id = c[1];
      rec.seed = std::stoull(c[2]);
      rec.method = c[3];
      rec.options_digest = c[4];
      rec.j = c[5].empty() ? -1 : std::stoll(c[5]);
      rec.k = c[6].empty() ? -1 : std::stoll(c[6]);
      rec.nll = std::stod(c[7]);
      rec.work_units = std::stoull(c[8]);
      rec.converged = c[9] == "1";
      rec.trace_length = std::stoull(c[10]);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed field in records.csv");
    }
    rec.model = read_model(dir / c[11]);
    if (auto it = walls.find(rec.run_id); it != walls.end()) rec.wall_seconds = it->second;
    switch (c[0][0]) {
      case 'G': out.gcp.records.push_back(std::move(rec)); break;
      case 'C': out.cpapr.records.push_back(std::move(rec)); break;
      case 'H': out.hybrid.records.push_back(std::move(rec)); break;
      default: throw ParseError(line_no, "unknown set '" + c[0] + "'");
    }
  }
  return out;
}

}  // namespace pcp
