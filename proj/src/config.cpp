#include "pcp/config.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "pcp/error.hpp"
#include "pcp/io.hpp"

namespace pcp {

std::string_view to_string(RunMethod m) {
  switch (m) {
    case RunMethod::kCpapr: return "cpapr";
    case RunMethod::kGcp: return "gcp";
    case RunMethod::kCgc: return "cgc";
    case RunMethod::kSweep: return "sweep";
  }
  return "?";
}

RunMethod parse_run_method(std::string_view name) {
  for (RunMethod m : {RunMethod::kCpapr, RunMethod::kGcp, RunMethod::kCgc,
                      RunMethod::kSweep}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::kUnknownMethod, "unknown method '" + std::string(name) +
                                      "' (expected cpapr, gcp, cgc or sweep)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view v, const char* expected) {
  fail(ErrorKind::kInvalidArgument,
       "bad value '" + std::string(v) + "', expected " + expected);
}

template <typename T>
void parse_number(std::string_view v, T& out, const char* expected) {
  v = trim(v);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(v, expected);
}

void parse_value(std::string_view v, std::size_t& out) {
  parse_number(v, out, "a non-negative integer");
}
void parse_value(std::string_view v, long long& out) {
  parse_number(v, out, "an integer");
}
void parse_value(std::string_view v, double& out) {
  parse_number(v, out, "a number");
}
void parse_value(std::string_view v, bool& out) {
  v = trim(v);
  if (v == "true" || v == "1") {
    out = true;
  } else if (v == "false" || v == "0") {
    out = false;
  } else {
    bad_value(v, "true or false");
  }
}
void parse_value(std::string_view v, std::filesystem::path& out) {
  out = std::filesystem::path(std::string(trim(v)));
}
void parse_value(std::string_view v, RunMethod& out) {
  out = parse_run_method(trim(v));
}
template <typename T>
void parse_value(std::string_view v, std::vector<T>& out) {
  out.clear();
  for (auto w : words(v)) {
    T x{};
    parse_value(w, x);
    out.push_back(x);
  }
}

std::string format_value(std::size_t v) { return std::to_string(v); }
std::string format_value(long long v) { return std::to_string(v); }
std::string format_value(double v) { return format_double(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::filesystem::path& v) { return v.string(); }
std::string format_value(RunMethod v) { return std::string(to_string(v)); }
template <typename T>
std::string format_value(const std::vector<T>& v) {
  std::string out;
  for (const T& x : v) {
    if (!out.empty()) out += ' ';
    out += format_value(x);
  }
  return out;
}

template <typename Owner>
struct Field {
  std::string_view name;
  std::function<void(Owner&, std::string_view)> set;
  std::function<std::string(const Owner&)> get;
};

template <typename Owner, typename Access>
Field<Owner> field(std::string_view name, Access access) {
  return {name,
          [access](Owner& o, std::string_view v) { parse_value(v, access(o)); },
          [access](const Owner& o) { return format_value(access(o)); }};
}

#define PCP_FIELD(Owner, member) \
  field<Owner>(#member, [](auto& o) -> auto& { return o.member; })

const std::vector<Field<CpaprOptions>>& cpapr_fields() {
  static const std::vector<Field<CpaprOptions>> f = {
      PCP_FIELD(CpaprOptions, max_outer_iters),
      PCP_FIELD(CpaprOptions, max_inner_iters),
      PCP_FIELD(CpaprOptions, kkt_tol),
      PCP_FIELD(CpaprOptions, eps),
      PCP_FIELD(CpaprOptions, kappa),
      PCP_FIELD(CpaprOptions, kappa_tol),
  };
  return f;
}

const std::vector<Field<GcpOptions>>& gcp_fields() {
  static const std::vector<Field<GcpOptions>> f = {
      PCP_FIELD(GcpOptions, alpha0),
      PCP_FIELD(GcpOptions, alpha_final),
      PCP_FIELD(GcpOptions, decay),
      PCP_FIELD(GcpOptions, iters_per_epoch),
      PCP_FIELD(GcpOptions, samples_nonzero),
      PCP_FIELD(GcpOptions, samples_zero),
      PCP_FIELD(GcpOptions, fit_samples_nonzero),
      PCP_FIELD(GcpOptions, fit_samples_zero),
      PCP_FIELD(GcpOptions, beta1),
      PCP_FIELD(GcpOptions, beta2),
      PCP_FIELD(GcpOptions, adam_eps),
      PCP_FIELD(GcpOptions, max_epochs),
      PCP_FIELD(GcpOptions, checkpoint_rates),
      PCP_FIELD(GcpOptions, eps),
      PCP_FIELD(GcpOptions, exact),
  };
  return f;
}

#undef PCP_FIELD

using ConfigField = Field<ExperimentConfig>;

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> f = {
      field<ExperimentConfig>("tensor", [](auto& c) -> auto& { return c.tensor; }),
      field<ExperimentConfig>("problem.shape", [](auto& c) -> auto& { return c.problem.shape; }),
      field<ExperimentConfig>("problem.rank", [](auto& c) -> auto& { return c.problem.rank; }),
      field<ExperimentConfig>("problem.nnz", [](auto& c) -> auto& { return c.problem.target_nnz; }),
      field<ExperimentConfig>("problem.density", [](auto& c) -> auto& { return c.problem.density; }),
      field<ExperimentConfig>("problem.seed", [](auto& c) -> auto& { return c.problem.seed; }),
      field<ExperimentConfig>("rank", [](auto& c) -> auto& { return c.rank; }),
      field<ExperimentConfig>("method", [](auto& c) -> auto& { return c.method; }),
      field<ExperimentConfig>("starts", [](auto& c) -> auto& { return c.starts; }),
      field<ExperimentConfig>("seed", [](auto& c) -> auto& { return c.seed; }),
      field<ExperimentConfig>("cycles", [](auto& c) -> auto& { return c.cycles; }),
      field<ExperimentConfig>("sweep.W", [](auto& c) -> auto& { return c.total_work; }),
      field<ExperimentConfig>("sweep.j", [](auto& c) -> auto& { return c.j_values; }),
      field<ExperimentConfig>("baseline.cpapr_starts", [](auto& c) -> auto& { return c.baseline_cpapr_starts; }),
      field<ExperimentConfig>("baseline.gcp_starts", [](auto& c) -> auto& { return c.baseline_gcp_starts; }),
      field<ExperimentConfig>("report.eps", [](auto& c) -> auto& { return c.report_eps; }),
      field<ExperimentConfig>("report.t", [](auto& c) -> auto& { return c.report_t; }),
      field<ExperimentConfig>("report.tau", [](auto& c) -> auto& { return c.report_tau; }),
      field<ExperimentConfig>("output", [](auto& c) -> auto& { return c.output; }),
      field<ExperimentConfig>("threads", [](auto& c) -> auto& { return c.threads; }),
  };
  return f;
}

template <typename Opts>
bool apply_option(const std::vector<Field<Opts>>& fields, Opts& opts,
                  std::string_view name, std::string_view value) {
  for (const auto& f : fields) {
    if (f.name == name) {
      f.set(opts, value);
      return true;
    }
  }
  return false;
}

template <typename Opts>
void format_options(std::string& out, std::string_view prefix,
                    const std::vector<Field<Opts>>& fields, const Opts& opts) {
  for (const auto& f : fields) {
    out += std::string(prefix) + std::string(f.name) + " = " + f.get(opts) + "\n";
  }
}

template <typename Opts>
std::string digest_of(const std::vector<Field<Opts>>& fields, const Opts& opts) {
  std::string text;
  format_options(text, "", fields, opts);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

CpaprOptions ExperimentConfig::run_to_tolerance_cpapr() {
  CpaprOptions o;
  o.max_outer_iters = 1000;
  o.kkt_tol = 1e-15;
  return o;
}

GcpOptions ExperimentConfig::run_to_tolerance_gcp() {
  GcpOptions o;
  o.max_epochs = 1000;
  o.alpha_final = 1e-15;
  return o;
}

std::vector<double> ExperimentConfig::t_grid() const {
  if (!report_t.empty()) return report_t;
  std::vector<double> t;
  for (int i = 0; i <= 100; ++i) t.push_back(i / 100.0);
  return t;
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvalidArgument, what); };
  if (tensor.empty() && problem.shape.empty()) {
    bad("either tensor or problem.shape must be set");
  }
  if (effective_rank() == 0) bad("rank must be positive");
  if (starts == 0) bad("starts must be at least 1");
  if (cycles == 0) bad("cycles must be at least 1");
  if (method == RunMethod::kSweep) {
    if (total_work < 1) bad("sweep.W must be at least 1");
    for (long long j : j_values) {
      if (j < 0 || j > total_work) {
        fail(ErrorKind::kBudgetOutOfRange,
             "sweep.j value " + std::to_string(j) + " outside [0, W]");
      }
    }
  }
  for (double e : report_eps) {
    if (!(e > 0.0)) bad("report.eps values must be positive");
  }
  for (double t : report_t) {
    if (!(t >= 0.0 && t <= 1.0)) bad("report.t values must lie in [0, 1]");
  }
  for (double tau : report_tau) {
    if (!(tau >= 0.0 && tau < 1.0)) bad("report.tau values must lie in [0, 1)");
  }
  cpapr.validate();
  gcp.validate();
  baseline_cpapr.validate();
  baseline_gcp.validate();
}

void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value) {
  key = trim(key);
  value = trim(value);
  struct Group {
    std::string_view prefix;
    std::function<bool(std::string_view)> apply;
  };
  const std::array<Group, 4> groups = {{
      {"baseline.cpapr.",
       [&](std::string_view n) { return apply_option(cpapr_fields(), cfg.baseline_cpapr, n, value); }},
      {"baseline.gcp.",
       [&](std::string_view n) { return apply_option(gcp_fields(), cfg.baseline_gcp, n, value); }},
      {"cpapr.",
       [&](std::string_view n) { return apply_option(cpapr_fields(), cfg.cpapr, n, value); }},
      {"gcp.",
       [&](std::string_view n) { return apply_option(gcp_fields(), cfg.gcp, n, value); }},
  }};
  for (const auto& g : groups) {
    if (starts_with(key, g.prefix)) {
      if (g.apply(key.substr(g.prefix.size()))) return;
      fail(ErrorKind::kInvalidArgument, "unknown option '" + std::string(key) + "'");
    }
  }
  for (const auto& f : config_fields()) {
    if (f.name == key) {
      f.set(cfg, value);
      return;
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown key '" + std::string(key) + "'");
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    fail(ErrorKind::kInvalidArgument,
         "expected key=value, got '" + std::string(assignment) + "'");
  }
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected 'key = value'");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what(), e.kind());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& f : config_fields()) {
    out += std::string(f.name) + " = " + f.get(cfg) + "\n";
  }
  format_options(out, "cpapr.", cpapr_fields(), cfg.cpapr);
  format_options(out, "gcp.", gcp_fields(), cfg.gcp);
  format_options(out, "baseline.cpapr.", cpapr_fields(), cfg.baseline_cpapr);
  format_options(out, "baseline.gcp.", gcp_fields(), cfg.baseline_gcp);
  return out;
}

std::string options_digest(const CpaprOptions& o) { return digest_of(cpapr_fields(), o); }
std::string options_digest(const GcpOptions& o) { return digest_of(gcp_fields(), o); }

}  // namespace pcp
