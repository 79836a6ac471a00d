#include "optsmt/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "optsmt/encodings.hpp"
#include "optsmt/omt.hpp"
#include "optsmt/script.hpp"

namespace optsmt {

namespace {

namespace fs = std::filesystem;

struct SolveFlags {
  std::string schema = "inline";
  std::string search = "binary";
  std::string lb, ub;
  double timeout = 0;
  bool no_pure_literal = false;
  bool no_early_pruning = false;
  bool no_generalization = false;
  uint64_t seed = 0;
  uint64_t max_iterations = 0;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_solve_flags(CLI::App &cmd, SolveFlags &f) {
  cmd.add_option("--schema", f.schema, "offline or inline")
      ->check(CLI::IsMember({"offline", "inline"}));
  cmd.add_option("--search", f.search, "linear or binary")
      ->check(CLI::IsMember({"linear", "binary"}));
  cmd.add_option("--lb", f.lb, "lower bound, overrides the file");
  cmd.add_option("--ub", f.ub, "upper bound, overrides the file");
  cmd.add_option("--timeout", f.timeout, "seconds")->check(CLI::NonNegativeNumber);
  cmd.add_flag("--no-pure-literal", f.no_pure_literal);
  cmd.add_flag("--no-early-pruning", f.no_early_pruning);
  cmd.add_flag("--no-generalization", f.no_generalization, "inline conflict generalization off");
  cmd.add_option("--seed", f.seed, "decision-order perturbation");
  cmd.add_option("--max-iterations", f.max_iterations, "search-loop budget (0: none)");
}

Rational parse_rational_flag(const std::string &name, const std::string &text) {
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument &) {
    throw UsageError(name + ": not a rational number: " + text);
  }
}

Schema parse_schema(const std::string &s) {
  if (s == "offline")
    return Schema::Offline;
  if (s == "inline")
    return Schema::Inline;
  throw UsageError("unknown schema: " + s);
}

SearchMode parse_search(const std::string &s) {
  if (s == "linear")
    return SearchMode::Linear;
  if (s == "binary")
    return SearchMode::BinaryMixed;
  throw UsageError("unknown search mode: " + s);
}

OmtConfig make_config(const SolveFlags &f) {
  OmtConfig c;
  c.schema = parse_schema(f.schema);
  c.search = parse_search(f.search);
  c.pure_literal_filtering = !f.no_pure_literal;
  c.early_pruning = !f.no_early_pruning;
  c.conflict_generalization = !f.no_generalization;
  if (f.timeout > 0)
    c.timeout = std::chrono::milliseconds(static_cast<int64_t>(f.timeout * 1000));
  if (f.max_iterations)
    c.max_iterations = f.max_iterations;
  c.seed = f.seed;
  return c;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Throws ParseError or UsageError.
OmtProblem load_problem(const std::string &path, const SolveFlags &f) {
  Script script = parse_script(read_file(path));
  if (!f.lb.empty())
    script.lb = parse_rational_flag("--lb", f.lb);
  if (!f.ub.empty())
    script.ub = parse_rational_flag("--ub", f.ub);
  return to_problem(script);
}

struct RunRecord {
  std::string instance;
  std::string schema;
  std::string search;
  std::string status;
  std::string objective;
  bool attained = false;
  int64_t wall_ms = 0;
  OmtStats stats;
};

std::string search_name(SearchMode m) { return m == SearchMode::Linear ? "linear" : "binary"; }

RunRecord record_of(const std::string &instance, const OmtConfig &c, const OmtOutcome &o,
                    int64_t wall_ms) {
  RunRecord r;
  r.instance = instance;
  r.schema = to_string(c.schema);
  r.search = search_name(c.search);
  r.status = to_string(o.status);
  if (o.value && o.status != OmtStatus::Unbounded)
    r.objective = o.value->to_string();
  r.attained = o.attained;
  r.wall_ms = wall_ms;
  r.stats = o.stats;
  return r;
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s)
    q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_row(const RunRecord &r) {
  std::ostringstream os;
  os << csv_field(r.instance) << ',' << r.schema << ',' << r.search << ',' << r.status << ','
     << r.objective << ',' << (r.attained ? "true" : "false") << ',' << r.wall_ms << ','
     << r.stats.decisions << ',' << r.stats.conflicts << ',' << r.stats.theory_checks << ','
     << r.stats.minimize_calls << ',' << r.stats.pivots;
  return os.str();
}

void print_outcome(std::ostream &out, const OmtProblem &problem, const OmtOutcome &o) {
  out << to_string(o.status) << "\n";
  if (o.witness.empty() || !o.value)
    return;
  out << "(objective " << o.value->to_string() << " :attained " << (o.attained ? "true" : "false")
      << ")\n";
  std::vector<Rational> values = concrete_model(problem, o);
  out << "(model\n";
  const VarTable &vars = problem.formula.vars;
  for (std::size_t v = 0; v < vars.size(); ++v)
    out << "  (define-fun " << vars.name(static_cast<VarId>(v)) << " () Real "
        << smtlib_number(values[v]) << ")\n";
  const PropTable &props = problem.formula.props;
  for (std::size_t p = 0; p < props.size(); ++p)
    if (props.kind(static_cast<PropId>(p)) == PropKind::Bool)
      out << "  (define-fun " << props.name(static_cast<PropId>(p)) << " () Bool "
          << (p < o.assignment.size() && o.assignment[p] ? "true" : "false") << ")\n";
  out << ")\n";
}

int exit_for(const OmtOutcome &o) {
  return o.status == OmtStatus::Interrupted ? kExitInterrupted : kExitOk;
}

struct Timed {
  OmtOutcome outcome;
  int64_t wall_ms;
};

Timed timed_solve(const OmtProblem &p, const OmtConfig &c) {
  auto t0 = std::chrono::steady_clock::now();
  OmtOutcome o = solve(p, c);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  return {std::move(o), ms.count()};
}

int cmd_solve(const std::string &file, const SolveFlags &f, const std::string &stats_path,
              std::ostream &out) {
  OmtConfig config = make_config(f);
  OmtProblem problem = load_problem(file, f);
  Timed t = timed_solve(problem, config);
  print_outcome(out, problem, t.outcome);
  if (!stats_path.empty()) {
    bool fresh = !fs::exists(stats_path) || fs::file_size(stats_path) == 0;
    std::ofstream csv(stats_path, std::ios::app);
    if (!csv)
      throw UsageError("cannot write " + stats_path);
    if (fresh)
      csv << csv_header() << "\n";
    csv << csv_row(record_of(fs::path(file).filename().string(), config, t.outcome, t.wall_ms))
        << "\n";
  }
  return exit_for(t.outcome);
}

int cmd_crosscheck(const std::string &file, const SolveFlags &f, std::ostream &out) {
  OmtConfig config = make_config(f);
  OmtProblem problem = load_problem(file, f);
  OmtOutcome o = solve(problem, config);
  out << to_string(o.status) << "\n";
  if (o.status == OmtStatus::Interrupted) {
    out << "fail: interrupted\n";
    return kExitInterrupted;
  }
  CrosscheckResult r = crosscheck(problem, o);
  if (r.pass) {
    out << "pass\n";
    return kExitOk;
  }
  out << "fail: " << r.reason << "\n";
  return kExitCrosscheckFailed;
}

void emit(const Script &s, const std::string &path, std::ostream &out) {
  std::string text = print_script(s);
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw UsageError("cannot write " + path);
  f << text;
}

std::vector<OmtConfig> parse_configs(const std::string &list, const SolveFlags &base) {
  std::vector<OmtConfig> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos)
      throw UsageError("config must be <schema>-<search>: " + item);
    SolveFlags f = base;
    f.schema = item.substr(0, dash);
    f.search = item.substr(dash + 1);
    out.push_back(make_config(f));
  }
  if (out.empty())
    throw UsageError("empty --configs list");
  return out;
}

int cmd_bench(const std::string &dir, const std::string &configs_text, unsigned jobs,
              const SolveFlags &base, std::ostream &out, std::ostream &err) {
  std::vector<OmtConfig> configs = parse_configs(configs_text, base);
  if (!fs::is_directory(dir))
    throw UsageError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".smt2")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());

  const std::size_t total = files.size() * configs.size();
  std::vector<std::string> rows(total);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < total;) {
      const fs::path &file = files[k / configs.size()];
      const OmtConfig &c = configs[k % configs.size()];
      std::string name = file.filename().string();
      try {
        OmtProblem p = load_problem(file.string(), base);
        Timed t = timed_solve(p, c);
        rows[k] = csv_row(record_of(name, c, t.outcome, t.wall_ms));
      } catch (const std::exception &e) {
        RunRecord r;
        r.instance = name;
        r.schema = to_string(c.schema);
        r.search = search_name(c.search);
        r.status = "error";
        rows[k] = csv_row(r);
        std::lock_guard lock(err_mutex);
        err << name << ": " << e.what() << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < std::max(1u, jobs); ++i)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  out << csv_header() << "\n";
  for (const auto &r : rows)
    out << r << "\n";
  return kExitOk;
}

} // namespace

std::string csv_header() {
  return "instance,schema,search,status,objective,attained,wall_ms,decisions,conflicts,"
         "theory_checks,minimize_calls,pivots";
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Exact OMT(LA(Q)) solver", "optsmt"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  std::string solve_file, stats_path;
  CLI::App *solve_cmd = app.add_subcommand("solve", "solve an instance");
  solve_cmd->add_option("file", solve_file)->required();
  solve_cmd->add_option("--stats", stats_path, "append a CSV statistics row");
  add_solve_flags(*solve_cmd, solve_flags);

  CLI::App *gen_cmd = app.add_subcommand("generate", "write a random benchmark instance");
  gen_cmd->require_subcommand(1);
  std::size_t sp_n = 0;
  std::string sp_w, sp_out, js_out;
  uint64_t sp_seed = 0, js_seed = 0;
  std::size_t js_jobs = 0, js_stages = 0;
  CLI::App *sp_cmd = gen_cmd->add_subcommand("strip-packing", "strip-packing instance");
  sp_cmd->add_option("--n", sp_n, "rectangles")->required()->check(CLI::PositiveNumber);
  sp_cmd->add_option("--w", sp_w, "strip width")->required();
  sp_cmd->add_option("--seed", sp_seed)->required();
  sp_cmd->add_option("-o,--output", sp_out, "output file (default stdout)");
  CLI::App *js_cmd = gen_cmd->add_subcommand("jobshop", "zero-wait job-shop instance");
  js_cmd->add_option("--jobs", js_jobs)->required()->check(CLI::PositiveNumber);
  js_cmd->add_option("--stages", js_stages)->required()->check(CLI::PositiveNumber);
  js_cmd->add_option("--seed", js_seed)->required();
  js_cmd->add_option("-o,--output", js_out, "output file (default stdout)");

  SolveFlags cc_flags;
  std::string cc_file;
  CLI::App *cc_cmd = app.add_subcommand("crosscheck", "solve and verify the answer");
  cc_cmd->add_option("file", cc_file)->required();
  add_solve_flags(*cc_cmd, cc_flags);

  SolveFlags bench_flags;
  std::string bench_dir;
  std::string bench_configs = "inline-binary,inline-linear,offline-binary,offline-linear";
  unsigned bench_jobs = 1;
  CLI::App *bench_cmd = app.add_subcommand("bench", "run a corpus, CSV on stdout");
  bench_cmd->add_option("dir", bench_dir)->required();
  bench_cmd->add_option("--configs", bench_configs, "comma-separated <schema>-<search> list");
  bench_cmd->add_option("--jobs", bench_jobs, "concurrent runs")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--timeout", bench_flags.timeout, "seconds per run")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_flag("--no-pure-literal", bench_flags.no_pure_literal);
  bench_cmd->add_flag("--no-early-pruning", bench_flags.no_early_pruning);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed())
      return cmd_solve(solve_file, solve_flags, stats_path, out);
    if (cc_cmd->parsed())
      return cmd_crosscheck(cc_file, cc_flags, out);
    if (sp_cmd->parsed()) {
      Rational w = parse_rational_flag("--w", sp_w);
      if (w.sign() <= 0)
        throw UsageError("--w must be positive");
      emit(gen_strip_packing(sp_n, w, sp_seed).script, sp_out, out);
      return kExitOk;
    }
    if (js_cmd->parsed()) {
      emit(gen_jobshop(js_jobs, js_stages, js_seed).script, js_out, out);
      return kExitOk;
    }
    if (bench_cmd->parsed())
      return cmd_bench(bench_dir, bench_configs, bench_jobs, bench_flags, out, err);
  } catch (const ParseError &e) {
    err << "parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const UsageError &e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace optsmt
