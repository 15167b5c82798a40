// sched-reduce: generate instances, apply reductions, solve, verify and
// certify reduction bounds from the command line.
//
// Exit codes: 0 success, 1 infeasible or bound violated, 2 usage or input
// error, 3 search budget exhausted.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sched_reduce/generators.hpp"
#include "sched_reduce/harness.hpp"
#include "sched_reduce/io.hpp"
#include "sched_reduce/reductions.hpp"
#include "sched_reduce/rounding.hpp"
#include "sched_reduce/solvers.hpp"

namespace sr = sched_reduce;
namespace io = sched_reduce::io;

namespace {

constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

sr::SolveLimits parse_limits(const std::string& text) {
  sr::SolveLimits lim;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--limits expects key=value pairs, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "max_jobs") {
        lim.max_jobs = std::stoi(value);
      } else if (key == "max_states") {
        lim.max_states = std::stoll(value);
      } else if (key == "time_budget") {
        lim.time_budget = std::stod(value);
      } else {
        throw UsageError("unknown limit '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad value for limit '" + key + "'");
    }
  }
  if (lim.max_jobs < 1 || lim.max_states < 1 || lim.time_budget <= 0) throw UsageError("limits must be positive");
  return lim;
}

sr::Rational parse_rational_arg(const std::string& text, const char* flag) {
  try {
    return sr::parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + " expects a rational like 1/2");
  }
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) sr::fail(sr::ErrorCode::Io, "cannot write " + out_path);
  out << text;
}

std::string sidecar_path(const std::string& out_path) {
  std::filesystem::path p(out_path);
  if (p.extension() == ".json") return (p.parent_path() / (p.stem().string() + ".artifact.json")).string();
  return out_path + ".artifact.json";
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  std::string family;
  std::uint64_t seed = 0;
  std::string out;
  int layers = 3, per_layer = 3, n = 6, m = 2, k = 2, jobs = 3, machines = 2, ops = 2;
  std::string edge_prob = "1/2";
  std::string density = "9/10";
  std::int64_t min_length = 0, max_length = 0;
  std::string instance, schedule, gamma, split_prob = "1/2";
};

int run_gen(const GenArgs& a) {
  const auto prob = parse_rational_arg(a.edge_prob, "--edge-prob");
  io::Json doc;
  if (a.family == "layered") {
    doc = io::to_json(sr::gen_layered_umps(a.layers, a.per_layer, prob, a.seed));
  } else if (a.family == "random") {
    std::optional<std::pair<std::int64_t, std::int64_t>> range;
    if (a.min_length > 0 || a.max_length > 0) range = std::make_pair(a.min_length, a.max_length);
    doc = io::to_json(sr::gen_random_umps(a.n, a.m, prob, a.seed, range));
  } else if (a.family == "jobshop") {
    doc = io::to_json(sr::gen_jobshop(a.jobs, a.machines, a.ops, a.seed));
  } else if (a.family == "flowshop") {
    doc = io::to_json(sr::gen_flow_shop(a.jobs, a.machines, a.seed));
  } else if (a.family == "kpartite-yes") {
    const auto planted = sr::gen_kpartite_yes(a.n, a.k, a.seed, prob);
    doc = io::to_json(planted.instance, &planted.certificate);
  } else if (a.family == "kpartite-dense") {
    doc = io::to_json(sr::gen_kpartite_dense(a.n, a.k, parse_rational_arg(a.density, "--density"), a.seed));
  } else if (a.family == "fractional") {
    if (a.instance.empty() || a.schedule.empty()) throw UsageError("fractional needs --instance and --schedule");
    const auto inst = io::umps_from_json(io::read_file(a.instance));
    const auto sched = io::schedule_from_json(io::read_file(a.schedule));
    const sr::Rational gamma = a.gamma.empty() ? sr::Rational(sr::BigInt(1), sr::BigInt(10) * inst.n() * inst.n())
                                               : parse_rational_arg(a.gamma, "--gamma");
    doc = io::to_json(sr::gen_fractional(inst, sched, gamma, parse_rational_arg(a.split_prob, "--split-prob"), a.seed));
  } else {
    throw UsageError("unknown family '" + a.family +
                     "' (layered, random, jobshop, flowshop, kpartite-yes, kpartite-dense, fractional)");
  }
  emit(a.out, io::dump(doc));
  return kOk;
}

// --- reduce ------------------------------------------------------------------

struct ReduceArgs {
  std::string in, reduction, out;
  std::string kappa_override;
};

int run_reduce(const ReduceArgs& a) {
  if (a.out.empty()) throw UsageError("reduce needs --out (the artifact sidecar is written next to it)");
  const io::Json doc = io::read_file(a.in);
  const std::string kind = io::kind_of(doc);
  auto require_kind = [&](const char* want) {
    if (kind != want) throw UsageError("reduction '" + a.reduction + "' needs a " + want + " file, got " + kind);
  };
  io::Json output, artifact;
  if (a.reduction == "commdelay" || a.reduction == "umps_to_commdelay") {
    require_kind("umps");
    const auto art = sr::umps_to_commdelay(io::umps_from_json(doc));
    output = io::to_json(art.output);
    artifact = io::to_json(art);
  } else if (a.reduction == "related" || a.reduction == "umps_to_related") {
    require_kind("umps");
    std::optional<sr::BigInt> kappa;
    if (!a.kappa_override.empty()) {
      try {
        kappa = sr::BigInt(a.kappa_override);
      } catch (const std::exception&) {
        throw UsageError("--kappa-override expects an integer");
      }
    }
    const auto art = sr::umps_to_related(io::umps_from_json(doc), kappa);
    if (!art.soundness_guaranteed) {
      std::cerr << "warning: kappa " << art.kappa.str() << " is below 10 n^3 m; the rounding bound is not guaranteed\n";
    }
    output = io::to_json(art.output);
    artifact = io::to_json(art);
  } else if (a.reduction == "jobshop" || a.reduction == "jobshop_to_umps") {
    require_kind("jobshop");
    const auto js = io::jobshop_from_json(doc);
    const auto emb = sr::jobshop_to_umps(js);
    output = io::to_json(emb.umps);
    artifact = io::to_json(emb, js);
  } else if (a.reduction == "kpartite" || a.reduction == "kpartite_to_umps") {
    require_kind("kpartite");
    const auto file = io::kpartite_from_json(doc);
    output = io::to_json(sr::kpartite_to_umps(file.instance));
    artifact = io::kpartite_artifact(file.instance);
  } else {
    throw UsageError("unknown reduction '" + a.reduction + "' (commdelay, related, jobshop, kpartite)");
  }
  io::write_file(a.out, output);
  io::write_file(sidecar_path(a.out), artifact);
  return kOk;
}

// --- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string in, solver = "exact", out, limits;
};

int run_solve(const SolveArgs& a) {
  const sr::SolveLimits lim = parse_limits(a.limits);
  const io::Json doc = io::read_file(a.in);
  const std::string kind = io::kind_of(doc);
  sr::SolveResult result;
  auto heuristic = [&](sr::Schedule s) {
    result.schedule = std::move(s);
    result.optimum = sr::makespan(result.schedule);
    result.proven_optimal = false;
  };
  auto solve_umps = [&](const sr::UmpsInstance& inst) {
    if (a.solver == "exact") {
      result = sr::solve_umps_exact(inst, lim);
    } else if (a.solver == "greedy") {
      heuristic(sr::greedy_umps(inst));
    } else if (a.solver == "serial") {
      heuristic(sr::trivial_serial_schedule(inst));
    } else {
      throw UsageError("solver '" + a.solver + "' does not apply to UMPS (exact, greedy, serial)");
    }
  };
  if (kind == "umps") {
    solve_umps(io::umps_from_json(doc));
  } else if (kind == "jobshop") {
    solve_umps(sr::jobshop_to_umps(io::jobshop_from_json(doc)).umps);
  } else if (kind == "kpartite") {
    const auto file = io::kpartite_from_json(doc);
    if (a.solver == "yes") {
      if (!file.certificate) throw UsageError("solver 'yes' needs a certificate in the kpartite file");
      heuristic(sr::kpartite_yes_schedule(file.instance, *file.certificate));
    } else {
      solve_umps(sr::kpartite_to_umps(file.instance));
    }
  } else if (kind == "commdelay") {
    const auto inst = io::commdelay_from_json(doc);
    if (a.solver == "exact") {
      result = sr::solve_commdelay_exact(inst, lim);
    } else if (a.solver == "list") {
      const int machines = inst.machines().unbounded ? inst.n_total() : inst.machines().count;
      heuristic(sr::list_schedule_commdelay(inst, machines));
    } else {
      throw UsageError("solver '" + a.solver + "' does not apply to comm-delay (exact, list)");
    }
  } else if (kind == "related_grouped") {
    if (a.solver != "exact") throw UsageError("related instances support only the exact solver");
    const auto grouped = io::related_grouped_from_json(doc);
    result = sr::solve_related_exact(sr::materialize(grouped).instance, lim);
  } else {
    throw UsageError("cannot solve a " + kind + " file");
  }
  io::Json out = io::to_json(result.schedule);
  out["optimum"] = sr::to_string(result.optimum);
  out["proven_optimal"] = result.proven_optimal;
  out["states_explored"] = result.states_explored;
  emit(a.out, io::dump(out));
  if (a.solver == "exact" && !result.proven_optimal) {
    std::cerr << "budget exhausted; best schedule found has makespan " << sr::to_string(result.optimum) << "\n";
    return kBudget;
  }
  return kOk;
}

// --- verify ------------------------------------------------------------------

int run_verify(const std::string& instance_path, const std::string& schedule_path) {
  const io::Json doc = io::read_file(instance_path);
  const sr::Schedule sched = io::schedule_from_json(io::read_file(schedule_path));
  const std::string kind = io::kind_of(doc);
  sr::ValidationReport report;
  if (kind == "umps") {
    report = sr::validate_umps(io::umps_from_json(doc), sched);
  } else if (kind == "jobshop") {
    report = sr::validate_umps(sr::jobshop_to_umps(io::jobshop_from_json(doc)).umps, sched);
  } else if (kind == "kpartite") {
    report = sr::validate_umps(sr::kpartite_to_umps(io::kpartite_from_json(doc).instance), sched);
  } else if (kind == "commdelay") {
    report = sr::validate_commdelay(io::commdelay_from_json(doc), sched);
  } else if (kind == "related_grouped") {
    report = sr::validate_related(sr::materialize(io::related_grouped_from_json(doc)).instance, sched);
  } else {
    throw UsageError("cannot verify against a " + kind + " file");
  }
  if (report.feasible()) {
    std::cout << "feasible makespan=" << sr::to_string(sr::makespan(sched)) << "\n";
    return kOk;
  }
  std::cout << "infeasible\n" << report.describe();
  return kViolated;
}

// --- roundtrip / bench -------------------------------------------------------

struct HarnessArgs {
  std::string in, mode = "commdelay", out, limits, kappa_override;
  bool timing = false;
};

sr::RoundtripOptions harness_options(const HarnessArgs& a) {
  sr::RoundtripOptions opt;
  opt.limits = parse_limits(a.limits);
  opt.timing = a.timing;
  if (!a.kappa_override.empty()) {
    try {
      opt.kappa_override = sr::BigInt(a.kappa_override);
    } catch (const std::exception&) {
      throw UsageError("--kappa-override expects an integer");
    }
  }
  return opt;
}

sr::RoundtripMode parse_mode(const std::string& mode) {
  if (mode == "commdelay") return sr::RoundtripMode::Commdelay;
  if (mode == "related") return sr::RoundtripMode::Related;
  if (mode == "kpartite") return sr::RoundtripMode::Kpartite;
  throw UsageError("unknown mode '" + mode + "' (commdelay, related, kpartite)");
}

int rows_exit_code(const std::vector<sr::GapRow>& rows) {
  bool budget = false, violated = false;
  for (const auto& row : rows) {
    budget = budget || row.budget_exceeded;
    violated = violated || !row.bound_holds;
  }
  if (budget) return kBudget;
  return violated ? kViolated : kOk;
}

int run_roundtrip(const HarnessArgs& a) {
  const auto opt = harness_options(a);
  const auto mode = parse_mode(a.mode);
  const io::Json doc = io::read_file(a.in);
  const std::string kind = io::kind_of(doc);
  if ((mode == sr::RoundtripMode::Kpartite) != (kind == "kpartite")) {
    throw UsageError("mode '" + a.mode + "' does not match a " + kind + " file");
  }
  auto row = sr::roundtrip_file(std::filesystem::path(a.in).stem().string(), doc, mode, opt);
  if (!row) throw UsageError("roundtrip needs a umps or kpartite file");
  emit(a.out, sr::csv_table({*row}));
  return rows_exit_code({*row});
}

int run_bench(const HarnessArgs& a) {
  const auto opt = harness_options(a);
  const auto mode = parse_mode(a.mode);
  if (mode == sr::RoundtripMode::Kpartite) throw UsageError("bench picks the k-partite checks from each file's kind");
  const auto rows = sr::bench(a.in, mode, opt);
  emit(a.out, sr::csv_table(rows));
  std::map<std::string, std::pair<int, int>> summary;
  for (const auto& row : rows) {
    auto& [total, holds] = summary[std::string(sr::bound_kind_name(row.bound_kind))];
    ++total;
    holds += row.bound_holds ? 1 : 0;
  }
  std::ostream& log = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
  log << "bound_kind           rows  holds\n";
  for (const auto& [kind, counts] : summary) {
    log << kind << std::string(kind.size() < 21 ? 21 - kind.size() : 1, ' ') << counts.first << "  " << counts.second
        << "\n";
  }
  log << "total " << rows.size() << " rows\n";
  return rows_exit_code(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reductions between precedence-constrained scheduling problems"};
  app.name("sched-reduce");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->add_option("family", gen.family, "layered | random | jobshop | flowshop | kpartite-yes | kpartite-dense | fractional")
      ->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output path (stdout if omitted)");
  gen_cmd->add_option("--layers", gen.layers, "layered: machine count");
  gen_cmd->add_option("--per-layer", gen.per_layer, "layered: jobs per machine");
  gen_cmd->add_option("--n", gen.n, "random: job count; kpartite: layer size");
  gen_cmd->add_option("--m", gen.m, "random: machine count");
  gen_cmd->add_option("--k", gen.k, "kpartite: layer count");
  gen_cmd->add_option("--edge-prob", gen.edge_prob, "Edge probability as p/q");
  gen_cmd->add_option("--density", gen.density, "kpartite-dense: edge probability as p/q");
  gen_cmd->add_option("--min-length", gen.min_length, "random: smallest job length");
  gen_cmd->add_option("--max-length", gen.max_length, "random: largest job length");
  gen_cmd->add_option("--jobs", gen.jobs, "jobshop/flowshop: job count");
  gen_cmd->add_option("--machines", gen.machines, "jobshop/flowshop: machine count");
  gen_cmd->add_option("--ops", gen.ops, "jobshop: operations per job");
  gen_cmd->add_option("--instance", gen.instance, "fractional: UMPS instance file");
  gen_cmd->add_option("--schedule", gen.schedule, "fractional: integral schedule file");
  gen_cmd->add_option("--gamma", gen.gamma, "fractional: deletion bound (default 1/(10 n^2))");
  gen_cmd->add_option("--split-prob", gen.split_prob, "fractional: split probability as p/q");

  ReduceArgs reduce;
  auto* reduce_cmd = app.add_subcommand("reduce", "Apply a reduction; writes the output and an artifact sidecar");
  reduce_cmd->add_option("input", reduce.in, "Instance file")->required();
  reduce_cmd->add_option("reduction", reduce.reduction, "commdelay | related | jobshop | kpartite")->required();
  reduce_cmd->add_option("--out", reduce.out, "Output path")->required();
  reduce_cmd->add_option("--kappa-override", reduce.kappa_override, "related: use this kappa instead of 10 n^3 m");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("input", solve.in, "Instance file")->required();
  solve_cmd->add_option("--solver", solve.solver, "exact | greedy | serial | list | yes");
  solve_cmd->add_option("--limits", solve.limits, "max_jobs=N,max_states=N,time_budget=SECONDS");
  solve_cmd->add_option("--out", solve.out, "Result path (stdout if omitted)");

  std::string verify_instance, verify_schedule;
  auto* verify_cmd = app.add_subcommand("verify", "Check a schedule against an instance");
  verify_cmd->add_option("instance", verify_instance, "Instance file")->required();
  verify_cmd->add_option("schedule", verify_schedule, "Schedule file")->required();

  HarnessArgs roundtrip;
  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "Reduce, solve both sides, map back, emit a gap row");
  roundtrip_cmd->add_option("input", roundtrip.in, "umps or kpartite file")->required();
  roundtrip_cmd->add_option("--mode", roundtrip.mode, "commdelay | related | kpartite");
  roundtrip_cmd->add_option("--limits", roundtrip.limits, "Solver limits");
  roundtrip_cmd->add_option("--kappa-override", roundtrip.kappa_override, "related: kappa to use");
  roundtrip_cmd->add_option("--out", roundtrip.out, "CSV path (stdout if omitted)");
  roundtrip_cmd->add_flag("--timing", roundtrip.timing, "Fill wall_ms (otherwise 0, keeping output deterministic)");

  HarnessArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run roundtrips over every *.json file of a directory");
  bench_cmd->add_option("corpus", bench.in, "Corpus directory")->required();
  bench_cmd->add_option("--mode", bench.mode, "Mode for umps files: commdelay | related");
  bench_cmd->add_option("--limits", bench.limits, "Solver limits");
  bench_cmd->add_option("--kappa-override", bench.kappa_override, "related: kappa to use");
  bench_cmd->add_option("--out", bench.out, "CSV path (stdout if omitted)");
  bench_cmd->add_flag("--timing", bench.timing, "Fill wall_ms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*reduce_cmd) return run_reduce(reduce);
    if (*solve_cmd) return run_solve(solve);
    if (*verify_cmd) return run_verify(verify_instance, verify_schedule);
    if (*roundtrip_cmd) return run_roundtrip(roundtrip);
    if (*bench_cmd) return run_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const sr::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case sr::ErrorCode::BudgetExceeded:
      case sr::ErrorCode::IterationBudgetExceeded:
      case sr::ErrorCode::TooLargeToMaterialize:
        return kBudget;
      case sr::ErrorCode::Parse:
      case sr::ErrorCode::Io:
      case sr::ErrorCode::InvalidInstance:
      case sr::ErrorCode::CycleDetected:
      case sr::ErrorCode::DegenerateInstance:
      case sr::ErrorCode::NonUnitLengths:
      case sr::ErrorCode::DivisibilityError:
        return kUsage;
      default:
        return kViolated;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
