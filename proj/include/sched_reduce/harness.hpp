#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "io.hpp"
#include "reductions.hpp"
#include "rounding.hpp"
#include "solvers.hpp"

namespace sched_reduce {

enum class BoundKind { SandwichPlusOne, Rounding2L, Yes3n, NoFloor };

inline std::string_view bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::SandwichPlusOne: return "sandwich_plus_one";
    case BoundKind::Rounding2L: return "rounding_2L";
    case BoundKind::Yes3n: return "yes_3n";
    case BoundKind::NoFloor: return "no_floor";
  }
  return "unknown";
}

/// One certified bound. bound_holds is recomputed from the other fields by
/// `recompute`, except that a failed mapping step forces it to false.
struct GapRow {
  std::string instance_id;
  int n = 0;
  int m = 0;
  Rational opt_source = 0;
  Rational opt_target = 0;
  BoundKind bound_kind = BoundKind::SandwichPlusOne;
  bool bound_holds = false;
  std::int64_t solver_states = 0;
  std::int64_t wall_ms = 0;
  bool budget_exceeded = false;  // not a CSV column; drives the exit code
};

/// sandwich_plus_one: opt_source <= opt_target <= opt_source + 1.
/// rounding_2L: opt_source <= 2 opt_target.
/// yes_3n: opt_target <= 3n.
/// no_floor: opt_target >= (1 - 2/m) m n, i.e. delta = 1/k with k = m layers.
inline bool bound_from_numbers(const GapRow& row) {
  switch (row.bound_kind) {
    case BoundKind::SandwichPlusOne: return row.opt_source <= row.opt_target && row.opt_target <= row.opt_source + 1;
    case BoundKind::Rounding2L: return row.opt_source <= 2 * row.opt_target;
    case BoundKind::Yes3n: return row.opt_target <= 3 * row.n;
    case BoundKind::NoFloor: return row.opt_target >= (1 - Rational(2, row.m)) * row.m * row.n;
  }
  return false;
}

inline const char* kGapHeader = "instance_id,n,m,opt_source,opt_target,bound_kind,bound_holds,solver_states,wall_ms";

inline std::string csv_line(const GapRow& row) {
  std::ostringstream out;
  out << row.instance_id << ',' << row.n << ',' << row.m << ',' << to_string(row.opt_source) << ','
      << to_string(row.opt_target) << ',' << bound_kind_name(row.bound_kind) << ','
      << (row.bound_holds ? "true" : "false") << ',' << row.solver_states << ',' << row.wall_ms;
  return out.str();
}

inline std::string csv_table(std::vector<GapRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GapRow& a, const GapRow& b) { return a.instance_id < b.instance_id; });
  std::string out = std::string(kGapHeader) + "\n";
  for (const auto& row : rows) out += csv_line(row) + "\n";
  return out;
}

struct RoundtripOptions {
  SolveLimits limits;
  std::optional<BigInt> kappa_override;
  bool timing = false;
};

namespace detail {

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), begin_(std::chrono::steady_clock::now()) {}
  std::int64_t ms() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - begin_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point begin_;
};

}  // namespace detail

/// Solves I and its comm-delay image exactly, maps the source optimum
/// forward and the target optimum back, and checks both mapped schedules.
inline GapRow roundtrip_commdelay(const std::string& id, const UmpsInstance& inst, const RoundtripOptions& opt = {}) {
  detail::Stopwatch clock(opt.timing);
  GapRow row{id, inst.n(), inst.m()};
  row.bound_kind = BoundKind::SandwichPlusOne;
  const auto art = umps_to_commdelay(inst);
  const SolveResult src = solve_umps_exact(inst, opt.limits);
  const SolveResult dst = solve_commdelay_exact(art.output, opt.limits);
  row.opt_source = src.optimum;
  row.opt_target = dst.optimum;
  row.solver_states = src.states_explored + dst.states_explored;
  row.budget_exceeded = !src.proven_optimal || !dst.proven_optimal;

  bool maps_ok = true;
  const Schedule forward = forward_map_commdelay(art, src.schedule);
  maps_ok = maps_ok && validate_commdelay(art.output, forward).feasible() && makespan(forward) == src.optimum + 1;
  try {
    const Schedule back = backward_map_commdelay(art, dst.schedule);
    maps_ok = maps_ok && validate_umps(inst, back).feasible() && makespan(back) <= dst.optimum;
  } catch (const Error&) {
    maps_ok = false;
  }
  row.bound_holds = maps_ok && !row.budget_exceeded && bound_from_numbers(row);
  row.wall_ms = clock.ms();
  return row;
}

/// Maps an optimal UMPS schedule to the grouped related instance and rounds
/// it back. opt_target is the makespan L of the mapped schedule (the related
/// instance is too large to solve); the rounded schedule must be feasible
/// with makespan at most 2L.
inline GapRow roundtrip_related(const std::string& id, const UmpsInstance& inst, const RoundtripOptions& opt = {}) {
  detail::Stopwatch clock(opt.timing);
  GapRow row{id, inst.n(), inst.m()};
  row.bound_kind = BoundKind::Rounding2L;
  const auto art = umps_to_related(inst, opt.kappa_override);
  const SolveResult src = solve_umps_exact(inst, opt.limits);
  row.opt_source = src.optimum;
  row.solver_states = src.states_explored;
  row.budget_exceeded = !src.proven_optimal;
  const GroupedSchedule gs = forward_map_related(art, src.schedule);
  row.opt_target = makespan(gs);
  bool ok = validate_grouped(art.output, gs).feasible();
  try {
    const Schedule rounded = round_grouped_schedule(art, gs);
    ok = ok && validate_umps(inst, rounded).feasible() && makespan(rounded) <= 2 * row.opt_target;
  } catch (const Error&) {
    ok = false;
  }
  row.bound_holds = ok && !row.budget_exceeded && bound_from_numbers(row);
  row.wall_ms = clock.ms();
  return row;
}

/// With a certificate: yes_3n, opt_source is the certificate schedule's
/// makespan and opt_target the exact optimum when the instance fits the
/// limits (otherwise the certificate makespan). Without one the NO property
/// must verify: no_floor, opt_source is the floor (1 - 2 delta) k n and
/// opt_target the exact optimum. Rows use n = layer size and m = k.
inline GapRow roundtrip_kpartite(const std::string& id, const KPartiteInstance& g,
                                 const std::optional<KPartiteYesCertificate>& cert, const RoundtripOptions& opt = {}) {
  detail::Stopwatch clock(opt.timing);
  GapRow row{id, g.n(), g.k()};
  const UmpsInstance umps = kpartite_to_umps(g);
  if (cert) {
    row.bound_kind = BoundKind::Yes3n;
    const Schedule yes = kpartite_yes_schedule(g, *cert);
    bool ok = validate_umps(umps, yes).feasible();
    row.opt_source = makespan(yes);
    row.opt_target = row.opt_source;
    if (umps.n() <= opt.limits.max_jobs) {
      const SolveResult r = solve_umps_exact(umps, opt.limits);
      row.opt_target = r.optimum;
      row.solver_states = r.states_explored;
      row.budget_exceeded = !r.proven_optimal;
    }
    row.bound_holds = ok && !row.budget_exceeded && row.opt_target <= row.opt_source && row.opt_source <= 3 * g.n() &&
                      bound_from_numbers(row);
  } else {
    if (g.delta() != Rational(BigInt(1), BigInt(g.k()))) {
      fail(ErrorCode::InvalidInstance, "no_floor rows assume delta = 1/k");
    }
    if (!verify_no_property(g, opt.limits)) {
      fail(ErrorCode::InvalidCertificate, "instance has no YES certificate and fails the NO property");
    }
    row.bound_kind = BoundKind::NoFloor;
    row.opt_source = (1 - 2 * g.delta()) * g.k() * g.n();
    const SolveResult r = solve_umps_exact(umps, opt.limits);
    row.opt_target = r.optimum;
    row.solver_states = r.states_explored;
    row.budget_exceeded = !r.proven_optimal;
    row.bound_holds = !row.budget_exceeded && row.opt_target >= row.opt_source && bound_from_numbers(row);
  }
  row.wall_ms = clock.ms();
  return row;
}

enum class RoundtripMode { Commdelay, Related, Kpartite };

/// Runs the roundtrip matching a file's kind: umps files use `umps_mode`,
/// kpartite files always use the k-partite checks. Other kinds are skipped.
inline std::optional<GapRow> roundtrip_file(const std::string& id, const io::Json& doc, RoundtripMode umps_mode,
                                            const RoundtripOptions& opt) {
  const std::string kind = io::kind_of(doc);
  if (kind == "umps") {
    const UmpsInstance inst = io::umps_from_json(doc);
    if (umps_mode == RoundtripMode::Related) return roundtrip_related(id, inst, opt);
    if (umps_mode == RoundtripMode::Kpartite) fail(ErrorCode::InvalidInstance, "kpartite mode needs a kpartite file");
    return roundtrip_commdelay(id, inst, opt);
  }
  if (kind == "kpartite") {
    const auto file = io::kpartite_from_json(doc);
    return roundtrip_kpartite(id, file.instance, file.certificate, opt);
  }
  return std::nullopt;
}

/// Every *.json file directly inside `dir`, in name order.
inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) fail(ErrorCode::Io, dir.string() + " is not a directory");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<GapRow> bench(const std::filesystem::path& dir, RoundtripMode umps_mode, const RoundtripOptions& opt) {
  std::vector<GapRow> rows;
  for (const auto& path : corpus_files(dir)) {
    const io::Json doc = io::read_file(path.string());
    if (auto row = roundtrip_file(path.stem().string(), doc, umps_mode, opt)) rows.push_back(*row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GapRow& a, const GapRow& b) { return a.instance_id < b.instance_id; });
  return rows;
}

}  // namespace sched_reduce
