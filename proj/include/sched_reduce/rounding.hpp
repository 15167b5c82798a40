#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "model.hpp"
#include "reductions.hpp"

namespace sched_reduce {

/// Mass x(l, t) of unit job l processed in unit slot t = [t-1, t], for
/// t = 1..horizon.
class FractionalSchedule {
 public:
  FractionalSchedule() = default;

  FractionalSchedule(UmpsInstance umps, int horizon, Rational gamma)
      : umps_(std::move(umps)), horizon_(horizon), gamma_(std::move(gamma)) {
    if (horizon_ < 1) fail(ErrorCode::InvalidInstance, "fractional schedule needs a positive horizon");
    if (gamma_ < 0 || gamma_ >= 1) fail(ErrorCode::InvalidInstance, "gamma must lie in [0, 1)");
    mass_.assign(umps_.n(), std::vector<Rational>(horizon_, Rational(0)));
  }

  const UmpsInstance& umps() const { return umps_; }
  int horizon() const { return horizon_; }
  const Rational& gamma() const { return gamma_; }
  int job_count() const { return umps_.n(); }

  const Rational& mass(JobId l, int t) const { return mass_.at(l - 1).at(t - 1); }
  void set_mass(JobId l, int t, Rational value) {
    if (value < 0 || value > 1) fail(ErrorCode::InvalidInstance, "mass must lie in [0, 1]");
    mass_.at(l - 1).at(t - 1) = std::move(value);
  }
  void add_mass(JobId l, int t, const Rational& delta) { set_mass(l, t, mass(l, t) + delta); }

  Rational total(JobId l) const {
    Rational sum = 0;
    for (const auto& x : mass_.at(l - 1)) sum += x;
    return sum;
  }
  Rational load(MachineId i, int t) const {
    Rational sum = 0;
    for (JobId l = 1; l <= job_count(); ++l) {
      if (umps_.home(l) == i) sum += mass(l, t);
    }
    return sum;
  }

  bool operator==(const FractionalSchedule&) const = default;

 private:
  UmpsInstance umps_;
  int horizon_ = 0;
  Rational gamma_;
  std::vector<std::vector<Rational>> mass_;
};

/// First and last slot with positive mass; both 0 for a job with no mass.
struct Window {
  int start = 0;
  int end = 0;
  bool operator==(const Window&) const = default;
};

using WindowTable = std::vector<Window>;

inline Window window_of(const FractionalSchedule& fs, JobId l) {
  Window w;
  for (int t = 1; t <= fs.horizon(); ++t) {
    if (fs.mass(l, t) > 0) {
      if (w.start == 0) w.start = t;
      w.end = t;
    }
  }
  return w;
}

inline WindowTable windows(const FractionalSchedule& fs) {
  WindowTable table;
  for (JobId l = 1; l <= fs.job_count(); ++l) table.push_back(window_of(fs, l));
  return table;
}

struct PropertyCheck {
  bool almost_full = true;  // sum_t x(l,t) >= 1 - gamma
  bool capacity = true;     // per (machine, slot) load <= 1
  bool separation = true;   // l1 < l2 => l2 has no mass at or before any slot of l1
  std::string detail;

  bool ok() const { return almost_full && capacity && separation; }
};

inline PropertyCheck check_properties(const FractionalSchedule& fs) {
  PropertyCheck out;
  for (JobId l = 1; l <= fs.job_count(); ++l) {
    if (fs.total(l) < 1 - fs.gamma()) {
      out.almost_full = false;
      out.detail += "job " + std::to_string(l) + " only " + to_string(fs.total(l)) + " processed; ";
    }
  }
  for (MachineId i = 1; i <= fs.umps().m(); ++i) {
    for (int t = 1; t <= fs.horizon(); ++t) {
      if (fs.load(i, t) > 1) {
        out.capacity = false;
        out.detail += "machine " + std::to_string(i) + " over capacity at slot " + std::to_string(t) + "; ";
      }
    }
  }
  const auto win = windows(fs);
  for (const Edge& e : fs.umps().dag().edges()) {
    const Window& a = win[e.from - 1];
    const Window& b = win[e.to - 1];
    if (a.end != 0 && b.start != 0 && b.start <= a.end) {
      out.separation = false;
      out.detail += "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " not separated; ";
    }
  }
  return out;
}

inline void require_properties(const FractionalSchedule& fs, const std::string& where) {
  auto check = check_properties(fs);
  if (!check.ok()) fail(ErrorCode::PropertyViolated, where + ": " + check.detail);
}

/// P(i,t): mass processed up to slot t by jobs of machine i that end after t.
inline Rational partial_load(const FractionalSchedule& fs, MachineId i, int t) {
  Rational sum = 0;
  for (JobId l = 1; l <= fs.job_count(); ++l) {
    if (fs.umps().home(l) != i) continue;
    if (window_of(fs, l).end <= t) continue;
    for (int s = 1; s <= t; ++s) sum += fs.mass(l, s);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Misplaced-job stripping
// ---------------------------------------------------------------------------

/// Fraction of each job group processed outside its home machine group.
inline std::vector<Rational> misplaced_fractions(const RelatedReductionArtifact& art, const GroupedSchedule& gs) {
  std::vector<BigInt> misplaced(art.source.n(), 0);
  for (const auto& b : gs.blocks) {
    const int home = art.machine_group_of.at(art.source.home(art.origin.at(b.job_group - 1)) - 1);
    if (b.machine_group != home) misplaced[b.job_group - 1] += b.count;
  }
  std::vector<Rational> out;
  for (int g = 1; g <= art.source.n(); ++g) {
    out.push_back(Rational(misplaced[g - 1], art.output.job_group(g).multiplicity));
  }
  return out;
}

/// Drops every member run off its home machine group and records, per slot,
/// the fraction of each job group run on the home group. Home members take
/// unit time; a member straddling a slot boundary contributes its overlap.
inline FractionalSchedule strip_misplaced(const RelatedReductionArtifact& art, const GroupedSchedule& gs) {
  auto report = validate_grouped(art.output, gs);
  if (!report.feasible()) fail(ErrorCode::InfeasibleInput, "grouped schedule is infeasible:\n" + report.describe());
  const Rational horizon_exact = makespan(gs);
  const int n = art.source.n();
  if (horizon_exact > n) {
    fail(ErrorCode::InvalidInstance, "makespan " + to_string(horizon_exact) + " exceeds n; the serial schedule is better");
  }
  const Rational gamma = art.gamma();
  if (art.soundness_guaranteed) {
    const auto fractions = misplaced_fractions(art, gs);
    for (int g = 1; g <= n; ++g) {
      if (fractions[g - 1] > gamma) {
        fail(ErrorCode::MisplacedFractionExceeded,
             "job " + std::to_string(art.origin[g - 1]) + " misplaced fraction " + to_string(fractions[g - 1]));
      }
    }
  }
  const BigInt ceiling = (boost::multiprecision::numerator(horizon_exact) + boost::multiprecision::denominator(horizon_exact) - 1) /
                         boost::multiprecision::denominator(horizon_exact);
  const int horizon = std::max(1, ceiling.convert_to<int>());
  FractionalSchedule fs(art.source, horizon, gamma);
  std::vector<std::vector<Rational>> acc(n, std::vector<Rational>(horizon, Rational(0)));
  for (const auto& b : gs.blocks) {
    const JobId l = art.origin.at(b.job_group - 1);
    const int home = art.machine_group_of.at(art.source.home(l) - 1);
    if (b.machine_group != home) continue;
    for (int t = 1; t <= horizon; ++t) {
      const Rational lo = std::max(b.start, Rational(t - 1));
      const Rational hi = std::min(b.end, Rational(t));
      if (hi > lo) acc[l - 1][t - 1] += Rational(b.count) * (hi - lo);
    }
  }
  for (JobId l = 1; l <= n; ++l) {
    const BigInt& size = art.output.job_group(l).multiplicity;
    for (int t = 1; t <= horizon; ++t) fs.set_mass(l, t, acc[l - 1][t - 1] / size);
  }
  require_properties(fs, "stripped schedule");
  return fs;
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

/// Trace lines look like
///   swap machine=1 jobs=1,2 slot=1 source=2 mass=1/2
///   fill machine=1 job=1 slot=1 source=3 mass=1/2
/// `slot` receives the mass of the first job, `source` gives it up.
using TraceSink = std::vector<std::string>;

inline std::int64_t default_step_budget(const FractionalSchedule& fs) {
  const std::int64_t n = fs.job_count();
  const std::int64_t horizon = fs.horizon();
  return n * n * horizon * horizon;
}

namespace detail {

inline int first_positive_after(const FractionalSchedule& fs, JobId l, int t) {
  for (int s = t + 1; s <= fs.horizon(); ++s) {
    if (fs.mass(l, s) > 0) return s;
  }
  return 0;
}

inline bool ends_before(const WindowTable& win, JobId a, JobId b) {
  return std::make_pair(win[a - 1].end, a) < std::make_pair(win[b - 1].end, b);
}

struct SwapStep {
  MachineId machine;
  JobId first;
  JobId second;
  int slot;
};

/// Lexicographically smallest (slot, machine, l1, l2) satisfying C1 and C2.
inline std::optional<SwapStep> find_swap(const FractionalSchedule& fs, const WindowTable& win,
                                         const std::vector<std::vector<JobId>>& by_machine) {
  for (int t = 1; t <= fs.horizon(); ++t) {
    for (MachineId i = 1; i <= fs.umps().m(); ++i) {
      for (JobId l1 : by_machine[i - 1]) {
        if (!(win[l1 - 1].start <= t && t < win[l1 - 1].end)) continue;
        for (JobId l2 : by_machine[i - 1]) {
          if (l2 == l1 || !ends_before(win, l1, l2)) continue;
          if (fs.mass(l2, t) > 0) return SwapStep{i, l1, l2, t};
        }
      }
    }
  }
  return std::nullopt;
}

struct FillStep {
  MachineId machine;
  JobId job;
  int slot;
};

/// Lexicographically smallest (slot, machine, l) satisfying D1 and D2.
inline std::optional<FillStep> find_fill(const FractionalSchedule& fs, const WindowTable& win,
                                         const std::vector<std::vector<JobId>>& by_machine) {
  for (int t = 1; t <= fs.horizon(); ++t) {
    for (MachineId i = 1; i <= fs.umps().m(); ++i) {
      bool slack_known = false;
      bool has_slack = false;
      for (JobId l : by_machine[i - 1]) {
        if (!(win[l - 1].start <= t && t < win[l - 1].end)) continue;
        if (!slack_known) {
          has_slack = fs.load(i, t) < 1;
          slack_known = true;
        }
        if (has_slack) return FillStep{i, l, t};
        break;
      }
    }
  }
  return std::nullopt;
}

inline std::vector<std::vector<JobId>> jobs_by_machine(const UmpsInstance& umps) {
  std::vector<std::vector<JobId>> out(umps.m());
  for (JobId l = 1; l <= umps.n(); ++l) out[umps.home(l) - 1].push_back(l);
  return out;
}

inline void apply_swap(FractionalSchedule& fs, WindowTable& win, const SwapStep& step, TraceSink* trace) {
  const int t = step.slot;
  const int source = first_positive_after(fs, step.first, t);
  const Rational y = std::min(fs.mass(step.first, source), fs.mass(step.second, t));
  fs.add_mass(step.first, source, -y);
  fs.add_mass(step.first, t, y);
  fs.add_mass(step.second, source, y);
  fs.add_mass(step.second, t, -y);
  win[step.first - 1] = window_of(fs, step.first);
  win[step.second - 1] = window_of(fs, step.second);
  if (trace) {
    trace->push_back("swap machine=" + std::to_string(step.machine) + " jobs=" + std::to_string(step.first) + "," +
                     std::to_string(step.second) + " slot=" + std::to_string(t) + " source=" + std::to_string(source) +
                     " mass=" + to_string(y));
  }
}

inline void apply_fill(FractionalSchedule& fs, WindowTable& win, const FillStep& step, TraceSink* trace) {
  const int t = step.slot;
  const int source = first_positive_after(fs, step.job, t);
  const Rational y = std::min(fs.mass(step.job, source), 1 - fs.load(step.machine, t));
  fs.add_mass(step.job, t, y);
  fs.add_mass(step.job, source, -y);
  win[step.job - 1] = window_of(fs, step.job);
  if (trace) {
    trace->push_back("fill machine=" + std::to_string(step.machine) + " job=" + std::to_string(step.job) +
                     " slot=" + std::to_string(t) + " source=" + std::to_string(source) + " mass=" + to_string(y));
  }
}

}  // namespace detail

/// Repeatedly moves mass of a later-ending job out of a slot where an
/// earlier-ending job could still run, until no (C1, C2) triple is left.
/// Throws IterationBudgetExceeded if some machine needs more than
/// `budget_per_machine` steps (default n^2 L^2).
inline FractionalSchedule swap_pass(FractionalSchedule fs, TraceSink* trace = nullptr,
                                    std::optional<std::int64_t> budget_per_machine = std::nullopt) {
  const std::int64_t budget = budget_per_machine.value_or(default_step_budget(fs));
  const auto by_machine = detail::jobs_by_machine(fs.umps());
  std::vector<std::int64_t> steps(fs.umps().m(), 0);
  WindowTable win = windows(fs);
  while (auto step = detail::find_swap(fs, win, by_machine)) {
    if (++steps[step->machine - 1] > budget) {
      fail(ErrorCode::IterationBudgetExceeded, "swap pass on machine " + std::to_string(step->machine));
    }
    detail::apply_swap(fs, win, *step, trace);
  }
  return fs;
}

/// Pulls mass of a job into an under-used slot inside its window, taking it
/// from the next slot where the job has mass.
inline FractionalSchedule fill_pass(FractionalSchedule fs, TraceSink* trace = nullptr,
                                    std::optional<std::int64_t> budget_per_machine = std::nullopt) {
  const std::int64_t budget = budget_per_machine.value_or(default_step_budget(fs));
  const auto by_machine = detail::jobs_by_machine(fs.umps());
  std::vector<std::int64_t> steps(fs.umps().m(), 0);
  WindowTable win = windows(fs);
  while (auto step = detail::find_fill(fs, win, by_machine)) {
    if (++steps[step->machine - 1] > budget) {
      fail(ErrorCode::IterationBudgetExceeded, "fill pass on machine " + std::to_string(step->machine));
    }
    detail::apply_fill(fs, win, *step, trace);
  }
  return fs;
}

/// Re-applies one trace line produced by swap_pass or fill_pass.
inline void replay_step(FractionalSchedule& fs, const std::string& line) {
  std::istringstream in(line);
  std::string kind, machine, jobs, slot, source, mass;
  in >> kind >> machine >> jobs >> slot >> source >> mass;
  auto value = [&](const std::string& field, const std::string& key) {
    if (field.rfind(key + "=", 0) != 0) fail(ErrorCode::Parse, "bad trace field '" + field + "'");
    return field.substr(key.size() + 1);
  };
  const int t = std::stoi(value(slot, "slot"));
  const int s = std::stoi(value(source, "source"));
  const Rational y = parse_rational(value(mass, "mass"));
  if (kind == "swap") {
    const std::string pair = value(jobs, "jobs");
    const auto comma = pair.find(',');
    const JobId l1 = std::stoi(pair.substr(0, comma));
    const JobId l2 = std::stoi(pair.substr(comma + 1));
    fs.add_mass(l1, s, -y);
    fs.add_mass(l1, t, y);
    fs.add_mass(l2, s, y);
    fs.add_mass(l2, t, -y);
  } else if (kind == "fill") {
    const JobId l = std::stoi(value(jobs, "job"));
    fs.add_mass(l, t, y);
    fs.add_mass(l, s, -y);
  } else {
    fail(ErrorCode::Parse, "unknown trace step '" + kind + "'");
  }
}

/// Direct construction of the canonical form: on every machine and slot the
/// jobs whose window covers the slot are served in (end slot, index) order,
/// each taking as much of its remaining mass as the slot still holds.
inline FractionalSchedule greedy_canonical(const FractionalSchedule& fs) {
  require_properties(fs, "greedy_canonical input");
  const WindowTable win = windows(fs);
  FractionalSchedule out(fs.umps(), fs.horizon(), fs.gamma());
  std::vector<Rational> remaining;
  for (JobId l = 1; l <= fs.job_count(); ++l) remaining.push_back(fs.total(l));
  const auto by_machine = detail::jobs_by_machine(fs.umps());
  for (MachineId i = 1; i <= fs.umps().m(); ++i) {
    std::vector<JobId> jobs = by_machine[i - 1];
    std::sort(jobs.begin(), jobs.end(), [&](JobId a, JobId b) { return detail::ends_before(win, a, b); });
    for (int t = 1; t <= fs.horizon(); ++t) {
      Rational capacity = 1;
      for (JobId l : jobs) {
        if (!(win[l - 1].start <= t && t <= win[l - 1].end)) continue;
        const Rational take = std::min(capacity, remaining[l - 1]);
        if (take <= 0) continue;
        out.set_mass(l, t, take);
        remaining[l - 1] -= take;
        capacity -= take;
      }
    }
  }
  for (JobId l = 1; l <= fs.job_count(); ++l) {
    if (remaining[l - 1] != 0) fail(ErrorCode::PropertyViolated, "greedy could not place job " + std::to_string(l));
  }
  return out;
}

/// Runs swap and fill steps in one left-to-right scan: each step is the
/// applicable swap or fill with the smallest slot, a swap winning when both
/// share a slot. Stops when neither applies. If some machine exceeds its
/// step budget the greedy canonical form of the input is returned instead.
inline FractionalSchedule canonicalize(const FractionalSchedule& fs, TraceSink* trace = nullptr,
                                       bool* used_fallback = nullptr,
                                       std::optional<std::int64_t> budget_per_machine = std::nullopt) {
  require_properties(fs, "canonicalize input");
  if (used_fallback) *used_fallback = false;
  const std::int64_t budget = budget_per_machine.value_or(default_step_budget(fs));
  const auto by_machine = detail::jobs_by_machine(fs.umps());
  std::vector<std::int64_t> steps(fs.umps().m(), 0);
  FractionalSchedule current = fs;
  WindowTable win = windows(current);
  TraceSink local;
  for (;;) {
    const auto swap = detail::find_swap(current, win, by_machine);
    const auto fill = detail::find_fill(current, win, by_machine);
    if (!swap && !fill) break;
    const bool do_swap = swap && (!fill || swap->slot <= fill->slot);
    const MachineId machine = do_swap ? swap->machine : fill->machine;
    if (++steps[machine - 1] > budget) {
      if (used_fallback) *used_fallback = true;
      return greedy_canonical(fs);
    }
    if (do_swap) {
      detail::apply_swap(current, win, *swap, trace ? &local : nullptr);
    } else {
      detail::apply_fill(current, win, *fill, trace ? &local : nullptr);
    }
  }
  if (trace) trace->insert(trace->end(), local.begin(), local.end());
  return current;
}

// ---------------------------------------------------------------------------
// Integral extraction
// ---------------------------------------------------------------------------

/// Jobs with positive mass on machine i in slot t.
inline std::vector<JobId> active_jobs(const FractionalSchedule& fs, MachineId i, int t) {
  std::vector<JobId> out;
  for (JobId l = 1; l <= fs.job_count(); ++l) {
    if (fs.umps().home(l) == i && fs.mass(l, t) > 0) out.push_back(l);
  }
  return out;
}

/// Doubles every slot: slot t becomes [2t-2, 2t-1] and [2t-1, 2t]. Each job
/// is placed once, in the slot holding its largest mass (earliest on ties);
/// two jobs sharing a slot go in (end slot, index) order.
inline Schedule extract_integral(const FractionalSchedule& fs) {
  const int n = fs.job_count();
  if (!fs.umps().unit_lengths()) fail(ErrorCode::NonUnitLengths, "extraction needs unit jobs");
  if (fs.gamma() * fs.horizon() > Rational(BigInt(1), BigInt(10) * n)) {
    fail(ErrorCode::PreconditionGamma, "gamma * L = " + to_string(fs.gamma() * fs.horizon()) + " exceeds 1/(10n)");
  }
  require_properties(fs, "extract_integral input");
  for (MachineId i = 1; i <= fs.umps().m(); ++i) {
    for (int t = 1; t <= fs.horizon(); ++t) {
      if (partial_load(fs, i, t) > fs.gamma() * t) {
        fail(ErrorCode::PropertyViolated, "partial load above gamma*t on machine " + std::to_string(i) + " slot " +
                                              std::to_string(t));
      }
      if (active_jobs(fs, i, t).size() > 2) {
        fail(ErrorCode::TooManyJobsPerSlot, "machine " + std::to_string(i) + " slot " + std::to_string(t));
      }
    }
  }
  const WindowTable win = windows(fs);
  std::map<std::pair<MachineId, int>, std::vector<JobId>> slot_jobs;
  for (JobId l = 1; l <= n; ++l) {
    int best = 0;
    for (int t = 1; t <= fs.horizon(); ++t) {
      if (fs.mass(l, t) > 0 && (best == 0 || fs.mass(l, t) > fs.mass(l, best))) best = t;
    }
    if (best == 0) fail(ErrorCode::PropertyViolated, "job " + std::to_string(l) + " has no mass");
    slot_jobs[{fs.umps().home(l), best}].push_back(l);
  }
  Schedule out;
  for (auto& [key, jobs] : slot_jobs) {
    std::sort(jobs.begin(), jobs.end(), [&](JobId a, JobId b) { return detail::ends_before(win, a, b); });
    const auto [machine, t] = key;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const std::int64_t begin = 2 * static_cast<std::int64_t>(t) - 2 + static_cast<std::int64_t>(k);
      out.place(jobs[k], machine, Rational(begin), Rational(begin + 1));
    }
  }
  auto report = validate_umps(fs.umps(), out);
  if (!report.feasible()) fail(ErrorCode::PropertyViolated, "extracted schedule infeasible:\n" + report.describe());
  return out;
}

/// strip -> canonicalize -> extract.
inline Schedule round_grouped_schedule(const RelatedReductionArtifact& art, const GroupedSchedule& gs) {
  return extract_integral(canonicalize(strip_misplaced(art, gs)));
}

}  // namespace sched_reduce
