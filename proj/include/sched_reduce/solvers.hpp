#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "model.hpp"

namespace sched_reduce {

struct SolveLimits {
  int max_jobs = 10;
  std::int64_t max_states = 50'000'000;
  double time_budget = 120.0;  // seconds
};

struct SolveResult {
  Rational optimum = 0;
  Schedule schedule;
  bool proven_optimal = false;
  std::int64_t states_explored = 0;
};

namespace detail {

// Branch and bound over semi-active schedules. A schedule is semi-active
// when, for its machine assignment and per-machine orders, every job starts
// as early as its machine and its predecessors allow. Every such schedule is
// generated exactly once by placing jobs in increasing (start, job) order,
// each appended to the end of its machine, so the search only accepts
// placements that keep that order.
template <class T>
struct SearchProblem {
  int n = 0;
  int machine_count = 0;
  std::vector<std::vector<std::pair<int, T>>> preds;  // (predecessor, delay), 0-based
  std::vector<std::vector<int>> succs;
  std::vector<std::vector<std::optional<T>>> duration;  // [job][machine]; nullopt = not allowed
  std::vector<int> machine_class;                        // empty machines of one class are interchangeable
  bool single_machine_jobs = false;                      // enables the per-machine load bound
};

template <class T>
struct Placement {
  int machine = -1;
  T start{};
  T end{};
};

template <class T>
class BranchAndBound {
 public:
  BranchAndBound(const SearchProblem<T>& p, const SolveLimits& lim) : p_(p), lim_(lim) {
    order_ = topo();
    min_dur_.resize(p_.n);
    for (int j = 0; j < p_.n; ++j) {
      std::optional<T> best;
      for (int i = 0; i < p_.machine_count; ++i) {
        if (p_.duration[j][i] && (!best || *p_.duration[j][i] < *best)) best = p_.duration[j][i];
      }
      if (!best) fail(ErrorCode::InvalidInstance, "job " + std::to_string(j + 1) + " has no allowed machine");
      min_dur_[j] = *best;
    }
    tail_.assign(p_.n, T{});
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      T after{};
      for (int s : p_.succs[*it]) after = std::max(after, tail_[s]);
      tail_[*it] = min_dur_[*it] + after;
    }
  }

  /// Searches for a schedule strictly shorter than the seed.
  std::pair<std::vector<Placement<T>>, bool> run(std::vector<Placement<T>> seed, T seed_makespan) {
    best_ = std::move(seed);
    best_makespan_ = seed_makespan;
    place_.assign(p_.n, Placement<T>{});
    placed_.assign(p_.n, false);
    free_.assign(p_.machine_count, T{});
    used_.assign(p_.machine_count, 0);
    started_ = std::chrono::steady_clock::now();
    aborted_ = false;
    dfs(0, T{}, -1, T{});
    return {best_, !aborted_};
  }

  std::int64_t states() const { return states_; }

 private:
  std::vector<int> topo() const {
    std::vector<int> indeg(p_.n, 0), out;
    for (int j = 0; j < p_.n; ++j) indeg[j] = static_cast<int>(p_.preds[j].size());
    for (int j = 0; j < p_.n; ++j) {
      if (indeg[j] == 0) out.push_back(j);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (int s : p_.succs[out[k]]) {
        if (--indeg[s] == 0) out.push_back(s);
      }
    }
    return out;
  }

  bool out_of_budget() {
    if (states_ > lim_.max_states) return true;
    if ((states_ & 1023) == 0) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started_;
      if (spent.count() > lim_.time_budget) return true;
    }
    return false;
  }

  T lower_bound(T makespan, T last_start) const {
    T bound = makespan;
    std::vector<T> head(p_.n, T{});
    for (int j : order_) {
      if (placed_[j]) continue;
      T h = last_start;
      for (const auto& [u, delay] : p_.preds[j]) {
        h = std::max(h, placed_[u] ? place_[u].end : T(head[u] + min_dur_[u]));
      }
      head[j] = h;
      bound = std::max(bound, T(h + tail_[j]));
    }
    if (p_.single_machine_jobs) {
      for (int i = 0; i < p_.machine_count; ++i) {
        bool any = false;
        T first{}, load{}, after{};
        for (int j = 0; j < p_.n; ++j) {
          if (placed_[j] || !p_.duration[j][i]) continue;
          const T rest = tail_[j] - min_dur_[j];
          if (!any || head[j] < first) first = head[j];
          if (!any || rest < after) after = rest;
          load += *p_.duration[j][i];
          any = true;
        }
        if (any) bound = std::max(bound, T(std::max({first, free_[i], last_start}) + load + after));
      }
    }
    return bound;
  }

  void dfs(int depth, T makespan, int last_job, T last_start) {
    ++states_;
    if (aborted_ || out_of_budget()) {
      aborted_ = true;
      return;
    }
    if (depth == p_.n) {
      if (makespan < best_makespan_) {
        best_makespan_ = makespan;
        best_ = place_;
      }
      return;
    }
    if (lower_bound(makespan, last_start) >= best_makespan_) return;

    struct Child {
      T start;
      int job;
      int machine;
      T end;
    };
    std::vector<Child> children;
    for (int j = 0; j < p_.n; ++j) {
      if (placed_[j]) continue;
      bool ready = true;
      for (const auto& pd : p_.preds[j]) ready = ready && placed_[pd.first];
      if (!ready) continue;
      std::vector<bool> class_tried(p_.machine_count + 1, false);
      for (int i = 0; i < p_.machine_count; ++i) {
        if (!p_.duration[j][i]) continue;
        if (used_[i] == 0) {
          const int cls = p_.machine_class[i];
          if (class_tried[cls]) continue;
          class_tried[cls] = true;
        }
        T start = free_[i];
        for (const auto& [u, delay] : p_.preds[j]) {
          start = std::max(start, T(place_[u].end + (place_[u].machine == i ? T{} : delay)));
        }
        if (std::tie(start, j) < std::tie(last_start, last_job)) continue;
        const T end = start + *p_.duration[j][i];
        if (end + tail_[j] - min_dur_[j] >= best_makespan_) continue;
        children.push_back({start, j, i, end});
      }
    }
    std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
      return std::tie(a.start, a.job, a.machine) < std::tie(b.start, b.job, b.machine);
    });
    for (const Child& c : children) {
      const T saved_free = free_[c.machine];
      placed_[c.job] = true;
      place_[c.job] = {c.machine, c.start, c.end};
      free_[c.machine] = c.end;
      ++used_[c.machine];
      dfs(depth + 1, std::max(makespan, c.end), c.job, c.start);
      --used_[c.machine];
      free_[c.machine] = saved_free;
      placed_[c.job] = false;
      if (aborted_) return;
    }
  }

  const SearchProblem<T>& p_;
  SolveLimits lim_;
  std::vector<int> order_;
  std::vector<T> min_dur_, tail_;
  std::vector<Placement<T>> place_, best_;
  std::vector<bool> placed_;
  std::vector<T> free_;
  std::vector<int> used_;
  T best_makespan_{};
  std::int64_t states_ = 0;
  bool aborted_ = false;
  std::chrono::steady_clock::time_point started_;
};

inline Rational to_rational(std::int64_t v) { return Rational(v); }
inline Rational to_rational(const Rational& v) { return v; }

template <class T>
SolveResult finish(BranchAndBound<T>& bb, std::vector<Placement<T>> seed, T seed_makespan,
                   const std::vector<int>& machine_labels) {
  auto [best, complete] = bb.run(std::move(seed), seed_makespan);
  SolveResult result;
  for (std::size_t j = 0; j < best.size(); ++j) {
    result.schedule.place(static_cast<JobId>(j) + 1, machine_labels[best[j].machine], to_rational(best[j].start),
                          to_rational(best[j].end));
  }
  result.optimum = makespan(result.schedule);
  result.proven_optimal = complete;
  result.states_explored = bb.states();
  return result;
}

inline void require_job_cap(int n, const SolveLimits& lim) {
  if (n > lim.max_jobs) {
    fail(ErrorCode::BudgetExceeded, std::to_string(n) + " jobs exceed max_jobs = " + std::to_string(lim.max_jobs));
  }
}

/// Relabels machines in order of first use, so unbounded pools get
/// machines 1, 2, ... with no gaps.
template <class T>
std::vector<int> first_use_labels(const std::vector<Placement<T>>& placements, int machine_count) {
  std::vector<bool> seen(machine_count, false);
  std::vector<int> order(placements.size());
  for (std::size_t j = 0; j < placements.size(); ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(placements[a].start, a) < std::tie(placements[b].start, b);
  });
  std::vector<int> labels(machine_count, 0);
  int next = 1;
  for (int j : order) {
    const int i = placements[j].machine;
    if (!seen[i]) {
      seen[i] = true;
      labels[i] = next++;
    }
  }
  return labels;
}

}  // namespace detail

/// Home-machine list scheduling: whenever a machine is idle it starts its
/// highest-priority job whose predecessors have all finished.
inline Schedule greedy_umps(const UmpsInstance& inst, const std::vector<JobId>& priority) {
  const int n = inst.n();
  if (static_cast<int>(priority.size()) != n) fail(ErrorCode::InvalidInstance, "priority must list every job once");
  std::vector<int> rank(n + 1, -1);
  for (std::size_t k = 0; k < priority.size(); ++k) {
    const JobId l = priority[k];
    if (l < 1 || l > n || rank[l] != -1) fail(ErrorCode::InvalidInstance, "priority must list every job once");
    rank[l] = static_cast<int>(k);
  }
  Schedule sched;
  std::vector<std::int64_t> end(n + 1, -1);
  std::vector<std::int64_t> busy_until(inst.m() + 1, 0);
  std::int64_t now = 0;
  int done = 0;
  while (done < n) {
    for (MachineId i = 1; i <= inst.m(); ++i) {
      if (busy_until[i] > now) continue;
      JobId pick = 0;
      for (JobId l : inst.jobs_on(i)) {
        if (end[l] != -1) continue;
        bool ready = true;
        for (JobId u : inst.dag().predecessors(l)) ready = ready && end[u] != -1 && end[u] <= now;
        if (ready && (pick == 0 || rank[l] < rank[pick])) pick = l;
      }
      if (pick == 0) continue;
      end[pick] = now + inst.length(pick);
      busy_until[i] = end[pick];
      sched.place(pick, i, Rational(now), Rational(end[pick]));
      ++done;
    }
    std::int64_t next = std::numeric_limits<std::int64_t>::max();
    for (MachineId i = 1; i <= inst.m(); ++i) {
      if (busy_until[i] > now) next = std::min(next, busy_until[i]);
    }
    if (next == std::numeric_limits<std::int64_t>::max()) {
      if (done < n) fail(ErrorCode::InvalidInstance, "list scheduling stalled");
      break;
    }
    now = next;
  }
  return sched;
}

inline Schedule greedy_umps(const UmpsInstance& inst) { return greedy_umps(inst, inst.dag().order()); }

/// Takes jobs in priority order and appends each to the machine where it
/// can start earliest (lowest machine on ties), honouring delays between
/// machines. Uses `machine_count` machines.
inline Schedule list_schedule_commdelay(const CommDelayInstance& inst, int machine_count,
                                        const std::vector<JobId>& priority) {
  const int n = inst.n_total();
  if (machine_count < 1) fail(ErrorCode::InvalidInstance, "need at least one machine");
  if (static_cast<int>(priority.size()) != n) fail(ErrorCode::InvalidInstance, "priority must list every job once");
  std::vector<int> pos(n + 1, -1);
  for (std::size_t k = 0; k < priority.size(); ++k) {
    if (priority[k] < 1 || priority[k] > n || pos[priority[k]] != -1) {
      fail(ErrorCode::InvalidInstance, "priority must list every job once");
    }
    pos[priority[k]] = static_cast<int>(k);
  }
  for (const Edge& e : inst.dag().edges()) {
    if (pos[e.from] > pos[e.to]) fail(ErrorCode::InvalidInstance, "priority is not a topological order");
  }
  Schedule sched;
  std::vector<std::int64_t> free(machine_count + 1, 0), end(n + 1, 0);
  std::vector<int> machine_of(n + 1, 0);
  for (JobId j : priority) {
    MachineId best = 0;
    std::int64_t best_start = 0;
    for (MachineId i = 1; i <= machine_count; ++i) {
      std::int64_t start = free[i];
      for (JobId u : inst.dag().predecessors(j)) {
        start = std::max(start, end[u] + (machine_of[u] == i ? 0 : inst.delay(u, j)));
      }
      if (best == 0 || start < best_start) {
        best = i;
        best_start = start;
      }
    }
    end[j] = best_start + inst.length(j);
    machine_of[j] = best;
    free[best] = end[j];
    sched.place(j, best, Rational(best_start), Rational(end[j]));
  }
  return sched;
}

inline Schedule list_schedule_commdelay(const CommDelayInstance& inst, int machine_count) {
  return list_schedule_commdelay(inst, machine_count, inst.dag().order());
}

inline SolveResult solve_umps_exact(const UmpsInstance& inst, const SolveLimits& lim = {}) {
  detail::require_job_cap(inst.n(), lim);
  detail::SearchProblem<std::int64_t> p;
  p.n = inst.n();
  p.machine_count = inst.m();
  p.preds.resize(p.n);
  p.succs.resize(p.n);
  for (const Edge& e : inst.dag().edges()) {
    p.preds[e.to - 1].push_back({e.from - 1, 0});
    p.succs[e.from - 1].push_back(e.to - 1);
  }
  p.duration.assign(p.n, std::vector<std::optional<std::int64_t>>(p.machine_count));
  for (JobId l = 1; l <= p.n; ++l) p.duration[l - 1][inst.home(l) - 1] = inst.length(l);
  for (int i = 0; i < p.machine_count; ++i) p.machine_class.push_back(i);
  p.single_machine_jobs = true;

  const Schedule seed_sched = greedy_umps(inst);
  std::vector<detail::Placement<std::int64_t>> seed(p.n);
  for (const auto& [job, e] : seed_sched.entries) {
    seed[job - 1] = {e.machine - 1, e.start.convert_to<std::int64_t>(), e.end.convert_to<std::int64_t>()};
  }
  detail::BranchAndBound<std::int64_t> bb(p, lim);
  std::vector<int> labels(p.machine_count);
  for (int i = 0; i < p.machine_count; ++i) labels[i] = i + 1;
  return detail::finish(bb, seed, makespan(seed_sched).convert_to<std::int64_t>(), labels);
}

/// Unbounded pools use up to n_total machines, opened in order; Bounded(m)
/// pools use m interchangeable machines.
inline SolveResult solve_commdelay_exact(const CommDelayInstance& inst, const SolveLimits& lim = {}) {
  const int n = inst.n_total();
  detail::require_job_cap(n, lim);
  detail::SearchProblem<std::int64_t> p;
  p.n = n;
  p.machine_count = inst.machines().unbounded ? n : std::min(n, inst.machines().count);
  p.preds.resize(n);
  p.succs.resize(n);
  for (std::size_t k = 0; k < inst.dag().edges().size(); ++k) {
    const Edge& e = inst.dag().edges()[k];
    p.preds[e.to - 1].push_back({e.from - 1, inst.delays()[k]});
    p.succs[e.from - 1].push_back(e.to - 1);
  }
  p.duration.assign(n, std::vector<std::optional<std::int64_t>>(p.machine_count));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < p.machine_count; ++i) p.duration[j][i] = inst.lengths()[j];
  }
  p.machine_class.assign(p.machine_count, 0);

  const Schedule seed_sched = list_schedule_commdelay(inst, p.machine_count);
  std::vector<detail::Placement<std::int64_t>> seed(n);
  for (const auto& [job, e] : seed_sched.entries) {
    seed[job - 1] = {e.machine - 1, e.start.convert_to<std::int64_t>(), e.end.convert_to<std::int64_t>()};
  }
  detail::BranchAndBound<std::int64_t> bb(p, lim);
  auto [best, complete] = bb.run(seed, makespan(seed_sched).convert_to<std::int64_t>());
  const auto labels = detail::first_use_labels(best, p.machine_count);
  SolveResult result;
  for (int j = 0; j < n; ++j) {
    result.schedule.place(j + 1, labels[best[j].machine], Rational(best[j].start), Rational(best[j].end));
  }
  result.optimum = makespan(result.schedule);
  result.proven_optimal = complete;
  result.states_explored = bb.states();
  return result;
}

/// Machines of equal speed are interchangeable, so the cap is on distinct
/// speeds rather than on machines.
inline SolveResult solve_related_exact(const RelatedInstance& inst, const SolveLimits& lim = {}) {
  const int n = inst.job_count();
  const int m = inst.machine_count();
  const std::set<std::int64_t> classes(inst.speeds().begin(), inst.speeds().end());
  if (n > std::min(lim.max_jobs, 6) || classes.size() > 4) {
    fail(ErrorCode::BudgetExceeded, "related solver handles at most 6 jobs and 4 distinct speeds");
  }
  detail::SearchProblem<Rational> p;
  p.n = n;
  p.machine_count = m;
  p.preds.resize(n);
  p.succs.resize(n);
  for (const Edge& e : inst.dag().edges()) {
    p.preds[e.to - 1].push_back({e.from - 1, Rational(0)});
    p.succs[e.from - 1].push_back(e.to - 1);
  }
  p.duration.assign(n, std::vector<std::optional<Rational>>(m));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) p.duration[j][i] = inst.duration(j + 1, i + 1);
  }
  for (int i = 0; i < m; ++i) {
    int cls = i;
    for (int k = 0; k < i; ++k) {
      if (inst.speed(k + 1) == inst.speed(i + 1)) {
        cls = p.machine_class[k];
        break;
      }
    }
    p.machine_class.push_back(cls);
  }

  // Seed: topological order, each job on the machine where it ends first.
  std::vector<detail::Placement<Rational>> seed(n);
  std::vector<Rational> free(m, Rational(0));
  Rational seed_makespan = 0;
  for (JobId j : inst.dag().order()) {
    Rational ready = 0;
    for (JobId u : inst.dag().predecessors(j)) ready = std::max(ready, seed[u - 1].end);
    int best = -1;
    Rational best_end = 0;
    for (int i = 0; i < m; ++i) {
      const Rational end = std::max(ready, free[i]) + *p.duration[j - 1][i];
      if (best == -1 || end < best_end) {
        best = i;
        best_end = end;
      }
    }
    seed[j - 1] = {best, best_end - *p.duration[j - 1][best], best_end};
    free[best] = best_end;
    seed_makespan = std::max(seed_makespan, best_end);
  }
  detail::BranchAndBound<Rational> bb(p, lim);
  std::vector<int> labels(m);
  for (int i = 0; i < m; ++i) labels[i] = i + 1;
  return detail::finish(bb, seed, seed_makespan, labels);
}

/// For every consecutive layer pair and every S in layer i-1, T in layer i
/// with |S| = |T| = ceil(delta n), checks that an edge joins S and T. Uses
/// the fact that some T avoids N(S) iff n - |N(S)| >= ceil(delta n).
inline bool verify_no_property(const KPartiteInstance& g, const SolveLimits& lim = {}) {
  const int n = g.n();
  if (n > 64) fail(ErrorCode::BudgetExceeded, "layers larger than 64 vertices are not supported");
  const Rational dn = g.delta() * n;
  const BigInt size_big = (boost::multiprecision::numerator(dn) + boost::multiprecision::denominator(dn) - 1) /
                          boost::multiprecision::denominator(dn);
  const int size = size_big.convert_to<int>();
  BigInt subsets = 1;
  for (int k = 0; k < size; ++k) subsets = subsets * (n - k) / (k + 1);
  if (subsets * subsets > lim.max_states) {
    fail(ErrorCode::BudgetExceeded, "C(n, ceil(delta n))^2 = " + BigInt(subsets * subsets).str() + " exceeds max_states");
  }
  if (size > n) return true;
  for (int layer = 1; layer < g.k(); ++layer) {
    std::vector<std::uint64_t> nbr(n, 0);
    for (const auto& [a, b] : g.edges(layer)) nbr[a - 1] |= std::uint64_t{1} << (b - 1);
    std::vector<int> pick(size);
    for (int k = 0; k < size; ++k) pick[k] = k;
    for (;;) {
      std::uint64_t covered = 0;
      for (int v : pick) covered |= nbr[v];
      if (n - std::popcount(covered) >= size) return false;
      int k = size - 1;
      while (k >= 0 && pick[k] == n - size + k) --k;
      if (k < 0) break;
      ++pick[k];
      for (int r = k + 1; r < size; ++r) pick[r] = pick[r - 1] + 1;
    }
  }
  return true;
}

}  // namespace sched_reduce
