#pragma once

// Independent reference implementations used only by the tests. They are
// deliberately naive: direct enumeration, no pruning beyond feasibility.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sched_reduce/model.hpp"

namespace oracle {

using namespace sched_reduce;

/// Pairwise interval check. Returns true iff the schedule is feasible for
/// the given duration rule, allowed-machine rule and edge gap rule.
inline bool intervals_feasible(const Schedule& s, int n, const std::function<Rational(JobId, MachineId)>& duration,
                               const std::function<bool(JobId, MachineId)>& allowed,
                               const std::vector<std::tuple<JobId, JobId, std::int64_t>>& edges) {
  if (static_cast<int>(s.size()) != n) return false;
  for (JobId j = 1; j <= n; ++j) {
    if (!s.entries.count(j)) return false;
    const auto& e = s.at(j);
    if (!allowed(j, e.machine)) return false;
    if (e.start < 0) return false;
    if (e.end - e.start != duration(j, e.machine)) return false;
  }
  for (JobId a = 1; a <= n; ++a) {
    for (JobId b = a + 1; b <= n; ++b) {
      const auto& x = s.at(a);
      const auto& y = s.at(b);
      if (x.machine == y.machine && x.start < y.end && y.start < x.end) return false;
    }
  }
  for (const auto& [u, v, c] : edges) {
    const auto& x = s.at(u);
    const auto& y = s.at(v);
    const Rational gap = x.machine == y.machine ? Rational(0) : Rational(c);
    if (y.start < x.end + gap) return false;
  }
  return true;
}

inline bool umps_feasible(const UmpsInstance& inst, const Schedule& s) {
  std::vector<std::tuple<JobId, JobId, std::int64_t>> edges;
  for (const Edge& e : inst.dag().edges()) edges.emplace_back(e.from, e.to, 0);
  return intervals_feasible(
      s, inst.n(), [&](JobId j, MachineId) { return Rational(inst.length(j)); },
      [&](JobId j, MachineId i) { return inst.home(j) == i; }, edges);
}

inline bool commdelay_feasible(const CommDelayInstance& inst, const Schedule& s) {
  std::vector<std::tuple<JobId, JobId, std::int64_t>> edges;
  for (std::size_t k = 0; k < inst.dag().edges().size(); ++k) {
    edges.emplace_back(inst.dag().edges()[k].from, inst.dag().edges()[k].to, inst.delays()[k]);
  }
  const bool bounded = !inst.machines().unbounded;
  const int m = inst.machines().count;
  return intervals_feasible(
      s, inst.n_total(), [&](JobId j, MachineId) { return Rational(inst.length(j)); },
      [&](JobId, MachineId i) { return i >= 1 && (!bounded || i <= m); }, edges);
}

inline bool related_feasible(const RelatedInstance& inst, const Schedule& s) {
  std::vector<std::tuple<JobId, JobId, std::int64_t>> edges;
  for (const Edge& e : inst.dag().edges()) edges.emplace_back(e.from, e.to, 0);
  return intervals_feasible(
      s, inst.job_count(), [&](JobId j, MachineId i) { return inst.duration(j, i); },
      [&](JobId, MachineId i) { return i >= 1 && i <= inst.machine_count(); }, edges);
}

/// Minimum makespan over all integer start-time vectors in [0, sum p],
/// assigned in job index order with only feasibility pruning.
inline std::int64_t umps_time_indexed_optimum(const UmpsInstance& inst) {
  const int n = inst.n();
  const std::int64_t horizon = inst.total_length();
  std::vector<std::int64_t> start(n + 1, -1);
  std::int64_t best = horizon;
  std::function<void(int, std::int64_t)> go = [&](int l, std::int64_t span) {
    if (span >= best) return;
    if (l > n) {
      best = span;
      return;
    }
    for (std::int64_t s = 0; s + inst.length(l) <= horizon; ++s) {
      const std::int64_t e = s + inst.length(l);
      bool ok = true;
      for (JobId k = 1; k < l && ok; ++k) {
        const std::int64_t ks = start[k], ke = start[k] + inst.length(k);
        if (inst.home(k) == inst.home(l) && ks < e && s < ke) ok = false;
        if (inst.dag().has_edge(k, l) && ke > s) ok = false;
        if (inst.dag().has_edge(l, k) && e > ks) ok = false;
      }
      if (!ok) continue;
      start[l] = s;
      go(l + 1, std::max(span, e));
      start[l] = -1;
    }
  };
  go(1, 0);
  return best;
}

/// Minimum makespan for a comm-delay instance with unbounded machines:
/// machine labels as restricted growth strings, integer starts in [0, sum p].
inline std::int64_t commdelay_time_indexed_optimum(const CommDelayInstance& inst) {
  const int n = inst.n_total();
  std::int64_t horizon = 0;
  for (auto p : inst.lengths()) horizon += p;
  std::vector<std::int64_t> start(n + 1, -1);
  std::vector<int> machine(n + 1, 0);
  std::int64_t best = horizon;
  const int cap = inst.machines().unbounded ? n : inst.machines().count;
  auto gap = [&](JobId u, JobId v) -> std::optional<std::int64_t> {
    if (!inst.dag().has_edge(u, v)) return std::nullopt;
    return machine[u] == machine[v] ? 0 : inst.delay(u, v);
  };
  std::function<void(int, std::int64_t, int)> go = [&](int j, std::int64_t span, int used) {
    if (span >= best) return;
    if (j > n) {
      best = span;
      return;
    }
    for (int i = 1; i <= std::min(used + 1, cap); ++i) {
      machine[j] = i;
      for (std::int64_t s = 0; s + inst.length(j) <= horizon; ++s) {
        const std::int64_t e = s + inst.length(j);
        bool ok = true;
        for (JobId k = 1; k < j && ok; ++k) {
          const std::int64_t ks = start[k], ke = start[k] + inst.length(k);
          if (machine[k] == i && ks < e && s < ke) ok = false;
          if (auto g = gap(k, j); g && ke + *g > s) ok = false;
          if (auto g = gap(j, k); g && e + *g > ks) ok = false;
        }
        if (!ok) continue;
        start[j] = s;
        go(j + 1, std::max(span, e), std::max(used, i));
        start[j] = -1;
      }
    }
    machine[j] = 0;
  };
  go(1, 0, 0);
  return best;
}

/// Literal NO-property check: every pair of ceil(delta n)-subsets S of a
/// layer and T of the next layer is joined by an edge.
inline bool no_property_naive(const KPartiteInstance& g) {
  const int n = g.n();
  int size = 0;
  while (Rational(size) < g.delta() * n) ++size;
  std::vector<std::vector<int>> subsets;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != size) continue;
    std::vector<int> members;
    for (int v = 0; v < n; ++v) {
      if (mask >> v & 1u) members.push_back(v + 1);
    }
    subsets.push_back(members);
  }
  for (int layer = 1; layer < g.k(); ++layer) {
    const auto& edges = g.edges(layer);
    for (const auto& s : subsets) {
      for (const auto& t : subsets) {
        bool joined = false;
        for (const auto& [a, b] : edges) {
          if (std::count(s.begin(), s.end(), a) && std::count(t.begin(), t.end(), b)) {
            joined = true;
            break;
          }
        }
        if (!joined) return false;
      }
    }
  }
  return true;
}

}  // namespace oracle
