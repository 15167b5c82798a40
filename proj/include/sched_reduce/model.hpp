#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace sched_reduce {

// Jobs, machines, layers and groups are 1-based dense indices everywhere in
// the public API. Storage vectors are 0-based and hidden behind accessors.
using JobId = int;
using MachineId = int;

struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

// ---------------------------------------------------------------------------
// PrecedenceDag
// ---------------------------------------------------------------------------

std::vector<int> topological_order(int node_count, const std::vector<Edge>& edges);

/// Acyclic precedence relation u < v over nodes 1..node_count.
class PrecedenceDag {
 public:
  PrecedenceDag() = default;

  PrecedenceDag(int node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 0) fail(ErrorCode::InvalidInstance, "negative node count");
    std::set<Edge> seen;
    for (const Edge& e : edges_) {
      if (e.from < 1 || e.from > node_count_ || e.to < 1 || e.to > node_count_) {
        fail(ErrorCode::InvalidInstance, "edge (" + std::to_string(e.from) + "," +
                                             std::to_string(e.to) + ") out of range");
      }
      if (e.from == e.to) fail(ErrorCode::InvalidInstance, "self-loop on " + std::to_string(e.from));
      if (!seen.insert(e).second) {
        fail(ErrorCode::InvalidInstance, "duplicate edge (" + std::to_string(e.from) + "," +
                                             std::to_string(e.to) + ")");
      }
    }
    succ_.assign(node_count_, {});
    pred_.assign(node_count_, {});
    for (const Edge& e : edges_) {
      succ_[e.from - 1].push_back(e.to);
      pred_[e.to - 1].push_back(e.from);
    }
    for (auto& s : succ_) std::sort(s.begin(), s.end());
    for (auto& p : pred_) std::sort(p.begin(), p.end());
    order_ = sched_reduce::topological_order(node_count_, edges_);
  }

  int node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& successors(int v) const { return succ_.at(v - 1); }
  const std::vector<int>& predecessors(int v) const { return pred_.at(v - 1); }
  /// Lowest-index-first Kahn order, computed once at construction.
  const std::vector<int>& order() const { return order_; }

  bool has_edge(int u, int v) const {
    const auto& s = successors(u);
    return std::binary_search(s.begin(), s.end(), v);
  }

  /// reach[u-1][v-1] is true iff u strictly precedes v.
  std::vector<std::vector<bool>> transitive_closure() const {
    std::vector<std::vector<bool>> reach(node_count_, std::vector<bool>(node_count_, false));
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      int u = *it;
      for (int v : successors(u)) {
        reach[u - 1][v - 1] = true;
        for (int w = 0; w < node_count_; ++w) {
          if (reach[v - 1][w]) reach[u - 1][w] = true;
        }
      }
    }
    return reach;
  }

  bool operator==(const PrecedenceDag& other) const {
    return node_count_ == other.node_count_ && edges_ == other.edges_;
  }

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
  std::vector<int> order_;
};

namespace detail {

inline std::vector<int> find_cycle(int node_count, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> succ(node_count);
  for (const Edge& e : edges) succ[e.from - 1].push_back(e.to);
  for (auto& s : succ) std::sort(s.begin(), s.end());
  std::vector<int> color(node_count, 0), parent(node_count, 0);
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    color[u - 1] = 1;
    for (int v : succ[u - 1]) {
      if (color[v - 1] == 1) {
        cycle.push_back(v);
        for (int w = u; w != v; w = parent[w - 1]) cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
        return true;
      }
      if (color[v - 1] == 0) {
        parent[v - 1] = u;
        if (dfs(v)) return true;
      }
    }
    color[u - 1] = 2;
    return false;
  };
  for (int u = 1; u <= node_count; ++u) {
    if (color[u - 1] == 0 && dfs(u)) break;
  }
  return cycle;
}

}  // namespace detail

/// Kahn's algorithm with lowest-index-first tie-break. Throws CycleDetected
/// with a witness cycle in the message.
inline std::vector<int> topological_order(int node_count, const std::vector<Edge>& edges) {
  std::vector<int> indegree(node_count, 0);
  std::vector<std::vector<int>> succ(node_count);
  for (const Edge& e : edges) {
    succ[e.from - 1].push_back(e.to);
    ++indegree[e.to - 1];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 1; v <= node_count; ++v) {
    if (indegree[v - 1] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(node_count);
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : succ[u - 1]) {
      if (--indegree[v - 1] == 0) ready.push(v);
    }
  }
  if (static_cast<int>(order.size()) != node_count) {
    std::string witness;
    for (int v : detail::find_cycle(node_count, edges)) witness += std::to_string(v) + "->";
    fail(ErrorCode::CycleDetected, "cycle " + witness + "...");
  }
  return order;
}

inline std::vector<int> topological_order(const PrecedenceDag& dag) { return dag.order(); }

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// Unique-machine precedence scheduling: job l runs only on machine home(l).
class UmpsInstance {
 public:
  UmpsInstance() = default;

  UmpsInstance(int machine_count, std::vector<std::int64_t> lengths, std::vector<MachineId> home,
               PrecedenceDag dag)
      : m_(machine_count), lengths_(std::move(lengths)), home_(std::move(home)), dag_(std::move(dag)) {
    if (lengths_.empty()) fail(ErrorCode::InvalidInstance, "UMPS instance needs at least one job");
    if (m_ < 1) fail(ErrorCode::InvalidInstance, "UMPS instance needs at least one machine");
    if (lengths_.size() != home_.size() || dag_.node_count() != n()) {
      fail(ErrorCode::InvalidInstance, "lengths, home and dag disagree on the job count");
    }
    for (std::size_t l = 0; l < lengths_.size(); ++l) {
      if (lengths_[l] < 1) fail(ErrorCode::InvalidInstance, "job " + std::to_string(l + 1) + " has non-positive length");
      if (home_[l] < 1 || home_[l] > m_) {
        fail(ErrorCode::InvalidInstance, "job " + std::to_string(l + 1) + " has home machine out of range");
      }
    }
  }

  int n() const { return static_cast<int>(lengths_.size()); }
  int m() const { return m_; }
  std::int64_t length(JobId l) const { return lengths_.at(l - 1); }
  MachineId home(JobId l) const { return home_.at(l - 1); }
  const std::vector<std::int64_t>& lengths() const { return lengths_; }
  const std::vector<MachineId>& homes() const { return home_; }
  const PrecedenceDag& dag() const { return dag_; }

  /// J(i): jobs whose home is machine i, ascending.
  std::vector<JobId> jobs_on(MachineId i) const {
    std::vector<JobId> out;
    for (JobId l = 1; l <= n(); ++l) {
      if (home(l) == i) out.push_back(l);
    }
    return out;
  }

  std::int64_t total_length() const { return std::accumulate(lengths_.begin(), lengths_.end(), std::int64_t{0}); }

  bool unit_lengths() const {
    return std::all_of(lengths_.begin(), lengths_.end(), [](std::int64_t p) { return p == 1; });
  }

  bool operator==(const UmpsInstance&) const = default;

 private:
  int m_ = 0;
  std::vector<std::int64_t> lengths_;
  std::vector<MachineId> home_;
  PrecedenceDag dag_;
};

struct Operation {
  MachineId machine = 0;
  std::int64_t duration = 0;
  bool operator==(const Operation&) const = default;
};

/// Each job is a chain of operations, processed in list order.
class JobShopInstance {
 public:
  JobShopInstance() = default;

  JobShopInstance(int machine_count, std::vector<std::vector<Operation>> jobs)
      : machine_count_(machine_count), jobs_(std::move(jobs)) {
    if (machine_count_ < 1) fail(ErrorCode::InvalidInstance, "job shop needs at least one machine");
    if (jobs_.empty()) fail(ErrorCode::InvalidInstance, "job shop needs at least one job");
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      if (jobs_[j].empty()) fail(ErrorCode::InvalidInstance, "job " + std::to_string(j + 1) + " has no operations");
      for (const Operation& op : jobs_[j]) {
        if (op.machine < 1 || op.machine > machine_count_) {
          fail(ErrorCode::InvalidInstance, "operation machine out of range in job " + std::to_string(j + 1));
        }
        if (op.duration < 1) fail(ErrorCode::InvalidInstance, "operation duration must be positive");
      }
    }
  }

  int machine_count() const { return machine_count_; }
  const std::vector<std::vector<Operation>>& jobs() const { return jobs_; }
  int operation_count() const {
    int total = 0;
    for (const auto& chain : jobs_) total += static_cast<int>(chain.size());
    return total;
  }

  bool operator==(const JobShopInstance&) const = default;

 private:
  int machine_count_ = 0;
  std::vector<std::vector<Operation>> jobs_;
};

/// Machine budget for the communication-delay model.
struct MachinePool {
  bool unbounded = true;
  int count = 0;  // meaningful only when bounded

  static MachinePool Unbounded() { return {true, 0}; }
  static MachinePool Bounded(int m) { return {false, m}; }
  bool operator==(const MachinePool&) const = default;
};

/// Precedence DAG with one nonnegative delay per edge, paid only when the
/// endpoints run on different machines.
class CommDelayInstance {
 public:
  CommDelayInstance() = default;

  CommDelayInstance(std::vector<std::int64_t> lengths, PrecedenceDag dag, std::vector<std::int64_t> delays,
                    MachinePool machines)
      : lengths_(std::move(lengths)), dag_(std::move(dag)), delays_(std::move(delays)), machines_(machines) {
    if (lengths_.empty()) fail(ErrorCode::InvalidInstance, "comm-delay instance needs at least one job");
    if (dag_.node_count() != n_total()) fail(ErrorCode::InvalidInstance, "dag size differs from job count");
    if (delays_.size() != dag_.edges().size()) fail(ErrorCode::InvalidInstance, "need exactly one delay per edge");
    for (std::int64_t p : lengths_) {
      if (p < 1) fail(ErrorCode::InvalidInstance, "job lengths must be positive");
    }
    for (std::int64_t c : delays_) {
      if (c < 0) fail(ErrorCode::InvalidInstance, "delays must be nonnegative");
    }
    if (!machines_.unbounded && machines_.count < 1) fail(ErrorCode::InvalidInstance, "bounded pool needs m >= 1");
    for (std::size_t k = 0; k < delays_.size(); ++k) index_[dag_.edges()[k]] = delays_[k];
  }

  int n_total() const { return static_cast<int>(lengths_.size()); }
  std::int64_t length(JobId j) const { return lengths_.at(j - 1); }
  const std::vector<std::int64_t>& lengths() const { return lengths_; }
  const PrecedenceDag& dag() const { return dag_; }
  const std::vector<std::int64_t>& delays() const { return delays_; }
  const MachinePool& machines() const { return machines_; }
  std::int64_t delay(JobId u, JobId v) const { return index_.at(Edge{u, v}); }

  bool operator==(const CommDelayInstance& o) const {
    return lengths_ == o.lengths_ && dag_ == o.dag_ && delays_ == o.delays_ && machines_ == o.machines_;
  }

 private:
  std::vector<std::int64_t> lengths_;
  PrecedenceDag dag_;
  std::vector<std::int64_t> delays_;
  MachinePool machines_;
  std::map<Edge, std::int64_t> index_;
};

/// Related machines: job j on machine i takes p_j / s_i.
class RelatedInstance {
 public:
  RelatedInstance() = default;

  RelatedInstance(std::vector<std::int64_t> speeds, std::vector<std::int64_t> lengths, PrecedenceDag dag)
      : speeds_(std::move(speeds)), lengths_(std::move(lengths)), dag_(std::move(dag)) {
    if (speeds_.empty() || lengths_.empty()) fail(ErrorCode::InvalidInstance, "need machines and jobs");
    if (dag_.node_count() != job_count()) fail(ErrorCode::InvalidInstance, "dag size differs from job count");
    for (auto s : speeds_) {
      if (s < 1) fail(ErrorCode::InvalidInstance, "speeds must be positive");
    }
    for (auto p : lengths_) {
      if (p < 1) fail(ErrorCode::InvalidInstance, "lengths must be positive");
    }
  }

  int job_count() const { return static_cast<int>(lengths_.size()); }
  int machine_count() const { return static_cast<int>(speeds_.size()); }
  std::int64_t speed(MachineId i) const { return speeds_.at(i - 1); }
  std::int64_t length(JobId j) const { return lengths_.at(j - 1); }
  const std::vector<std::int64_t>& speeds() const { return speeds_; }
  const std::vector<std::int64_t>& lengths() const { return lengths_; }
  const PrecedenceDag& dag() const { return dag_; }
  Rational duration(JobId j, MachineId i) const { return make_rational(length(j), speed(i)); }

  bool operator==(const RelatedInstance&) const = default;

 private:
  std::vector<std::int64_t> speeds_;
  std::vector<std::int64_t> lengths_;
  PrecedenceDag dag_;
};

struct JobGroup {
  BigInt multiplicity;
  BigInt length;
  JobId origin_job = 0;
  bool operator==(const JobGroup&) const = default;
};

struct MachineGroup {
  BigInt multiplicity;
  BigInt speed;
  bool operator==(const MachineGroup&) const = default;
};

/// Related-machines instance stored by groups. A group edge u -> v means
/// every member of group u precedes every member of group v.
class GroupedRelatedInstance {
 public:
  GroupedRelatedInstance() = default;

  GroupedRelatedInstance(std::vector<JobGroup> job_groups, std::vector<MachineGroup> machine_groups,
                         PrecedenceDag group_dag)
      : job_groups_(std::move(job_groups)), machine_groups_(std::move(machine_groups)), group_dag_(std::move(group_dag)) {
    if (job_groups_.empty() || machine_groups_.empty()) fail(ErrorCode::InvalidInstance, "need job and machine groups");
    if (group_dag_.node_count() != static_cast<int>(job_groups_.size())) {
      fail(ErrorCode::InvalidInstance, "group dag size differs from job group count");
    }
    for (const auto& g : job_groups_) {
      if (g.multiplicity < 1 || g.length < 1) fail(ErrorCode::InvalidInstance, "job group fields must be positive");
    }
    for (const auto& g : machine_groups_) {
      if (g.multiplicity < 1 || g.speed < 1) fail(ErrorCode::InvalidInstance, "machine group fields must be positive");
    }
  }

  const std::vector<JobGroup>& job_groups() const { return job_groups_; }
  const std::vector<MachineGroup>& machine_groups() const { return machine_groups_; }
  const JobGroup& job_group(int g) const { return job_groups_.at(g - 1); }
  const MachineGroup& machine_group(int g) const { return machine_groups_.at(g - 1); }
  const PrecedenceDag& group_dag() const { return group_dag_; }
  int job_group_count() const { return static_cast<int>(job_groups_.size()); }
  int machine_group_count() const { return static_cast<int>(machine_groups_.size()); }

  BigInt expanded_job_count() const {
    BigInt total = 0;
    for (const auto& g : job_groups_) total += g.multiplicity;
    return total;
  }
  BigInt expanded_machine_count() const {
    BigInt total = 0;
    for (const auto& g : machine_groups_) total += g.multiplicity;
    return total;
  }

  bool operator==(const GroupedRelatedInstance&) const = default;

 private:
  std::vector<JobGroup> job_groups_;
  std::vector<MachineGroup> machine_groups_;
  PrecedenceDag group_dag_;
};

/// k layers of n vertices each; edges(i) joins layer i to layer i + 1.
/// Vertices are numbered 1..n inside their layer.
class KPartiteInstance {
 public:
  using LayerEdge = std::pair<int, int>;

  KPartiteInstance() = default;

  KPartiteInstance(int k, int n, std::vector<std::vector<LayerEdge>> edges, int q, Rational eps, Rational delta)
      : k_(k), n_(n), edges_(std::move(edges)), q_(q), eps_(std::move(eps)), delta_(std::move(delta)) {
    if (k_ < 1 || n_ < 1) fail(ErrorCode::InvalidInstance, "k and n must be positive");
    if (static_cast<int>(edges_.size()) != k_ - 1) fail(ErrorCode::InvalidInstance, "need exactly k-1 edge sets");
    if (q_ < 1) fail(ErrorCode::InvalidInstance, "Q must be positive");
    if (!(eps_ > 0 && eps_ < 1 && delta_ > 0 && delta_ < 1)) {
      fail(ErrorCode::InvalidInstance, "eps and delta must lie strictly between 0 and 1");
    }
    for (auto& layer : edges_) {
      std::set<LayerEdge> seen;
      for (const auto& [a, b] : layer) {
        if (a < 1 || a > n_ || b < 1 || b > n_) fail(ErrorCode::InvalidInstance, "k-partite edge endpoint out of range");
        if (!seen.insert({a, b}).second) fail(ErrorCode::InvalidInstance, "duplicate k-partite edge");
      }
    }
  }

  int k() const { return k_; }
  int n() const { return n_; }
  int q() const { return q_; }
  const Rational& eps() const { return eps_; }
  const Rational& delta() const { return delta_; }
  /// Edges between layer i and layer i + 1, for 1 <= i < k.
  const std::vector<LayerEdge>& edges(int i) const { return edges_.at(i - 1); }
  const std::vector<std::vector<LayerEdge>>& all_edges() const { return edges_; }
  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& e : edges_) total += e.size();
    return total;
  }

  bool operator==(const KPartiteInstance&) const = default;

 private:
  int k_ = 0;
  int n_ = 0;
  std::vector<std::vector<LayerEdge>> edges_;
  int q_ = 1;
  Rational eps_;
  Rational delta_;
};

// ---------------------------------------------------------------------------
// Schedules and validation
// ---------------------------------------------------------------------------

struct ScheduleEntry {
  MachineId machine = 0;
  Rational start;
  Rational end;
  bool operator==(const ScheduleEntry&) const = default;
};

/// job -> (machine, [start, end)). Idle gaps are allowed.
struct Schedule {
  std::map<JobId, ScheduleEntry> entries;

  void place(JobId job, MachineId machine, Rational start, Rational end) {
    entries[job] = ScheduleEntry{machine, std::move(start), std::move(end)};
  }
  const ScheduleEntry& at(JobId job) const { return entries.at(job); }
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  bool operator==(const Schedule&) const = default;
};

inline Rational makespan(const Schedule& sched) {
  if (sched.empty()) fail(ErrorCode::EmptySchedule, "makespan of an empty schedule");
  Rational best = sched.entries.begin()->second.end;
  for (const auto& [job, e] : sched.entries) {
    if (e.end > best) best = e.end;
  }
  return best;
}

enum class ViolationKind { Overlap, Precedence, Delay, WrongMachine, NegativeTime, Duration };

inline std::string_view violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::Precedence: return "precedence";
    case ViolationKind::Delay: return "delay";
    case ViolationKind::WrongMachine: return "wrong_machine";
    case ViolationKind::NegativeTime: return "negative_time";
    case ViolationKind::Duration: return "duration";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  JobId first = 0;
  JobId second = 0;  // 0 when the witness is a single job
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
  }
  bool has(ViolationKind kind, JobId a, JobId b) const {
    return std::find(violations.begin(), violations.end(), Violation{kind, a, b}) != violations.end();
  }
  std::string describe() const {
    std::string out;
    for (const auto& v : violations) {
      out += std::string(violation_kind_name(v.kind)) + " " + std::to_string(v.first);
      if (v.second != 0) out += "," + std::to_string(v.second);
      out += "\n";
    }
    return out;
  }
};

namespace detail {

inline void require_job_set(const Schedule& sched, int n) {
  bool ok = static_cast<int>(sched.size()) == n;
  if (ok) {
    JobId expect = 1;
    for (const auto& [job, e] : sched.entries) {
      if (job != expect++) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) fail(ErrorCode::JobSetMismatch, "schedule does not cover exactly jobs 1.." + std::to_string(n));
}

/// Appends an overlap violation for every pair of jobs sharing a machine
/// whose intervals intersect with positive length.
inline void check_overlaps(const Schedule& sched, ValidationReport& report) {
  std::map<MachineId, std::vector<JobId>> by_machine;
  for (const auto& [job, e] : sched.entries) by_machine[e.machine].push_back(job);
  for (auto& [machine, jobs] : by_machine) {
    std::sort(jobs.begin(), jobs.end(), [&](JobId a, JobId b) {
      const auto& ea = sched.at(a);
      const auto& eb = sched.at(b);
      return ea.start != eb.start ? ea.start < eb.start : a < b;
    });
    for (std::size_t x = 0; x < jobs.size(); ++x) {
      const auto& ex = sched.at(jobs[x]);
      for (std::size_t y = x + 1; y < jobs.size(); ++y) {
        const auto& ey = sched.at(jobs[y]);
        if (ey.start >= ex.end) break;
        report.violations.push_back({ViolationKind::Overlap, std::min(jobs[x], jobs[y]), std::max(jobs[x], jobs[y])});
      }
    }
  }
}

inline void check_times(const Schedule& sched, const std::function<Rational(JobId, MachineId)>& duration,
                        ValidationReport& report) {
  for (const auto& [job, e] : sched.entries) {
    if (e.start < 0) report.violations.push_back({ViolationKind::NegativeTime, job, 0});
    if (e.end - e.start != duration(job, e.machine)) report.violations.push_back({ViolationKind::Duration, job, 0});
  }
}

}  // namespace detail

/// Feasible iff every job runs on its home machine for exactly p(l), jobs on
/// one machine do not overlap and end(u) <= start(v) for every edge.
inline ValidationReport validate_umps(const UmpsInstance& inst, const Schedule& sched) {
  detail::require_job_set(sched, inst.n());
  ValidationReport report;
  for (const auto& [job, e] : sched.entries) {
    if (e.machine != inst.home(job)) report.violations.push_back({ViolationKind::WrongMachine, job, 0});
  }
  detail::check_times(sched, [&](JobId j, MachineId) { return Rational(inst.length(j)); }, report);
  detail::check_overlaps(sched, report);
  for (const Edge& e : inst.dag().edges()) {
    if (sched.at(e.from).end > sched.at(e.to).start) report.violations.push_back({ViolationKind::Precedence, e.from, e.to});
  }
  return report;
}

/// Co-located endpoints need end(u) <= start(v); separated endpoints need
/// end(u) + c(u,v) <= start(v).
inline ValidationReport validate_commdelay(const CommDelayInstance& inst, const Schedule& sched) {
  detail::require_job_set(sched, inst.n_total());
  for (const auto& [job, e] : sched.entries) {
    if (e.machine < 1 || (!inst.machines().unbounded && e.machine > inst.machines().count)) {
      fail(ErrorCode::MachineOutOfRange, "job " + std::to_string(job) + " on machine " + std::to_string(e.machine));
    }
  }
  ValidationReport report;
  detail::check_times(sched, [&](JobId j, MachineId) { return Rational(inst.length(j)); }, report);
  detail::check_overlaps(sched, report);
  const auto& edges = inst.dag().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& eu = sched.at(edges[k].from);
    const auto& ev = sched.at(edges[k].to);
    if (eu.end > ev.start) {
      report.violations.push_back({ViolationKind::Precedence, edges[k].from, edges[k].to});
    } else if (eu.machine != ev.machine && eu.end + inst.delays()[k] > ev.start) {
      report.violations.push_back({ViolationKind::Delay, edges[k].from, edges[k].to});
    }
  }
  return report;
}

inline ValidationReport validate_related(const RelatedInstance& inst, const Schedule& sched) {
  detail::require_job_set(sched, inst.job_count());
  for (const auto& [job, e] : sched.entries) {
    if (e.machine < 1 || e.machine > inst.machine_count()) {
      fail(ErrorCode::MachineOutOfRange, "job " + std::to_string(job) + " on machine " + std::to_string(e.machine));
    }
  }
  ValidationReport report;
  detail::check_times(sched, [&](JobId j, MachineId i) { return inst.duration(j, i); }, report);
  detail::check_overlaps(sched, report);
  for (const Edge& e : inst.dag().edges()) {
    if (sched.at(e.from).end > sched.at(e.to).start) report.violations.push_back({ViolationKind::Precedence, e.from, e.to});
  }
  return report;
}

/// Every job back-to-back in topological order on its home machine.
inline Schedule trivial_serial_schedule(const UmpsInstance& inst) {
  Schedule sched;
  std::int64_t clock = 0;
  for (JobId l : inst.dag().order()) {
    sched.place(l, inst.home(l), Rational(clock), Rational(clock + inst.length(l)));
    clock += inst.length(l);
  }
  return sched;
}

inline Schedule shift_schedule(const Schedule& sched, const Rational& delta) {
  Schedule out = sched;
  for (auto& [job, e] : out.entries) {
    e.start += delta;
    e.end += delta;
  }
  return out;
}

}  // namespace sched_reduce
