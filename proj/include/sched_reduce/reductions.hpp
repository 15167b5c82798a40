#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"

namespace sched_reduce {

// ---------------------------------------------------------------------------
// UMPS -> non-uniform communication delay (unbounded machines)
// ---------------------------------------------------------------------------

/// Output job l (1 <= l <= n) is the copy of input job l; jobs n+1..n+m are
/// the unit dummies, one per input machine.
struct CommDelayReductionArtifact {
  UmpsInstance source;
  CommDelayInstance output;
  std::int64_t c_infinity = 0;
  std::vector<JobId> dummy_ids;
  std::vector<JobId> origin;  // output job -> input job, 0 for dummies

  JobId dummy_of(MachineId i) const { return dummy_ids.at(i - 1); }
};

/// Forces each J(i) onto one machine by hanging all of it in front of a
/// dummy through edges whose delay C_inf = n * sum(p) exceeds any sensible
/// makespan. Copies of the original edges get delay 0.
inline CommDelayReductionArtifact umps_to_commdelay(const UmpsInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  if (n < 2) fail(ErrorCode::DegenerateInstance, "reduction needs at least two jobs");

  CommDelayReductionArtifact art;
  art.source = inst;
  art.c_infinity = static_cast<std::int64_t>(n) * inst.total_length();

  std::vector<std::int64_t> lengths = inst.lengths();
  lengths.insert(lengths.end(), m, 1);
  std::vector<Edge> edges = inst.dag().edges();
  std::vector<std::int64_t> delays(edges.size(), 0);
  for (JobId l = 1; l <= n; ++l) {
    edges.push_back({l, n + inst.home(l)});
    delays.push_back(art.c_infinity);
  }
  for (MachineId i = 1; i <= m; ++i) art.dummy_ids.push_back(n + i);
  art.origin.resize(n + m, 0);
  for (JobId l = 1; l <= n; ++l) art.origin[l - 1] = l;
  art.output = CommDelayInstance(std::move(lengths), PrecedenceDag(n + m, std::move(edges)), std::move(delays),
                                 MachinePool::Unbounded());
  return art;
}

/// Completeness direction: copy every job onto its home machine in the same
/// interval and run all dummies in [L, L+1].
inline Schedule forward_map_commdelay(const CommDelayReductionArtifact& art, const Schedule& umps_sched) {
  auto report = validate_umps(art.source, umps_sched);
  if (!report.feasible()) fail(ErrorCode::InfeasibleInput, "UMPS schedule is infeasible:\n" + report.describe());
  const Rational horizon = makespan(umps_sched);
  Schedule out;
  for (const auto& [job, e] : umps_sched.entries) out.place(job, art.source.home(job), e.start, e.end);
  for (MachineId i = 1; i <= art.source.m(); ++i) out.place(art.dummy_of(i), i, horizon, horizon + 1);
  return out;
}

/// Soundness direction. Below C_inf every J'(i) shares the machine of its
/// dummy, so the copies can be put back on their home machines unchanged.
inline Schedule backward_map_commdelay(const CommDelayReductionArtifact& art, const Schedule& cd_sched) {
  auto report = validate_commdelay(art.output, cd_sched);
  if (!report.feasible()) fail(ErrorCode::InfeasibleInput, "comm-delay schedule is infeasible:\n" + report.describe());
  const Rational horizon = makespan(cd_sched);
  if (horizon >= art.c_infinity) {
    fail(ErrorCode::MakespanTooLarge, "makespan " + to_string(horizon) + " >= C_inf " + std::to_string(art.c_infinity));
  }
  const UmpsInstance& src = art.source;
  for (MachineId i = 1; i <= src.m(); ++i) {
    const JobId dummy = art.dummy_of(i);
    const MachineId host = cd_sched.at(dummy).machine;
    for (JobId l : src.jobs_on(i)) {
      if (cd_sched.at(l).machine != host) {
        fail(ErrorCode::CoLocationViolated, "machine group " + std::to_string(i) + ": jobs " + std::to_string(l) +
                                                " and " + std::to_string(dummy) + " are separated");
      }
    }
  }
  Schedule out;
  for (JobId l = 1; l <= src.n(); ++l) {
    const auto& e = cd_sched.at(l);
    out.place(l, src.home(l), e.start, e.end);
  }
  if (!validate_umps(src, out).feasible()) fail(ErrorCode::InfeasibleInput, "back-mapped schedule is infeasible");
  return out;
}

// ---------------------------------------------------------------------------
// Job shop -> UMPS
// ---------------------------------------------------------------------------

struct JobShopEmbedding {
  UmpsInstance umps;
  std::vector<std::pair<int, int>> origin;  // UMPS job -> (job, operation), both 1-based
};

/// One UMPS job per operation; each job's operations become a chain.
inline JobShopEmbedding jobshop_to_umps(const JobShopInstance& js) {
  std::vector<std::int64_t> lengths;
  std::vector<MachineId> home;
  std::vector<Edge> edges;
  JobShopEmbedding out;
  for (std::size_t j = 0; j < js.jobs().size(); ++j) {
    const auto& chain = js.jobs()[j];
    for (std::size_t o = 0; o < chain.size(); ++o) {
      lengths.push_back(chain[o].duration);
      home.push_back(chain[o].machine);
      out.origin.emplace_back(static_cast<int>(j + 1), static_cast<int>(o + 1));
      const int id = static_cast<int>(lengths.size());
      if (o > 0) edges.push_back({id - 1, id});
    }
  }
  const int n = static_cast<int>(lengths.size());
  out.umps = UmpsInstance(js.machine_count(), std::move(lengths), std::move(home), PrecedenceDag(n, std::move(edges)));
  return out;
}

// ---------------------------------------------------------------------------
// UMPS (unit lengths) -> related machines, grouped
// ---------------------------------------------------------------------------

inline BigInt default_kappa(int n, int m) { return BigInt(10) * n * n * n * m; }

/// Job group l is the replica set of input job l and machine group i the
/// replica set of input machine i, so both maps are the identity on indices.
struct RelatedReductionArtifact {
  UmpsInstance source;
  GroupedRelatedInstance output;
  BigInt kappa;
  bool kappa_overridden = false;
  /// kappa >= 10 n^3 m, the precondition of the misplaced-job bound.
  bool soundness_guaranteed = false;
  std::vector<JobId> origin;             // job group -> input job
  std::vector<int> machine_group_of;     // input machine -> machine group

  Rational gamma() const { return Rational(BigInt(1), BigInt(10) * source.n() * source.n()); }
};

/// Job l becomes kappa^{2(m-M(l))} jobs of length kappa^{M(l)-1}; machine i
/// becomes kappa^{2(m-i)} machines of speed kappa^{i-1}.
inline RelatedReductionArtifact umps_to_related(const UmpsInstance& inst,
                                                std::optional<BigInt> kappa_override = std::nullopt) {
  if (!inst.unit_lengths()) fail(ErrorCode::NonUnitLengths, "related-machines reduction needs unit jobs");
  const int n = inst.n();
  const int m = inst.m();
  RelatedReductionArtifact art;
  art.source = inst;
  const BigInt nominal = default_kappa(n, m);
  if (kappa_override) {
    if (*kappa_override < 2) fail(ErrorCode::InvalidInstance, "kappa override must be at least 2");
    art.kappa = *kappa_override;
    art.kappa_overridden = true;
  } else {
    art.kappa = nominal;
  }
  art.soundness_guaranteed = art.kappa >= nominal;

  std::vector<JobGroup> jobs;
  for (JobId l = 1; l <= n; ++l) {
    const unsigned home = static_cast<unsigned>(inst.home(l));
    jobs.push_back({pow_big(art.kappa, 2 * (m - home)), pow_big(art.kappa, home - 1), l});
    art.origin.push_back(l);
  }
  std::vector<MachineGroup> machines;
  for (MachineId i = 1; i <= m; ++i) {
    const unsigned ui = static_cast<unsigned>(i);
    machines.push_back({pow_big(art.kappa, 2 * (m - ui)), pow_big(art.kappa, ui - 1)});
    art.machine_group_of.push_back(i);
  }
  art.output = GroupedRelatedInstance(std::move(jobs), std::move(machines), inst.dag());
  return art;
}

/// `count` members of one job group, each on its own machine of one machine
/// group, all running over the same [start, end).
struct GroupBlock {
  int job_group = 0;
  int machine_group = 0;
  BigInt count;
  Rational start;
  Rational end;
  bool operator==(const GroupBlock&) const = default;
};

struct GroupedSchedule {
  std::vector<GroupBlock> blocks;
  bool operator==(const GroupedSchedule&) const = default;
};

inline Rational makespan(const GroupedSchedule& gs) {
  if (gs.blocks.empty()) fail(ErrorCode::EmptySchedule, "makespan of an empty grouped schedule");
  Rational best = gs.blocks.front().end;
  for (const auto& b : gs.blocks) {
    if (b.end > best) best = b.end;
  }
  return best;
}

/// Symbolic feasibility check that never expands groups. Witness ids in the
/// report are job groups. Capacity is checked as "at most |M_g| members
/// running on group g at any instant", which is exact for identical machines
/// inside a group.
inline ValidationReport validate_grouped(const GroupedRelatedInstance& inst, const GroupedSchedule& gs) {
  std::vector<BigInt> placed(inst.job_group_count(), 0);
  ValidationReport report;
  for (const auto& b : gs.blocks) {
    if (b.job_group < 1 || b.job_group > inst.job_group_count()) fail(ErrorCode::JobSetMismatch, "unknown job group");
    if (b.machine_group < 1 || b.machine_group > inst.machine_group_count()) {
      fail(ErrorCode::MachineOutOfRange, "unknown machine group " + std::to_string(b.machine_group));
    }
    if (b.count < 1) fail(ErrorCode::InvalidInstance, "block with non-positive count");
    placed[b.job_group - 1] += b.count;
    if (b.start < 0) report.violations.push_back({ViolationKind::NegativeTime, b.job_group, 0});
    const auto& jg = inst.job_group(b.job_group);
    const auto& mg = inst.machine_group(b.machine_group);
    if (b.end - b.start != Rational(jg.length, mg.speed)) {
      report.violations.push_back({ViolationKind::Duration, b.job_group, 0});
    }
  }
  for (int g = 1; g <= inst.job_group_count(); ++g) {
    if (placed[g - 1] != inst.job_group(g).multiplicity) {
      fail(ErrorCode::JobSetMismatch, "job group " + std::to_string(g) + " is not placed exactly once per member");
    }
  }
  // Sweep each machine group; ends sort before starts at equal times.
  std::map<int, std::vector<std::pair<Rational, std::pair<int, std::size_t>>>> events;
  for (std::size_t k = 0; k < gs.blocks.size(); ++k) {
    const auto& b = gs.blocks[k];
    events[b.machine_group].push_back({b.start, {1, k}});
    events[b.machine_group].push_back({b.end, {0, k}});
  }
  for (auto& [group, list] : events) {
    std::sort(list.begin(), list.end());
    BigInt running = 0;
    bool reported = false;
    for (const auto& [time, tag] : list) {
      const auto& b = gs.blocks[tag.second];
      running += tag.first == 1 ? b.count : -b.count;
      if (!reported && running > inst.machine_group(group).multiplicity) {
        report.violations.push_back({ViolationKind::Overlap, b.job_group, 0});
        reported = true;
      }
    }
  }
  std::vector<std::optional<Rational>> first_start(inst.job_group_count()), last_end(inst.job_group_count());
  for (const auto& b : gs.blocks) {
    auto& fs = first_start[b.job_group - 1];
    auto& le = last_end[b.job_group - 1];
    if (!fs || b.start < *fs) fs = b.start;
    if (!le || b.end > *le) le = b.end;
  }
  for (const Edge& e : inst.group_dag().edges()) {
    if (*last_end[e.from - 1] > *first_start[e.to - 1]) {
      report.violations.push_back({ViolationKind::Precedence, e.from, e.to});
    }
  }
  return report;
}

/// Completeness direction: group J_l runs on machine group M(l), one member
/// per machine, during the unit slot of job l.
inline GroupedSchedule forward_map_related(const RelatedReductionArtifact& art, const Schedule& umps_sched) {
  auto report = validate_umps(art.source, umps_sched);
  if (!report.feasible()) fail(ErrorCode::InfeasibleInput, "UMPS schedule is infeasible:\n" + report.describe());
  GroupedSchedule gs;
  for (const auto& [job, e] : umps_sched.entries) {
    const int group = art.machine_group_of.at(art.source.home(job) - 1);
    gs.blocks.push_back({job, group, art.output.job_group(job).multiplicity, e.start, e.end});
  }
  return gs;
}

/// Explicit related instance for a grouped one. Members of job group g get
/// consecutive ids starting at job_offset[g-1] + 1; machines likewise.
struct MaterializedRelated {
  RelatedInstance instance;
  std::vector<std::int64_t> job_offset;
  std::vector<std::int64_t> machine_offset;
  std::vector<int> job_group_of;      // job -> job group
  std::vector<int> machine_group_of;  // machine -> machine group
};

inline constexpr std::int64_t kMaterializeLimit = 1'000'000;

inline MaterializedRelated materialize(const GroupedRelatedInstance& inst, std::int64_t limit = kMaterializeLimit) {
  if (inst.expanded_job_count() > limit || inst.expanded_machine_count() > limit) {
    fail(ErrorCode::TooLargeToMaterialize, "expanded instance exceeds " + std::to_string(limit) + " jobs or machines");
  }
  BigInt edge_total = 0;
  for (const Edge& e : inst.group_dag().edges()) {
    edge_total += inst.job_group(e.from).multiplicity * inst.job_group(e.to).multiplicity;
  }
  if (edge_total > limit) fail(ErrorCode::TooLargeToMaterialize, "expanded precedence relation is too large");

  MaterializedRelated out;
  std::vector<std::int64_t> lengths, speeds;
  for (int g = 1; g <= inst.job_group_count(); ++g) {
    const auto& jg = inst.job_group(g);
    out.job_offset.push_back(static_cast<std::int64_t>(lengths.size()));
    const auto count = jg.multiplicity.convert_to<std::int64_t>();
    for (std::int64_t c = 0; c < count; ++c) {
      lengths.push_back(jg.length.convert_to<std::int64_t>());
      out.job_group_of.push_back(g);
    }
  }
  for (int g = 1; g <= inst.machine_group_count(); ++g) {
    const auto& mg = inst.machine_group(g);
    out.machine_offset.push_back(static_cast<std::int64_t>(speeds.size()));
    const auto count = mg.multiplicity.convert_to<std::int64_t>();
    for (std::int64_t c = 0; c < count; ++c) {
      speeds.push_back(mg.speed.convert_to<std::int64_t>());
      out.machine_group_of.push_back(g);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : inst.group_dag().edges()) {
    const auto from_count = inst.job_group(e.from).multiplicity.convert_to<std::int64_t>();
    const auto to_count = inst.job_group(e.to).multiplicity.convert_to<std::int64_t>();
    for (std::int64_t a = 1; a <= from_count; ++a) {
      for (std::int64_t b = 1; b <= to_count; ++b) {
        edges.push_back({static_cast<int>(out.job_offset[e.from - 1] + a), static_cast<int>(out.job_offset[e.to - 1] + b)});
      }
    }
  }
  const int job_count = static_cast<int>(lengths.size());
  out.instance = RelatedInstance(std::move(speeds), std::move(lengths), PrecedenceDag(job_count, std::move(edges)));
  return out;
}

/// Expands blocks onto concrete machines: blocks are taken by start time and
/// each member goes to the lowest-indexed machine of its group that is free.
inline Schedule materialize_schedule(const GroupedRelatedInstance& inst, const MaterializedRelated& mat,
                                     const GroupedSchedule& gs) {
  std::vector<std::size_t> order(gs.blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gs.blocks[a].start < gs.blocks[b].start; });
  std::vector<std::vector<Rational>> free_at(inst.machine_group_count());
  for (int g = 1; g <= inst.machine_group_count(); ++g) {
    free_at[g - 1].assign(inst.machine_group(g).multiplicity.convert_to<std::size_t>(), Rational(0));
  }
  std::vector<std::int64_t> next_member(inst.job_group_count(), 0);
  Schedule out;
  for (std::size_t k : order) {
    const auto& b = gs.blocks[k];
    auto& machines = free_at[b.machine_group - 1];
    auto remaining = b.count.convert_to<std::int64_t>();
    for (std::size_t slot = 0; slot < machines.size() && remaining > 0; ++slot) {
      if (machines[slot] > b.start) continue;
      machines[slot] = b.end;
      const JobId job = static_cast<JobId>(mat.job_offset[b.job_group - 1] + (++next_member[b.job_group - 1]));
      const MachineId machine = static_cast<MachineId>(mat.machine_offset[b.machine_group - 1] + slot + 1);
      out.place(job, machine, b.start, b.end);
      --remaining;
    }
    if (remaining > 0) fail(ErrorCode::InfeasibleInput, "machine group " + std::to_string(b.machine_group) + " over capacity");
  }
  return out;
}

/// Inverse of materialize_schedule: one block per job.
inline GroupedSchedule group_schedule(const MaterializedRelated& mat, const Schedule& sched) {
  GroupedSchedule gs;
  for (const auto& [job, e] : sched.entries) {
    gs.blocks.push_back({mat.job_group_of.at(job - 1), mat.machine_group_of.at(e.machine - 1), 1, e.start, e.end});
  }
  return gs;
}

// ---------------------------------------------------------------------------
// k-partite partitioning -> UMPS
// ---------------------------------------------------------------------------

/// cells[i-1][j] lists the vertices of V_{i,j}, j = 0..Q-1.
struct KPartiteYesCertificate {
  std::vector<std::vector<std::vector<int>>> cells;
  bool operator==(const KPartiteYesCertificate&) const = default;
};

inline JobId kpartite_job(const KPartiteInstance& g, int layer, int vertex) { return (layer - 1) * g.n() + vertex; }

/// One unit job per vertex, layer i on machine i, one precedence per edge.
inline UmpsInstance kpartite_to_umps(const KPartiteInstance& g) {
  const int total = g.n() * g.k();
  std::vector<MachineId> home(total);
  for (int layer = 1; layer <= g.k(); ++layer) {
    for (int v = 1; v <= g.n(); ++v) home[kpartite_job(g, layer, v) - 1] = layer;
  }
  std::vector<Edge> edges;
  for (int layer = 1; layer < g.k(); ++layer) {
    for (const auto& [a, b] : g.edges(layer)) edges.push_back({kpartite_job(g, layer, a), kpartite_job(g, layer + 1, b)});
  }
  return UmpsInstance(g.k(), std::vector<std::int64_t>(total, 1), std::move(home), PrecedenceDag(total, std::move(edges)));
}

inline void validate_certificate(const KPartiteInstance& g, const KPartiteYesCertificate& cert) {
  if (static_cast<int>(cert.cells.size()) != g.k()) fail(ErrorCode::InvalidCertificate, "need one partition per layer");
  const Rational min_size = (1 - g.eps()) * g.n() / g.q();
  std::vector<std::vector<int>> cell_of(g.k(), std::vector<int>(g.n(), -1));
  for (int layer = 1; layer <= g.k(); ++layer) {
    const auto& cells = cert.cells[layer - 1];
    if (static_cast<int>(cells.size()) != g.q()) {
      fail(ErrorCode::InvalidCertificate, "layer " + std::to_string(layer) + " does not have Q cells");
    }
    for (int j = 0; j < g.q(); ++j) {
      if (Rational(static_cast<std::int64_t>(cells[j].size())) < min_size) {
        fail(ErrorCode::InvalidCertificate, "cell V_{" + std::to_string(layer) + "," + std::to_string(j) + "} too small");
      }
      for (int v : cells[j]) {
        if (v < 1 || v > g.n() || cell_of[layer - 1][v - 1] != -1) {
          fail(ErrorCode::InvalidCertificate, "layer " + std::to_string(layer) + " cells do not partition the layer");
        }
        cell_of[layer - 1][v - 1] = j;
      }
    }
    for (int v = 1; v <= g.n(); ++v) {
      if (cell_of[layer - 1][v - 1] == -1) {
        fail(ErrorCode::InvalidCertificate, "vertex " + std::to_string(v) + " of layer " + std::to_string(layer) + " uncovered");
      }
    }
  }
  for (int layer = 1; layer < g.k(); ++layer) {
    for (const auto& [a, b] : g.edges(layer)) {
      if (cell_of[layer - 1][a - 1] > cell_of[layer][b - 1]) {
        fail(ErrorCode::InvalidCertificate, "edge (" + std::to_string(a) + "," + std::to_string(b) + ") after layer " +
                                                std::to_string(layer) + " goes to an earlier cell");
      }
    }
  }
}

/// t_i = (i-1) n (eps + 1/Q).
inline Rational yes_offset(const KPartiteInstance& g, int layer) {
  return Rational(layer - 1) * g.n() * (g.eps() + Rational(BigInt(1), BigInt(g.q())));
}

/// Machine i runs V_{i,0}, V_{i,1}, ... back to back from t_i; inside a
/// cell vertices go in ascending order.
inline Schedule kpartite_yes_schedule(const KPartiteInstance& g, const KPartiteYesCertificate& cert) {
  validate_certificate(g, cert);
  Schedule sched;
  for (int layer = 1; layer <= g.k(); ++layer) {
    Rational clock = yes_offset(g, layer);
    for (const auto& cell : cert.cells[layer - 1]) {
      std::vector<int> sorted = cell;
      std::sort(sorted.begin(), sorted.end());
      for (int v : sorted) {
        sched.place(kpartite_job(g, layer, v), layer, clock, clock + 1);
        clock += 1;
      }
    }
  }
  return sched;
}

}  // namespace sched_reduce
