#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "model.hpp"
#include "reductions.hpp"
#include "rounding.hpp"

namespace sched_reduce {

// Randomness: every generator draws from std::mt19937_64 streams whose seeds
// come from SplitMix64 applied to (seed, stream tag). Draws use only raw
// 64-bit outputs plus rejection sampling, so results do not depend on the
// standard library's distribution implementations.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used to turn a stream name into a tag.
inline constexpr std::uint64_t stream_tag(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream) : engine_(splitmix64(seed ^ splitmix64(stream_tag(stream)))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) fail(ErrorCode::InvalidInstance, "empty sampling range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform on [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// True with probability p; p must be a rational in [0, 1] whose
  /// denominator fits in 64 bits.
  bool bernoulli(const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    const auto num = boost::multiprecision::numerator(p).convert_to<std::uint64_t>();
    const auto den = boost::multiprecision::denominator(p).convert_to<std::uint64_t>();
    return below(den) < num;
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t k = items.size(); k > 1; --k) std::swap(items[k - 1], items[below(k)]);
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline void require_probability(const Rational& p, std::string_view what) {
  if (p < 0 || p > 1) fail(ErrorCode::InvalidInstance, std::string(what) + " must lie in [0, 1]");
}

}  // namespace detail

/// m layers of w unit jobs; job (i, a) is (i-1)w + a on machine i, and each
/// edge (i, a) -> (i+1, b) is kept with probability edge_prob.
inline UmpsInstance gen_layered_umps(int layers, int per_layer, const Rational& edge_prob, std::uint64_t seed) {
  if (layers < 1 || per_layer < 1) fail(ErrorCode::InvalidInstance, "layers and per_layer must be positive");
  detail::require_probability(edge_prob, "edge_prob");
  Rng rng(seed, "layered.edges");
  const int n = layers * per_layer;
  std::vector<MachineId> home(n);
  for (int i = 1; i <= layers; ++i) {
    for (int a = 1; a <= per_layer; ++a) home[(i - 1) * per_layer + a - 1] = i;
  }
  std::vector<Edge> edges;
  for (int i = 1; i < layers; ++i) {
    for (int a = 1; a <= per_layer; ++a) {
      for (int b = 1; b <= per_layer; ++b) {
        if (rng.bernoulli(edge_prob)) edges.push_back({(i - 1) * per_layer + a, i * per_layer + b});
      }
    }
  }
  return UmpsInstance(layers, std::vector<std::int64_t>(n, 1), std::move(home), PrecedenceDag(n, std::move(edges)));
}

/// Every edge goes from machine i to machine i + 1.
inline bool is_layered(const UmpsInstance& inst) {
  return std::all_of(inst.dag().edges().begin(), inst.dag().edges().end(),
                     [&](const Edge& e) { return inst.home(e.to) == inst.home(e.from) + 1; });
}

/// Homes uniform over 1..m; each pair a < b becomes an edge a -> b with
/// probability edge_prob. Lengths are 1 unless a range is given.
inline UmpsInstance gen_random_umps(int n, int m, const Rational& edge_prob, std::uint64_t seed,
                                    std::optional<std::pair<std::int64_t, std::int64_t>> length_range = std::nullopt) {
  if (n < 1 || m < 1) fail(ErrorCode::InvalidInstance, "n and m must be positive");
  detail::require_probability(edge_prob, "edge_prob");
  Rng home_rng(seed, "random.homes");
  Rng edge_rng(seed, "random.edges");
  Rng length_rng(seed, "random.lengths");
  std::vector<MachineId> home(n);
  for (auto& h : home) h = 1 + static_cast<int>(home_rng.below(m));
  std::vector<std::int64_t> lengths(n, 1);
  if (length_range) {
    const auto [lo, hi] = *length_range;
    if (lo < 1 || hi < lo) fail(ErrorCode::InvalidInstance, "bad length range");
    for (auto& p : lengths) p = length_rng.between(lo, hi);
  }
  std::vector<Edge> edges;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (edge_rng.bernoulli(edge_prob)) edges.push_back({a, b});
    }
  }
  return UmpsInstance(m, std::move(lengths), std::move(home), PrecedenceDag(n, std::move(edges)));
}

/// Random machine per operation, durations 1..4.
inline JobShopInstance gen_jobshop(int jobs, int machines, int ops_per_job, std::uint64_t seed) {
  if (jobs < 1 || machines < 1 || ops_per_job < 1) fail(ErrorCode::InvalidInstance, "job shop sizes must be positive");
  Rng rng(seed, "jobshop.ops");
  std::vector<std::vector<Operation>> chains(jobs);
  for (auto& chain : chains) {
    for (int k = 0; k < ops_per_job; ++k) {
      const int machine = 1 + static_cast<int>(rng.below(machines));
      chain.push_back({machine, rng.between(1, 4)});
    }
  }
  return JobShopInstance(machines, std::move(chains));
}

/// Every job visits machines 1, 2, ..., m exactly once in that order.
inline JobShopInstance gen_flow_shop(int jobs, int machines, std::uint64_t seed) {
  if (jobs < 1 || machines < 1) fail(ErrorCode::InvalidInstance, "flow shop sizes must be positive");
  Rng rng(seed, "flowshop.ops");
  std::vector<std::vector<Operation>> chains(jobs);
  for (auto& chain : chains) {
    for (int i = 1; i <= machines; ++i) chain.push_back({i, rng.between(1, 4)});
  }
  return JobShopInstance(machines, std::move(chains));
}

inline bool is_flow_shop(const JobShopInstance& js) {
  for (const auto& chain : js.jobs()) {
    if (static_cast<int>(chain.size()) != js.machine_count()) return false;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      if (chain[k].machine != static_cast<int>(k) + 1) return false;
    }
  }
  return true;
}

struct PlantedKPartite {
  KPartiteInstance instance;
  KPartiteYesCertificate certificate;
};

/// Q = k, eps = delta = 1/k. Each layer is split into Q cells of exactly
/// n/Q vertices; edges only run from cell j1 to a cell j2 >= j1 of the next
/// layer, each kept with probability edge_prob.
inline PlantedKPartite gen_kpartite_yes(int n, int k, std::uint64_t seed, const Rational& edge_prob = Rational(1, 2)) {
  if (k < 2 || n < 1) fail(ErrorCode::InvalidInstance, "planted instances need k >= 2 and n >= 1");
  if (n % k != 0) fail(ErrorCode::DivisibilityError, "n = " + std::to_string(n) + " is not divisible by Q = " + std::to_string(k));
  detail::require_probability(edge_prob, "edge_prob");
  Rng cell_rng(seed, "kpartite.cells");
  Rng edge_rng(seed, "kpartite.edges");
  const int q = k;
  const int size = n / q;
  KPartiteYesCertificate cert;
  std::vector<std::vector<int>> cell_of(k, std::vector<int>(n + 1));
  for (int layer = 1; layer <= k; ++layer) {
    std::vector<int> vertices(n);
    std::iota(vertices.begin(), vertices.end(), 1);
    cell_rng.shuffle(vertices);
    std::vector<std::vector<int>> cells(q);
    for (int j = 0; j < q; ++j) {
      cells[j].assign(vertices.begin() + j * size, vertices.begin() + (j + 1) * size);
      std::sort(cells[j].begin(), cells[j].end());
      for (int v : cells[j]) cell_of[layer - 1][v] = j;
    }
    cert.cells.push_back(std::move(cells));
  }
  std::vector<std::vector<KPartiteInstance::LayerEdge>> edges(k - 1);
  for (int layer = 1; layer < k; ++layer) {
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        if (cell_of[layer - 1][a] > cell_of[layer][b]) continue;
        if (edge_rng.bernoulli(edge_prob)) edges[layer - 1].push_back({a, b});
      }
    }
  }
  const Rational inv_k(BigInt(1), BigInt(k));
  return {KPartiteInstance(k, n, std::move(edges), q, inv_k, inv_k), std::move(cert)};
}

/// Each consecutive-layer edge present with probability density; Q = k and
/// eps = delta = 1/k.
inline KPartiteInstance gen_kpartite_dense(int n, int k, const Rational& density, std::uint64_t seed) {
  if (k < 2 || n < 1) fail(ErrorCode::InvalidInstance, "dense instances need k >= 2 and n >= 1");
  detail::require_probability(density, "density");
  Rng rng(seed, "kpartite.dense");
  std::vector<std::vector<KPartiteInstance::LayerEdge>> edges(k - 1);
  for (int layer = 1; layer < k; ++layer) {
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        if (rng.bernoulli(density)) edges[layer - 1].push_back({a, b});
      }
    }
  }
  const Rational inv_k(BigInt(1), BigInt(k));
  return KPartiteInstance(k, n, std::move(edges), k, inv_k, inv_k);
}

struct FractionalGenStats {
  int splits = 0;
  int cannot_split = 0;
  Rational deleted = 0;
};

/// Perturbs an integral unit-job schedule with integer start times. Each job
/// is split with probability split_prob: a quarter, half or three quarters
/// of its mass (capped by the free capacity) moves to a uniformly chosen
/// later slot that stays before all its successors. Jobs with no such slot
/// stay integral and are counted in stats->cannot_split. Then a multiple of
/// gamma/4, at most gamma, is deleted from each job's last slot.
inline FractionalSchedule gen_fractional(const UmpsInstance& inst, const Schedule& sched, const Rational& gamma,
                                         const Rational& split_prob, std::uint64_t seed,
                                         FractionalGenStats* stats = nullptr) {
  if (!inst.unit_lengths()) fail(ErrorCode::NonUnitLengths, "fractional schedules need unit jobs");
  detail::require_probability(split_prob, "split_prob");
  auto report = validate_umps(inst, sched);
  if (!report.feasible()) fail(ErrorCode::InfeasibleInput, "schedule is infeasible:\n" + report.describe());
  const Rational span = makespan(sched);
  if (!is_integer(span)) fail(ErrorCode::InvalidInstance, "schedule must use integer start times");
  const int horizon = span.convert_to<int>();
  FractionalSchedule fs(inst, horizon, gamma);
  std::vector<int> slot(inst.n() + 1);
  for (JobId l = 1; l <= inst.n(); ++l) {
    const Rational& start = sched.at(l).start;
    if (!is_integer(start)) fail(ErrorCode::InvalidInstance, "schedule must use integer start times");
    slot[l] = start.convert_to<int>() + 1;
    fs.set_mass(l, slot[l], 1);
  }
  FractionalGenStats local;
  Rng split_rng(seed, "fractional.split");
  Rng delete_rng(seed, "fractional.delete");
  for (JobId l = 1; l <= inst.n(); ++l) {
    if (!split_rng.bernoulli(split_prob)) continue;
    int limit = horizon;
    for (JobId v : inst.dag().successors(l)) limit = std::min(limit, window_of(fs, v).start - 1);
    std::vector<int> targets;
    for (int t = slot[l] + 1; t <= limit; ++t) {
      if (fs.load(inst.home(l), t) < 1) targets.push_back(t);
    }
    if (targets.empty()) {
      ++local.cannot_split;
      continue;
    }
    const int target = targets[split_rng.below(targets.size())];
    const Rational share(static_cast<std::int64_t>(1 + split_rng.below(3)), 4);
    const Rational moved = std::min<Rational>(share, 1 - fs.load(inst.home(l), target));
    fs.add_mass(l, slot[l], -moved);
    fs.add_mass(l, target, moved);
    ++local.splits;
  }
  for (JobId l = 1; l <= inst.n(); ++l) {
    const int last = window_of(fs, l).end;
    const Rational cut = std::min<Rational>(gamma * static_cast<std::int64_t>(delete_rng.below(5)) / 4, fs.mass(l, last));
    fs.add_mass(l, last, -cut);
    local.deleted += cut;
  }
  require_properties(fs, "gen_fractional output");
  if (stats) *stats = local;
  return fs;
}

}  // namespace sched_reduce
