#pragma once

#include "sched_reduce/model.hpp"

namespace fixtures {

using namespace sched_reduce;

/// Eight unit jobs on three machines: J(1) = {1,2,3}, J(2) = {4,5,6},
/// J(3) = {7,8}.
inline UmpsInstance three_machine() {
  return UmpsInstance(3, std::vector<std::int64_t>(8, 1), {1, 1, 1, 2, 2, 2, 3, 3},
                      PrecedenceDag(8, {{4, 1}, {1, 5}, {6, 2}, {3, 6}, {6, 7}, {7, 5}, {8, 4}}));
}

/// A makespan-5 schedule of three_machine().
inline Schedule three_machine_schedule() {
  Schedule s;
  const int rows[8][3] = {{3, 1, 0}, {8, 3, 0}, {6, 2, 1}, {2, 1, 2}, {4, 2, 2}, {7, 3, 2}, {1, 1, 3}, {5, 2, 4}};
  for (const auto& r : rows) s.place(r[0], r[1], Rational(r[2]), Rational(r[2] + 1));
  return s;
}

inline UmpsInstance unit_chain(int n, MachineId machine = 1, int m = 1) {
  std::vector<Edge> edges;
  for (int l = 1; l < n; ++l) edges.push_back({l, l + 1});
  return UmpsInstance(m, std::vector<std::int64_t>(n, 1), std::vector<MachineId>(n, machine),
                      PrecedenceDag(n, std::move(edges)));
}

}  // namespace fixtures

#include <random>

#include "sched_reduce/rounding.hpp"

namespace fixtures {

/// Random fractional schedule satisfying Properties 1-3 on a quarter grid.
/// Jobs take windows in topological order, each strictly after its
/// predecessors' windows; a window's mass is dealt out in quarters. Returns
/// nullopt when the draw runs out of room.
inline std::optional<FractionalSchedule> random_fractional(std::mt19937_64& rng, int n, int m, int horizon,
                                                           const Rational& gamma = 0) {
  std::vector<MachineId> home(n);
  for (auto& h : home) h = 1 + static_cast<int>(rng() % m);
  std::vector<Edge> edges;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (rng() % 4 == 0) edges.push_back({a, b});
    }
  }
  UmpsInstance inst(m, std::vector<std::int64_t>(n, 1), home, PrecedenceDag(n, std::move(edges)));
  FractionalSchedule fs(inst, horizon, gamma);
  std::vector<int> last(n + 1, 0);
  for (JobId l : inst.dag().order()) {
    int earliest = 1;
    for (JobId p : inst.dag().predecessors(l)) earliest = std::max(earliest, last[p] + 1);
    if (earliest > horizon) return std::nullopt;
    const int begin = earliest + static_cast<int>(rng() % 2);
    const int end = std::min(horizon, begin + static_cast<int>(rng() % 3));
    if (begin > horizon) return std::nullopt;
    // Quarters to place: 4, or 3 when gamma leaves room for a quarter cut.
    int quarters = gamma >= make_rational(1, 4) && rng() % 3 == 0 ? 3 : 4;
    while (quarters > 0) {
      std::vector<int> open;
      for (int t = begin; t <= end; ++t) {
        if (fs.load(home[l - 1], t) < 1) open.push_back(t);
      }
      if (open.empty()) return std::nullopt;
      const int t = open[rng() % open.size()];
      fs.add_mass(l, t, make_rational(1, 4));
      --quarters;
    }
    last[l] = window_of(fs, l).end;
  }
  return fs;
}

}  // namespace fixtures
