// Walks the eight-job example through the comm-delay reduction: solve the
// UMPS instance, map its optimum forward, solve the reduced instance and map
// that optimum back.

#include <iostream>

#include "sched_reduce/reductions.hpp"
#include "sched_reduce/solvers.hpp"

using namespace sched_reduce;

int main() {
  const UmpsInstance three_machine(3, std::vector<std::int64_t>(8, 1), {1, 1, 1, 2, 2, 2, 3, 3},
                                  PrecedenceDag(8, {{4, 1}, {1, 5}, {6, 2}, {3, 6}, {6, 7}, {7, 5}, {8, 4}}));

  const SolveResult source = solve_umps_exact(three_machine);
  std::cout << "UMPS optimum: " << to_string(source.optimum) << "\n";

  const auto art = umps_to_commdelay(three_machine);
  std::cout << "reduced instance: " << art.output.n_total() << " jobs, C_inf = " << art.c_infinity << "\n";

  const Schedule forward = forward_map_commdelay(art, source.schedule);
  std::cout << "forward-mapped makespan: " << to_string(makespan(forward)) << "\n";

  SolveLimits lim;
  lim.max_jobs = 11;
  const SolveResult target = solve_commdelay_exact(art.output, lim);
  std::cout << "comm-delay optimum: " << to_string(target.optimum) << "\n";

  const Schedule back = backward_map_commdelay(art, target.schedule);
  std::cout << "mapped back: makespan " << to_string(makespan(back)) << ", "
            << (validate_umps(three_machine, back).feasible() ? "feasible" : "infeasible") << "\n";
  for (const auto& [job, e] : back.entries) {
    std::cout << "  job " << job << " machine " << e.machine << " [" << to_string(e.start) << ", " << to_string(e.end)
              << ")\n";
  }
  return 0;
}
