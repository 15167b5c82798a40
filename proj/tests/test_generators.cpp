#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sched_reduce/generators.hpp"
#include "sched_reduce/reductions.hpp"
#include "sched_reduce/solvers.hpp"

using namespace sched_reduce;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Parse;
}

}  // namespace

TEST(Rng, KnownSplitmixValues) {
  // Reference outputs of splitmix64 for state 0 and 1 after one increment.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(1), 0x910a2dec89025cc1ULL);
}

TEST(Rng, StreamsAreIndependentAndRepeatable) {
  Rng a(7, "x"), b(7, "x"), c(7, "y");
  const auto first = a.next();
  EXPECT_EQ(first, b.next());
  EXPECT_NE(first, c.next());
}

TEST(Rng, BelowAndBernoulliStayInRange) {
  Rng r(3, "range");
  int hits = 0;
  for (int k = 0; k < 2000; ++k) {
    ASSERT_LT(r.below(7), 7u);
    const auto v = r.between(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    hits += r.bernoulli(make_rational(1, 4));
  }
  EXPECT_GT(hits, 350);
  EXPECT_LT(hits, 650);
  EXPECT_FALSE(Rng(1, "z").bernoulli(0));
  EXPECT_TRUE(Rng(1, "z").bernoulli(1));
}

TEST(GenLayered, Examples) {
  const auto full = gen_layered_umps(3, 2, 1, 42);
  EXPECT_EQ(full.n(), 6);
  EXPECT_EQ(full.dag().edges().size(), 8u);
  EXPECT_TRUE(is_layered(full));

  const auto empty = gen_layered_umps(2, 3, 0, 42);
  EXPECT_TRUE(empty.dag().edges().empty());
  EXPECT_EQ(solve_umps_exact(empty).optimum, 3);

  EXPECT_EQ(gen_layered_umps(3, 3, make_rational(1, 2), 7), gen_layered_umps(3, 3, make_rational(1, 2), 7));
  EXPECT_NE(gen_layered_umps(3, 3, make_rational(1, 2), 7), gen_layered_umps(3, 3, make_rational(1, 2), 8));
}

TEST(GenLayered, EdgesGoToTheNextMachine) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = gen_layered_umps(1 + static_cast<int>(seed % 4), 1 + static_cast<int>(seed % 3), make_rational(1, 2), seed);
    EXPECT_TRUE(inst.unit_lengths());
    for (const Edge& e : inst.dag().edges()) EXPECT_EQ(inst.home(e.to), inst.home(e.from) + 1);
  }
  EXPECT_FALSE(is_layered(fixtures::three_machine()));
}

TEST(GenLayered, RejectsBadProbability) {
  EXPECT_EQ(code_of([] { gen_layered_umps(2, 2, make_rational(3, 2), 1); }), ErrorCode::InvalidInstance);
}

TEST(GenRandom, ShapeAndLengths) {
  const auto unit = gen_random_umps(7, 3, make_rational(1, 2), 5);
  EXPECT_TRUE(unit.unit_lengths());
  for (const Edge& e : unit.dag().edges()) EXPECT_LT(e.from, e.to);
  const auto ranged = gen_random_umps(30, 2, 0, 5, std::make_pair<std::int64_t, std::int64_t>(2, 4));
  for (auto p : ranged.lengths()) {
    EXPECT_GE(p, 2);
    EXPECT_LE(p, 4);
  }
  EXPECT_EQ(gen_random_umps(6, 2, 1, 3).dag().edges().size(), 15u);
  EXPECT_EQ(gen_random_umps(6, 2, make_rational(1, 3), 11), gen_random_umps(6, 2, make_rational(1, 3), 11));
}

TEST(GenJobShop, Examples) {
  const auto one = gen_jobshop(1, 1, 1, 1);
  EXPECT_EQ(jobshop_to_umps(one).umps.n(), 1);
  const auto js = gen_jobshop(2, 2, 2, 9);
  const auto emb = jobshop_to_umps(js);
  EXPECT_EQ(emb.umps.n(), 4);
  EXPECT_EQ(emb.umps.dag().edges().size(), 2u);
  for (const auto& chain : js.jobs()) {
    for (const auto& op : chain) {
      EXPECT_GE(op.duration, 1);
      EXPECT_LE(op.duration, 4);
    }
  }
  EXPECT_EQ(gen_jobshop(3, 2, 3, 4), gen_jobshop(3, 2, 3, 4));
}

TEST(GenJobShop, FlowShopPredicate) {
  const auto flow = gen_flow_shop(3, 4, 2);
  EXPECT_TRUE(is_flow_shop(flow));
  EXPECT_EQ(jobshop_to_umps(flow).umps.n(), 12);
  EXPECT_FALSE(is_flow_shop(JobShopInstance(2, {{{2, 1}, {1, 1}}})));
}

TEST(GenKPartiteYes, Examples) {
  const auto planted = gen_kpartite_yes(4, 2, 1);
  EXPECT_EQ(planted.instance.q(), 2);
  EXPECT_EQ(planted.instance.eps(), make_rational(1, 2));
  for (const auto& layer : planted.certificate.cells) {
    for (const auto& cell : layer) EXPECT_EQ(cell.size(), 2u);
  }
  EXPECT_NO_THROW(validate_certificate(planted.instance, planted.certificate));
  EXPECT_LE(makespan(kpartite_yes_schedule(planted.instance, planted.certificate)), 12);

  const auto bare = gen_kpartite_yes(6, 3, 1, 0);
  EXPECT_EQ(bare.instance.edge_count(), 0u);
  EXPECT_TRUE(validate_umps(kpartite_to_umps(bare.instance), kpartite_yes_schedule(bare.instance, bare.certificate)).feasible());

  EXPECT_EQ(code_of([] { gen_kpartite_yes(5, 2, 1); }), ErrorCode::DivisibilityError);
  EXPECT_EQ(code_of([] { gen_kpartite_yes(4, 1, 1); }), ErrorCode::InvalidInstance);
}

TEST(GenKPartiteYes, CertificatesAlwaysValidAndLayered) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int k = 2 + static_cast<int>(seed % 3);
    const int n = k * (1 + static_cast<int>(seed % 2));
    const auto planted = gen_kpartite_yes(n, k, seed);
    ASSERT_NO_THROW(validate_certificate(planted.instance, planted.certificate)) << seed;
    ASSERT_TRUE(is_layered(kpartite_to_umps(planted.instance)));
    ASSERT_EQ(planted.instance.delta(), make_rational(1, k));
  }
}

TEST(GenKPartiteDense, Examples) {
  const auto full = gen_kpartite_dense(4, 3, 1, 2);
  EXPECT_EQ(full.edge_count(), 32u);
  EXPECT_EQ(full.q(), 3);
  EXPECT_EQ(full.delta(), make_rational(1, 3));
  EXPECT_EQ(gen_kpartite_dense(4, 3, 0, 2).edge_count(), 0u);
  EXPECT_EQ(gen_kpartite_dense(6, 3, make_rational(9, 10), 1), gen_kpartite_dense(6, 3, make_rational(9, 10), 1));
}

TEST(GenFractional, ZeroPerturbationIsIntegral) {
  const auto fs = gen_fractional(fixtures::three_machine(), fixtures::three_machine_schedule(), 0, 0, 3);
  for (JobId l = 1; l <= 8; ++l) {
    const int slot = fixtures::three_machine_schedule().at(l).end.convert_to<int>();
    for (int t = 1; t <= fs.horizon(); ++t) EXPECT_EQ(fs.mass(l, t), t == slot ? 1 : 0);
  }
}

TEST(GenFractional, OutputsSatisfyProperties) {
  int splits = 0, stuck = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const int n = 2 + static_cast<int>(seed % 4);
    const auto inst = gen_layered_umps(1 + static_cast<int>(seed % 3), n, make_rational(1, 3), seed);
    const Rational gamma = make_rational(1, 10 * inst.n() * inst.n());
    FractionalGenStats stats;
    const auto fs = gen_fractional(inst, greedy_umps(inst), gamma, make_rational(1, 2), seed, &stats);
    ASSERT_TRUE(check_properties(fs).ok()) << check_properties(fs).detail;
    for (JobId l = 1; l <= inst.n(); ++l) ASSERT_GE(fs.total(l), 1 - gamma);
    splits += stats.splits;
    stuck += stats.cannot_split;
  }
  EXPECT_GT(splits, 100);
  EXPECT_GT(stuck, 0);
}

TEST(GenFractional, ThreeMachinePipelineInput) {
  const auto a = gen_fractional(fixtures::three_machine(), fixtures::three_machine_schedule(), make_rational(1, 640), make_rational(1, 2), 1);
  const auto b = gen_fractional(fixtures::three_machine(), fixtures::three_machine_schedule(), make_rational(1, 640), make_rational(1, 2), 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.horizon(), 5);
  EXPECT_TRUE(check_properties(a).ok());
}

TEST(GenFractional, Guards) {
  const UmpsInstance two(1, {2}, {1}, PrecedenceDag(1, {}));
  EXPECT_EQ(code_of([&] { gen_fractional(two, trivial_serial_schedule(two), 0, 0, 1); }), ErrorCode::NonUnitLengths);
  auto bad = fixtures::three_machine_schedule();
  bad.place(5, 2, 0, 1);
  EXPECT_EQ(code_of([&] { gen_fractional(fixtures::three_machine(), bad, 0, 0, 1); }), ErrorCode::InfeasibleInput);
}
