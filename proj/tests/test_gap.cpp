#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bauc/gap.hpp"
#include "bauc/harness.hpp"
#include "oracles.hpp"

using namespace bauc;

namespace {

GapInstance<double> twoJobMachine(double capacity, double c1, double c2) {
  GapInstance<double> gap;
  gap.capacities = {0.0, capacity};
  gap.jobs = 2;
  gap.processing = {{0.0, 0.0}, {1.0, 1.0}};
  gap.cost = {{0.0, 0.0}, {c1, c2}};
  return gap;
}

}  // namespace

TEST_CASE("buildGapFromBavwm lays out dummy, hat, and bar machines") {
  const auto inst = normalize(testing::footnoteInstanceExact());
  auto [gap, map] = buildGapFromBavwm(inst);
  REQUIRE(gap.machines() == 3);
  CHECK(map.dummy == 0);
  CHECK(map.hatMachine[0] == 1);
  CHECK(map.barMachine[0] == 2);
  CHECK(gap.capacities[0] == Rational(0));
  CHECK(gap.capacities[1] == Rational(0));
  CHECK(gap.capacities[2] == Rational(3));
  // bar costs m_i*v_ij + w_ij = 3 - 2 = 1
  CHECK(gap.cost[2][0] == Rational(1));
  CHECK(gap.cost[2][1] == Rational(1));
  CHECK(gap.processing[2][0] == Rational(3));
  CHECK(gap.cost[1][0] == Rational(-2));
  CHECK(gap.processing[1][0] == Rational(0));
}

TEST_CASE("buildGapFromBavwm with no agents leaves only the dummy machine") {
  BavwmInstance<double> inst;
  inst.agents = 0;
  inst.items = 3;
  inst.normalized = true;
  auto [gap, map] = buildGapFromBavwm(inst);
  CHECK(gap.machines() == 1);
  CHECK(map.roleOf[0].kind == GapBavwmMap::Role::Dummy);
  const auto frac = solveGapLp(gap);
  CHECK(fractionalCost(gap, frac) == doctest::Approx(0.0));
  const auto rounded = stRound(gap, frac);
  for (int j = 0; j < 3; ++j) CHECK(rounded.machineOf[j] == 0);
}

TEST_CASE("buildGapFromBavwm matches the hand formula on a 2-agent instance") {
  GeneratorConfig cfg;
  cfg.seed = 31;
  cfg.count = 1;
  cfg.agentsMin = cfg.agentsMax = 2;
  cfg.itemsMin = cfg.itemsMax = 3;
  const auto inst = generateInstances(cfg).front();
  auto [gap, map] = buildGapFromBavwm(inst);
  CHECK(gap.machines() == 5);
  const int i = 1, j = 2;
  CHECK(gap.cost[map.barMachine[i]][j] ==
        doctest::Approx(inst.multipliers[i] * inst.values[i][j] + inst.virtualValues[i][j]));
  CHECK(gap.processing[map.barMachine[i]][j] == inst.values[i][j]);
  CHECK(gap.capacities[map.barMachine[i]] == inst.budgets[i]);
  CHECK(gap.cost[map.hatMachine[i]][j] == inst.virtualValues[i][j]);
}

TEST_CASE("buildGapFromBavwm rejects unnormalized instances") {
  CHECK_THROWS_AS(buildGapFromBavwm(testing::footnoteInstance()), std::invalid_argument);
}

TEST_CASE("GAP LP packs both jobs when there is slack capacity") {
  const auto gap = twoJobMachine(2.0, 5.0, 4.0);
  const auto frac = solveGapLp(gap);
  CHECK(fractionalCost(gap, frac) == doctest::Approx(9.0));
}

// Vertices of {x >= 0, x1 + x2 <= 1} are (0,0), (1,0), (0,1); with costs
// (5,4) the best is 5, job 2 going to the dummy.
TEST_CASE("GAP LP respects tight capacity") {
  const auto gap = twoJobMachine(1.0, 5.0, 4.0);
  double bestVertex = 0.0;
  const double vertices[][2] = {{0, 0}, {1, 0}, {0, 1}};
  for (const auto& v : vertices) bestVertex = std::max(bestVertex, 5.0 * v[0] + 4.0 * v[1]);
  CHECK(bestVertex == 5.0);

  const auto frac = solveGapLp(gap);
  CHECK(fractionalCost(gap, frac) == doctest::Approx(5.0));
  CHECK(frac.x[1][0] + frac.x[1][1] == doctest::Approx(1.0));
}

TEST_CASE("jobs that fit nowhere else go to the dummy at cost zero") {
  GapInstance<double> gap;
  gap.capacities = {0.0, 1.0};
  gap.jobs = 1;
  gap.processing = {{0.0}, {5.0}};  // p > T on the real machine
  gap.cost = {{0.0}, {100.0}};
  const auto frac = solveGapLp(gap);
  CHECK(frac.x[0][0] == doctest::Approx(1.0));
  CHECK(frac.x[1][0] == 0.0);
  CHECK(fractionalCost(gap, frac) == doctest::Approx(0.0));
}

TEST_CASE("GAP LP throws when a job has no eligible machine") {
  GapInstance<double> gap;
  gap.capacities = {1.0};
  gap.jobs = 1;
  gap.processing = {{5.0}};
  gap.cost = {{100.0}};
  CHECK_THROWS_AS(solveGapLp(gap), InfeasibleError);
}

TEST_CASE("stRound keeps an already-integral assignment") {
  const auto gap = twoJobMachine(2.0, 5.0, 4.0);
  FractionalAssignment<double> frac;
  frac.x = {{0.0, 1.0}, {1.0, 0.0}};
  const auto rounded = stRound(gap, frac);
  CHECK(rounded.machineOf[0] == 1);
  CHECK(rounded.machineOf[1] == 0);
}

// Hand-run of the slot construction: one slot on the machine holding halves
// of both jobs, one dummy slot. The matching must place one job on each, so
// the cost is 1 and the machine load stays at 1 <= 2T.
TEST_CASE("stRound splits a half-and-half fractional solution") {
  const auto gap = twoJobMachine(1.0, 1.0, 1.0);
  FractionalAssignment<double> frac;
  frac.x = {{0.5, 0.5}, {0.5, 0.5}};
  const auto rounded = stRound(gap, frac);
  const int onMachine = (rounded.machineOf[0] == 1) + (rounded.machineOf[1] == 1);
  CHECK(onMachine == 1);
  CHECK(assignmentCost(gap, rounded) == doctest::Approx(1.0));
  CHECK(machineLoads(gap, rounded)[1] <= 2.0 * gap.capacities[1] + 1e-9);
}

TEST_CASE("stRound rejects fractional inputs violating the invariants") {
  const auto gap = twoJobMachine(1.0, 1.0, 1.0);
  FractionalAssignment<double> frac;
  frac.x = {{0.5, 0.5}, {0.2, 0.5}};  // job 1 sums to 0.7
  CHECK_THROWS_AS(stRound(gap, frac), std::invalid_argument);
}

TEST_CASE("footnote pipeline rounds to one bar item") {
  const auto inst = normalize(testing::footnoteInstanceExact());
  auto [gap, map] = buildGapFromBavwm(inst);
  // relaxation optimum xbar_11 = 1 routed through the GAP machines
  FractionalAssignment<Rational> frac;
  frac.x.assign(3, std::vector<Rational>(2, Rational(0)));
  frac.x[map.barMachine[0]][0] = Rational(1);
  frac.x[map.dummy][1] = Rational(1);
  const auto rounded = stRound(gap, frac);
  CHECK(assignmentCost(gap, rounded) >= fractionalCost(gap, frac));
  const auto loads = machineLoads(gap, rounded);
  CHECK(loads[map.barMachine[0]] <= Rational(2) * inst.budgets[0]);
}

TEST_CASE("rounding bounds hold over 200 random instances") {
  testing::Rng rng(500);
  GeneratorConfig cfg;
  cfg.seed = 32;
  cfg.count = 100;
  cfg.itemsMax = 5;
  int done = 0;
  // half embedded from BAVWM, half raw GAP with a fallback machine
  for (const auto& inst : generateInstances(cfg)) {
    auto [gap, map] = buildGapFromBavwm(inst);
    (void)map;
    const auto frac = solveGapLp(gap);
    const auto rounded = stRound(gap, frac);
    const auto loads = machineLoads(gap, rounded);
    for (int i = 0; i < gap.machines(); ++i)
      REQUIRE(loads[i] <= 2.0 * gap.capacities[i] + 1e-9);
    REQUIRE(assignmentCost(gap, rounded) >= fractionalCost(gap, frac) - 1e-9);
    ++done;
  }
  for (int rep = 0; rep < 100; ++rep) {
    const auto gap = testing::randomGap(rng, 5, 6);
    const auto frac = solveGapLp(gap);
    const auto rounded = stRound(gap, frac);
    const auto loads = machineLoads(gap, rounded);
    for (int i = 0; i < gap.machines(); ++i)
      REQUIRE(loads[i] <= 2.0 * gap.capacities[i] + 1e-9);
    REQUIRE(assignmentCost(gap, rounded) >= fractionalCost(gap, frac) - 1e-9);
    ++done;
  }
  CHECK(done == 200);
}

TEST_CASE("GAP LP dominates random feasible integral assignments") {
  testing::Rng rng(501);
  for (int rep = 0; rep < 20; ++rep) {
    const auto gap = testing::randomGap(rng, 4, 5);
    const auto frac = solveGapLp(gap);
    const double lpCost = fractionalCost(gap, frac);
    int sampled = 0;
    for (int s = 0; s < 50; ++s) {
      const auto assign = testing::randomFeasibleAssignment(gap, rng);
      if (!assign) continue;
      ++sampled;
      CHECK(lpCost >= assignmentCost(gap, *assign) - 1e-9);
    }
    CHECK(sampled > 0);
  }
}
