#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bauc/mechanism.hpp"
#include "oracles.hpp"

using namespace bauc;

namespace {

Prior<double> pointMassPrior(double value, double budget) {
  Prior<double> prior;
  prior.items = 1;
  prior.bidders = {{BidderType<double>{{value}, budget, 1.0}}};
  return prior;
}

Prior<double> twoTypePrior() {
  Prior<double> prior;
  prior.items = 1;
  prior.bidders = {{BidderType<double>{{1.0}, 10.0, 0.5}, BidderType<double>{{2.0}, 10.0, 0.5}}};
  return prior;
}

Prior<double> randomPrior(testing::Rng& rng, int maxBidders, int maxTypes, int items) {
  Prior<double> prior;
  prior.items = items;
  const int n = rng.integer(1, maxBidders);
  for (int i = 0; i < n; ++i) {
    const int types = rng.integer(1, maxTypes);
    std::vector<int> weights(types);
    int total = 0;
    for (int& w : weights) {
      w = rng.integer(1, 4);
      total += w;
    }
    std::vector<BidderType<double>> list;
    for (int t = 0; t < types; ++t) {
      BidderType<double> ty;
      for (int j = 0; j < items; ++j) ty.values.push_back(rng.real(0.0, 8.0));
      ty.budget = rng.real(0.0, 8.0);
      ty.probability = static_cast<double>(weights[t]) / total;
      list.push_back(std::move(ty));
    }
    prior.bidders.push_back(std::move(list));
  }
  return prior;
}

}  // namespace

TEST_CASE("point-mass bidder pays exactly the budget") {
  const auto sol = solveOptimalMechanism(pointMassPrior(10.0, 2.0));
  CHECK(sol.revenue == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("point-mass bidder with slack budget pays full surplus") {
  const auto sol = solveOptimalMechanism(pointMassPrior(2.0, 10.0));
  CHECK(sol.revenue == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("two-type prior matches the posted-price oracle") {
  const auto prior = twoTypePrior();
  const double oracle = testing::bestPostedPriceRevenue(prior);
  CHECK(oracle == doctest::Approx(1.0));
  const auto sol = solveOptimalMechanism(prior);
  CHECK(sol.revenue == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("exact arithmetic reproduces the two-type revenue") {
  Prior<Rational> prior;
  prior.items = 1;
  prior.bidders = {{BidderType<Rational>{{Rational(1)}, Rational(10), ratio(1, 2)},
                    BidderType<Rational>{{Rational(2)}, Rational(10), ratio(1, 2)}}};
  const auto sol = solveOptimalMechanism(prior);
  CHECK(sol.revenue == Rational(1));
}

TEST_CASE("LP outputs satisfy both constraint checkers") {
  testing::Rng rng(71);
  for (int rep = 0; rep < 8; ++rep) {
    const auto prior = randomPrior(rng, 2, 2, rep % 2 + 1);
    for (const BicMode mode : {BicMode::Full, BicMode::BudgetDownward}) {
      const auto sol = solveOptimalMechanism(prior, mode);
      CHECK(checkBic(sol, prior, mode, 1e-7).empty());
      CHECK(checkExPost(sol, prior, 1e-7).empty());
    }
  }
}

TEST_CASE("checkBic flags a type-independent price favoring the high type") {
  const auto prior = twoTypePrior();
  MechanismSolution<double> sol;
  sol.items = 1;
  sol.typeCounts = {2};
  sol.profiles = {{0}, {1}};
  sol.allocations = {{kUnassigned}, {0}};
  sol.lambda = {{1.0, 0.0}, {0.0, 1.0}};  // low type gets nothing, high type always wins
  sol.paymentMass = {{{0.5}, {0.0}}, {{0.0}, {0.5}}};  // both pay 0.5
  const auto violations = checkBic(sol, prior, BicMode::Full, 1e-7);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].bidder == 0);
  CHECK(violations[0].type == 0);
  CHECK(violations[0].misreport == 1);
  CHECK(violations[0].slack < 0.0);
}

TEST_CASE("checkBic is vacuous for single-type priors") {
  const auto prior = pointMassPrior(5.0, 3.0);
  const auto sol = solveOptimalMechanism(prior);
  CHECK(checkBic(sol, prior, BicMode::Full, 1e-7).empty());
}

TEST_CASE("checkExPost detects corrupted payment masses") {
  const auto prior = twoTypePrior();
  auto sol = solveOptimalMechanism(prior);
  sol.paymentMass[0][0][0] = sol.lambda[0][0] * 1.0 + 0.1;  // above any cap for alloc 0
  const auto violations = checkExPost(sol, prior, 1e-7);
  REQUIRE(!violations.empty());
  CHECK(violations[0].kind == ExPostViolation<double>::PaymentAboveCap);
}

TEST_CASE("mechanism machinery copes with an empty prior") {
  Prior<double> prior;
  prior.items = 2;
  const auto sol = solveOptimalMechanism(prior);
  CHECK(sol.revenue == doctest::Approx(0.0));
  CHECK(checkExPost(sol, prior, 1e-7).empty());
  CHECK(checkBic(sol, prior, BicMode::Full, 1e-7).empty());
}

TEST_CASE("interim forms match direct marginalization") {
  testing::Rng rng(72);
  const auto prior = [&] {
    Prior<double> p;
    p.items = 1;
    p.bidders = {{BidderType<double>{{2.0}, 5.0, 0.25}, BidderType<double>{{4.0}, 5.0, 0.75}},
                 {BidderType<double>{{3.0}, 1.0, 1.0}}};
    return p;
  }();
  const auto sol = solveOptimalMechanism(prior);
  // bidder 0, type t: pi_0(t) = sum over other-bidder types of Pr * lambda mass
  for (int t = 0; t < 2; ++t) {
    double pi = 0.0, pay = 0.0;
    for (std::size_t pr = 0; pr < sol.profiles.size(); ++pr) {
      if (sol.profiles[pr][0] != t) continue;
      const double prOthers = prior.bidders[1][sol.profiles[pr][1]].probability;
      for (std::size_t a = 0; a < sol.allocations.size(); ++a) {
        if (sol.allocations[a][0] == 0) pi += prOthers * sol.lambda[pr][a];
        pay += prOthers * sol.paymentMass[pr][a][0];
      }
    }
    CHECK(sol.interimAlloc[0][t][0] == doctest::Approx(pi).epsilon(1e-12));
    CHECK(sol.interimPay[0][t] == doctest::Approx(pay).epsilon(1e-12));
  }
}

TEST_CASE("budget-downward relaxation never loses revenue") {
  testing::Rng rng(73);
  for (int rep = 0; rep < 15; ++rep) {
    const auto prior = randomPrior(rng, 2, 2, rep % 2 + 1);
    const auto full = solveOptimalMechanism(prior, BicMode::Full);
    const auto down = solveOptimalMechanism(prior, BicMode::BudgetDownward);
    CHECK(down.revenue >= full.revenue - 1e-9);
  }
}

TEST_CASE("solveOptimalMechanism enforces the size limit") {
  testing::Rng rng(74);
  const auto prior = randomPrior(rng, 3, 3, 2);
  MechanismOptions opt;
  opt.sizeLimit = 4;
  CHECK_THROWS_AS(solveOptimalMechanism(prior, BicMode::Full, opt), SizeLimitError);
}

TEST_CASE("virtual welfare run with the identity mapping maximizes welfare") {
  Prior<double> prior;
  prior.items = 2;
  prior.bidders = {{BidderType<double>{{4.0, 1.0}, 10.0, 1.0}},
                   {BidderType<double>{{2.0, 3.0}, 10.0, 1.0}}};
  MappingDistribution<double> delta;
  MappingDistribution<double>::Entry e;
  e.weight = 1.0;
  e.mapping.multipliers = {{1.0}, {1.0}};
  e.mapping.virtualValues = {{{0.0, 0.0}}, {{0.0, 0.0}}};
  delta.entries.push_back(e);
  const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, {0, 0}, 3, Method::Exact);
  CHECK(alloc.assignment[0] == 0);  // welfare-maximizing split of the items
  CHECK(alloc.assignment[1] == 1);
  CHECK(prices.prices[0] == doctest::Approx(4.0));  // full extraction
  CHECK(prices.prices[1] == doctest::Approx(3.0));
}

TEST_CASE("single-item run allocates to the best nonnegative virtual value") {
  Prior<double> prior;
  prior.items = 1;
  prior.bidders = {{BidderType<double>{{5.0}, 10.0, 1.0}},
                   {BidderType<double>{{6.0}, 10.0, 1.0}}};
  MappingDistribution<double> delta;
  MappingDistribution<double>::Entry e;
  e.weight = 1.0;
  SUBCASE("higher virtual value wins despite lower real value") {
    e.mapping.multipliers = {{1.0}, {1.0}};
    e.mapping.virtualValues = {{{2.0}}, {{-3.0}}};  // phi = 7 vs 3
    delta.entries.push_back(e);
    const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, {0, 0}, 5, Method::Exact);
    CHECK(alloc.assignment[0] == 0);
    CHECK(prices.prices[0] == doctest::Approx(5.0));
    CHECK(prices.prices[1] == doctest::Approx(0.0));
  }
  SUBCASE("negative virtual values leave the item unallocated") {
    e.mapping.multipliers = {{0.0}, {0.0}};
    e.mapping.virtualValues = {{{-1.0}}, {{-2.0}}};
    delta.entries.push_back(e);
    const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, {0, 0}, 5, Method::Exact);
    CHECK(alloc.assignment[0] == kUnassigned);
    CHECK(prices.prices[0] == 0.0);
    CHECK(prices.prices[1] == 0.0);
  }
}

TEST_CASE("virtual welfare run agrees with solveExact on the footnote mapping") {
  Prior<double> prior;
  prior.items = 2;
  prior.bidders = {{BidderType<double>{{3.0, 3.0}, 3.0, 1.0}}};
  MappingDistribution<double> delta;
  MappingDistribution<double>::Entry e;
  e.weight = 1.0;
  e.mapping.multipliers = {{1.0}};
  e.mapping.virtualValues = {{{-2.0, -2.0}}};
  delta.entries.push_back(e);
  const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, {0}, 11, Method::Exact);
  const auto direct = solveExact(testing::footnoteInstance());
  CHECK(alloc.assignment == direct.allocation.assignment);
  CHECK(prices.prices[0] == doctest::Approx(direct.prices.prices[0]));
}

TEST_CASE("virtual welfare run is deterministic under a fixed seed and samples all entries") {
  const auto prior = twoTypePrior();
  MappingDistribution<double> delta;
  for (int k = 0; k < 2; ++k) {
    MappingDistribution<double>::Entry e;
    e.weight = 0.5;
    e.mapping.multipliers = {{1.0, 1.0}};
    e.mapping.virtualValues = {{{k == 0 ? -5.0 : 0.0}, {0.0}}};
    delta.entries.push_back(e);
  }
  const auto first = runVirtualWelfareMechanism(prior, delta, {0}, 17, Method::Exact);
  const auto second = runVirtualWelfareMechanism(prior, delta, {0}, 17, Method::Exact);
  CHECK(first.first.assignment == second.first.assignment);
  CHECK(first.second.prices == second.second.prices);
  // entry 0 leaves type-0 unallocated, entry 1 allocates; both must show up
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, {0}, seed, Method::Exact);
    seen.insert(alloc.assignment[0]);
  }
  CHECK(seen.count(kUnassigned) == 1);
  CHECK(seen.count(0) == 1);
}

TEST_CASE("exact-solver runs attain the exhaustive virtual welfare maximum") {
  testing::Rng rng(76);
  for (int rep = 0; rep < 12; ++rep) {
    const int items = rng.integer(1, 3);
    const auto prior = randomPrior(rng, 2, 2, items);
    const int n = prior.bidderCount();
    MappingDistribution<double> delta;
    MappingDistribution<double>::Entry e;
    e.weight = 1.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> mults;
      std::vector<std::vector<double>> ws;
      for (std::size_t t = 0; t < prior.bidders[i].size(); ++t) {
        mults.push_back(rng.real(0.0, 2.0));
        std::vector<double> w;
        for (int j = 0; j < items; ++j) w.push_back(rng.real(-4.0, 4.0));
        ws.push_back(std::move(w));
      }
      e.mapping.multipliers.push_back(std::move(mults));
      e.mapping.virtualValues.push_back(std::move(ws));
    }
    delta.entries.push_back(e);
    std::vector<int> profile(n);
    for (int i = 0; i < n; ++i)
      profile[i] = rng.integer(0, static_cast<int>(prior.bidders[i].size()) - 1);
    const auto [alloc, prices] =
        runVirtualWelfareMechanism(prior, delta, profile, 99, Method::Exact);
    (void)prices;
    // rebuild the induced instance and compare with an independent enumeration
    BavwmInstance<double> inst;
    inst.agents = n;
    inst.items = items;
    for (int i = 0; i < n; ++i) {
      inst.values.push_back(prior.bidders[i][profile[i]].values);
      inst.budgets.push_back(prior.bidders[i][profile[i]].budget);
      inst.multipliers.push_back(e.mapping.multipliers[i][profile[i]]);
      inst.virtualValues.push_back(e.mapping.virtualValues[i][profile[i]]);
    }
    const auto norm = normalize(inst);
    CHECK(objective(norm, alloc) ==
          doctest::Approx(testing::bruteForceBest(norm)).epsilon(1e-12));
  }
}

TEST_CASE("virtual welfare run rejects off-support reports") {
  const auto prior = twoTypePrior();
  MappingDistribution<double> delta;
  MappingDistribution<double>::Entry e;
  e.weight = 1.0;
  e.mapping.multipliers = {{1.0, 1.0}};
  e.mapping.virtualValues = {{{0.0}, {0.0}}};
  delta.entries.push_back(e);
  CHECK_THROWS_AS(runVirtualWelfareMechanism(prior, delta, {2}, 1, Method::Exact),
                  std::invalid_argument);
  CHECK_THROWS_AS(runVirtualWelfareMechanism(prior, delta, {0, 0}, 1, Method::Exact),
                  std::invalid_argument);
}

TEST_CASE("solveSingleItemOptimal sells to either point-mass bidder at 1") {
  Prior<double> prior;
  prior.items = 1;
  prior.bidders = {{BidderType<double>{{1.0}, 1.0, 1.0}}, {BidderType<double>{{1.0}, 1.0, 1.0}}};
  CHECK(testing::bestPointMassRevenue(prior) == doctest::Approx(1.0));
  const auto sol = solveSingleItemOptimal(prior);
  CHECK(sol.revenue == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solveSingleItemOptimal rejects multi-item priors") {
  Prior<double> prior;
  prior.items = 2;
  prior.bidders = {{BidderType<double>{{1.0, 1.0}, 1.0, 1.0}}};
  CHECK_THROWS_AS(solveSingleItemOptimal(prior), std::invalid_argument);
}

TEST_CASE("single-item optima dominate every posted price") {
  testing::Rng rng(75);
  for (int rep = 0; rep < 10; ++rep) {
    const auto prior = randomPrior(rng, 3, 3, 1);
    const auto sol = solveSingleItemOptimal(prior);
    for (const double rev : testing::allPostedPriceRevenues(prior))
      CHECK(sol.revenue >= rev - 1e-9);
  }
}
