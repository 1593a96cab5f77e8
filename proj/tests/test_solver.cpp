#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ipsdual/solver.hpp"

using namespace ipsdual;

TEST_CASE("stationary N=1 closed form") {
  DcpParams p;
  p.alpha = 1.0;
  p.delta = 1.0;
  p.lambda = 1.0;
  const auto m = stationary(build_dcp(p, 1));
  CHECK_FALSE(m.dirac);
  CHECK(m.probabilities[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  SplitRng rng(41, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const DcpParams q = fixtures::random_dcp(rng);
    const auto nu = stationary(build_dcp(q, 1)).probabilities;
    const Eigen::Vector2d closed = fixtures::dcp_n1_stationary(q);
    CHECK((nu - closed).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("closed boundaries give the Dirac measure with a flag") {
  DcpParams p;
  p.lambda = 1.4;
  p.diffusion = 0.3;
  const auto m = stationary(build_dcp(p, 3));
  CHECK(m.dirac);
  CHECK(m.probabilities[0] == 1.0);
  CHECK(m.probabilities.tail(7).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stationary N=2 matches the closed form") {
  SplitRng rng(42, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const DcpParams p = fixtures::random_dcp(rng);
    const auto nu = stationary(build_dcp(p, 2)).probabilities;
    const Eigen::Vector4d closed = fixtures::dcp_n2_stationary(p);
    CHECK((nu - closed).cwiseAbs().maxCoeff() < 1e-12);
    const auto [x, y, z] = fixtures::dcp_n2_moments(p);
    CHECK(correlation_direct(stationary(build_dcp(p, 2)), 2, {1}).value ==
          doctest::Approx(x).epsilon(1e-12));
    CHECK(correlation_direct(stationary(build_dcp(p, 2)), 2, {2}).value ==
          doctest::Approx(y).epsilon(1e-12));
    CHECK(correlation_direct(stationary(build_dcp(p, 2)), 2, {1, 2}).value ==
          doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("transient basics and the two-state dual closed form") {
  DcpParams p;
  p.alpha = 0.8;
  p.gamma = 0.5;
  p.lambda = 1.0;
  const auto dual = build_dual(p, 1, 3);
  Eigen::VectorXd init = Eigen::VectorXd::Zero(dual.space.dim());
  init[dual.space.index_of(0, 0b1, 0)] = 1.0;

  CHECK((transient(dual.gen, init, 0.0) - init).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(transient(dual.gen, init, -1.0), std::invalid_argument);

  // single dual particle on one site: absorbed at alpha+gamma, dies at 1
  const double ag = p.alpha + p.gamma;
  for (double t : {0.2, 1.0, 3.0}) {
    const Eigen::VectorXd pt = transient(dual.gen, init, t);
    const double alive = pt[dual.space.index_of(0, 0b1, 0)];
    const double absorbed = pt[dual.space.index_of(1, 0b0, 0)];
    const double dead = pt[dual.space.index_of(0, 0b0, 0)];
    CHECK(alive == doctest::Approx(std::exp(-(ag + 1.0) * t)).epsilon(1e-12));
    CHECK(absorbed ==
          doctest::Approx(ag / (ag + 1.0) * (1.0 - std::exp(-(ag + 1.0) * t)))
              .epsilon(1e-12));
    CHECK(dead ==
          doctest::Approx(1.0 / (ag + 1.0) * (1.0 - std::exp(-(ag + 1.0) * t)))
              .epsilon(1e-12));
  }

  // large t: mass concentrates on (m, empty, n)
  const Eigen::VectorXd late = transient(dual.gen, init, 80.0);
  double extinct_mass = 0.0;
  for (int m = 0; m <= 3; ++m)
    for (int k = 0; k <= 3; ++k) extinct_mass += late[dual.space.index_of(m, 0b0, k)];
  CHECK(extinct_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("absorption law: N=1 and the N=2 spot values") {
  DcpParams p;
  p.alpha = 0.9;
  p.gamma = 0.4;
  p.lambda = 2.0;
  const auto law1 = absorption_law(dual_of(p, 1), DualConfiguration{0, Configuration{1}, 0}, 6);
  CHECK(law1.joint(0, 0) ==
        doctest::Approx(1.0 / (p.alpha + p.gamma + 1.0)).epsilon(1e-14));
  CHECK(law1.joint(1, 0) ==
        doctest::Approx((p.alpha + p.gamma) / (p.alpha + p.gamma + 1.0))
            .epsilon(1e-14));

  // N=2, alpha=gamma=lambda=D=1, beta=delta=0: x_1^0 = 8/23, x_2^0 = 5/23,
  // x_3^0 = 12/23
  DcpParams q;
  q.alpha = 1.0;
  q.gamma = 1.0;
  q.lambda = 1.0;
  q.diffusion = 1.0;
  AbsorptionSolver solver(dual_of(q, 2), 24);
  const auto l1 = solver.law(Configuration{1, 0});
  const auto l2 = solver.law(Configuration{1, 1});
  const auto l3 = solver.law(Configuration{0, 1});
  CHECK(l1.joint(0, 0) == doctest::Approx(8.0 / 23.0).epsilon(1e-14));
  CHECK(l2.joint(0, 0) == doctest::Approx(5.0 / 23.0).epsilon(1e-14));
  CHECK(l3.joint(0, 0) == doctest::Approx(12.0 / 23.0).epsilon(1e-14));

  // total probability: sum over k of x_i^k approaches 1 as the cap grows
  // (geometric tail ratio 12/46 for these rates)
  CHECK(l1.tail < 1e-12);
  CHECK(l2.tail < 1e-12);
  CHECK(l3.tail < 1e-12);
}

TEST_CASE("appendix closed forms match the solver for k <= 6") {
  SplitRng rng(43, 0);
  for (int trial = 0; trial < 4; ++trial) {
    DcpParams p = fixtures::random_dcp(rng);
    p.beta = p.delta = 0.0;  // appendix setting: right boundary closed
    AbsorptionSolver solver(dual_of(p, 2), 16);
    const Eigen::MatrixXd closed = fixtures::appendix_absorption_xk(
        p.alpha, p.gamma, p.lambda, p.diffusion, 6);
    const auto l1 = solver.law(Configuration{1, 0});
    const auto l2 = solver.law(Configuration{1, 1});
    const auto l3 = solver.law(Configuration{0, 1});
    for (int k = 0; k <= 6; ++k) {
      CHECK(l1.joint(k, 0) == doctest::Approx(closed(k, 0)).epsilon(1e-10));
      CHECK(l2.joint(k, 0) == doctest::Approx(closed(k, 1)).epsilon(1e-10));
      CHECK(l3.joint(k, 0) == doctest::Approx(closed(k, 2)).epsilon(1e-10));
    }
  }
}

TEST_CASE("both absorption routes agree") {
  SplitRng rng(44, 0);
  for (int n = 2; n <= 4; ++n) {
    const DcpParams p = fixtures::random_dcp(rng, 0.05, 1.5);
    const auto spec = dual_of(p, n);
    Configuration init(n);
    init.set(1, 1);
    if (n > 2) init.set(n, 1);
    const DualConfiguration d0{0, init, 0};
    const auto a = absorption_law(spec, d0, 6);
    const auto b = absorption_law_via_transient(spec, d0, 6);
    double tv = 0.0;
    for (int m = 0; m <= 6; ++m)
      for (int k = 0; k <= 6; ++k) tv += std::abs(a.joint(m, k) - b.joint(m, k));
    CHECK(tv / 2.0 < 1e-9);
  }
}

TEST_CASE("correlation routes agree and inclusion-exclusion inverts") {
  SplitRng rng(45, 0);
  for (int n = 2; n <= 4; ++n) {
    DcpParams p = fixtures::random_dcp(rng, 0.1, 1.0);
    p.lambda = 0.1 + 0.4 * rng.uniform();  // keep the absorbed-count tail geometric
    const auto measure = stationary(build_dcp(p, n));
    std::vector<std::vector<int>> tuples = {{1}, {n}, {1, n}};
    if (n >= 3) tuples.push_back({1, 2, 3});
    for (const auto& sites : tuples) {
      const auto direct = correlation_direct(measure, n, sites);
      const auto dual = correlation_via_duality(p, n, sites, 1e-10);
      CHECK(direct.value == doctest::Approx(dual.value).epsilon(1e-8));
      CHECK(dual.value >= -1e-12);
      CHECK(dual.value <= 1.0 + 1e-12);
    }
  }

  // signed subset-sum transform is an involution
  SplitRng rng2(46, 0);
  std::vector<double> values(16);
  for (auto& v : values) v = rng2.uniform();
  const auto twice = signed_subset_sum(signed_subset_sum(values));
  for (std::size_t i = 0; i < values.size(); ++i)
    CHECK(twice[i] == doctest::Approx(values[i]).epsilon(1e-12));
}

TEST_CASE("full-lattice product under the Dirac measure vanishes") {
  DcpParams closed;
  closed.lambda = 1.1;
  closed.diffusion = 0.4;
  const auto measure = stationary(build_dcp(closed, 4));
  REQUIRE(measure.dirac);
  CHECK(correlation_direct(measure, 4, {1, 2, 3, 4}).value == 0.0);
}

TEST_CASE("degenerate reservoirs") {
  // alpha = delta = 0: only removal; E[prod(1-eta)] = 1, every rho vanishes
  DcpParams p;
  p.gamma = 0.7;
  p.beta = 0.4;
  p.lambda = 1.2;
  p.diffusion = 0.5;
  const auto v = correlation_via_duality(p, 3, {2}, 1e-10);
  CHECK(v.value == doctest::Approx(0.0).epsilon(1e-12));

  DcpParams none;
  none.lambda = 1.0;
  CHECK_THROWS_AS(correlation_via_duality(none, 2, {1}, 1e-10),
                  std::invalid_argument);
}

TEST_CASE("lemma bound holds") {
  // N=1: rho_1 = alpha/(alpha+gamma+1) <= (alpha+gamma)/(alpha+gamma+1)
  DcpParams p;
  p.alpha = 1.3;
  p.gamma = 0.6;
  p.lambda = 1.0;
  const auto lb = lemma_bound_check(p, 1, 1);
  CHECK(lb.rho1 == doctest::Approx(p.alpha / (p.alpha + p.gamma + 1.0)).epsilon(1e-10));
  CHECK(lb.bound ==
        doctest::Approx((p.alpha + p.gamma) / (p.alpha + p.gamma + 1.0)).epsilon(1e-9));
  CHECK(lb.rho1 <= lb.bound + 1e-12);

  // no particle source on the counted side: rho_1 = 0 <= bound
  DcpParams q;
  q.gamma = 0.9;
  q.lambda = 1.0;
  q.diffusion = 0.2;
  const auto lb2 = lemma_bound_check(q, 2, 1);
  CHECK(std::abs(lb2.rho1) < 1e-10);
  CHECK(lb2.rho1 <= lb2.bound + 1e-12);

  // tiny lambda, no diffusion, interior site: the bound is far below 1
  DcpParams r;
  r.alpha = 1.0;
  r.gamma = 1.0;
  r.beta = 1.0;
  r.delta = 1.0;
  r.lambda = 0.01;
  const auto lb3 = lemma_bound_check(r, 5, 3);
  CHECK(lb3.bound < 0.1);
  CHECK(lb3.rho1 <= lb3.bound + 1e-12);

  SplitRng rng(47, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const DcpParams s = fixtures::random_dcp(rng);
    for (int y = 1; y <= 3; ++y) {
      const auto b = lemma_bound_check(s, 3, y);
      CHECK(b.rho1 <= b.bound + 1e-12);
    }
  }
}

TEST_CASE("GDCP annihilating dual: at most one absorbed particle from a singleton") {
  const auto p = GdcpParams::make_annihilating(1.2, 0.4, 0.7, 0.9, 0.3, 0.6, 0.8);
  AbsorptionSolver solver(dual_of(p, 4), 8);
  Configuration init(4);
  init.set(2, 1);
  const auto law = solver.law(init);
  CHECK(law.tail < 1e-14);
  double mass01 = law.joint(0, 0) + law.joint(1, 0) + law.joint(0, 1);
  CHECK(mass01 == doctest::Approx(1.0).epsilon(1e-12));
}
