#include <doctest.h>

#include <cmath>

#include "dfs/closedform.hpp"

using namespace dfs;
using namespace dfs::closedform;

namespace {
double crit(const FermionMatrix& psi) { return action(projector_from_fermion_matrix(psi), 0.5); }
}  // namespace

TEST_CASE("one-particle minimizer") {
  const auto r = one_particle_minimizer(4, 0.5);
  CHECK(r.action == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
  CHECK(action(projector_from_fermion_matrix(r.psi), 0.5) == doctest::Approx(1.0 / 32.0));
  CHECK(one_particle_minimizer(1, 0.0).action == doctest::Approx(1.0));
  const auto p = projector_from_fermion_matrix(r.psi);
  for (int x = 1; x <= 4; ++x) CHECK(p.kernel(x, x).trace().real() == doctest::Approx(0.25));
  CHECK_THROWS_AS(one_particle_minimizer(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(one_particle_minimizer(3, 1.5), std::invalid_argument);
}

TEST_CASE("two-point critical system") {
  const auto psi = two_point_critical();
  CHECK_NOTHROW(psi.validate());
  CHECK(crit(psi) == doctest::Approx(1.0).epsilon(1e-14));
  const auto c = bloch_configuration(psi);
  CHECK(c.points[0].rho == doctest::Approx(1.0));
  CHECK(c.points[1].rho == doctest::Approx(1.0));
  const auto cm = causal_matrix(projector_from_fermion_matrix(psi));
  CHECK(cm.at(1, 1) == CausalLabel::Timelike);
  CHECK(cm.at(1, 2) == CausalLabel::Boundary);
  CMatrix swap = CMatrix::Zero(4, 4);
  swap(0, 2) = swap(2, 0) = swap(1, 3) = swap(3, 1) = 1.0;
  CHECK(check_outer_symmetry(projector_from_fermion_matrix(psi), {2, 1}, swap));
}

TEST_CASE("two-point symmetric family and constrained minimizer") {
  for (double th : {0.0, 0.3, 0.9}) {
    const auto psi = two_point_symmetric_family(th);
    CHECK_NOTHROW(psi.validate());
    const auto c = bloch_configuration(psi);
    const double v = 1.0 + 2.0 * std::sinh(th) * std::sinh(th);
    CHECK(c.points[0].rho == doctest::Approx(1.0));
    CHECK(c.points[0].bloch.norm() == doctest::Approx(v));
    // S_mu along the family equals direct evaluation.
    for (double mu : {0.0, 0.5, 0.8}) {
      CHECK(action(projector_from_fermion_matrix(psi), mu) ==
            doctest::Approx(two_point_symmetric_action(v, mu)).epsilon(1e-12));
    }
  }
  const auto k2 = two_point_constrained(2.0);
  CHECK(k2.v == doctest::Approx(1.0));
  CHECK(k2.target == doctest::Approx(2.0));
  CHECK(k2.mu == doctest::Approx(1.0));
  const auto k5 = two_point_constrained(5.0);
  CHECK(k5.target == doctest::Approx(4.5));
  CHECK(k5.mu == doctest::Approx(0.75));
  for (double kappa : {2.0, 3.0, 5.0, 10.0}) {
    const auto r = two_point_constrained(kappa);
    const auto p = projector_from_fermion_matrix(r.psi, Tolerances{1e-9});
    CHECK(std::abs(constraint_value(p) - kappa) < 1e-9 * kappa);
    CHECK(std::abs(target_value(p) - r.target) < 1e-9 * kappa);
    CHECK(std::abs(two_point_symmetric_action_derivative(r.v, r.mu)) < 1e-8);
  }
  CHECK_THROWS_AS(two_point_constrained(1.9), InfeasibleError);
}

TEST_CASE("three-point family") {
  CHECK(three_point_bloch_length(0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(crit(three_point_family(0.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // The Bloch length grows with 2 sinh^2: at theta = arcsinh 1 it is 2 and the
  // action is (2/3) 4 = 8/3, confirmed by direct evaluation.
  const double th = std::asinh(1.0);
  const auto c = bloch_configuration(three_point_family(th));
  CHECK(c.points[0].bloch.norm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(three_point_bloch_length(th) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(crit(three_point_family(th)) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  for (double t : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const auto psi = three_point_family(t);
    CHECK_NOTHROW(psi.validate());
    const auto cfg = bloch_configuration(psi);
    for (const auto& pt : cfg.points) CHECK(pt.rho == doctest::Approx(2.0 / 3.0));
    CHECK(crit(psi) == doctest::Approx(three_point_action(three_point_bloch_length(t))).epsilon(1e-11));
    CHECK(three_point_theta_for_length(three_point_bloch_length(t)) == doctest::Approx(t));
  }
  CHECK_THROWS_AS(three_point_family(-0.1), std::invalid_argument);
  const auto p = projector_from_fermion_matrix(three_point_family(0.0));
  for (const auto& g : three_point_symmetries()) CHECK(check_outer_symmetry(p, g.sigma, g.u));
  CHECK(three_point_symmetries().size() == 6);
}

TEST_CASE("three-point constrained branches") {
  const auto low = three_point_constrained(2.0 / 3.0);
  CHECK(low.v == doctest::Approx(2.0 / 3.0));
  CHECK(low.target == doctest::Approx(2.0 / 3.0));
  const auto cm = causal_matrix(projector_from_fermion_matrix(low.psi));
  for (auto l : cm.labels) CHECK(l == CausalLabel::Timelike);

  const double kc = kThreePointCriticalKappa;
  CHECK(three_point_branch_one_length(kc) == doctest::Approx(4.0 * std::sqrt(3.0) / 9.0));
  CHECK(three_point_branch_two_length(kc) == doctest::Approx(4.0 * std::sqrt(3.0) / 9.0));
  CHECK(std::abs(three_point_branch_one_target(kc) - 22.0 / 27.0) < 1e-10);
  CHECK(std::abs(three_point_branch_two_target(kc) - 22.0 / 27.0) < 1e-10);
  // Closed form of branch two with coefficient 4/81.
  for (double k : {0.85, 1.0, 1.5}) {
    CHECK(three_point_branch_two_target(k) ==
          doctest::Approx(4.0 / 81.0 * (2.0 + std::sqrt(81.0 * k - 32.0)) + k / 2.0).epsilon(1e-12));
  }
  // The 8/81 variant is discontinuous at the branch point.
  CHECK(three_point_branch_two_target_alt(kc) == doctest::Approx(98.0 / 81.0));
  CHECK(std::abs(three_point_branch_two_target_alt(kc) - 22.0 / 27.0) > 0.3);

  const auto one = three_point_constrained(1.0);
  CHECK(one.branch == 2);
  CHECK(one.v == doctest::Approx(std::sqrt(6.0) / 3.0));
  CHECK(one.target == doctest::Approx(17.0 / 18.0));
  CHECK(one.off_diagonal == CausalLabel::Spacelike);
  for (double k : {2.0 / 3.0, 0.75, 0.8, 0.84, 0.85, 1.0, 2.0}) {
    const auto r = three_point_constrained(k);
    const auto p = projector_from_fermion_matrix(r.psi, Tolerances{1e-9});
    CHECK(std::abs(constraint_value(p) - k) < 1e-9);
    CHECK(std::abs(target_value(p) - r.target) < 1e-9);
    if (k < kc - 1e-6 && k > 2.0 / 3.0 + 1e-6) CHECK(r.off_diagonal == CausalLabel::Timelike);
    if (k > kc + 1e-6) CHECK(r.off_diagonal == CausalLabel::Spacelike);
  }
  CHECK_THROWS_AS(three_point_constrained(0.6), InfeasibleError);
}

TEST_CASE("four-point tetrahedral systems") {
  const double phi = 2.0 * kPi / 3.0;
  const auto a = bloch_configuration(four_point_family(phi));
  const auto b = bloch_configuration(four_point_family(-phi));
  for (int x = 0; x < 4; ++x) {
    CHECK(a.points[x].rho == doctest::Approx(0.5));
    CHECK(a.points[x].bloch.norm() == doctest::Approx(0.5));
    for (int y = 0; y < 4; ++y) {
      if (x != y) CHECK(a.points[x].bloch.dot(a.points[y].bloch) == doctest::Approx(-1.0 / 12.0));
    }
  }
  const auto ga = configuration_gram(a).gram;
  const auto gb = configuration_gram(b).gram;
  CHECK((ga - gb).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(orientation_sign(a) * orientation_sign(b) < 0.0);
  CHECK_THROWS_AS(four_point_family(1.0), std::invalid_argument);

  const auto p = projector_from_fermion_matrix(four_point_family(phi));
  const auto gens = four_point_generators();
  CHECK(check_outer_symmetry(p, gens.sigma.sigma, gens.sigma.u));
  CHECK(check_outer_symmetry(p, gens.tau.sigma, gens.tau.u));
  const CMatrix ts = gens.tau.u * gens.sigma.u;
  const CMatrix cube = ts * ts * ts;
  const cplx i(0, 1);
  const CMatrix id = CMatrix::Identity(8, 8);
  CHECK(std::min((cube - i * id).cwiseAbs().maxCoeff(), (cube + i * id).cwiseAbs().maxCoeff()) < 1e-10);
  CHECK(crit(four_point_family(phi)) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("five-point configuration") {
  const double a = five_point_optimum();
  CHECK(std::abs(a - 0.4077411555) < 1e-9);
  CHECK(std::abs(a - five_point_optimum_numeric()) < 1e-10);
  CHECK(five_point_action(a) == doctest::Approx(0.10701459).epsilon(1e-7));
  CHECK(five_point_beta(a) == doctest::Approx(0.3884).epsilon(1e-3));
  for (double al : {0.2, 0.35, a, 0.5}) {
    const auto cfg = five_point_bloch(al);
    CHECK_NOTHROW(cfg.validate());
    const auto psi = reconstruct_fermion_matrix(cfg);
    CHECK(crit(psi) == doctest::Approx(five_point_action(al)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(five_point_bloch(0.0), std::invalid_argument);
  CHECK_THROWS_AS(five_point_bloch(0.7), std::invalid_argument);
}

TEST_CASE("divergence witnesses") {
  const auto act = [](WitnessKind k, double alpha, double mu) {
    return action(projector_from_fermion_matrix(divergence_witness(k, alpha), Tolerances{1e-6}), mu);
  };
  const double s10 = act(WitnessKind::MuAboveHalf, 10.0, 1.0);
  const double s20 = act(WitnessKind::MuAboveHalf, 20.0, 1.0);
  CHECK(s10 < 0.0);
  CHECK(s20 < s10);
  CHECK(s20 / s10 == doctest::Approx(16.0).epsilon(0.1));
  for (double al : {0.1, 1.0, 10.0, 100.0}) CHECK(act(WitnessKind::MuAboveHalf, al, 0.5) >= -1e-9);
  CHECK(act(WitnessKind::OneParticleMuAboveOne, 10.0, 2.0) < 0.0);
  CHECK_THROWS_AS(divergence_witness(WitnessKind::MuAboveHalf, -1.0), std::invalid_argument);
}

TEST_CASE("non-unique family: equal Bloch data, different projectors") {
  const auto a = nonunique_family(0.5);
  const auto b = nonunique_family(1.5);
  const auto ca = bloch_configuration(a, Tolerances{.bloch = 1e-12});
  const auto cb = bloch_configuration(b, Tolerances{.bloch = 1e-12});
  CHECK(gram_fingerprint(ca) == gram_fingerprint(cb));
}
