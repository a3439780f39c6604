#include <doctest.h>

#include <random>

#include "dfs/algebra.hpp"
#include "oracles.hpp"

using namespace dfs;

TEST_CASE("signature and point projectors") {
  const DiscreteSpacetime st(3);
  CHECK(st.dim() == 6);
  const RMatrix s = st.signature();
  CHECK(s(0, 0) == 1.0);
  CHECK(s(1, 1) == -1.0);
  RMatrix sum = RMatrix::Zero(6, 6);
  for (int x = 1; x <= 3; ++x) {
    const RMatrix e = st.projector(x);
    CHECK((e * e - e).norm() == 0.0);
    sum += e;
  }
  CHECK((sum - RMatrix::Identity(6, 6)).norm() == 0.0);
  CHECK_THROWS_AS(st.projector(0), std::out_of_range);
  CHECK_THROWS_AS(st.projector(4), std::out_of_range);
  CHECK_THROWS_AS(DiscreteSpacetime(0), std::invalid_argument);
}

TEST_CASE("inner product is antilinear in the first slot") {
  CVector u(2), v(2);
  u << cplx(1, 1), cplx(0, 2);
  v << cplx(2, 0), cplx(1, -1);
  const cplx a(0.3, -0.7);
  CHECK(std::abs(inner_product(a * u, v) - std::conj(a) * inner_product(u, v)) < 1e-14);
  CHECK(std::abs(inner_product(u, a * v) - a * inner_product(u, v)) < 1e-14);
  // <u|u> = |u1|^2 - |u2|^2
  CHECK(std::abs(inner_product(u, u) - cplx(2.0 - 4.0, 0)) < 1e-14);
  CHECK_THROWS_AS(inner_product(CVector::Zero(3), CVector::Zero(3)), std::invalid_argument);
}

TEST_CASE("fermion matrix validation names the offending entry") {
  CMatrix e = CMatrix::Zero(4, 2);
  e(1, 0) = 1.0;
  e(3, 1) = 1.0;
  const FermionMatrix ok(e);
  CHECK_NOTHROW(ok.validate());
  e(3, 1) = 0.5;
  const FermionMatrix bad(e);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  const auto msg = bad.normalization_defect(1e-10);
  REQUIRE(msg.has_value());
  CHECK(msg->find("<u_2|u_2>") != std::string::npos);
}

TEST_CASE("projector from random fermion matrices") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 4;
    const int f = 1 + trial % std::min(m, 3);
    const CMatrix psi = oracle::random_fermion_matrix(m, f, gen);
    const auto p = projector_from_fermion_matrix(FermionMatrix(psi));
    const auto d = projector_defects(p, f);
    const double scale = 1.0 + psi.cwiseAbs2().maxCoeff() * psi.cwiseAbs2().maxCoeff();
    CHECK(d.idempotence < 1e-9 * scale);
    CHECK(d.self_adjoint < 1e-10 * scale);
    CHECK(d.trace_error < 1e-9 * scale);
    CHECK((p.matrix - oracle::projector(psi)).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("chain spectra, actions and constraint sums match the brute-force oracle") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 4;
    const int f = 1 + trial % std::min(m, 3);
    const CMatrix psi = oracle::random_fermion_matrix(m, f, gen, 0.6);
    const auto p = operator_from_columns(FermionMatrix(psi));
    const auto ref = oracle::sums(psi);
    const double scale = 1.0 + std::abs(ref.z) + std::abs(ref.kappa);
    CHECK(std::abs(action(p, 0.5) - ref.action_half) < 1e-9 * scale);
    CHECK(std::abs(action(p, 0.3) - oracle::action(psi, 0.3)) < 1e-9 * scale);
    CHECK(std::abs(constraint_value(p) - ref.kappa) < 1e-9 * scale);
    CHECK(std::abs(target_value(p) - ref.z) < 1e-9 * scale);
    for (int x = 1; x <= m; ++x) {
      for (int y = 1; y <= m; ++y) {
        const auto spec = chain_roots(closed_chain(p, x, y));
        const auto ev = oracle::chain_eigenvalues(oracle::projector(psi), x, y);
        const double w = std::abs(ev[0]) + std::abs(ev[1]);
        CHECK(std::abs(spec.weight_one() - w) < 1e-8 * (1.0 + w));
        CHECK(std::abs(critical_lagrangian(spec) - lagrangian(spec, 0.5)) < 1e-10 * (1.0 + w * w));
      }
    }
  }
}

TEST_CASE("chain_roots rejects matrices that are not s-self-adjoint") {
  Mat2 a;
  a << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(chain_roots(a), std::invalid_argument);
}

TEST_CASE("spectrum ordering and conjugate pairs") {
  const auto real = spectrum_from_invariants(3.0, 2.0);
  CHECK(real.lambda_plus.real() == doctest::Approx(2.0));
  CHECK(real.lambda_minus.real() == doctest::Approx(1.0));
  const auto cc = spectrum_from_invariants(2.0, 2.0);
  CHECK(cc.discriminant < 0.0);
  CHECK(cc.lambda_plus == std::conj(cc.lambda_minus));
  CHECK(cc.lambda_plus.imag() > 0.0);
  CHECK(cc.weight_one() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(critical_lagrangian(cc) == doctest::Approx(0.0));
}

TEST_CASE("gauge transforms") {
  CHECK(is_pseudo_unitary(pseudo_unitary_block(0.3, 1.2, -0.4, 2.0), 1e-12));
  Mat2 bad = Mat2::Identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(GaugeTransform({bad}), std::invalid_argument);

  std::mt19937_64 gen(3);
  const CMatrix psi = oracle::random_fermion_matrix(3, 2, gen);
  std::vector<Mat2> blocks;
  for (int k = 0; k < 3; ++k) blocks.push_back(oracle::random_u11(gen));
  const GaugeTransform u(blocks);
  CHECK((u.matrix() * u.inverse() - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  const FermionMatrix moved = apply_gauge(FermionMatrix(psi), u);
  CHECK_NOTHROW(moved.validate(Tolerances{1e-9}));
  const auto p1 = apply_gauge(projector_from_fermion_matrix(FermionMatrix(psi)), u);
  const auto p2 = projector_from_fermion_matrix(moved, Tolerances{1e-9});
  CHECK((p1.matrix - p2.matrix).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(apply_gauge(p1, GaugeTransform::identity(2)), std::invalid_argument);
}

TEST_CASE("outer symmetry of the identity permutation and a swap") {
  CMatrix e = CMatrix::Zero(4, 2);
  e(1, 0) = 1.0;
  e(3, 1) = 1.0;
  const auto p = projector_from_fermion_matrix(FermionMatrix(e));
  CHECK(check_outer_symmetry(p, {1, 2}, CMatrix::Identity(4, 4)));
  CMatrix swap = CMatrix::Zero(4, 4);
  swap(0, 2) = swap(2, 0) = swap(1, 3) = swap(3, 1) = 1.0;
  CHECK(check_outer_symmetry(p, {2, 1}, swap));
  CHECK_FALSE(check_outer_symmetry(p, {1, 2}, swap));
  CHECK_THROWS_AS(check_outer_symmetry(p, {1, 1}, swap), std::invalid_argument);
}
