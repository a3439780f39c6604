#include <doctest.h>

#include <random>

#include "dfs/bloch.hpp"
#include "dfs/closedform.hpp"
#include "oracles.hpp"

using namespace dfs;

TEST_CASE("local traces and Bloch vectors satisfy the sum rules") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 6;
    const FermionMatrix psi(oracle::random_fermion_matrix(m, 2, gen));
    const auto config = bloch_configuration(psi, Tolerances{.bloch = 1e-8});
    double rho = 0.0;
    for (int x = 1; x <= m; ++x) {
      // rho_x = Tr(E_x P)
      const auto p = operator_from_columns(psi);
      const cplx tr = p.kernel(x, x).trace();
      CHECK(std::abs(config.points[x - 1].rho - tr.real()) < 1e-9 * (1.0 + std::abs(tr)));
      rho += config.points[x - 1].rho;
    }
    CHECK(rho == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("root formula agrees with direct chain roots on random systems") {
  std::mt19937_64 gen(1234);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + trial % 5;
    const CMatrix e = oracle::random_fermion_matrix(m, 2, gen, 0.7);
    const FermionMatrix psi(e);
    const auto config = bloch_configuration(psi, Tolerances{.bloch = 1e-7});
    const CMatrix p = oracle::projector(e);
    for (int x = 1; x <= m; ++x) {
      for (int y = 1; y <= m; ++y) {
        const auto spec = chain_roots_from_bloch(config.points[x - 1], config.points[y - 1]);
        auto ev = oracle::chain_eigenvalues(p, x, y);
        const double scale = 1.0 + std::abs(ev[0]) + std::abs(ev[1]);
        // Compare as unordered pairs.
        const double d1 = std::abs(spec.lambda_plus - ev[0]) + std::abs(spec.lambda_minus - ev[1]);
        const double d2 = std::abs(spec.lambda_plus - ev[1]) + std::abs(spec.lambda_minus - ev[0]);
        worst = std::max(worst, std::min(d1, d2) / scale);
      }
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("reconstruction reproduces the configuration") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const FermionMatrix psi(oracle::random_fermion_matrix(3 + trial % 3, 2, gen));
    const auto config = bloch_configuration(psi, Tolerances{.bloch = 1e-8});
    const FermionMatrix back = reconstruct_fermion_matrix(config, Tolerances{.bloch = 1e-8});
    const auto again = bloch_configuration(back, Tolerances{.bloch = 1e-8});
    for (int x = 0; x < config.size(); ++x) {
      CHECK(std::abs(again.points[x].rho - config.points[x].rho) < 1e-8);
      CHECK((again.points[x].bloch - config.points[x].bloch).norm() < 1e-8);
    }
    // Gauge-equivalent systems share every action.
    const double s1 = action(operator_from_columns(psi), 0.5);
    const double s2 = action(operator_from_columns(back), 0.5);
    CHECK(std::abs(s1 - s2) < 1e-8 * (1.0 + std::abs(s1)));
  }
}

TEST_CASE("validation names the failing relation") {
  BlochConfiguration c;
  c.points = {{1.0, Vec3(1, 0, 0)}, {1.0, Vec3(-1, 0, 0)}};
  CHECK_NOTHROW(c.validate());
  c.points[0].bloch = Vec3(0.5, 0, 0);
  try {
    c.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("|v_x| >= |rho_x|") != std::string::npos);
  }
  c.points = {{1.5, Vec3(2, 0, 0)}, {1.0, Vec3(-2, 0, 0)}};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sum rho_x = 2"), ValidationError);
  c.points = {{1.0, Vec3(2, 0, 0)}, {1.0, Vec3(-1, 0, 0)}};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sum v_x = 0"), ValidationError);
}

TEST_CASE("f != 2 is rejected") {
  std::mt19937_64 gen(2);
  const FermionMatrix psi(oracle::random_fermion_matrix(3, 1, gen));
  CHECK_THROWS_AS(bloch_configuration(psi), std::invalid_argument);
}

TEST_CASE("fingerprints are label and rotation independent") {
  auto c = closedform::five_point_bloch(0.4);
  const auto fp = gram_fingerprint(c);
  std::swap(c.points[0], c.points[4]);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (auto& p : c.points) p.bloch = r * p.bloch;
  CHECK_FALSE(fingerprints_differ(fp, gram_fingerprint(c), 1e-12));
  CHECK(fingerprints_differ(fp, gram_fingerprint(closedform::five_point_bloch(0.41)), 1e-6));
}
