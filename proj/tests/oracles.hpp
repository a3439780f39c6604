#pragma once

// Reference computations for the tests, written against full 2m x 2m
// matrices and a general eigen-solver rather than the library's 2x2 shortcuts.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

inline CMat signature(int m) {
  CMat s = CMat::Zero(2 * m, 2 * m);
  for (int i = 0; i < 2 * m; ++i) s(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  return s;
}

inline CMat point_projector(int m, int x) {  // x is 1-based
  CMat e = CMat::Zero(2 * m, 2 * m);
  e(2 * x - 2, 2 * x - 2) = 1.0;
  e(2 * x - 1, 2 * x - 1) = 1.0;
  return e;
}

inline CMat projector(const CMat& psi) {
  const int m = static_cast<int>(psi.rows() / 2);
  return -psi * psi.adjoint() * signature(m);
}

// Eigenvalues of E_x P E_y P E_x restricted to the range of E_x.
inline std::vector<cplx> chain_eigenvalues(const CMat& p, int x, int y) {
  const int m = static_cast<int>(p.rows() / 2);
  const CMat full = point_projector(m, x) * p * point_projector(m, y) * p * point_projector(m, x);
  const CMat block = full.block(2 * x - 2, 2 * x - 2, 2, 2);
  Eigen::ComplexEigenSolver<CMat> es(block);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

struct Sums {
  double action_half = 0.0;  // sum |A^2| - |A|^2 / 2
  double kappa = 0.0;
  double z = 0.0;
};

inline double lagrangian(const std::vector<cplx>& ev, double mu) {
  const double w1 = std::abs(ev[0]) + std::abs(ev[1]);
  const double w2 = std::norm(ev[0]) + std::norm(ev[1]);
  return w2 - mu * w1 * w1;
}

inline double action(const CMat& psi, double mu) {
  const CMat p = projector(psi);
  const int m = static_cast<int>(psi.rows() / 2);
  double s = 0.0;
  for (int x = 1; x <= m; ++x)
    for (int y = 1; y <= m; ++y) s += lagrangian(chain_eigenvalues(p, x, y), mu);
  return s;
}

inline Sums sums(const CMat& psi) {
  const CMat p = projector(psi);
  const int m = static_cast<int>(psi.rows() / 2);
  Sums out;
  for (int x = 1; x <= m; ++x) {
    for (int y = 1; y <= m; ++y) {
      const auto ev = chain_eigenvalues(p, x, y);
      const double w1 = std::abs(ev[0]) + std::abs(ev[1]);
      const double w2 = std::norm(ev[0]) + std::norm(ev[1]);
      out.kappa += w1 * w1;
      out.z += w2;
      out.action_half += w2 - 0.5 * w1 * w1;
    }
  }
  return out;
}

// Random pseudo-orthonormal columns: Gaussian entries, then Gram-Schmidt in
// the indefinite product, discarding draws with non-negative norm.
inline CMat random_fermion_matrix(int m, int f, std::mt19937_64& gen, double spread = 1.0) {
  std::normal_distribution<double> d(0.0, spread);
  if (f > m) throw std::invalid_argument("negative-definite image needs f <= m");
  const CMat s = signature(m);
  for (;;) {
    CMat psi(2 * m, f);
    for (int i = 0; i < 2 * m; ++i)
      for (int j = 0; j < f; ++j) psi(i, j) = cplx(d(gen), d(gen));
    bool ok = true;
    for (int j = 0; j < f && ok; ++j) {
      for (int k = 0; k < j; ++k) {
        const cplx c = (psi.col(k).adjoint() * s * psi.col(j))(0, 0);
        psi.col(j) += c * psi.col(k);
      }
      const double n = (psi.col(j).adjoint() * s * psi.col(j))(0, 0).real();
      if (n > -1e-3) {
        ok = false;
        break;
      }
      psi.col(j) /= std::sqrt(-n);
    }
    if (ok) return psi;
  }
}

// Random element of U(1,1): exp(i phase) * boost(r) * diag(e^{ia}, e^{-ia}).
inline Eigen::Matrix2cd random_u11(std::mt19937_64& gen, double max_rapidity = 1.0) {
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
  std::uniform_real_distribution<double> rap(-max_rapidity, max_rapidity);
  const double r = rap(gen);
  const double b = ang(gen);
  Eigen::Matrix2cd boost;
  boost << std::cosh(r), std::sinh(r) * std::exp(cplx(0, b)), std::sinh(r) * std::exp(cplx(0, -b)),
      std::cosh(r);
  const double a = ang(gen);
  Eigen::Matrix2cd rot = Eigen::Matrix2cd::Zero();
  rot(0, 0) = std::exp(cplx(0, a));
  rot(1, 1) = std::exp(cplx(0, -a));
  return std::exp(cplx(0, ang(gen))) * boost * rot;
}

}  // namespace oracle
