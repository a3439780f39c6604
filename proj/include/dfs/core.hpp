#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfs {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

// Numerical tolerances shared by all modules. Every check that compares against a
// threshold reads it from here so a run can be re-audited with one record.
struct Tolerances {
  double pseudo_orthonormal = 1e-10;  // |<u_i|u_j> + delta_ij|
  double idempotent = 1e-9;           // |P^2 - P| elementwise
  double self_adjoint = 1e-10;        // |(PS)^+ - PS| elementwise
  double pseudo_unitary = 1e-10;      // |U^+ S U - S| elementwise
  double outer_symmetry = 1e-9;
  double causal_band = 1e-9;          // relative band around a zero discriminant
  double bloch = 1e-9;                // sum rules and |v| >= |rho|
  double hermitian = 1e-10;
};

inline constexpr Tolerances kDefaultTolerances{};

// Raised when a value violates a structural invariant (normalization,
// idempotence, sum rules). The message names the invariant and the offending entry.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a closed-form family is asked for a parameter outside its
// feasible region (e.g. kappa below the threshold of a constrained family).
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace dfs
