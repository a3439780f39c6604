#pragma once

// Local correlation matrices of two-particle systems.
//
// For f = 2 every point carries the Hermitian 2x2 matrix F_x = -Psi^+ S E_x Psi,
// decomposed as F_x = (rho_x + v_x . sigma) / 2 with the standard Pauli matrices.
// rho_x is the local trace and v_x the Bloch vector. The spectrum of the closed
// chain A_xy coincides with that of F_x F_y, which gives closed-form roots in
// terms of (rho, v) alone.

#include <vector>

#include "dfs/algebra.hpp"

namespace dfs {

struct LocalCorrelation {
  double rho = 0.0;
  Vec3 bloch = Vec3::Zero();
};

struct BlochConfiguration {
  std::vector<LocalCorrelation> points;

  int size() const { return static_cast<int>(points.size()); }
  // Throws ValidationError naming the failed relation: sum rho = 2, sum v = 0,
  // and |v_x| >= |rho_x| (F_x has one eigenvalue of each sign).
  void validate(const Tolerances& tol = kDefaultTolerances) const;
};

// F_x = -Psi^+ S E_x Psi for a two-particle system, x 1-based.
Eigen::Matrix2cd local_correlation_matrix(const FermionMatrix& psi, int x);

LocalCorrelation local_correlation(const FermionMatrix& psi, int x,
                                   const Tolerances& tol = kDefaultTolerances);
BlochConfiguration bloch_configuration(const FermionMatrix& psi,
                                       const Tolerances& tol = kDefaultTolerances);

// lambda_pm = (rho_x rho_y + v_x.v_y +- sqrt(|rho_x v_y + rho_y v_x|^2 - |v_x x v_y|^2)) / 4.
ChainSpectrum chain_roots_from_bloch(const LocalCorrelation& a, const LocalCorrelation& b);

// Builds a fermion matrix realizing the configuration: each F_x is diagonalized
// as U_x^{-1} D_x U_x with the negative eigenvalue first and E_x Psi = |D_x|^{1/2} U_x.
// Eigenvectors are phase-fixed so that their first nonzero component is real and
// positive. Points with F_x = 0 get a zero block.
FermionMatrix reconstruct_fermion_matrix(const BlochConfiguration& config,
                                         const Tolerances& tol = kDefaultTolerances);

// Rotation-invariant description of a configuration.
struct ConfigurationGram {
  RMatrix gram;              // v_x . v_y
  std::vector<double> rho;
};
ConfigurationGram configuration_gram(const BlochConfiguration& config);

// Label-independent fingerprint: sorted local traces followed by the sorted
// off-diagonal Gram entries. Two minimizers that differ only by a relabeling of
// points (or a rotation) share the same fingerprint.
std::vector<double> gram_fingerprint(const BlochConfiguration& config);
bool fingerprints_differ(const std::vector<double>& a, const std::vector<double>& b, double tol);

// det(v_2 - v_1, v_3 - v_1, v_4 - v_1) for the first four points.
double orientation_sign(const BlochConfiguration& config);

}  // namespace dfs
