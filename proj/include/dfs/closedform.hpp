#pragma once

// Analytic fermion systems and closed-form minima. These serve as reference
// values for the optimizers and as explicit witnesses for unbounded actions.

#include <vector>

#include "dfs/algebra.hpp"
#include "dfs/bloch.hpp"
#include "dfs/causal.hpp"

namespace dfs::closedform {

inline constexpr double kPi = 3.14159265358979323846;

// --- one particle -----------------------------------------------------------

struct OneParticleMinimizer {
  FermionMatrix psi;
  double action;  // (1 - mu) / m^2
};

// E_x u = (0, 1/sqrt(m)) at every point. Requires mu < 1.
OneParticleMinimizer one_particle_minimizer(int m, double mu);

// --- two points ---------------------------------------------------------------

// Each particle localized at its own point; P = diag(0,1,0,1).
FermionMatrix two_point_critical();

// Permutation-symmetric family: columns (sinh t, 0, 0, cosh t), (0, cosh t, sinh t, 0).
// rho_x = 1 and |v_x| = 1 + 2 sinh^2 t.
FermionMatrix two_point_symmetric_family(double theta);

struct TwoPointConstrained {
  double v;       // Bloch length (kappa - 1)^{1/4}
  double target;  // sqrt(kappa - 1) + kappa / 2
  double mu;      // (1 + 1/sqrt(kappa - 1)) / 2
  double theta;
  FermionMatrix psi;
};

// Minimizer of the target at fixed kappa within the symmetric family; kappa >= 2.
TwoPointConstrained two_point_constrained(double kappa);

// S_mu = Z - mu kappa = v^2 + (1/2 - mu)(1 + v^4) along the symmetric family
// (Z = (1 + v^2)^2 / 2, kappa = 1 + v^4), and its v-derivative.
double two_point_symmetric_action(double v, double mu);
double two_point_symmetric_action_derivative(double v, double mu);

// --- three points -------------------------------------------------------------

// S3-symmetric family; local traces 2/3 and Bloch vectors of common length
// three_point_bloch_length(theta) at 120 degrees.
FermionMatrix three_point_family(double theta);
double three_point_bloch_length(double theta);  // (2/3)(1 + 2 sinh^2 theta)
double three_point_theta_for_length(double v);  // inverse, v >= 2/3
// Critical action along the family as a function of the Bloch length:
// (2/3) v^2 + Theta(16/27 - v^2) (v^2/3 - 9 v^4 / 16).
double three_point_action(double v);

struct PointSymmetry {
  std::vector<int> sigma;  // sigma(x) at index x-1
  CMatrix u;               // 2m x 2m pseudo-unitary
};

// All six elements of S3 with block permutation operators, for theta = 0.
std::vector<PointSymmetry> three_point_symmetries();

inline constexpr double kThreePointCriticalKappa = 68.0 / 81.0;

struct ThreePointConstrained {
  double v;
  double target;
  double theta;
  int branch;  // 1 for kappa <= 68/81, 2 above
  CausalLabel off_diagonal;
  FermionMatrix psi;
};

// S3-symmetric system with constraint value kappa >= 2/3.
ThreePointConstrained three_point_constrained(double kappa);
double three_point_branch_one_length(double kappa);  // (72 kappa - 32)^{1/4} / 3
double three_point_branch_two_length(double kappa);  // sqrt(12 + 6 sqrt(81 kappa - 32)) / 9
double three_point_branch_one_target(double kappa);  // (2/9)(sqrt(18 kappa - 8) + 1)
// S(v) + kappa/2 at the branch-two length: (4/81)(2 + sqrt(81 kappa - 32)) + kappa/2.
double three_point_branch_two_target(double kappa);
// The same expression with coefficient 8/81. Kept only for comparison: it is
// discontinuous at 68/81 and disagrees with direct evaluation.
double three_point_branch_two_target_alt(double kappa);

// --- four points ------------------------------------------------------------

// A4-symmetric tetrahedral system; phi must be +-2 pi / 3.
FermionMatrix four_point_family(double phi);

struct A4Generators {
  PointSymmetry sigma;  // 1 -> 1, 2 -> 3, 3 -> 4, 4 -> 2
  PointSymmetry tau;    // 1 <-> 2, 3 <-> 4
};
A4Generators four_point_generators();

// --- five points --------------------------------------------------------------

// Triangle of length alpha in the (1,2) plane plus two vectors of length
// beta = (2 - 3 alpha)/2 along +-e_3; rho_x = |v_x|. alpha in (0, 2/3).
BlochConfiguration five_point_bloch(double alpha);
double five_point_beta(double alpha);
// (81/8) a^4 - 18 a^3 + 15 a^2 - 6 a + 1
double five_point_action(double alpha);
// Cardano-type closed form of the unique critical point in (0, 2/3).
double five_point_optimum();
// Same root from a bracketed solve of the cubic S'(alpha) = 0.
double five_point_optimum_numeric();

// --- witnesses ----------------------------------------------------------------

enum class WitnessKind {
  MuAboveHalf,            // f = 2: S_mu -> -inf for mu > 1/2
  OneParticleMuAboveOne,  // f = 1: S_mu -> -inf for mu > 1
};

// Explicit family with parameter alpha > 0 on m >= 2 points.
FermionMatrix divergence_witness(WitnessKind kind, double alpha, int m = 2);

// m = 3, f = 2 family whose Bloch data do not depend on alpha, although the
// projectors for different |alpha| are not gauge equivalent.
FermionMatrix nonunique_family(double alpha);

}  // namespace dfs::closedform
