#pragma once

// Indefinite inner product algebra of fermion systems in discrete space-time.
//
// The space H = C^{2m} carries the inner product <u|v> = u^+ S v with the
// signature matrix S = diag(1,-1, 1,-1, ...). Point x (1-based, as in the
// usual labeling) owns the basis vectors 2x-1 and 2x. A system of f particles
// is described by its fermion matrix Psi (2m x f), whose columns are
// pseudo-orthonormal: <u_i|u_j> = -delta_ij. The fermionic projector is
// P = -Psi Psi^+ S, and all functionals are built from the closed chains
// A_xy = P(x,y) P(y,x), 2x2 blocks acting on the subspace of point x.

#include <optional>
#include <vector>

#include "dfs/core.hpp"

namespace dfs {

class DiscreteSpacetime {
 public:
  explicit DiscreteSpacetime(int m);

  int points() const { return m_; }
  int dim() const { return 2 * m_; }

  // Diagonal signature matrix S with entries +1, -1 alternating.
  RMatrix signature() const;
  // Space-time projector E_x, x in [1, m].
  RMatrix projector(int x) const;

 private:
  int m_;
};

// u^+ S v. Antilinear in the first slot.
cplx inner_product(const CVector& u, const CVector& v, const DiscreteSpacetime& st);
// Same, with the space-time inferred from the (even) vector length.
cplx inner_product(const CVector& u, const CVector& v);

// 2m x f matrix of particle states. Construction only checks the shape;
// normalization is checked by validate() because optimizer iterates are
// legitimately unnormalized.
class FermionMatrix {
 public:
  FermionMatrix() = default;
  explicit FermionMatrix(CMatrix entries);

  int points() const { return static_cast<int>(entries_.rows() / 2); }
  int particles() const { return static_cast<int>(entries_.cols()); }
  const CMatrix& entries() const { return entries_; }

  // 2 x f block E_x Psi restricted to the subspace of point x (1-based).
  CMatrix local(int x) const;

  // Gram matrix G_ij = <u_i|u_j> = (Psi^+ S Psi)_ij.
  CMatrix gram() const;

  // First Gram entry deviating from -delta_ij by more than tol, as a message.
  std::optional<std::string> normalization_defect(double tol) const;

  // Throws ValidationError naming the offending Gram entry.
  void validate(const Tolerances& tol = kDefaultTolerances) const;

 private:
  CMatrix entries_;
};

// Fermionic projector P = -Psi Psi^+ S (or any operator of that form).
struct FermionicProjector {
  CMatrix matrix;

  int points() const { return static_cast<int>(matrix.rows() / 2); }
  // 2x2 discrete kernel P(x,y) = E_x P E_y, x, y 1-based.
  Mat2 kernel(int x, int y) const;
};

FermionicProjector projector_from_fermion_matrix(const FermionMatrix& psi,
                                                 const Tolerances& tol = kDefaultTolerances);
// P = -Psi Psi^+ S without the normalization check (relaxed operator classes).
FermionicProjector operator_from_columns(const FermionMatrix& psi);

struct ProjectorDefects {
  double idempotence;    // max |P^2 - P|
  double self_adjoint;   // max |(PS)^+ - PS|
  double trace_error;    // |Tr P - f|
};
ProjectorDefects projector_defects(const FermionicProjector& p, int f);

// A_xy = P(x,y) P(y,x); x, y 1-based.
Mat2 closed_chain(const FermionicProjector& p, int x, int y);

// Roots of the characteristic polynomial of a closed chain. The polynomial has
// real coefficients, so the roots are either both real or a conjugate pair;
// lambda_plus carries the larger real part (ties: larger imaginary part).
struct ChainSpectrum {
  cplx lambda_plus;
  cplx lambda_minus;
  double trace = 0.0;
  double determinant = 0.0;
  double discriminant = 0.0;  // trace^2 - 4 det

  double weight_one() const { return std::abs(lambda_plus) + std::abs(lambda_minus); }
  double weight_two() const { return std::norm(lambda_plus) + std::norm(lambda_minus); }
};

// Spectrum from the real invariants of the characteristic polynomial.
ChainSpectrum spectrum_from_invariants(double trace, double determinant);

// Checks (A s)^+ = A s before computing the roots; throws std::invalid_argument otherwise.
ChainSpectrum chain_roots(const Mat2& a, const Tolerances& tol = kDefaultTolerances);

// L_mu = |A^2| - mu |A|^2.
double lagrangian(const ChainSpectrum& spec, double mu);
// (|lambda_+| - |lambda_-|)^2 / 2, equal to lagrangian(spec, 1/2).
double critical_lagrangian(const ChainSpectrum& spec);

// Spectra of all m*m closed chains, row-major in (x, y).
std::vector<ChainSpectrum> all_chain_spectra(const FermionicProjector& p);

double action(const FermionicProjector& p, double mu);
double constraint_value(const FermionicProjector& p);  // sum |A_xy|^2
double target_value(const FermionicProjector& p);      // sum |A_xy^2|

// Block-diagonal element of U(1,1)^m.
class GaugeTransform {
 public:
  explicit GaugeTransform(std::vector<Mat2> blocks, const Tolerances& tol = kDefaultTolerances);

  int points() const { return static_cast<int>(blocks_.size()); }
  const std::vector<Mat2>& blocks() const { return blocks_; }
  CMatrix matrix() const;
  // S U^+ S, the inverse of a pseudo-unitary U.
  CMatrix inverse() const;

  static GaugeTransform identity(int m);

 private:
  std::vector<Mat2> blocks_;
};

// Element of U(1,1) parameterized by a global phase, a boost rapidity and two
// further phases: e^{i phase} [[cosh r e^{ia}, sinh r e^{ib}], [sinh r e^{-ib}, cosh r e^{-ia}]].
Mat2 pseudo_unitary_block(double phase, double rapidity, double a, double b);

bool is_pseudo_unitary(const CMatrix& u, double tol);

FermionicProjector apply_gauge(const FermionicProjector& p, const GaugeTransform& u);
FermionMatrix apply_gauge(const FermionMatrix& psi, const GaugeTransform& u);

// True iff U P U^{-1} = P and U E_x U^{-1} = E_{sigma(x)} for all x.
// sigma holds sigma(x) at index x-1 (1-based images). U must be 2m x 2m.
bool check_outer_symmetry(const FermionicProjector& p, const std::vector<int>& sigma,
                          const CMatrix& u, const Tolerances& tol = kDefaultTolerances);

}  // namespace dfs
