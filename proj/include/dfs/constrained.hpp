#pragma once

// Derivative-free minimization for the variational principle with constraint.
//
// A state is a set of f column vectors in C^{2m}. The search moves to the first
// of `neighbors` random perturbations (entries uniform in [-delta, delta] for
// real and imaginary parts) that strictly lowers the objective; if none does,
// delta shrinks by 3/4. It stops once delta < 1e-6.
//
// Normalization of the columns enters through the penalty
//   sigma = L_norm sum_i |<u_i|u_i> + 1| + L_orth sum_{i<j} |<u_i|u_j>|,
// and the constraint sum |A_xy|^2 = kappa through L_side |sum |A_xy|^2 - kappa|.
// Weights are doubled between descents while the penalty terms stay above
// their thresholds.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dfs/algebra.hpp"

namespace dfs::constrained {

struct PenaltyWeights {
  double norm = 1000.0;
  double orth = 1000.0;
  double side = 1.0;
};

// sigma for the columns of psi (2m x f).
double penalty_sigma(const CMatrix& psi, const PenaltyWeights& w);

// Indefinite Gram-Schmidt: columns made pseudo-orthonormal in order.
// Empty if a column acquires non-negative norm.
std::optional<CMatrix> normalize_columns(const CMatrix& psi);

// --- random-neighbor descent --------------------------------------------------------

struct DescentOptions {
  double delta0 = 1.0;
  double delta_min = 1e-6;
  double shrink = 0.75;
  int neighbors = 64;
  long max_evaluations = 1000000;
};

struct DescentResult {
  CMatrix state;
  double value = 0.0;
  long evaluations = 0;
  long moves = 0;
  int shrinks = 0;
  double delta = 0.0;
  bool budget_exhausted = false;
};

using Objective = std::function<double(const CMatrix&)>;

// Non-finite objective values count as "not better".
DescentResult random_descent(const Objective& objective, CMatrix start, std::uint64_t seed,
                             const DescentOptions& opt = {});

// --- chain sums -----------------------------------------------------------------------

struct ChainSums {
  double kappa = 0.0;  // sum |A_xy|^2
  double z = 0.0;      // sum |A_xy^2|
};

// Sums over all closed chains of P = -Psi Psi^+ S; psi need not be normalized.
ChainSums chain_sums(const CMatrix& psi);

// --- drivers --------------------------------------------------------------------------

// Penalty: the literal sigma-penalized objective. Retraction: every candidate
// is normalized by normalize_columns before evaluation, so sigma vanishes at
// every evaluated point.
enum class Normalization { Penalty, Retraction };

struct SearchConfig {
  Normalization normalization = Normalization::Retraction;
  PenaltyWeights weights{};
  double escalation = 2.0;
  int max_escalations = 20;
  double sigma_tol = 1e-8;          // penalty value regarded as feasible
  double side_tol = 1e-4;           // |kappa(P) - kappa| regarded as feasible
  double improvement_tol = 1e-9;    // stop escalating when the value improves less
  int restarts = 4;
  std::uint64_t seed = 0;
  DescentOptions descent{};
  long budget = 1000000;            // total objective evaluations per restart
};

struct ConstrainedResult {
  double value = 0.0;               // kappa_min, or Z at the minimizer
  double kappa = 0.0;               // achieved sum |A_xy|^2
  double z = 0.0;                   // achieved sum |A_xy^2|
  double constraint_residual = 0.0; // |kappa - target| (0 for kappa_min)
  double sigma = 0.0;               // penalty of the final columns, unit weights
  double normalization_defect = 0.0;
  bool feasible = false;
  std::uint64_t seed = 0;
  long evaluations = 0;
  FermionMatrix psi;
  // class P^f only
  double idempotence_defect = 0.0;
  bool projector = false;
};

// Smallest kappa for which the constraint set is non-empty.
ConstrainedResult kappa_min(int m, int f, const SearchConfig& cfg = {});

// Minimizes Z at fixed kappa over fermionic projectors.
ConstrainedResult minimize_Z(int m, int f, double kappa, const SearchConfig& cfg = {},
                             const std::optional<CMatrix>& warm_start = std::nullopt);

// Same over the class P^f: columns of negative norm, rescaled so Tr P = f.
// A warm start (e.g. the projector-class minimizer) is searched first.
ConstrainedResult minimize_Z_pf(int m, int f, double kappa, const SearchConfig& cfg = {},
                                const std::optional<CMatrix>& warm_start = std::nullopt);

// Rescales columns of negative norm so that Tr(-Psi Psi^+ S) = f. Empty if a
// column has non-negative norm.
std::optional<CMatrix> pf_rescale(const CMatrix& psi, int f);

// --- sweep ----------------------------------------------------------------------------

struct SweepRow {
  int m = 0;
  int f = 0;
  double kappa = 0.0;
  double z = 0.0;
  double constraint_residual = 0.0;
  bool feasible = false;
  std::uint64_t seed = 0;
  long evaluations = 0;
  std::string variant;  // "projector" or "pf"
};

// Header m,f,kappa,Z,constraint_residual,feasible,seed,evals (plus variant when present).
std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_variant = false);

}  // namespace dfs::constrained
