#pragma once

// Minimization of the critical action over two-particle systems in a
// gauge-fixed parameterization, by a quadratic penalty method whose inner
// problems are solved with Fletcher-Reeves conjugate gradients.
//
// Point x carries E_x Psi = [[0, v_x], [u_x, w_x]] with u_x, v_x >= 0 and
// w_x = x_x + i y_x, packed as xi = (u_1..u_m, v_1..v_m, x_1..x_m, y_1..y_m).
// Negative u, v entries are read as their absolute values. The columns are
// pseudo-orthonormal iff the four residuals
//   r1 = sum u^2 - 1, r2 = sum (x^2 + y^2 - v^2) - 1, r3 = sum u x, r4 = sum u y
// vanish.
//
// In these coordinates F_x has entries a = u^2, b = u w, c = |w|^2 - v^2 and
// det F_x = -u^2 v^2, so the discriminant of the chain (x,y) is
//   Delta_xy = (a_x a_y + c_x c_y + 2 Re b_x conj(b_y))^2 - 4 det F_x det F_y
// and the critical action is S = 1/2 sum_{x,y} Delta_xy Theta(Delta_xy).

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dfs/algebra.hpp"
#include "dfs/fletcher_reeves.hpp"

namespace dfs::critical {

// --- two-particle gauge-fixed coordinates --------------------------------------

int points_of(const RVector& xi);  // length / 4; throws std::invalid_argument

FermionMatrix unpack(const RVector& xi);
// Inverse of unpack for matrices already in the gauge-fixed form (entry (0,0)
// of every block zero, u and v real); throws std::invalid_argument otherwise.
RVector pack(const FermionMatrix& psi, double tol = 1e-12);

std::array<double, 4> residuals(const RVector& xi);
double residual_norm_sq(const RVector& xi);

double delta_form_action(const RVector& xi);
double penalty_objective(const RVector& xi, double L);
RVector gradient(const RVector& xi, double L);
// Value of the penalty objective, gradient written to g.
double penalty_value_and_gradient(const RVector& xi, double L, RVector& g);

// Exact pseudo-Gram-Schmidt inside the gauge-fixed form: rescales u, removes
// the u-component from w, rescales (v, w). Empty if a column has non-negative norm.
std::optional<RVector> project_to_feasible(const RVector& xi);

// --- generic penalty problem ----------------------------------------------------

class PenaltyProblem {
 public:
  virtual ~PenaltyProblem() = default;

  virtual int dimension() const = 0;
  virtual double action(const RVector& xi) const = 0;
  virtual std::vector<double> residuals(const RVector& xi) const = 0;
  virtual double value(const RVector& xi, double L) const = 0;
  virtual double value_and_gradient(const RVector& xi, double L, RVector& g) const = 0;
  virtual std::optional<RVector> project(const RVector& xi) const = 0;
  virtual FermionMatrix unpack(const RVector& xi) const = 0;
  virtual std::string name() const = 0;
};

// Critical action of two-particle systems, coordinates as above.
class CriticalTwoParticle final : public PenaltyProblem {
 public:
  explicit CriticalTwoParticle(int m);

  int dimension() const override { return 4 * m_; }
  double action(const RVector& xi) const override;
  std::vector<double> residuals(const RVector& xi) const override;
  double value(const RVector& xi, double L) const override;
  double value_and_gradient(const RVector& xi, double L, RVector& g) const override;
  std::optional<RVector> project(const RVector& xi) const override;
  FermionMatrix unpack(const RVector& xi) const override;
  std::string name() const override { return "critical-f2"; }

 private:
  int m_;
};

// One particle, E_x u = (p_x, q_x) with real entries (local phases are gauge).
// rho_x = q_x^2 - p_x^2, the only root of A_xy is rho_x rho_y and
// S_mu = (1 - mu) (sum rho^2)^2. Single residual sum rho - 1.
// xi = (p_1..p_m, q_1..q_m).
class OneParticle final : public PenaltyProblem {
 public:
  OneParticle(int m, double mu);

  int dimension() const override { return 2 * m_; }
  double action(const RVector& xi) const override;
  std::vector<double> residuals(const RVector& xi) const override;
  double value(const RVector& xi, double L) const override;
  double value_and_gradient(const RVector& xi, double L, RVector& g) const override;
  std::optional<RVector> project(const RVector& xi) const override;
  FermionMatrix unpack(const RVector& xi) const override;
  std::string name() const override { return "one-particle"; }

 private:
  int m_;
  double mu_;
};

// --- penalty loop ---------------------------------------------------------------

struct PenaltySchedule {
  double L0 = 1000.0;
  double tau0 = 1e-6;
  double growth = 1.1;
  double shrink = 0.9;
  long inner_max = 100000;
  double feasibility_threshold = 1e-20;  // stop once sum r^2 <= threshold
  int outer_max = 500;
  // Projected steepest-descent steps on the feasible set after the loop (0: off).
  int polish_iterations = 200;

  void validate() const;  // throws std::invalid_argument
};

struct OuterRecord {
  int k = 0;
  double L = 0.0;
  double tau = 0.0;
  double Q = 0.0;
  double S = 0.0;
  std::vector<double> residuals;
  long inner_iterations = 0;
  FrStatus status = FrStatus::MaxIterations;
  double best_feasible = 0.0;  // best projected action so far (NaN if none)
};

struct OptimizerRun {
  std::uint64_t seed = 0;
  int restart = 0;
  RVector xi;                      // final iterate after projection when feasible
  RVector raw_xi;                  // last penalty iterate
  FermionMatrix psi;               // unpacked xi
  double action = 0.0;             // at xi
  std::vector<double> residuals;   // at raw_xi
  double residual_norm_sq = 0.0;
  bool feasible = false;           // threshold reached
  bool aborted = false;            // non-finite objective
  int outer_iterations = 0;
  long inner_iterations = 0;
  int polish_iterations = 0;
  double wall_seconds = 0.0;
  std::vector<OuterRecord> log;

  std::string log_jsonl() const;
};

OptimizerRun penalty_loop(const PenaltyProblem& problem, RVector xi0,
                          const PenaltySchedule& schedule = {});
// Two-particle critical case.
OptimizerRun penalty_loop(RVector xi0, const PenaltySchedule& schedule = {});

// --- multi-start ----------------------------------------------------------------

int default_restarts(int m);  // 50 for m <= 6, 100 above
int default_workers();

struct MultiStartOptions {
  int restarts = 0;  // 0: default_restarts(m)
  std::uint64_t seed = 0;
  int workers = 0;   // 0: default_workers()
  PenaltySchedule schedule{};
};

struct MultiStartResult {
  std::vector<OptimizerRun> runs;  // indexed by restart
  int best = -1;                   // lowest action among feasible runs

  const OptimizerRun& best_run() const;
  FermionMatrix best_fermion_matrix() const;
  // Header m,restart,seed,action,feasible,iters.
  std::string results_csv(int m) const;
};

// Runs whose action lies within action_tol of the best, grouped by the
// label-independent Gram fingerprint of their Bloch configurations (f = 2).
struct MinimizerClass {
  std::vector<int> restarts;
  std::vector<double> fingerprint;
};
std::vector<MinimizerClass> distinct_minimizers(const MultiStartResult& result, double action_tol,
                                                double gram_tol);

// Initial xi uniform in [-1, 1]^n from a generator seeded with seed.
RVector random_start(int n, std::uint64_t seed);

using ProblemFactory = std::function<std::unique_ptr<PenaltyProblem>()>;

MultiStartResult multi_start(const ProblemFactory& factory, int m, const MultiStartOptions& opt);
MultiStartResult multi_start(int m, const MultiStartOptions& opt);
MultiStartResult multi_start_one_particle(int m, double mu, const MultiStartOptions& opt);

}  // namespace dfs::critical
