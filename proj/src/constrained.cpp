#include "dfs/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dfs::constrained {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Normalizing a column close to the light cone blows it up, and chain sums of
// such columns are dominated by rounding, which the descent would exploit.
constexpr double kMaxNormSq = 1e6;

std::optional<CMatrix> guarded(std::optional<CMatrix> psi) {
  if (psi && !(psi->squaredNorm() <= kMaxNormSq)) return std::nullopt;
  return psi;
}

// <u_i|u_j> for columns of psi.
cplx column_product(const CMatrix& psi, Eigen::Index i, Eigen::Index j) {
  cplx s = 0.0;
  for (Eigen::Index r = 0; r < psi.rows(); ++r) {
    const cplx t = std::conj(psi(r, i)) * psi(r, j);
    s += (r % 2 == 0) ? t : -t;
  }
  return s;
}

void require_shape(int m, int f) {
  if (m < 1 || f < 1 || f > m) {
    std::ostringstream os;
    os << "need 1 <= f <= m, got m = " << m << ", f = " << f;
    throw std::invalid_argument(os.str());
  }
}

CMatrix random_columns(int m, int f, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CMatrix psi(2 * m, f);
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    for (Eigen::Index i = 0; i < psi.rows(); ++i) {
      const double re = dist(gen);
      const double im = dist(gen);
      psi(i, j) = cplx(re, im);
    }
  }
  return psi;
}

}  // namespace

double penalty_sigma(const CMatrix& psi, const PenaltyWeights& w) {
  double norm = 0.0;
  double orth = 0.0;
  for (Eigen::Index i = 0; i < psi.cols(); ++i) {
    norm += std::abs(column_product(psi, i, i) + 1.0);
    for (Eigen::Index j = i + 1; j < psi.cols(); ++j) orth += std::abs(column_product(psi, i, j));
  }
  return w.norm * norm + w.orth * orth;
}

std::optional<CMatrix> normalize_columns(const CMatrix& psi) {
  CMatrix out = psi;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      // <u_j|u_j> = -1 already
      out.col(i) += column_product(out, j, i) * out.col(j);
    }
    const double n = column_product(out, i, i).real();
    if (!(n < 0.0)) return std::nullopt;
    out.col(i) /= std::sqrt(-n);
  }
  return out;
}

DescentResult random_descent(const Objective& objective, CMatrix start, std::uint64_t seed,
                             const DescentOptions& opt) {
  if (opt.neighbors < 1) throw std::invalid_argument("random_descent: neighbors must be >= 1");
  if (!(opt.delta0 > 0.0) || !(opt.delta_min > 0.0)) {
    throw std::invalid_argument("random_descent: delta0 and delta_min must be > 0");
  }
  if (!(opt.shrink > 0.0 && opt.shrink < 1.0)) {
    throw std::invalid_argument("random_descent: shrink must lie in (0, 1)");
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  DescentResult res;
  res.state = std::move(start);
  res.value = objective(res.state);
  res.evaluations = 1;
  res.delta = opt.delta0;
  CMatrix trial(res.state.rows(), res.state.cols());

  while (res.delta >= opt.delta_min) {
    bool moved = false;
    for (int k = 0; k < opt.neighbors; ++k) {
      if (res.evaluations >= opt.max_evaluations) {
        res.budget_exhausted = true;
        return res;
      }
      for (Eigen::Index j = 0; j < trial.cols(); ++j) {
        for (Eigen::Index i = 0; i < trial.rows(); ++i) {
          const double re = dist(gen);
          const double im = dist(gen);
          trial(i, j) = res.state(i, j) + res.delta * cplx(re, im);
        }
      }
      const double v = objective(trial);
      ++res.evaluations;
      if (v < res.value) {
        res.state.swap(trial);
        res.value = v;
        ++res.moves;
        moved = true;
        break;
      }
    }
    if (!moved) {
      res.delta *= opt.shrink;
      ++res.shrinks;
    }
  }
  return res;
}

ChainSums chain_sums(const CMatrix& psi) {
  const Eigen::Index m = psi.rows() / 2;
  // The nonzero spectrum of A_xy = P(x,y) P(y,x) is that of M = F_y F_x with
  // the local Gram blocks F_x = Psi_x^+ s Psi_x (f x f, rank <= 2). These are
  // gauge invariant and stay O(1) for strongly boosted columns, where products
  // of kernels would cancel catastrophically.
  std::vector<CMatrix> gram(static_cast<std::size_t>(m));
  for (Eigen::Index x = 0; x < m; ++x) {
    const auto up = psi.row(2 * x);
    const auto down = psi.row(2 * x + 1);
    gram[static_cast<std::size_t>(x)] = up.adjoint() * up - down.adjoint() * down;
  }
  ChainSums out;
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = 0; y < m; ++y) {
      const CMatrix mm = gram[static_cast<std::size_t>(y)] * gram[static_cast<std::size_t>(x)];
      const double tr = mm.trace().real();
      const double tr2 = (mm * mm).trace().real();
      const auto spec = spectrum_from_invariants(tr, 0.5 * (tr * tr - tr2));
      const double w1 = spec.weight_one();
      out.kappa += w1 * w1;
      out.z += spec.weight_two();
    }
  }
  return out;
}

std::optional<CMatrix> pf_rescale(const CMatrix& psi, int f) {
  double trace = 0.0;
  for (Eigen::Index i = 0; i < psi.cols(); ++i) {
    const double n = column_product(psi, i, i).real();
    if (!(n < 0.0)) return std::nullopt;
    trace -= n;
  }
  return CMatrix(psi * std::sqrt(static_cast<double>(f) / trace));
}

namespace {

enum class Goal { KappaMin, Z, ZPf };

struct Evaluated {
  ChainSums sums;
  double sigma_unit = 0.0;
  double defect = 0.0;
  double idempotence = 0.0;
  CMatrix psi;
  bool ok = false;
};

Evaluated finalize(const CMatrix& state, int f, Goal goal) {
  Evaluated e;
  std::optional<CMatrix> fixed =
      goal == Goal::ZPf ? pf_rescale(state, f) : normalize_columns(state);
  if (!fixed) return e;
  e.psi = *fixed;
  e.ok = true;
  e.sums = chain_sums(e.psi);
  e.sigma_unit = penalty_sigma(e.psi, {1.0, 1.0, 1.0});
  CMatrix gram = FermionMatrix(e.psi).gram() + CMatrix::Identity(f, f);
  e.defect = gram.cwiseAbs().maxCoeff();
  const auto defects = projector_defects(operator_from_columns(FermionMatrix(e.psi)), f);
  e.idempotence = defects.idempotence;
  return e;
}

ConstrainedResult run_search(int m, int f, Goal goal, double kappa, const SearchConfig& cfg,
                             const std::optional<CMatrix>& warm_start) {
  require_shape(m, f);
  if (cfg.restarts < 1 && !warm_start) throw std::invalid_argument("search: restarts must be >= 1");

  ConstrainedResult best;
  double best_score = kInf;
  bool have = false;

  const int total = cfg.restarts + (warm_start ? 1 : 0);
  for (int r = 0; r < total; ++r) {
    const bool warm = warm_start && r == 0;
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(warm ? 0 : r - (warm_start ? 1 : 0));
    std::mt19937_64 gen(seed);
    CMatrix state = warm ? *warm_start : random_columns(m, f, gen);
    if (warm && (state.rows() != 2 * m || state.cols() != f)) {
      throw std::invalid_argument("search: warm start has the wrong shape");
    }

    PenaltyWeights w = cfg.weights;
    long evaluations = 0;
    double previous = kInf;
    for (int esc = 0; esc <= cfg.max_escalations; ++esc) {
      Objective obj;
      const bool retract = cfg.normalization == Normalization::Retraction;
      switch (goal) {
        case Goal::KappaMin:
          obj = [&](const CMatrix& psi) {
            if (retract) {
              const auto n = guarded(normalize_columns(psi));
              return n ? chain_sums(*n).kappa : kInf;
            }
            return chain_sums(psi).kappa + penalty_sigma(psi, w);
          };
          break;
        case Goal::Z:
          obj = [&](const CMatrix& psi) {
            if (retract) {
              const auto n = guarded(normalize_columns(psi));
              if (!n) return kInf;
              const auto s = chain_sums(*n);
              return s.z + w.side * std::abs(s.kappa - kappa);
            }
            const auto s = chain_sums(psi);
            return s.z + w.side * std::abs(s.kappa - kappa) + penalty_sigma(psi, w);
          };
          break;
        case Goal::ZPf:
          obj = [&](const CMatrix& psi) {
            const auto fixed = guarded(pf_rescale(psi, f));
            if (!fixed) return kInf;
            const auto s = chain_sums(*fixed);
            return s.z + w.side * std::abs(s.kappa - kappa);
          };
          break;
      }
      DescentOptions dopt = cfg.descent;
      dopt.max_evaluations = std::max(1L, cfg.budget - evaluations);
      const auto res = random_descent(obj, state, gen(), dopt);
      evaluations += res.evaluations;
      state = res.state;

      const bool fixed_up = goal == Goal::ZPf || retract;
      const auto fixed = goal == Goal::ZPf ? pf_rescale(state, f)
                                           : (retract ? normalize_columns(state) : state);
      if (!fixed) break;
      const auto s = chain_sums(*fixed);
      const double sigma = fixed_up ? 0.0 : penalty_sigma(state, w);
      const double side = goal == Goal::KappaMin ? 0.0 : w.side * std::abs(s.kappa - kappa);
      const double value = goal == Goal::KappaMin ? s.kappa : s.z;
      const bool penalties_ok = sigma < cfg.sigma_tol * std::max(1.0, w.norm) &&
                                std::abs(side) < cfg.side_tol * std::max(1.0, w.side);
      if (res.budget_exhausted || evaluations >= cfg.budget) break;
      if (penalties_ok && std::abs(previous - value) < cfg.improvement_tol) break;
      previous = value;
      if (!penalties_ok) {
        w.norm *= cfg.escalation;
        w.orth *= cfg.escalation;
        w.side *= cfg.escalation;
      }
    }

    const Evaluated e = finalize(state, f, goal);
    if (!e.ok) continue;
    ConstrainedResult cand;
    cand.kappa = e.sums.kappa;
    cand.z = e.sums.z;
    cand.value = goal == Goal::KappaMin ? e.sums.kappa : e.sums.z;
    cand.constraint_residual = goal == Goal::KappaMin ? 0.0 : std::abs(e.sums.kappa - kappa);
    cand.sigma = e.sigma_unit;
    cand.normalization_defect = e.defect;
    cand.idempotence_defect = e.idempotence;
    cand.projector = e.idempotence < 1e-4;
    cand.feasible = (goal == Goal::ZPf || e.defect < 1e-6) && cand.constraint_residual < cfg.side_tol;
    cand.seed = seed;
    cand.evaluations = evaluations;
    cand.psi = FermionMatrix(e.psi);
    // feasible candidates first, then by value
    const double score = cand.value + (cand.feasible ? 0.0 : 1e6 + cand.constraint_residual);
    if (!have || score < best_score) {
      best = std::move(cand);
      best_score = score;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("search: no restart produced admissible columns");
  return best;
}

}  // namespace

ConstrainedResult kappa_min(int m, int f, const SearchConfig& cfg) {
  return run_search(m, f, Goal::KappaMin, 0.0, cfg, std::nullopt);
}

ConstrainedResult minimize_Z(int m, int f, double kappa, const SearchConfig& cfg,
                             const std::optional<CMatrix>& warm_start) {
  return run_search(m, f, Goal::Z, kappa, cfg, warm_start);
}

ConstrainedResult minimize_Z_pf(int m, int f, double kappa, const SearchConfig& cfg,
                                const std::optional<CMatrix>& warm_start) {
  return run_search(m, f, Goal::ZPf, kappa, cfg, warm_start);
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_variant) {
  std::ostringstream os;
  os << "m,f,kappa,Z,constraint_residual,feasible,seed,evals";
  if (with_variant) os << ",variant";
  os << '\n';
  char buf[128];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g,%.12g,", r.m, r.f, r.kappa, r.z,
                  r.constraint_residual);
    os << buf << (r.feasible ? "true" : "false") << ',' << r.seed << ',' << r.evaluations;
    if (with_variant) os << ',' << r.variant;
    os << '\n';
  }
  return os.str();
}

}  // namespace dfs::constrained
