#include "dfs/critical.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dfs/bloch.hpp"
#include "json.hpp"

namespace dfs::critical {

namespace {

// Per-point quantities of the two-particle chart.
struct Local {
  double U, V, X, Y;        // folded magnitudes and Re/Im w
  double a, br, bi, c, D;   // F_x = [[a, b], [conj b, c]], D = det F_x
};

std::vector<Local> locals(const RVector& xi, int m) {
  std::vector<Local> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Local& l = out[static_cast<std::size_t>(i)];
    l.U = std::abs(xi[i]);
    l.V = std::abs(xi[m + i]);
    l.X = xi[2 * m + i];
    l.Y = xi[3 * m + i];
    l.a = l.U * l.U;
    l.br = l.U * l.X;
    l.bi = l.U * l.Y;
    l.c = l.X * l.X + l.Y * l.Y - l.V * l.V;
    l.D = -l.U * l.U * l.V * l.V;
  }
  return out;
}

double pair_trace(const Local& p, const Local& q) {
  return p.a * q.a + p.c * q.c + 2.0 * (p.br * q.br + p.bi * q.bi);
}

std::array<double, 4> residuals_of(const std::vector<Local>& loc) {
  std::array<double, 4> r{-1.0, -1.0, 0.0, 0.0};
  for (const Local& l : loc) {
    r[0] += l.a;
    r[1] += l.c;
    r[2] += l.br;
    r[3] += l.bi;
  }
  return r;
}

double action_of(const std::vector<Local>& loc) {
  const std::size_t m = loc.size();
  double s = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = x; y < m; ++y) {
      const double t = pair_trace(loc[x], loc[y]);
      const double delta = t * t - 4.0 * loc[x].D * loc[y].D;
      if (delta > 0.0) s += (x == y ? 0.5 : 1.0) * delta;
    }
  }
  return s;
}

double sum_sq(const std::array<double, 4>& r) {
  return r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3];
}

double sign_of(double t) { return t < 0.0 ? -1.0 : 1.0; }

const char* status_name(FrStatus s) {
  switch (s) {
    case FrStatus::Converged: return "converged";
    case FrStatus::MaxIterations: return "max_iterations";
    case FrStatus::Stalled: return "stalled";
    case FrStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

}  // namespace

int points_of(const RVector& xi) {
  if (xi.size() == 0 || xi.size() % 4 != 0) {
    std::ostringstream os;
    os << "gauge-fixed state must have length 4m with m >= 1, got " << xi.size();
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(xi.size() / 4);
}

FermionMatrix unpack(const RVector& xi) {
  const int m = points_of(xi);
  CMatrix psi = CMatrix::Zero(2 * m, 2);
  for (int i = 0; i < m; ++i) {
    psi(2 * i, 1) = std::abs(xi[m + i]);
    psi(2 * i + 1, 0) = std::abs(xi[i]);
    psi(2 * i + 1, 1) = cplx(xi[2 * m + i], xi[3 * m + i]);
  }
  return FermionMatrix(std::move(psi));
}

RVector pack(const FermionMatrix& psi, double tol) {
  if (psi.particles() != 2) throw std::invalid_argument("pack: needs a two-particle system");
  const int m = psi.points();
  const CMatrix& e = psi.entries();
  RVector xi(4 * m);
  for (int i = 0; i < m; ++i) {
    const cplx zero = e(2 * i, 0);
    const cplx v = e(2 * i, 1);
    const cplx u = e(2 * i + 1, 0);
    if (std::abs(zero) > tol || std::abs(v.imag()) > tol || std::abs(u.imag()) > tol ||
        v.real() < -tol || u.real() < -tol) {
      std::ostringstream os;
      os << "pack: block of point " << (i + 1) << " is not of the gauge-fixed form";
      throw std::invalid_argument(os.str());
    }
    xi[i] = std::max(0.0, u.real());
    xi[m + i] = std::max(0.0, v.real());
    xi[2 * m + i] = e(2 * i + 1, 1).real();
    xi[3 * m + i] = e(2 * i + 1, 1).imag();
  }
  return xi;
}

std::array<double, 4> residuals(const RVector& xi) {
  return residuals_of(locals(xi, points_of(xi)));
}

double residual_norm_sq(const RVector& xi) { return sum_sq(residuals(xi)); }

double delta_form_action(const RVector& xi) { return action_of(locals(xi, points_of(xi))); }

double penalty_objective(const RVector& xi, double L) {
  const auto loc = locals(xi, points_of(xi));
  return action_of(loc) + L * sum_sq(residuals_of(loc));
}

RVector gradient(const RVector& xi, double L) {
  RVector g;
  penalty_value_and_gradient(xi, L, g);
  return g;
}

double penalty_value_and_gradient(const RVector& xi, double L, RVector& g) {
  const int m = points_of(xi);
  const auto loc = locals(xi, m);
  const auto mz = static_cast<std::size_t>(m);

  // dS with respect to the per-point quantities a, br, bi, c, D
  std::vector<double> ga(mz, 0.0), gbr(mz, 0.0), gbi(mz, 0.0), gc(mz, 0.0), gd(mz, 0.0);
  double s = 0.0;
  for (std::size_t x = 0; x < mz; ++x) {
    for (std::size_t y = x; y < mz; ++y) {
      const Local& p = loc[x];
      const Local& q = loc[y];
      const double t = pair_trace(p, q);
      const double delta = t * t - 4.0 * p.D * q.D;
      if (!(delta > 0.0)) continue;
      const double w = x == y ? 0.5 : 1.0;
      s += w * delta;
      const double ct = 2.0 * w * t;
      const double cd = -4.0 * w;
      ga[x] += ct * q.a;
      gc[x] += ct * q.c;
      gbr[x] += 2.0 * ct * q.br;
      gbi[x] += 2.0 * ct * q.bi;
      gd[x] += cd * q.D;
      ga[y] += ct * p.a;
      gc[y] += ct * p.c;
      gbr[y] += 2.0 * ct * p.br;
      gbi[y] += 2.0 * ct * p.bi;
      gd[y] += cd * p.D;
    }
  }

  const auto r = residuals_of(loc);
  const double k2 = 2.0 * L;
  g.resize(4 * m);
  for (int i = 0; i < m; ++i) {
    const auto iz = static_cast<std::size_t>(i);
    const Local& l = loc[iz];
    double dU = ga[iz] * 2.0 * l.U + gbr[iz] * l.X + gbi[iz] * l.Y +
                gd[iz] * (-2.0 * l.U * l.V * l.V);
    double dV = gc[iz] * (-2.0 * l.V) + gd[iz] * (-2.0 * l.U * l.U * l.V);
    double dX = gbr[iz] * l.U + gc[iz] * 2.0 * l.X;
    double dY = gbi[iz] * l.U + gc[iz] * 2.0 * l.Y;
    dU += k2 * (r[0] * 2.0 * l.U + r[2] * l.X + r[3] * l.Y);
    dV += k2 * (r[1] * (-2.0 * l.V));
    dX += k2 * (r[1] * 2.0 * l.X + r[2] * l.U);
    dY += k2 * (r[1] * 2.0 * l.Y + r[3] * l.U);
    g[i] = dU * sign_of(xi[i]);
    g[m + i] = dV * sign_of(xi[m + i]);
    g[2 * m + i] = dX;
    g[3 * m + i] = dY;
  }
  return s + L * sum_sq(r);
}

std::optional<RVector> project_to_feasible(const RVector& xi) {
  const int m = points_of(xi);
  RVector out(4 * m);
  double nu = 0.0;
  for (int i = 0; i < m; ++i) nu += xi[i] * xi[i];
  if (!(nu > 0.0)) return std::nullopt;
  const double su = 1.0 / std::sqrt(nu);
  cplx overlap = 0.0;  // sum u w after rescaling u
  for (int i = 0; i < m; ++i) {
    out[i] = std::abs(xi[i]) * su;
    overlap += out[i] * cplx(xi[2 * m + i], xi[3 * m + i]);
  }
  double nw = 0.0;
  for (int i = 0; i < m; ++i) {
    const cplx w = cplx(xi[2 * m + i], xi[3 * m + i]) - overlap * out[i];
    out[m + i] = std::abs(xi[m + i]);
    out[2 * m + i] = w.real();
    out[3 * m + i] = w.imag();
    nw += std::norm(w) - out[m + i] * out[m + i];
  }
  if (!(nw > 0.0)) return std::nullopt;
  const double sw = 1.0 / std::sqrt(nw);
  out.segment(m, 3 * m) *= sw;
  return out;
}

// --- problems -------------------------------------------------------------------

CriticalTwoParticle::CriticalTwoParticle(int m) : m_(m) {
  if (m < 2) throw std::invalid_argument("two-particle systems need m >= 2 points");
}

double CriticalTwoParticle::action(const RVector& xi) const { return delta_form_action(xi); }

std::vector<double> CriticalTwoParticle::residuals(const RVector& xi) const {
  const auto r = critical::residuals(xi);
  return {r.begin(), r.end()};
}

double CriticalTwoParticle::value(const RVector& xi, double L) const {
  return penalty_objective(xi, L);
}

double CriticalTwoParticle::value_and_gradient(const RVector& xi, double L, RVector& g) const {
  return penalty_value_and_gradient(xi, L, g);
}

std::optional<RVector> CriticalTwoParticle::project(const RVector& xi) const {
  return project_to_feasible(xi);
}

FermionMatrix CriticalTwoParticle::unpack(const RVector& xi) const { return critical::unpack(xi); }

OneParticle::OneParticle(int m, double mu) : m_(m), mu_(mu) {
  if (m < 1) throw std::invalid_argument("one-particle systems need m >= 1 points");
  if (!(mu < 1.0)) throw std::invalid_argument("one-particle action is bounded below only for mu < 1");
}

double OneParticle::action(const RVector& xi) const {
  double r2 = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double rho = xi[m_ + i] * xi[m_ + i] - xi[i] * xi[i];
    r2 += rho * rho;
  }
  return (1.0 - mu_) * r2 * r2;
}

std::vector<double> OneParticle::residuals(const RVector& xi) const {
  double s = -1.0;
  for (int i = 0; i < m_; ++i) s += xi[m_ + i] * xi[m_ + i] - xi[i] * xi[i];
  return {s};
}

double OneParticle::value(const RVector& xi, double L) const {
  const double r = residuals(xi)[0];
  return action(xi) + L * r * r;
}

double OneParticle::value_and_gradient(const RVector& xi, double L, RVector& g) const {
  double r2 = 0.0;
  double res = -1.0;
  for (int i = 0; i < m_; ++i) {
    const double rho = xi[m_ + i] * xi[m_ + i] - xi[i] * xi[i];
    r2 += rho * rho;
    res += rho;
  }
  g.resize(2 * m_);
  for (int i = 0; i < m_; ++i) {
    const double rho = xi[m_ + i] * xi[m_ + i] - xi[i] * xi[i];
    const double drho = 4.0 * (1.0 - mu_) * r2 * rho + 2.0 * L * res;
    g[i] = -2.0 * xi[i] * drho;
    g[m_ + i] = 2.0 * xi[m_ + i] * drho;
  }
  return (1.0 - mu_) * r2 * r2 + L * res * res;
}

std::optional<RVector> OneParticle::project(const RVector& xi) const {
  const double n = residuals(xi)[0] + 1.0;
  if (!(n > 0.0)) return std::nullopt;
  return RVector(xi / std::sqrt(n));
}

FermionMatrix OneParticle::unpack(const RVector& xi) const {
  CMatrix psi = CMatrix::Zero(2 * m_, 1);
  for (int i = 0; i < m_; ++i) {
    psi(2 * i, 0) = xi[i];
    psi(2 * i + 1, 0) = xi[m_ + i];
  }
  return FermionMatrix(std::move(psi));
}

// --- penalty loop ---------------------------------------------------------------

void PenaltySchedule::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("schedule: " + what); };
  if (!(L0 > 0.0)) fail("L0 must be > 0");
  if (!(tau0 > 0.0)) fail("tau0 must be > 0");
  if (!(growth >= 1.0)) fail("growth must be >= 1");
  if (!(shrink > 0.0 && shrink <= 1.0)) fail("shrink must lie in (0, 1]");
  if (inner_max < 1) fail("inner_max must be >= 1");
  if (!(feasibility_threshold >= 0.0)) fail("feasibility_threshold must be >= 0");
  if (outer_max < 1) fail("outer_max must be >= 1");
  if (polish_iterations < 0) fail("polish_iterations must be >= 0");
}

namespace {

// Steepest descent along the feasible set: the action gradient with its
// components along the constraint normals removed, retracted by project().
// Only accepts steps that lower the action.
int polish(const PenaltyProblem& problem, RVector& x, double& s, int iterations) {
  const Eigen::Index n = x.size();
  RVector g(n);
  double step = 1.0;
  int done = 0;
  for (; done < iterations; ++done) {
    problem.value_and_gradient(x, 0.0, g);
    const std::size_t q = problem.residuals(x).size();
    Eigen::MatrixXd jac(n, static_cast<Eigen::Index>(q));
    const double h = 1e-7;
    for (Eigen::Index i = 0; i < n; ++i) {
      RVector a = x, b = x;
      a(i) += h;
      b(i) -= h;
      const auto ra = problem.residuals(a), rb = problem.residuals(b);
      for (std::size_t k = 0; k < q; ++k) jac(i, static_cast<Eigen::Index>(k)) = (ra[k] - rb[k]) / (2 * h);
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(jac);
    const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, jac.cols());
    const RVector d = -(g - basis * (basis.transpose() * g));
    const double dd = d.squaredNorm();
    if (!(dd > 1e-30 * (1.0 + g.squaredNorm()))) break;
    bool moved = false;
    for (int k = 0; k < 40 && !moved; ++k, step *= 0.5) {
      const auto y = problem.project(x + step * d);
      if (!y) continue;
      const double sy = problem.action(*y);
      if (std::isfinite(sy) && sy <= s - 1e-4 * step * dd) {
        x = *y;
        s = sy;
        moved = true;
      }
    }
    if (!moved) break;
    step *= 4.0;  // undo the last halving and probe a longer step next time
  }
  return done;
}

}  // namespace

std::string OptimizerRun::log_jsonl() const {
  std::ostringstream os;
  for (const OuterRecord& rec : log) {
    nlohmann::json j;
    j["k"] = rec.k;
    j["L"] = rec.L;
    j["tau"] = rec.tau;
    j["Q"] = rec.Q;
    j["S"] = rec.S;
    j["residuals"] = rec.residuals;
    j["inner_iterations"] = rec.inner_iterations;
    j["status"] = status_name(rec.status);
    if (std::isfinite(rec.best_feasible)) {
      j["best_feasible"] = rec.best_feasible;
    } else {
      j["best_feasible"] = nullptr;
    }
    os << j.dump() << '\n';
  }
  return os.str();
}

OptimizerRun penalty_loop(const PenaltyProblem& problem, RVector xi0,
                          const PenaltySchedule& schedule) {
  schedule.validate();
  if (xi0.size() != problem.dimension()) {
    std::ostringstream os;
    os << "penalty_loop: start has length " << xi0.size() << ", expected " << problem.dimension();
    throw std::invalid_argument(os.str());
  }
  const auto t0 = std::chrono::steady_clock::now();
  OptimizerRun run;
  RVector xi = std::move(xi0);
  double L = schedule.L0;
  double tau = schedule.tau0;
  double best = std::numeric_limits<double>::infinity();  // running minimum, for the log
  double best_action = best;                               // action at best_xi
  RVector best_xi;

  FrOptions fr;
  fr.max_iter = schedule.inner_max;
  fr.restart_every = problem.dimension();

  for (int k = 0; k < schedule.outer_max; ++k) {
    fr.tau = tau;
    const auto res = fletcher_reeves([&](const RVector& z) { return problem.value(z, L); },
                                     [&](const RVector& z, RVector& g) {
                                       return problem.value_and_gradient(z, L, g);
                                     },
                                     xi, fr);
    run.inner_iterations += res.iterations;
    run.outer_iterations = k + 1;
    if (res.status == FrStatus::NonFinite) {
      run.aborted = true;
      break;
    }
    xi = res.x;
    const auto r = problem.residuals(xi);
    double rr = 0.0;
    for (double v : r) rr += v * v;
    if (auto proj = problem.project(xi)) {
      // Near a minimizer successive projections agree to rounding; such ties
      // go to the later, better converged iterate.
      const double s = problem.action(*proj);
      const double tie = 1e-13 * (1.0 + std::abs(best_action));
      if (best_xi.size() == 0 || s <= best_action + tie) {
        best_action = s;
        best_xi = std::move(*proj);
      }
      best = std::min(best, s);
    }
    OuterRecord rec;
    rec.k = k;
    rec.L = L;
    rec.tau = tau;
    rec.Q = res.value;
    rec.S = problem.action(xi);
    rec.residuals = r;
    rec.inner_iterations = res.iterations;
    rec.status = res.status;
    rec.best_feasible = best;
    run.log.push_back(std::move(rec));
    run.residuals = r;
    run.residual_norm_sq = rr;
    if (rr <= schedule.feasibility_threshold) {
      run.feasible = true;
      break;
    }
    L *= schedule.growth;
    tau *= schedule.shrink;
  }
  run.raw_xi = xi;
  if (best_xi.size() > 0) {
    run.polish_iterations = polish(problem, best_xi, best_action, schedule.polish_iterations);
    run.xi = best_xi;
    run.action = best_action;
  } else {
    run.xi = xi;
    run.action = problem.action(xi);
  }
  run.psi = problem.unpack(run.xi);
  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

OptimizerRun penalty_loop(RVector xi0, const PenaltySchedule& schedule) {
  const CriticalTwoParticle problem(points_of(xi0));
  return penalty_loop(problem, std::move(xi0), schedule);
}

// --- multi-start ----------------------------------------------------------------

int default_restarts(int m) { return m <= 6 ? 50 : 100; }

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

const OptimizerRun& MultiStartResult::best_run() const {
  if (best < 0) throw std::runtime_error("multi-start produced no feasible run");
  return runs.at(static_cast<std::size_t>(best));
}

FermionMatrix MultiStartResult::best_fermion_matrix() const {
  return best_run().psi;
}

std::string MultiStartResult::results_csv(int m) const {
  std::ostringstream os;
  os << "m,restart,seed,action,feasible,iters\n";
  char buf[64];
  for (const OptimizerRun& r : runs) {
    std::snprintf(buf, sizeof buf, "%.12g", r.action);
    os << m << ',' << r.restart << ',' << r.seed << ',' << buf << ','
       << (r.feasible ? "true" : "false") << ',' << r.inner_iterations << '\n';
  }
  return os.str();
}

std::vector<MinimizerClass> distinct_minimizers(const MultiStartResult& result, double action_tol,
                                                double gram_tol) {
  std::vector<MinimizerClass> classes;
  if (result.best < 0) return classes;
  const double best = result.best_run().action;
  for (const OptimizerRun& r : result.runs) {
    if (!r.feasible || r.aborted || r.action > best + action_tol) continue;
    if (r.psi.particles() != 2) continue;
    const auto fp = gram_fingerprint(bloch_configuration(r.psi));
    auto it = std::find_if(classes.begin(), classes.end(), [&](const MinimizerClass& c) {
      return !fingerprints_differ(c.fingerprint, fp, gram_tol);
    });
    if (it == classes.end()) {
      classes.push_back({{r.restart}, fp});
    } else {
      it->restarts.push_back(r.restart);
    }
  }
  return classes;
}

RVector random_start(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RVector xi(n);
  for (int i = 0; i < n; ++i) xi[i] = dist(gen);
  return xi;
}

MultiStartResult multi_start(const ProblemFactory& factory, int m, const MultiStartOptions& opt) {
  const int restarts = opt.restarts > 0 ? opt.restarts : default_restarts(m);
  const int workers = std::clamp(opt.workers > 0 ? opt.workers : default_workers(), 1, restarts);
  opt.schedule.validate();

  MultiStartResult out;
  out.runs.resize(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    const auto problem = factory();
    for (int i = next++; i < restarts; i = next++) {
      const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(i);
      OptimizerRun run =
          penalty_loop(*problem, random_start(problem->dimension(), seed), opt.schedule);
      run.seed = seed;
      run.restart = i;
      out.runs[static_cast<std::size_t>(i)] = std::move(run);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // reduce in restart order so ties resolve the same way for any worker count
  for (int i = 0; i < restarts; ++i) {
    const OptimizerRun& r = out.runs[static_cast<std::size_t>(i)];
    if (!r.feasible || r.aborted) continue;
    if (out.best < 0 || r.action < out.runs[static_cast<std::size_t>(out.best)].action) out.best = i;
  }
  return out;
}

MultiStartResult multi_start(int m, const MultiStartOptions& opt) {
  return multi_start([m] { return std::make_unique<CriticalTwoParticle>(m); }, m, opt);
}

MultiStartResult multi_start_one_particle(int m, double mu, const MultiStartOptions& opt) {
  return multi_start([m, mu] { return std::make_unique<OneParticle>(m, mu); }, m, opt);
}

}  // namespace dfs::critical
