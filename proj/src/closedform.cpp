#include "dfs/closedform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dfs::closedform {

namespace {

// W (m x m) acting identically on both components of every point.
CMatrix point_operator(const CMatrix& w) {
  const Eigen::Index m = w.rows();
  CMatrix u = CMatrix::Zero(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      u(2 * i, 2 * j) = w(i, j);
      u(2 * i + 1, 2 * j + 1) = w(i, j);
    }
  }
  return u;
}

CMatrix permutation_matrix(const std::vector<int>& sigma) {
  const auto m = static_cast<Eigen::Index>(sigma.size());
  CMatrix w = CMatrix::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x) w(sigma[static_cast<std::size_t>(x)] - 1, x) = 1.0;
  return w;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

OneParticleMinimizer one_particle_minimizer(int m, double mu) {
  require(m >= 1, "one_particle_minimizer: m must be >= 1");
  if (mu == 1.0) {
    throw std::invalid_argument(
        "one_particle_minimizer: mu = 1 makes the action vanish identically; every projector "
        "is a minimizer");
  }
  if (mu > 1.0) {
    throw std::invalid_argument(
        "one_particle_minimizer: mu > 1 leaves the action unbounded below (see the "
        "one-particle divergence witness)");
  }
  CMatrix psi = CMatrix::Zero(2 * m, 1);
  for (int x = 0; x < m; ++x) psi(2 * x + 1, 0) = 1.0 / std::sqrt(static_cast<double>(m));
  return {FermionMatrix(std::move(psi)), (1.0 - mu) / (static_cast<double>(m) * m)};
}

FermionMatrix two_point_critical() {
  CMatrix psi = CMatrix::Zero(4, 2);
  psi(1, 0) = 1.0;
  psi(3, 1) = 1.0;
  return FermionMatrix(std::move(psi));
}

FermionMatrix two_point_symmetric_family(double theta) {
  require(theta >= 0.0, "two_point_symmetric_family: theta must be >= 0");
  CMatrix psi = CMatrix::Zero(4, 2);
  psi(0, 0) = std::sinh(theta);
  psi(3, 0) = std::cosh(theta);
  psi(1, 1) = std::cosh(theta);
  psi(2, 1) = std::sinh(theta);
  return FermionMatrix(std::move(psi));
}

TwoPointConstrained two_point_constrained(double kappa) {
  if (!(kappa >= 2.0)) {
    std::ostringstream os;
    os << "two-point constraint sum |A_xy|^2 = " << kappa << " is infeasible; need kappa >= 2";
    throw InfeasibleError(os.str());
  }
  const double root = std::sqrt(kappa - 1.0);
  const double v = std::sqrt(root);
  // 1 + 2 sinh^2 theta = v
  const double theta = std::asinh(std::sqrt((v - 1.0) / 2.0));
  return {v, root + 0.5 * kappa, 0.5 * (1.0 + 1.0 / root), theta,
          two_point_symmetric_family(theta)};
}

double two_point_symmetric_action(double v, double mu) {
  return v * v + (0.5 - mu) * (1.0 + v * v * v * v);
}

double two_point_symmetric_action_derivative(double v, double mu) {
  return 2.0 * v + 4.0 * (0.5 - mu) * v * v * v;
}

FermionMatrix three_point_family(double theta) {
  require(theta >= 0.0, "three_point_family: theta must be >= 0");
  const double sh = std::sinh(theta);
  const double ch = std::cosh(theta);
  const double r3 = std::sqrt(3.0);
  CMatrix psi(6, 2);
  psi << -2.0 * sh, 0.0,
         0.0, -2.0 * ch,
         sh, -r3 * sh,
         r3 * ch, ch,
         sh, r3 * sh,
         -r3 * ch, ch;
  psi /= std::sqrt(6.0);
  return FermionMatrix(std::move(psi));
}

double three_point_bloch_length(double theta) {
  const double sh = std::sinh(theta);
  return (2.0 / 3.0) * (1.0 + 2.0 * sh * sh);
}

double three_point_theta_for_length(double v) {
  require(v >= 2.0 / 3.0 - 1e-15, "three_point_theta_for_length: v must be >= 2/3");
  return std::asinh(std::sqrt(std::max(0.0, (1.5 * v - 1.0) / 2.0)));
}

double three_point_action(double v) {
  const double v2 = v * v;
  double s = (2.0 / 3.0) * v2;
  if (16.0 / 27.0 - v2 > 0.0) s += v2 / 3.0 - (9.0 / 16.0) * v2 * v2;
  return s;
}

std::vector<PointSymmetry> three_point_symmetries() {
  std::vector<int> sigma{1, 2, 3};
  std::vector<PointSymmetry> out;
  do {
    out.push_back({sigma, point_operator(permutation_matrix(sigma))});
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

double three_point_branch_one_length(double kappa) {
  return std::pow(72.0 * kappa - 32.0, 0.25) / 3.0;
}

double three_point_branch_two_length(double kappa) {
  return std::sqrt(12.0 + 6.0 * std::sqrt(81.0 * kappa - 32.0)) / 9.0;
}

double three_point_branch_one_target(double kappa) {
  return (2.0 / 9.0) * (std::sqrt(18.0 * kappa - 8.0) + 1.0);
}

double three_point_branch_two_target(double kappa) {
  return three_point_action(three_point_branch_two_length(kappa)) + 0.5 * kappa;
}

double three_point_branch_two_target_alt(double kappa) {
  return (8.0 / 81.0) * (2.0 + std::sqrt(81.0 * kappa - 32.0)) + 0.5 * kappa;
}

ThreePointConstrained three_point_constrained(double kappa) {
  if (!(kappa >= 2.0 / 3.0)) {
    std::ostringstream os;
    os << "three-point constraint sum |A_xy|^2 = " << kappa
       << " is infeasible for S3-symmetric systems; need kappa >= 2/3";
    throw InfeasibleError(os.str());
  }
  ThreePointConstrained out{};
  if (kappa <= kThreePointCriticalKappa) {
    out.branch = 1;
    out.v = three_point_branch_one_length(kappa);
    out.target = three_point_branch_one_target(kappa);
  } else {
    out.branch = 2;
    out.v = three_point_branch_two_length(kappa);
    out.target = three_point_branch_two_target(kappa);
  }
  out.theta = three_point_theta_for_length(out.v);
  out.psi = three_point_family(out.theta);
  const auto p = operator_from_columns(out.psi);
  out.off_diagonal = classify_pair(chain_roots(closed_chain(p, 1, 2)));
  return out;
}

FermionMatrix four_point_family(double phi) {
  const double target = 2.0 * kPi / 3.0;
  if (std::abs(std::abs(phi) - target) > 1e-12) {
    throw std::invalid_argument("four_point_family: phi must be +2pi/3 or -2pi/3");
  }
  const cplx i(0.0, 1.0);
  const double r2 = std::sqrt(2.0);
  Eigen::Matrix<cplx, 4, 2> small;
  small << std::sqrt(3.0), 0.0,
           1.0, r2,
           1.0, r2 * std::exp(i * phi),
           1.0, r2 * std::exp(-i * phi);
  small /= std::sqrt(6.0);
  CMatrix psi = CMatrix::Zero(8, 2);
  for (int x = 0; x < 4; ++x) psi.row(2 * x + 1) = small.row(x);
  return FermionMatrix(std::move(psi));
}

A4Generators four_point_generators() {
  const cplx i(0.0, 1.0);
  CMatrix ws = CMatrix::Zero(4, 4);
  ws(0, 0) = 1.0;
  ws(1, 3) = 1.0;
  ws(2, 1) = 1.0;
  ws(3, 2) = 1.0;
  CMatrix wt = CMatrix::Zero(4, 4);
  wt(0, 1) = 1.0;
  wt(1, 0) = 1.0;
  wt(2, 3) = i;
  wt(3, 2) = -i;
  return {{{1, 3, 4, 2}, point_operator(ws)}, {{2, 1, 4, 3}, point_operator(wt)}};
}

double five_point_beta(double alpha) { return (2.0 - 3.0 * alpha) / 2.0; }

BlochConfiguration five_point_bloch(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0 / 3.0)) {
    throw std::invalid_argument("five_point_bloch: alpha must lie in (0, 2/3)");
  }
  const double beta = five_point_beta(alpha);
  const double h = std::sqrt(3.0) / 2.0;
  const std::array<Vec3, 5> dirs{Vec3(1.0, 0.0, 0.0), Vec3(-0.5, h, 0.0), Vec3(-0.5, -h, 0.0),
                                 Vec3(0.0, 0.0, 1.0), Vec3(0.0, 0.0, -1.0)};
  BlochConfiguration config;
  for (int x = 0; x < 5; ++x) {
    const double len = x < 3 ? alpha : beta;
    config.points.push_back({len, len * dirs[static_cast<std::size_t>(x)]});
  }
  return config;
}

double five_point_action(double alpha) {
  const double a = alpha;
  return (81.0 / 8.0) * a * a * a * a - 18.0 * a * a * a + 15.0 * a * a - 6.0 * a + 1.0;
}

double five_point_optimum() {
  const double c = std::cbrt(2.0 + 2.0 * std::sqrt(17.0));
  return -c / 9.0 + 4.0 / (9.0 * c) + 4.0 / 9.0;
}

double five_point_optimum_numeric() {
  auto slope = [](double a) { return 40.5 * a * a * a - 54.0 * a * a + 30.0 * a - 6.0; };
  double lo = 0.0;
  double hi = 2.0 / 3.0;  // slope(0) < 0 < slope(2/3)
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FermionMatrix divergence_witness(WitnessKind kind, double alpha, int m) {
  require(alpha > 0.0, "divergence_witness: alpha must be > 0");
  require(m >= 2, "divergence_witness: needs m >= 2 points");
  const double a = std::sqrt(alpha);
  const double b = std::sqrt(alpha + 1.0);
  switch (kind) {
    case WitnessKind::MuAboveHalf: {
      CMatrix psi = CMatrix::Zero(2 * m, 2);
      psi(0, 0) = a;
      psi(3, 0) = b;
      psi(2, 1) = a;
      psi(1, 1) = b;
      return FermionMatrix(std::move(psi));
    }
    case WitnessKind::OneParticleMuAboveOne: {
      CMatrix psi = CMatrix::Zero(2 * m, 1);
      psi(0, 0) = a;
      psi(3, 0) = b;
      return FermionMatrix(std::move(psi));
    }
  }
  throw std::invalid_argument("divergence_witness: unknown kind");
}

FermionMatrix nonunique_family(double alpha) {
  CMatrix psi = CMatrix::Zero(6, 2);
  psi(1, 0) = 1.0;
  psi(3, 1) = 1.0;
  psi(4, 0) = alpha;
  psi(4, 1) = 1.0;
  psi(5, 0) = alpha;
  psi(5, 1) = 1.0;
  return FermionMatrix(std::move(psi));
}

}  // namespace dfs::closedform
