#include "dfs/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dfs {

namespace {

const std::array<Mat2, 3>& pauli() {
  static const std::array<Mat2, 3> sigma = [] {
    const cplx i(0.0, 1.0);
    std::array<Mat2, 3> s;
    s[0] << 0.0, 1.0, 1.0, 0.0;
    s[1] << 0.0, -i, i, 0.0;
    s[2] << 1.0, 0.0, 0.0, -1.0;
    return s;
  }();
  return sigma;
}

Mat2 correlation_from_bloch(const LocalCorrelation& c) {
  Mat2 f = c.rho * Mat2::Identity();
  for (int a = 0; a < 3; ++a) f += c.bloch(a) * pauli()[a];
  return 0.5 * f;
}

}  // namespace

void BlochConfiguration::validate(const Tolerances& tol) const {
  if (points.empty()) throw ValidationError("Bloch configuration has no points");
  double rho_sum = 0.0;
  Vec3 v_sum = Vec3::Zero();
  for (std::size_t x = 0; x < points.size(); ++x) {
    const auto& p = points[x];
    rho_sum += p.rho;
    v_sum += p.bloch;
    if (p.bloch.norm() < std::abs(p.rho) - tol.bloch) {
      std::ostringstream os;
      os << "relation |v_x| >= |rho_x| fails at point " << (x + 1) << ": |v| = " << p.bloch.norm()
         << ", rho = " << p.rho;
      throw ValidationError(os.str());
    }
  }
  if (std::abs(rho_sum - 2.0) > tol.bloch) {
    std::ostringstream os;
    os << "relation sum rho_x = 2 fails: sum = " << rho_sum;
    throw ValidationError(os.str());
  }
  if (v_sum.norm() > tol.bloch) {
    std::ostringstream os;
    os << "relation sum v_x = 0 fails: |sum| = " << v_sum.norm();
    throw ValidationError(os.str());
  }
}

Eigen::Matrix2cd local_correlation_matrix(const FermionMatrix& psi, int x) {
  if (psi.particles() != 2) {
    throw std::invalid_argument("local correlation matrices need f = 2, got f = " +
                                std::to_string(psi.particles()));
  }
  const CMatrix block = psi.local(x);
  // -B^+ s B with s = diag(1, -1).
  return block.row(1).adjoint() * block.row(1) - block.row(0).adjoint() * block.row(0);
}

LocalCorrelation local_correlation(const FermionMatrix& psi, int x, const Tolerances& tol) {
  const Mat2 f = local_correlation_matrix(psi, x);
  const double scale = 1.0 + f.cwiseAbs().maxCoeff();
  if ((f - f.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian * scale) {
    throw ValidationError("local correlation matrix is not Hermitian at point " +
                          std::to_string(x));
  }
  LocalCorrelation out;
  out.rho = f.trace().real();
  for (int a = 0; a < 3; ++a) out.bloch(a) = (pauli()[a] * f).trace().real();
  return out;
}

BlochConfiguration bloch_configuration(const FermionMatrix& psi, const Tolerances& tol) {
  BlochConfiguration config;
  for (int x = 1; x <= psi.points(); ++x) config.points.push_back(local_correlation(psi, x, tol));
  return config;
}

ChainSpectrum chain_roots_from_bloch(const LocalCorrelation& a, const LocalCorrelation& b) {
  // F_a F_b = (t + w.sigma)/4 with t = rho_a rho_b + v_a.v_b and
  // w = rho_a v_b + rho_b v_a + i v_a x v_b, so trace = t/2 and
  // det = (t^2 - w.w)/16 with w.w = |rho_a v_b + rho_b v_a|^2 - |v_a x v_b|^2.
  const double t = a.rho * b.rho + a.bloch.dot(b.bloch);
  const double ww = (a.rho * b.bloch + b.rho * a.bloch).squaredNorm() -
                    a.bloch.cross(b.bloch).squaredNorm();
  return spectrum_from_invariants(0.5 * t, (t * t - ww) / 16.0);
}

FermionMatrix reconstruct_fermion_matrix(const BlochConfiguration& config, const Tolerances& tol) {
  config.validate(tol);
  const int m = config.size();
  if (m < 2) throw ValidationError("two particles need at least two points");
  CMatrix psi = CMatrix::Zero(2 * m, 2);
  for (int x = 0; x < m; ++x) {
    const Mat2 f = correlation_from_bloch(config.points[static_cast<std::size_t>(x)]);
    Eigen::SelfAdjointEigenSolver<Mat2> eig(f);
    const Eigen::Vector2d d = eig.eigenvalues();  // ascending: negative one first
    Mat2 rows = eig.eigenvectors().adjoint();     // F = rows^+ D rows
    for (int r = 0; r < 2; ++r) {
      const int lead = std::abs(rows(r, 0)) > 1e-14 ? 0 : 1;
      const cplx z = rows(r, lead);
      if (std::abs(z) > 0.0) rows.row(r) *= std::conj(z) / std::abs(z);
    }
    for (int r = 0; r < 2; ++r) {
      // Round-off can leave a tiny eigenvalue of the wrong sign; clamp it.
      const double mag = r == 0 ? std::max(0.0, -d(0)) : std::max(0.0, d(1));
      psi.row(2 * x + r) = std::sqrt(mag) * rows.row(r);
    }
  }
  return FermionMatrix(std::move(psi));
}

ConfigurationGram configuration_gram(const BlochConfiguration& config) {
  const int m = config.size();
  ConfigurationGram out;
  out.gram = RMatrix::Zero(m, m);
  for (int x = 0; x < m; ++x) {
    out.rho.push_back(config.points[static_cast<std::size_t>(x)].rho);
    for (int y = 0; y < m; ++y) {
      out.gram(x, y) = config.points[static_cast<std::size_t>(x)].bloch.dot(
          config.points[static_cast<std::size_t>(y)].bloch);
    }
  }
  return out;
}

std::vector<double> gram_fingerprint(const BlochConfiguration& config) {
  const ConfigurationGram g = configuration_gram(config);
  std::vector<double> rho = g.rho;
  std::sort(rho.begin(), rho.end());
  std::vector<double> off;
  for (int x = 0; x < config.size(); ++x) {
    for (int y = x + 1; y < config.size(); ++y) off.push_back(g.gram(x, y));
  }
  std::sort(off.begin(), off.end());
  rho.insert(rho.end(), off.begin(), off.end());
  return rho;
}

bool fingerprints_differ(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return true;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return true;
  }
  return false;
}

double orientation_sign(const BlochConfiguration& config) {
  if (config.size() < 4) throw std::invalid_argument("orientation needs at least four points");
  Eigen::Matrix3d m;
  m.col(0) = config.points[1].bloch - config.points[0].bloch;
  m.col(1) = config.points[2].bloch - config.points[0].bloch;
  m.col(2) = config.points[3].bloch - config.points[0].bloch;
  return m.determinant();
}

}  // namespace dfs
