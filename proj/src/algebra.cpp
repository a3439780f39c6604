#include "dfs/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfs {

namespace {

constexpr double sign_of_row(Eigen::Index i) { return (i % 2 == 0) ? 1.0 : -1.0; }

const Mat2& local_signature() {
  static const Mat2 s = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();
  return s;
}

void check_point(int x, int m) {
  if (x < 1 || x > m) {
    std::ostringstream os;
    os << "point index " << x << " out of range [1, " << m << "]";
    throw std::out_of_range(os.str());
  }
}

// M S for a 2m x 2m matrix: flips the sign of every odd (0-based) column.
CMatrix times_signature(CMatrix mat) {
  for (Eigen::Index j = 1; j < mat.cols(); j += 2) mat.col(j) = -mat.col(j);
  return mat;
}

CMatrix signature_times(CMatrix mat) {
  for (Eigen::Index i = 1; i < mat.rows(); i += 2) mat.row(i) = -mat.row(i);
  return mat;
}

}  // namespace

DiscreteSpacetime::DiscreteSpacetime(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("discrete space-time needs m >= 1 points");
}

RMatrix DiscreteSpacetime::signature() const {
  RMatrix s = RMatrix::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) s(i, i) = sign_of_row(i);
  return s;
}

RMatrix DiscreteSpacetime::projector(int x) const {
  check_point(x, m_);
  RMatrix e = RMatrix::Zero(dim(), dim());
  e(2 * x - 2, 2 * x - 2) = 1.0;
  e(2 * x - 1, 2 * x - 1) = 1.0;
  return e;
}

cplx inner_product(const CVector& u, const CVector& v, const DiscreteSpacetime& st) {
  if (u.size() != st.dim() || v.size() != st.dim()) {
    throw std::invalid_argument("inner_product: vector dimension does not match 2m");
  }
  return inner_product(u, v);
}

cplx inner_product(const CVector& u, const CVector& v) {
  if (u.size() != v.size() || u.size() % 2 != 0) {
    throw std::invalid_argument("inner_product: vectors must have equal even length");
  }
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += sign_of_row(i) * std::conj(u(i)) * v(i);
  return acc;
}

FermionMatrix::FermionMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() % 2 != 0) {
    throw std::invalid_argument("fermion matrix needs 2m rows with m >= 1");
  }
  if (entries_.cols() < 1 || entries_.cols() > entries_.rows() / 2) {
    throw std::invalid_argument("fermion matrix needs 1 <= f <= m columns");
  }
}

CMatrix FermionMatrix::local(int x) const {
  check_point(x, points());
  return entries_.middleRows(2 * x - 2, 2);
}

CMatrix FermionMatrix::gram() const { return entries_.adjoint() * signature_times(entries_); }

std::optional<std::string> FermionMatrix::normalization_defect(double tol) const {
  const CMatrix g = gram();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const cplx expected = (i == j) ? cplx(-1.0) : cplx(0.0);
      const double dev = std::abs(g(i, j) - expected);
      if (dev > tol || !std::isfinite(dev)) {
        std::ostringstream os;
        os << "Gram entry <u_" << (i + 1) << "|u_" << (j + 1) << "> = " << g(i, j).real()
           << (g(i, j).imag() < 0 ? "-" : "+") << std::abs(g(i, j).imag()) << "i, expected "
           << expected.real() << " (deviation " << dev << " > " << tol << ")";
        return os.str();
      }
    }
  }
  return std::nullopt;
}

void FermionMatrix::validate(const Tolerances& tol) const {
  if (auto defect = normalization_defect(tol.pseudo_orthonormal)) {
    throw ValidationError("pseudo-orthonormality violated: " + *defect);
  }
}

Mat2 FermionicProjector::kernel(int x, int y) const {
  check_point(x, points());
  check_point(y, points());
  return matrix.block<2, 2>(2 * x - 2, 2 * y - 2);
}

FermionicProjector projector_from_fermion_matrix(const FermionMatrix& psi, const Tolerances& tol) {
  psi.validate(tol);
  return operator_from_columns(psi);
}

FermionicProjector operator_from_columns(const FermionMatrix& psi) {
  const CMatrix& e = psi.entries();
  return FermionicProjector{times_signature(-(e * e.adjoint()))};
}

ProjectorDefects projector_defects(const FermionicProjector& p, int f) {
  const CMatrix& mat = p.matrix;
  const CMatrix ps = times_signature(mat);
  return ProjectorDefects{
      (mat * mat - mat).cwiseAbs().maxCoeff(),
      (ps.adjoint() - ps).cwiseAbs().maxCoeff(),
      std::abs(mat.trace() - cplx(f)),
  };
}

Mat2 closed_chain(const FermionicProjector& p, int x, int y) {
  return p.kernel(x, y) * p.kernel(y, x);
}

ChainSpectrum spectrum_from_invariants(double trace, double determinant) {
  ChainSpectrum out;
  out.trace = trace;
  out.determinant = determinant;
  out.discriminant = trace * trace - 4.0 * determinant;
  if (out.discriminant >= 0.0) {
    const double root = std::sqrt(out.discriminant);
    out.lambda_plus = 0.5 * (trace + root);
    out.lambda_minus = 0.5 * (trace - root);
  } else {
    const double root = std::sqrt(-out.discriminant);
    out.lambda_plus = cplx(0.5 * trace, 0.5 * root);
    out.lambda_minus = cplx(0.5 * trace, -0.5 * root);
  }
  return out;
}

ChainSpectrum chain_roots(const Mat2& a, const Tolerances& tol) {
  const Mat2 as = a * local_signature();
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if ((as.adjoint() - as).cwiseAbs().maxCoeff() > tol.self_adjoint * scale) {
    throw std::invalid_argument("chain_roots: matrix is not self-adjoint with respect to s");
  }
  // Trace and determinant are real up to rounding for s-self-adjoint input.
  return spectrum_from_invariants(a.trace().real(), a.determinant().real());
}

double lagrangian(const ChainSpectrum& spec, double mu) {
  const double w1 = spec.weight_one();
  return spec.weight_two() - mu * w1 * w1;
}

double critical_lagrangian(const ChainSpectrum& spec) {
  const double d = std::abs(spec.lambda_plus) - std::abs(spec.lambda_minus);
  return 0.5 * d * d;
}

std::vector<ChainSpectrum> all_chain_spectra(const FermionicProjector& p) {
  const int m = p.points();
  std::vector<ChainSpectrum> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int x = 1; x <= m; ++x) {
    for (int y = 1; y <= m; ++y) {
      const Mat2 a = closed_chain(p, x, y);
      out.push_back(spectrum_from_invariants(a.trace().real(), a.determinant().real()));
    }
  }
  return out;
}

double action(const FermionicProjector& p, double mu) {
  double total = 0.0;
  for (const auto& spec : all_chain_spectra(p)) total += lagrangian(spec, mu);
  return total;
}

double constraint_value(const FermionicProjector& p) {
  double total = 0.0;
  for (const auto& spec : all_chain_spectra(p)) total += spec.weight_one() * spec.weight_one();
  return total;
}

double target_value(const FermionicProjector& p) {
  double total = 0.0;
  for (const auto& spec : all_chain_spectra(p)) total += spec.weight_two();
  return total;
}

Mat2 pseudo_unitary_block(double phase, double rapidity, double a, double b) {
  const cplx i(0.0, 1.0);
  const double ch = std::cosh(rapidity);
  const double sh = std::sinh(rapidity);
  Mat2 u;
  u << ch * std::exp(i * a), sh * std::exp(i * b), sh * std::exp(-i * b), ch * std::exp(-i * a);
  return std::exp(i * phase) * u;
}

bool is_pseudo_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() % 2 != 0) return false;
  const CMatrix lhs = u.adjoint() * signature_times(u);
  CMatrix s = CMatrix::Zero(u.rows(), u.cols());
  for (Eigen::Index k = 0; k < u.rows(); ++k) s(k, k) = sign_of_row(k);
  const double scale = 1.0 + u.cwiseAbs2().maxCoeff();
  return (lhs - s).cwiseAbs().maxCoeff() <= tol * scale;
}

GaugeTransform::GaugeTransform(std::vector<Mat2> blocks, const Tolerances& tol)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("gauge transform needs at least one block");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (!is_pseudo_unitary(blocks_[k], tol.pseudo_unitary)) {
      throw std::invalid_argument("gauge block " + std::to_string(k + 1) +
                                  " is not in U(1,1): U^+ s U != s");
    }
  }
}

GaugeTransform GaugeTransform::identity(int m) {
  return GaugeTransform(std::vector<Mat2>(static_cast<std::size_t>(m), Mat2::Identity()));
}

CMatrix GaugeTransform::matrix() const {
  const auto n = static_cast<Eigen::Index>(2 * blocks_.size());
  CMatrix u = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    u.block<2, 2>(2 * static_cast<Eigen::Index>(k), 2 * static_cast<Eigen::Index>(k)) = blocks_[k];
  }
  return u;
}

CMatrix GaugeTransform::inverse() const {
  return signature_times(times_signature(matrix().adjoint()));
}

FermionicProjector apply_gauge(const FermionicProjector& p, const GaugeTransform& u) {
  if (u.points() != p.points()) throw std::invalid_argument("apply_gauge: point count mismatch");
  return FermionicProjector{u.matrix() * p.matrix * u.inverse()};
}

FermionMatrix apply_gauge(const FermionMatrix& psi, const GaugeTransform& u) {
  if (u.points() != psi.points()) throw std::invalid_argument("apply_gauge: point count mismatch");
  return FermionMatrix(u.matrix() * psi.entries());
}

bool check_outer_symmetry(const FermionicProjector& p, const std::vector<int>& sigma,
                          const CMatrix& u, const Tolerances& tol) {
  const int m = p.points();
  if (static_cast<int>(sigma.size()) != m) {
    throw std::invalid_argument("check_outer_symmetry: permutation size differs from m");
  }
  std::vector<int> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  for (int x = 1; x <= m; ++x) {
    if (sorted[x - 1] != x) throw std::invalid_argument("check_outer_symmetry: not a permutation");
  }
  if (u.rows() != 2 * m || u.cols() != 2 * m) {
    throw std::invalid_argument("check_outer_symmetry: U must be 2m x 2m");
  }
  if (!is_pseudo_unitary(u, tol.pseudo_unitary)) return false;

  const CMatrix u_inv = signature_times(times_signature(u.adjoint()));
  const double scale = 1.0 + p.matrix.cwiseAbs().maxCoeff();
  if ((u * p.matrix * u_inv - p.matrix).cwiseAbs().maxCoeff() > tol.outer_symmetry * scale) {
    return false;
  }
  const DiscreteSpacetime st(m);
  for (int x = 1; x <= m; ++x) {
    const CMatrix moved = u * st.projector(x).cast<cplx>() * u_inv;
    const CMatrix target = st.projector(sigma[x - 1]).cast<cplx>();
    if ((moved - target).cwiseAbs().maxCoeff() > tol.outer_symmetry) return false;
  }
  return true;
}

}  // namespace dfs
