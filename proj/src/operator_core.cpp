#include "qmet/operator_core.hpp"

#include <cmath>

namespace qmet {

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("HermitianOperator: entries must be finite");
  }
  const double scale = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > 1e-9 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("HermitianOperator: input is not Hermitian (relative asymmetry " +
                                std::to_string(asym / std::max(scale, 1e-300)) + ")");
  }
  mat_ = 0.5 * (m + m.adjoint().eval());
}

HermitianOperator HermitianOperator::identity(int d) {
  return HermitianOperator(ComplexMatrix::Identity(d, d));
}

HermitianOperator HermitianOperator::zero(int d) {
  return HermitianOperator(ComplexMatrix::Zero(d, d));
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  return (a.matrix().adjoint() * b.matrix()).trace().real();
}

std::pair<HermitianOperator, HermitianOperator> split_hermitian(const ComplexMatrix& l) {
  if (!l.allFinite()) {
    throw std::invalid_argument("split_hermitian: entries must be finite");
  }
  const ComplexMatrix h = 0.5 * (l + l.adjoint().eval());
  const ComplexMatrix iah = Complex(0, 0.5) * (l - l.adjoint().eval());
  return {HermitianOperator(h), HermitianOperator(iah)};
}

OrthonormalSet orthonormalize_hermitian_set(const std::vector<HermitianOperator>& ops,
                                            double tol) {
  OrthonormalSet out;
  if (ops.empty()) return out;
  if (tol <= 0) throw std::invalid_argument("orthonormalize_hermitian_set: tol must be positive");
  const int d = ops.front().dim();
  double max_norm = 0;
  for (const auto& op : ops) {
    if (op.dim() != d) throw std::invalid_argument("orthonormalize_hermitian_set: dimension mismatch");
    max_norm = std::max(max_norm, op.matrix().norm());
  }
  if (max_norm == 0) return out;
  for (const auto& op : ops) {
    ComplexMatrix v = op.matrix();
    // two projection passes for numerical orthogonality
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : out.basis) {
        const Complex c = (b.matrix().adjoint() * v).trace();
        v -= c.real() * b.matrix();
      }
    }
    const double n = v.norm();
    if (n > tol * max_norm) {
      out.basis.emplace_back(ComplexMatrix(v / n));
    }
  }
  out.rank = static_cast<int>(out.basis.size());
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const BipartiteLayout& layout,
                            Subsystem over) {
  const int ds = layout.dimSystem, da = layout.dimAncilla;
  if (ds <= 0 || da <= 0 || m.rows() != ds * da || m.cols() != ds * da) {
    throw std::invalid_argument("partial_trace: dimensions inconsistent with layout");
  }
  if (over == Subsystem::Ancilla) {
    ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
    for (int s = 0; s < ds; ++s)
      for (int t = 0; t < ds; ++t)
        for (int a = 0; a < da; ++a) out(s, t) += m(s * da + a, t * da + a);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < da; ++b)
      for (int s = 0; s < ds; ++s) out(a, b) += m(s * da + a, s * da + b);
  return out;
}

SpectralDecomposition spectral(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectral: eigenvalue decomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double operator_norm(const HermitianOperator& a) {
  const auto dec = spectral(a);
  return dec.eigenvalues.cwiseAbs().maxCoeff();
}

double spread(const HermitianOperator& a) {
  const auto dec = spectral(a);
  return dec.eigenvalues(dec.eigenvalues.size() - 1) - dec.eigenvalues(0);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<HermitianOperator> gell_mann_basis(int d) {
  if (d < 2) throw std::invalid_argument("gell_mann_basis: need d >= 2");
  std::vector<HermitianOperator> out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(k, l) = inv_sqrt2;
      m(l, k) = inv_sqrt2;
      out.emplace_back(m);
    }
  }
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(k, l) = Complex(0, inv_sqrt2);
      m(l, k) = Complex(0, -inv_sqrt2);
      out.emplace_back(m);
    }
  }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int k = 0; k < l; ++k) m(k, k) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    out.emplace_back(m);
  }
  return out;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix spin_jz(int d) {
  if (d < 2) throw std::invalid_argument("spin_jz: need d >= 2");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  const double j = 0.5 * (d - 1);
  for (int k = 0; k < d; ++k) m(k, k) = j - k;
  return m;
}

}  // namespace qmet
