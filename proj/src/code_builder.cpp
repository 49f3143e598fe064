#include "qmet/code_builder.hpp"

#include <cmath>

namespace qmet {

ComplexVector apply_system_operator(const ComplexMatrix& s, const ComplexVector& v,
                                    const BipartiteLayout& layout) {
  if (v.size() != layout.total() || s.rows() != layout.dimSystem)
    throw std::invalid_argument("apply_system_operator: dimension mismatch");
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> view(v.data(), layout.dimSystem, layout.dimAncilla);
  RowMat out = s * view;
  return Eigen::Map<ComplexVector>(out.data(), v.size());
}

double code_orthonormality_residual(const CodeSpace& code) {
  const int n = static_cast<int>(code.codeStates.size());
  double worst = 0;
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      const Complex g = code.codeStates[k].dot(code.codeStates[l]);
      worst = std::max(worst, std::abs(g - (k == l ? 1.0 : 0.0)));
    }
  return worst;
}

CodeSpace purify_code(const ComplexMatrix& q, int dimSystem, double rankTol) {
  const int total = static_cast<int>(q.rows());
  if (dimSystem <= 0 || total % dimSystem != 0 || q.cols() != total)
    throw std::invalid_argument("purify_code: dimension mismatch");
  const int n = total / dimSystem;  // P + 1
  const ComplexMatrix red = partial_trace(q, BipartiteLayout{n, dimSystem}, Subsystem::Ancilla);
  if ((red - ComplexMatrix::Identity(n, n)).norm() > 1e-6)
    throw std::invalid_argument("purify_code: Tr_S(Q) must be the identity on the reference space");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (q + q.adjoint().eval()));
  const RealVector& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  if (lmax <= 0) throw std::invalid_argument("purify_code: Q has no positive spectrum");
  if (ev.minCoeff() < -std::max(rankTol, 1e-7) * lmax)
    throw std::invalid_argument("purify_code: Q has a negative eigenvalue beyond tolerance");

  std::vector<int> kept;  // descending eigenvalue, index tie-break
  for (int i = total - 1; i >= 0; --i)
    if (ev(i) > rankTol * lmax) kept.push_back(i);
  const int rank = static_cast<int>(kept.size());

  CodeSpace code;
  code.layout = BipartiteLayout{dimSystem, rank};
  code.codeStates.assign(n, ComplexVector::Zero(dimSystem * rank));
  for (int m = 0; m < rank; ++m) {
    const double amp = std::sqrt(ev(kept[m]));
    for (int k = 0; k < n; ++k)
      for (int s = 0; s < dimSystem; ++s)
        code.codeStates[k](s * rank + m) = amp * es.eigenvectors()(k * dimSystem + s, kept[m]);
  }
  return code;
}

QecReport verify_qec(const CodeSpace& code, const LindbladSpan& span) {
  if (span.dim != code.layout.dimSystem)
    throw std::invalid_argument("verify_qec: span dimension mismatch");
  const int n = static_cast<int>(code.codeStates.size());
  QecReport report;
  for (const auto& s : span.basis) {
    ComplexMatrix m(n, n);
    for (int l = 0; l < n; ++l) {
      const ComplexVector sv = apply_system_operator(s.matrix(), code.codeStates[l], code.layout);
      for (int k = 0; k < n; ++k) m(k, l) = code.codeStates[k].dot(sv);
    }
    const double lambda = m.trace().real() / n;
    const double resid = (m - lambda * ComplexMatrix::Identity(n, n)).norm();
    report.residuals.push_back(resid);
    report.lambdas.push_back(lambda);
    report.maxResidual = std::max(report.maxResidual, resid);
  }
  return report;
}

std::vector<ComplexMatrix> effective_generators(const CodeSpace& code,
                                                const std::vector<HermitianOperator>& generators) {
  const int n = static_cast<int>(code.codeStates.size());
  std::vector<ComplexMatrix> out;
  for (const auto& g : generators) {
    if (g.dim() != code.layout.dimSystem)
      throw std::invalid_argument("effective_generators: dimension mismatch");
    ComplexMatrix m(n, n);
    for (int l = 0; l < n; ++l) {
      const ComplexVector gv = apply_system_operator(g.matrix(), code.codeStates[l], code.layout);
      for (int k = 0; k < n; ++k) m(k, l) = code.codeStates[k].dot(gv);
    }
    out.push_back(ComplexMatrix(0.5 * (m + m.adjoint().eval())));
  }
  return out;
}

ProtocolCost protocol_cost(const CodeSpace& code, const std::vector<HermitianOperator>& generators,
                           const RealMatrix& costMatrix, double totalTime) {
  const int p = code.parameterCount();
  if (static_cast<int>(generators.size()) != p)
    throw std::invalid_argument("protocol_cost: generator count must match the code size");
  if (costMatrix.rows() != p || costMatrix.cols() != p)
    throw std::invalid_argument("protocol_cost: cost matrix size mismatch");

  ProtocolCost out;
  out.dMatrix = RealMatrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    const ComplexVector gv =
        apply_system_operator(generators[j].matrix(), code.codeStates[0], code.layout);
    for (int i = 1; i <= p; ++i) {
      out.dMatrix(i - 1, j) = 2.0 * totalTime * code.codeStates[i].dot(gv).imag();
    }
  }
  out.gamma = out.dMatrix / (2.0 * totalTime);

  Eigen::JacobiSVD<RealMatrix> svd(out.dMatrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0 || smax / smin > 1e12)
    throw std::runtime_error("protocol_cost: code does not sense all parameters (singular D)");
  const RealMatrix dinv = svd.solve(RealMatrix::Identity(p, p));
  out.cost = (costMatrix * dinv * dinv.transpose()).trace();
  return out;
}

Protocol derive_measurement(const CodeSpace& code, const RealMatrix& dMatrix) {
  const int p = code.parameterCount();
  if (dMatrix.rows() != p || dMatrix.cols() != p)
    throw std::invalid_argument("derive_measurement: D size mismatch");

  Protocol proto;
  proto.codeSpace = code;
  proto.dMatrix = dMatrix;

  const RealMatrix xcoef = dMatrix.inverse().transpose();  // X_{ki} = <c_k|x_i>
  for (int i = 0; i < p; ++i) {
    ComplexVector x = ComplexVector::Zero(code.codeStates[0].size());
    for (int k = 1; k <= p; ++k) x += xcoef(k - 1, i) * code.codeStates[k];
    proto.xVectors.push_back(std::move(x));
  }

  // u_0 = c_0; u_1..u_P from Gram-Schmidt on the x vectors. The x Gram matrix
  // is real and <c_0|x_i> = 0, so real coefficients suffice.
  std::vector<ComplexVector> u;
  u.push_back(code.codeStates[0]);
  for (int i = 0; i < p; ++i) {
    ComplexVector v = proto.xVectors[i];
    for (const auto& um : u) v -= um.dot(v).real() * um;
    const double norm = v.norm();
    if (norm < 1e-12)
      throw std::runtime_error("derive_measurement: x vectors are numerically dependent");
    u.push_back(v / norm);
  }

  // Householder reflection sending e_0 to the uniform vector, so every b_l
  // keeps a real nonzero overlap with c_0
  const int np = p + 1;
  RealVector ones = RealVector::Constant(np, 1.0 / std::sqrt(double(np)));
  RealVector hv = -ones;
  hv(0) += 1.0;
  RealMatrix reflect = RealMatrix::Identity(np, np);
  if (hv.norm() > 1e-14) reflect -= (2.0 / hv.squaredNorm()) * hv * hv.transpose();

  for (int l = 0; l < np; ++l) {
    ComplexVector b = ComplexVector::Zero(code.codeStates[0].size());
    for (int m = 0; m < np; ++m) b += reflect(l, m) * u[m];
    const double overlap = std::abs(code.codeStates[0].dot(b));
    if (overlap < 1e-10)
      throw std::runtime_error("derive_measurement: degenerate overlap with the input state");
    proto.measurementBasis.push_back(std::move(b));
  }

  proto.estimatorValues = RealMatrix::Zero(np + 1, p);
  for (int l = 0; l < np; ++l) {
    const Complex bc0 = proto.measurementBasis[l].dot(code.codeStates[0]);
    for (int i = 0; i < p; ++i) {
      const Complex bx = proto.measurementBasis[l].dot(proto.xVectors[i]);
      proto.estimatorValues(l + 1, i) = (bx / bc0).real();
    }
  }
  return proto;
}

ProtocolReport check_protocol(const Protocol& protocol) {
  ProtocolReport rep;
  const int np = static_cast<int>(protocol.measurementBasis.size());
  const int p = static_cast<int>(protocol.xVectors.size());
  RealMatrix gram(np, np);
  for (int k = 0; k < np; ++k)
    for (int l = 0; l < np; ++l) {
      const Complex g = protocol.measurementBasis[k].dot(protocol.measurementBasis[l]);
      gram(k, l) = std::abs(g - (k == l ? 1.0 : 0.0));
    }
  rep.measurementGramResidual = gram.maxCoeff();

  Eigen::MatrixXcd bmat(protocol.measurementBasis[0].size(), np);
  for (int l = 0; l < np; ++l) bmat.col(l) = protocol.measurementBasis[l];
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ComplexMatrix(bmat.adjoint() * bmat),
                                                  Eigen::EigenvaluesOnly);
  rep.completenessResidual = std::max(0.0, es.eigenvalues().maxCoeff() - 1.0);

  const ComplexVector& c0 = protocol.codeSpace.codeStates[0];
  for (int i = 0; i < p; ++i) {
    rep.inputOverlapResidual =
        std::max(rep.inputOverlapResidual, std::abs(c0.dot(protocol.xVectors[i])));
    for (int j = 0; j < p; ++j) {
      rep.gramImagResidual = std::max(
          rep.gramImagResidual, std::abs(protocol.xVectors[i].dot(protocol.xVectors[j]).imag()));
    }
  }

  for (int i = 0; i < p; ++i) {
    ComplexVector rebuilt = ComplexVector::Zero(c0.size());
    for (int l = 0; l < np; ++l) {
      const Complex amp = protocol.measurementBasis[l].dot(c0);
      rebuilt += protocol.estimatorValues(l + 1, i) * amp * protocol.measurementBasis[l];
    }
    rep.reconstructionResidual =
        std::max(rep.reconstructionResidual, (rebuilt - protocol.xVectors[i]).norm());
  }
  return rep;
}

CovarianceReport covariance_check(const Protocol& protocol,
                                  const std::vector<HermitianOperator>& generators,
                                  const RealMatrix& costMatrix, double totalTime) {
  const int p = static_cast<int>(protocol.xVectors.size());
  const int np = static_cast<int>(protocol.measurementBasis.size());
  const ComplexVector& c0 = protocol.codeSpace.codeStates[0];

  CovarianceReport rep;
  rep.sigma = RealMatrix::Zero(p, p);
  RealVector mean = RealVector::Zero(p);
  for (int l = 0; l < np; ++l) {
    const double prob = std::norm(protocol.measurementBasis[l].dot(c0));
    for (int i = 0; i < p; ++i) {
      mean(i) += prob * protocol.estimatorValues(l + 1, i);
      for (int j = 0; j < p; ++j)
        rep.sigma(i, j) +=
            prob * protocol.estimatorValues(l + 1, i) * protocol.estimatorValues(l + 1, j);
    }
  }
  rep.meanResidual = mean.cwiseAbs().maxCoeff();
  rep.cost = (costMatrix * rep.sigma).trace();

  // d_i rho = -iT [G_i^C, rho]; Tr(d_i rho E_l) = 2T Im(<c_0|b_l><b_l|G_i c_0>)
  RealMatrix jac = RealMatrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    const ComplexVector gv =
        apply_system_operator(generators[i].matrix(), c0, protocol.codeSpace.layout);
    for (int l = 0; l < np; ++l) {
      const Complex z = c0.dot(protocol.measurementBasis[l]) * protocol.measurementBasis[l].dot(gv);
      const double dpdw = 2.0 * totalTime * z.imag();
      for (int j = 0; j < p; ++j) jac(i, j) += dpdw * protocol.estimatorValues(l + 1, j);
    }
  }
  rep.jacobianResidual = (jac - RealMatrix::Identity(p, p)).cwiseAbs().maxCoeff();
  return rep;
}

namespace {

QfiReport qfi_from_vectors(const ComplexVector& psi, const std::vector<ComplexVector>& gpsi,
                           double totalTime) {
  const int p = static_cast<int>(gpsi.size());
  QfiReport rep;
  rep.fisher = RealMatrix::Zero(p, p);
  RealVector means(p);
  for (int i = 0; i < p; ++i) means(i) = psi.dot(gpsi[i]).real();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const Complex overlap = gpsi[i].dot(gpsi[j]);
      rep.fisher(i, j) = 4.0 * totalTime * totalTime * (overlap.real() - means(i) * means(j));
      rep.compatibilityResidual =
          std::max(rep.compatibilityResidual, 2.0 * std::abs(overlap.imag()));
    }
  return rep;
}

}  // namespace

QfiReport qfi_and_compatibility(const ComplexVector& psi, const BipartiteLayout& layout,
                                const std::vector<HermitianOperator>& generators,
                                double totalTime) {
  std::vector<ComplexVector> gpsi;
  for (const auto& g : generators) gpsi.push_back(apply_system_operator(g.matrix(), psi, layout));
  return qfi_from_vectors(psi, gpsi, totalTime);
}

QfiReport qfi_and_compatibility(const CodeSpace& code,
                                const std::vector<HermitianOperator>& generators,
                                double totalTime) {
  const ComplexVector& psi = code.codeStates[0];
  std::vector<ComplexVector> gpsi;
  for (const auto& g : generators) {
    const ComplexVector raw = apply_system_operator(g.matrix(), psi, code.layout);
    ComplexVector projected = ComplexVector::Zero(psi.size());
    for (const auto& c : code.codeStates) projected += c.dot(raw) * c;
    gpsi.push_back(std::move(projected));
  }
  return qfi_from_vectors(psi, gpsi, totalTime);
}

}  // namespace qmet
