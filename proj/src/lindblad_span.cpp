#include "qmet/lindblad_span.hpp"

#include <cmath>

namespace qmet {

void SensingModel::validate() const {
  if (dim < 2) throw std::invalid_argument("SensingModel: dim must be >= 2");
  if (generators.empty()) throw std::invalid_argument("SensingModel: need at least one generator");
  for (const auto& g : generators) {
    if (g.dim() != dim) throw std::invalid_argument("SensingModel: generator dimension mismatch");
  }
  for (const auto& l : strongLindblads) {
    if (l.rows() != dim || l.cols() != dim)
      throw std::invalid_argument("SensingModel: strong Lindblad dimension mismatch");
    if (!l.allFinite()) throw std::invalid_argument("SensingModel: strong Lindblad must be finite");
  }
  for (const auto& l : weakLindblads) {
    if (l.rows() != dim || l.cols() != dim)
      throw std::invalid_argument("SensingModel: weak Lindblad dimension mismatch");
    if (!l.allFinite()) throw std::invalid_argument("SensingModel: weak Lindblad must be finite");
  }
  const int p = parameterCount();
  if (costMatrix.rows() != p || costMatrix.cols() != p)
    throw std::invalid_argument("SensingModel: cost matrix must be P x P");
  if ((costMatrix - costMatrix.transpose()).norm() > 1e-12 * std::max(1.0, costMatrix.norm()))
    throw std::invalid_argument("SensingModel: cost matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(costMatrix);
  const double wmin = es.eigenvalues().minCoeff();
  const double wmax = es.eigenvalues().maxCoeff();
  if (wmin <= 1e-12 * wmax || wmax <= 0)
    throw std::invalid_argument("SensingModel: cost matrix must be positive definite");
  if (!(totalTime > 0)) throw std::invalid_argument("SensingModel: total time must be positive");
}

LindbladSpan build_lindblad_span(int dim, const std::vector<ComplexMatrix>& strongLindblads) {
  std::vector<HermitianOperator> candidates;
  candidates.push_back(HermitianOperator::identity(dim));
  auto push_parts = [&](const ComplexMatrix& m) {
    auto [h, iah] = split_hermitian(m);
    candidates.push_back(h);
    candidates.push_back(iah);
  };
  for (const auto& l : strongLindblads) {
    if (l.rows() != dim || l.cols() != dim)
      throw std::invalid_argument("build_lindblad_span: Lindblad dimension mismatch");
    push_parts(l);
  }
  // all ordered pairs, including k = j; redundancy is removed by the
  // orthonormalization below
  for (const auto& lk : strongLindblads)
    for (const auto& lj : strongLindblads) push_parts(lk.adjoint() * lj);

  auto set = orthonormalize_hermitian_set(candidates, 1e-9);
  LindbladSpan span;
  span.dim = dim;
  span.basis = std::move(set.basis);
  return span;
}

HermitianOperator project_out(const HermitianOperator& g, const LindbladSpan& span) {
  if (g.dim() != span.dim) throw std::invalid_argument("project_out: dimension mismatch");
  ComplexMatrix v = g.matrix();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : span.basis) {
      const Complex c = (b.matrix().adjoint() * v).trace();
      v -= c.real() * b.matrix();
    }
  }
  return HermitianOperator(v);
}

HnlsVerdict check_hnls(const SensingModel& model) {
  model.validate();
  const LindbladSpan span = build_lindblad_span(model.dim, model.strongLindblads);
  const int p = model.parameterCount();

  HnlsVerdict verdict;
  verdict.projectedGenerators.reserve(p);
  for (const auto& g : model.generators) {
    verdict.projectedGenerators.push_back(project_out(g, span));
  }

  // orthonormal basis of S^perp: complete the span basis with canonical
  // generators and keep the newcomers
  std::vector<HermitianOperator> full = span.basis;
  for (auto& gm : gell_mann_basis(model.dim)) full.push_back(std::move(gm));
  auto completed = orthonormalize_hermitian_set(full, 1e-9);
  std::vector<HermitianOperator> perp(completed.basis.begin() + span.dimension(),
                                      completed.basis.end());

  RealMatrix coeff(p, static_cast<int>(perp.size()));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < static_cast<int>(perp.size()); ++j)
      coeff(i, j) = hs_inner(verdict.projectedGenerators[i], perp[j]);

  Eigen::JacobiSVD<RealMatrix> svd(coeff);
  const RealVector sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = 1e-9 * smax;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  verdict.projectedRank = rank;
  verdict.smallestSingularValue = sv.size() >= p ? sv(std::min<int>(p, sv.size()) - 1) : 0.0;
  verdict.achievable = (rank == p) && smax > 0;

  if (verdict.achievable) {
    // Gram-Schmidt on the projections, tracking coefficients so that
    // A * G_perp is orthonormal
    RealMatrix a = RealMatrix::Zero(p, p);
    std::vector<ComplexMatrix> ortho;
    for (int i = 0; i < p; ++i) {
      ComplexMatrix v = verdict.projectedGenerators[i].matrix();
      RealVector row = RealVector::Zero(p);
      row(i) = 1.0;
      for (int m = 0; m < static_cast<int>(ortho.size()); ++m) {
        const double c = (ortho[m].adjoint() * v).trace().real();
        v -= c * ortho[m];
        row -= c * a.row(m).transpose();
      }
      const double n = v.norm();
      if (n <= 0) throw std::runtime_error("check_hnls: unexpected rank collapse");
      ortho.push_back(v / n);
      a.row(i) = row.transpose() / n;
    }
    verdict.orthonormalizingTransform = a;
  }
  return verdict;
}

double weak_noise_rate(const std::vector<ComplexMatrix>& weakLindblads) {
  if (weakLindblads.empty()) return 0.0;
  const int d = static_cast<int>(weakLindblads.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& j : weakLindblads) {
    if (j.rows() != d || j.cols() != d)
      throw std::invalid_argument("weak_noise_rate: dimension mismatch");
    sum += j.adjoint() * j;
  }
  return operator_norm(HermitianOperator(sum));
}

}  // namespace qmet
