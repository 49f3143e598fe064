#include "qmet/jnt.hpp"

#include <cmath>

namespace qmet {

namespace {

// Hermitian parameter packing: diagonal entries first, then (re, im) pairs
// for k < l in row-major order. Size n^2 for an n x n Hermitian matrix.
int hermitian_param_count(int n) { return n * n; }

ComplexMatrix unit_diag(int n, int k) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(k, k) = 1;
  return m;
}

ComplexMatrix unit_re(int n, int k, int l) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(k, l) = 1;
  m(l, k) = 1;
  return m;
}

ComplexMatrix unit_im(int n, int k, int l) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(k, l) = Complex(0, 1);
  m(l, k) = Complex(0, -1);
  return m;
}

template <typename Visit>
void for_each_hermitian_param(int n, Visit&& visit) {
  int pos = 0;
  for (int k = 0; k < n; ++k) visit(pos++, unit_diag(n, k));
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      visit(pos++, unit_re(n, k, l));
      visit(pos++, unit_im(n, k, l));
    }
}

ComplexMatrix unpack_hermitian(const RealVector& x, const std::vector<int>& vars, int n) {
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for_each_hermitian_param(n, [&](int pos, const ComplexMatrix& e) {
    out += x(vars[pos]) * e;
  });
  return out;
}

RealMatrix sqrt_inv_spd(const RealMatrix& w) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w);
  if (es.eigenvalues().minCoeff() <= 0) {
    throw std::invalid_argument("cost matrix must be positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// index of the packed Im[G^eff]_{0,p} parameter, p in 1..P
int im_0p_index(int n, int p) {
  // diagonal block of size n, then pairs (k,l) row-major with (re, im)
  // pair (0, p) is the (p-1)-th pair
  return n + 2 * (p - 1) + 1;
}

}  // namespace

BasisPartition build_basis_partition(const LindbladSpan& span,
                                     const std::vector<HermitianOperator>& generators) {
  const int d = span.dim;
  const int p = static_cast<int>(generators.size());
  for (int i = 0; i < p; ++i) {
    if (generators[i].dim() != d)
      throw std::invalid_argument("build_basis_partition: generator dimension mismatch");
    for (int j = i; j < p; ++j) {
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(hs_inner(generators[i], generators[j]) - expect) > 1e-8)
        throw std::invalid_argument("build_basis_partition: generators are not orthonormal");
    }
    for (const auto& s : span.basis) {
      if (std::abs(hs_inner(generators[i], s)) > 1e-9)
        throw std::invalid_argument("build_basis_partition: generator overlaps the Lindblad span");
    }
  }

  BasisPartition part;
  part.dim = d;
  part.identityElement = span.basis.at(0);
  part.generators = generators;
  part.spanComplements.assign(span.basis.begin() + 1, span.basis.end());

  std::vector<HermitianOperator> seed;
  seed.push_back(part.identityElement);
  for (const auto& g : part.generators) seed.push_back(g);
  for (const auto& s : part.spanComplements) seed.push_back(s);
  const int partial = static_cast<int>(seed.size());
  for (auto& gm : gell_mann_basis(d)) seed.push_back(std::move(gm));
  auto completed = orthonormalize_hermitian_set(seed, 1e-9);
  if (completed.rank != d * d)
    throw std::runtime_error("build_basis_partition: failed to complete the basis");
  part.remainder.assign(completed.basis.begin() + partial, completed.basis.end());
  return part;
}

JntSpecAssembly assemble_jnt_sdp(const BasisPartition& partition, const RealMatrix& costMatrix) {
  const int d = partition.dim;
  const int p = partition.parameterCount();
  const int n = p + 1;
  const int ns = static_cast<int>(partition.spanComplements.size());
  const int nr = static_cast<int>(partition.remainder.size());
  if (costMatrix.rows() != p || costMatrix.cols() != p)
    throw std::invalid_argument("assemble_jnt_sdp: cost matrix size mismatch");
  const RealMatrix sqw = sqrt_inv_spd(costMatrix);

  JntSpecAssembly a;
  a.p = p;
  a.d = d;
  SdpProblem& prob = a.problem;

  a.geffVars.resize(p);
  for (int i = 0; i < p; ++i) {
    a.geffVars[i].resize(hermitian_param_count(n));
    for (int t = 0; t < hermitian_param_count(n); ++t) a.geffVars[i][t] = prob.addVariable();
  }
  a.nuVars.resize(ns);
  for (int i = 0; i < ns; ++i) a.nuVars[i] = prob.addVariable();
  a.bVars.resize(nr);
  for (int i = 0; i < nr; ++i) {
    a.bVars[i].resize(hermitian_param_count(n));
    for (int t = 0; t < hermitian_param_count(n); ++t) a.bVars[i][t] = prob.addVariable();
  }
  for (int q = 0; q < p; ++q)
    for (int r = q; r < p; ++r) a.kVars.push_back(prob.addVariable());
  for (int q = 0; q < p; ++q)
    for (int r = q; r < p; ++r) a.yVars.push_back(prob.addVariable(r == q ? 1.0 : 0.0));

  // block (a): the code matrix form of the QEC and normalization constraints
  HermitianAffine qform;
  qform.constant = tensor(ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(d, d) / d);
  for (int i = 0; i < p; ++i) {
    const ComplexMatrix& g = partition.generators[i].matrix();
    for_each_hermitian_param(n, [&](int pos, const ComplexMatrix& e) {
      qform.coefficients.emplace_back(a.geffVars[i][pos], tensor(e.transpose().eval(), g));
    });
  }
  for (int i = 0; i < ns; ++i) {
    qform.coefficients.emplace_back(
        a.nuVars[i], tensor(ComplexMatrix::Identity(n, n), partition.spanComplements[i].matrix()));
  }
  for (int i = 0; i < nr; ++i) {
    const ComplexMatrix& r = partition.remainder[i].matrix();
    for_each_hermitian_param(n, [&](int pos, const ComplexMatrix& e) {
      qform.coefficients.emplace_back(a.bVars[i][pos], tensor(e, r));
    });
  }
  a.qBlock = add_hermitian_lmi(prob, qform);

  // block (b): [[Y, K], [K, I]] >= 0, i.e. Y >= K^2
  a.boundBlock = prob.addBlock(2 * p);
  for (int q = 0; q < p; ++q) prob.setConstant(a.boundBlock, p + q, p + q, 1.0);
  {
    int idx = 0;
    for (int q = 0; q < p; ++q)
      for (int r = q; r < p; ++r, ++idx) {
        prob.addCoefficient(a.boundBlock, a.kVars[idx], q, p + r, 1.0);
        if (q != r) prob.addCoefficient(a.boundBlock, a.kVars[idx], r, p + q, 1.0);
        prob.addCoefficient(a.boundBlock, a.yVars[idx], q, r, 1.0);
      }
  }

  // block (c): [[K, I], [I, Gamma sqrt(W^-1)]] >= 0, i.e. K >= (Gamma sqrt(W^-1))^-1
  a.gammaBlock = prob.addBlock(2 * p);
  for (int q = 0; q < p; ++q) prob.setConstant(a.gammaBlock, q, p + q, 1.0);
  {
    int idx = 0;
    for (int q = 0; q < p; ++q)
      for (int r = q; r < p; ++r, ++idx) {
        prob.addCoefficient(a.gammaBlock, a.kVars[idx], q, r, 1.0);
      }
  }
  // Gamma_{r,m} = Im[G^eff_m]_{(r+1),0} = -x_{im(m,0,r+1)}
  for (int m = 0; m < p; ++m) {
    for (int r = 0; r < p; ++r) {
      const int var = a.geffVars[m][im_0p_index(n, r + 1)];
      for (int q = 0; q < p; ++q) {
        const double v = -sqw(m, q);
        if (r == q) {
          prob.addCoefficient(a.gammaBlock, var, p + r, p + q, v);
        } else {
          // symmetric placement; the equality rows below pin the
          // antisymmetric part of Gamma sqrt(W^-1) to zero
          prob.addCoefficient(a.gammaBlock, var, p + r, p + q, 0.5 * v);
        }
      }
    }
  }
  for (int r = 0; r < p; ++r) {
    for (int q = r + 1; q < p; ++q) {
      std::vector<std::pair<int, double>> row;
      for (int m = 0; m < p; ++m) {
        const double c = -sqw(m, q);
        const double c2 = sqw(m, r);
        if (std::abs(c) > 1e-15) row.emplace_back(a.geffVars[m][im_0p_index(n, r + 1)], c);
        if (std::abs(c2) > 1e-15) row.emplace_back(a.geffVars[m][im_0p_index(n, q + 1)], c2);
      }
      if (!row.empty()) prob.addEquality(std::move(row), 0.0);
    }
  }
  return a;
}

namespace {

struct ReducedAssembly {
  SdpProblem problem;
  int p = 0, d = 0;
  int qBlock = 0, boundBlock = 0, gammaBlock = 0;
};

// Adds the engine variable for one linear constraint <A, X> = rhs of the
// code-matrix formulation; `parts` lists (block, A) pairs. The engine sees
// minimize (-rhs) . y subject to  C - sum_k y_k A_k >= 0.
class ReducedBuilder {
 public:
  explicit ReducedBuilder(ReducedAssembly& a) : a_(a) {}

  int beginConstraint(double rhs) { return a_.problem.addVariable(-rhs); }

  void addRealEntry(int var, int block, int r, int c, double v) {
    const double w = (r == c) ? v : 0.5 * v;
    a_.problem.addCoefficient(block, var, r, c, -w);
  }

  // functional Tr(Q H) on the embedded code-matrix block
  void addQFunctional(int var, const ComplexMatrix& h, double scale) {
    const RealMatrix m = 0.5 * scale * embed_hermitian_matrix(h);
    for (int r = 0; r < m.rows(); ++r)
      for (int c = r; c < m.cols(); ++c)
        if (std::abs(m(r, c)) > 1e-15) a_.problem.addCoefficient(a_.qBlock, var, r, c, -m(r, c));
  }

 private:
  ReducedAssembly& a_;
};

ReducedAssembly assemble_jnt_reduced(const BasisPartition& partition,
                                     const RealMatrix& costMatrix) {
  const int d = partition.dim;
  const int p = partition.parameterCount();
  const int n = p + 1;
  const RealMatrix sqw = sqrt_inv_spd(costMatrix);
  const ComplexMatrix idR = ComplexMatrix::Identity(n, n);

  ReducedAssembly a;
  a.p = p;
  a.d = d;
  a.qBlock = a.problem.addBlock(2 * n * d);
  a.boundBlock = a.problem.addBlock(2 * p);
  a.gammaBlock = a.problem.addBlock(2 * p);
  // objective matrix: Tr(Y) over the top-left corner of the bound block
  for (int q = 0; q < p; ++q) a.problem.setConstant(a.boundBlock, q, q, 1.0);

  ReducedBuilder b(a);

  auto basis_element = [&](int k, int l) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(k, l) = 1;
    return e;
  };

  // Tr_S(Q) = I_{P+1}
  for (int k = 0; k <= p; ++k) {
    for (int l = k; l <= p; ++l) {
      const ComplexMatrix re_h =
          0.5 * tensor(ComplexMatrix(basis_element(l, k) + basis_element(k, l)),
                       ComplexMatrix::Identity(d, d));
      const int v = b.beginConstraint(k == l ? 1.0 : 0.0);
      b.addQFunctional(v, k == l ? ComplexMatrix(tensor(basis_element(k, k),
                                                        ComplexMatrix::Identity(d, d)))
                                 : re_h,
                       1.0);
      if (k != l) {
        const ComplexMatrix im_h =
            Complex(0, 0.5) * tensor(ComplexMatrix(basis_element(k, l) - basis_element(l, k)),
                                     ComplexMatrix::Identity(d, d));
        const int vi = b.beginConstraint(0.0);
        b.addQFunctional(vi, im_h, 1.0);
      }
    }
  }

  // Tr_S(Q (1 x S_i)) proportional to the identity
  for (const auto& s : partition.spanComplements) {
    const ComplexMatrix& sm = s.matrix();
    for (int k = 0; k <= p; ++k) {
      for (int l = k + 1; l <= p; ++l) {
        const int vr = b.beginConstraint(0.0);
        b.addQFunctional(vr, 0.5 * tensor(ComplexMatrix(basis_element(l, k) + basis_element(k, l)), sm),
                         1.0);
        const int vi = b.beginConstraint(0.0);
        b.addQFunctional(vi, Complex(0, 0.5) * tensor(ComplexMatrix(basis_element(k, l) - basis_element(l, k)), sm),
                         1.0);
      }
    }
    for (int k = 0; k < p; ++k) {
      const int v = b.beginConstraint(0.0);
      b.addQFunctional(v, tensor(ComplexMatrix(basis_element(k, k) - basis_element(k + 1, k + 1)), sm),
                       1.0);
    }
  }

  // bound block: bottom-right identity, and K linked into the gamma block
  for (int q = 0; q < p; ++q) {
    for (int r = q; r < p; ++r) {
      const int v = b.beginConstraint(q == r ? 1.0 : 0.0);
      b.addRealEntry(v, a.boundBlock, p + q, p + r, 1.0);
    }
  }
  for (int q = 0; q < p; ++q) {
    for (int r = 0; r < p; ++r) {
      const int v = b.beginConstraint(0.0);
      b.addRealEntry(v, a.boundBlock, q, p + r, 1.0);
      b.addRealEntry(v, a.gammaBlock, q, r, -1.0);
    }
  }
  // gamma block off-diagonal identity
  for (int q = 0; q < p; ++q) {
    for (int r = 0; r < p; ++r) {
      const int v = b.beginConstraint(q == r ? 1.0 : 0.0);
      b.addRealEntry(v, a.gammaBlock, q, p + r, 1.0);
    }
  }
  // bottom-right of the gamma block equals Gamma sqrt(W^-1), with
  // Gamma_{r,m} = Im Tr(Q (|r+1><0| x G_m))
  for (int r = 0; r < p; ++r) {
    for (int q = 0; q < p; ++q) {
      const int v = b.beginConstraint(0.0);
      b.addRealEntry(v, a.gammaBlock, p + r, p + q, 1.0);
      for (int m = 0; m < p; ++m) {
        const double c = sqw(m, q);
        if (std::abs(c) < 1e-15) continue;
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(0, r + 1) = 1;
        e(r + 1, 0) = -1;
        const ComplexMatrix h = Complex(0, 0.5) * tensor(e, partition.generators[m].matrix());
        b.addQFunctional(v, h, -c);
      }
    }
  }
  return a;
}

ComplexMatrix extract_complex_from_embedded(const RealMatrix& z) {
  const int n = static_cast<int>(z.rows()) / 2;
  const RealMatrix re = 0.5 * (z.topLeftCorner(n, n) + z.bottomRightCorner(n, n));
  const RealMatrix im = 0.5 * (z.bottomLeftCorner(n, n) - z.topRightCorner(n, n));
  ComplexMatrix q = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return ComplexMatrix(0.5 * (q + q.adjoint().eval()));
}

ComplexMatrix trace_out_system(const ComplexMatrix& q, int n, int d) {
  return partial_trace(q, BipartiteLayout{n, d}, Subsystem::Ancilla);
}

}  // namespace

JntSolution solve_jnt(const SensingModel& model, JntRoute route) {
  model.validate();
  const HnlsVerdict verdict = check_hnls(model);
  if (!verdict.achievable) {
    throw HnlsNotAchievableError(
        "Heisenberg scaling is not achievable: projected generators are linearly dependent "
        "(rank " +
        std::to_string(verdict.projectedRank) + " of " +
        std::to_string(model.parameterCount()) + ")");
  }
  const int p = model.parameterCount();
  const int d = model.dim;
  const int n = p + 1;
  const RealMatrix a = *verdict.orthonormalizingTransform;
  const RealMatrix wprime = a * model.costMatrix * a.transpose();

  std::vector<HermitianOperator> ortho;
  for (int i = 0; i < p; ++i) {
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < p; ++j) g += a(i, j) * verdict.projectedGenerators[j].matrix();
    ortho.emplace_back(g);
  }

  JntSolution sol;
  sol.span = build_lindblad_span(d, model.strongLindblads);
  sol.partition = build_basis_partition(sol.span, ortho);
  sol.transform = a;
  sol.costMatrixTransformed = wprime;
  sol.totalTime = model.totalTime;

  SdpOptions opts;
  opts.gapTol = model.options.gapTol;
  opts.feasTol = model.options.feasTol;
  opts.maxIter = model.options.maxIter;

  const int ns = static_cast<int>(sol.partition.spanComplements.size());
  const int nr = static_cast<int>(sol.partition.remainder.size());
  const int spec_vars = (p + nr) * n * n + ns + p * (p + 1);
  const bool use_spec =
      route == JntRoute::SpecForm || (route == JntRoute::Auto && spec_vars <= 400);

  RealMatrix y_matrix(p, p);
  if (use_spec) {
    JntSpecAssembly asem = assemble_jnt_sdp(sol.partition, wprime);
    sol.solverInfo = solve_sdp(asem.problem, opts);
    if (sol.solverInfo.status != SdpStatus::Optimal) {
      throw SolverFailureError("joint-code SDP did not reach optimality: " +
                               sol.solverInfo.message);
    }
    const RealVector& x = sol.solverInfo.x;
    for (int i = 0; i < p; ++i)
      sol.effectiveGenerators.push_back(unpack_hermitian(x, asem.geffVars[i], n));
    for (int i = 0; i < ns; ++i) sol.nu.push_back(x(asem.nuVars[i]));
    for (int i = 0; i < nr; ++i) sol.bMatrices.push_back(unpack_hermitian(x, asem.bVars[i], n));
    int idx = 0;
    sol.kMatrix = RealMatrix::Zero(p, p);
    y_matrix = RealMatrix::Zero(p, p);
    for (int q = 0; q < p; ++q)
      for (int r = q; r < p; ++r, ++idx) {
        sol.kMatrix(q, r) = sol.kMatrix(r, q) = x(asem.kVars[idx]);
        y_matrix(q, r) = y_matrix(r, q) = x(asem.yVars[idx]);
      }
    sol.q = tensor(ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(d, d) / d);
    for (int i = 0; i < p; ++i)
      sol.q += tensor(sol.effectiveGenerators[i].transpose().eval(),
                      sol.partition.generators[i].matrix());
    for (int i = 0; i < ns; ++i)
      sol.q += sol.nu[i] *
               tensor(ComplexMatrix::Identity(n, n), sol.partition.spanComplements[i].matrix());
    for (int i = 0; i < nr; ++i)
      sol.q += tensor(sol.bMatrices[i], sol.partition.remainder[i].matrix());
  } else {
    ReducedAssembly asem = assemble_jnt_reduced(sol.partition, wprime);
    sol.solverInfo = solve_sdp(asem.problem, opts);
    if (sol.solverInfo.status != SdpStatus::Optimal) {
      throw SolverFailureError("joint-code SDP (reduced form) did not reach optimality: " +
                               sol.solverInfo.message);
    }
    sol.q = extract_complex_from_embedded(sol.solverInfo.dualBlocks[asem.qBlock]);
    const RealMatrix& x1 = sol.solverInfo.dualBlocks[asem.boundBlock];
    y_matrix = x1.topLeftCorner(p, p);
    const RealMatrix koff = x1.topRightCorner(p, p);
    sol.kMatrix = 0.5 * (koff + koff.transpose());
    for (int i = 0; i < p; ++i) {
      const ComplexMatrix eff =
          trace_out_system(ComplexMatrix(sol.q * tensor(ComplexMatrix::Identity(n, n),
                                                        sol.partition.generators[i].matrix())),
                           n, d)
              .transpose();
      sol.effectiveGenerators.push_back(ComplexMatrix(0.5 * (eff + eff.adjoint().eval())));
    }
    for (const auto& s : sol.partition.spanComplements) {
      const ComplexMatrix red = trace_out_system(
          ComplexMatrix(sol.q * tensor(ComplexMatrix::Identity(n, n), s.matrix())), n, d);
      sol.nu.push_back(red.trace().real() / n);
    }
    for (const auto& r : sol.partition.remainder) {
      const ComplexMatrix red =
          trace_out_system(ComplexMatrix(sol.q * tensor(ComplexMatrix::Identity(n, n), r.matrix())),
                           n, d)
              .transpose();
      sol.bMatrices.push_back(ComplexMatrix(0.5 * (red + red.adjoint().eval())));
    }
  }

  sol.gamma = RealMatrix::Zero(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 1; i <= p; ++i) sol.gamma(i - 1, j) = sol.effectiveGenerators[j](i, 0).imag();

  // polar gauge cleanup: rotate the code basis so Gamma sqrt(W'^-1) is
  // symmetric PSD exactly (the SDP already pins it up to solver tolerance)
  {
    const RealMatrix nmat = sol.gamma * sqrt_inv_spd(wprime);
    Eigen::JacobiSVD<RealMatrix> svd(nmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealMatrix o = svd.matrixV() * svd.matrixU().transpose();
    RealMatrix obig = RealMatrix::Identity(n, n);
    obig.bottomRightCorner(p, p) = o;
    const ComplexMatrix oc = obig.cast<Complex>();
    for (auto& g : sol.effectiveGenerators) g = oc * g * oc.adjoint();
    for (auto& bm : sol.bMatrices) bm = oc * bm * oc.adjoint();
    const ComplexMatrix orot = tensor(oc, ComplexMatrix::Identity(d, d));
    sol.q = orot * sol.q * orot.adjoint();
    sol.gamma = o * sol.gamma;
  }

  const double objective = y_matrix.trace();
  sol.w = objective / p;
  sol.cost = objective / (4.0 * model.totalTime * model.totalTime);
  return sol;
}

}  // namespace qmet
