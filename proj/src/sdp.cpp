#include "qmet/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace qmet {

namespace {

constexpr double kDropTol = 1e-15;

double sym_dot(const RealMatrix& a, const RealMatrix& b) {
  return a.cwiseProduct(b).sum();
}

// Tr(F * M) for a sparsely stored symmetric F and dense M.
double sparse_trace_dot(const std::vector<SdpProblem::Entry>& entries, const RealMatrix& m) {
  double acc = 0;
  for (const auto& e : entries) acc += e.value * m(e.col, e.row);
  return acc;
}

}  // namespace

int SdpProblem::addVariable(double cost) {
  objective.conservativeResize(numVars + 1);
  objective(numVars) = cost;
  return numVars++;
}

int SdpProblem::addBlock(int size) {
  if (size <= 0) throw std::invalid_argument("SdpProblem: block size must be positive");
  Block b;
  b.size = size;
  b.constant = RealMatrix::Zero(size, size);
  blocks.push_back(std::move(b));
  return static_cast<int>(blocks.size()) - 1;
}

void SdpProblem::setConstant(int block, int r, int c, double v) {
  auto& b = blocks.at(block);
  b.constant(r, c) = v;
  b.constant(c, r) = v;
}

void SdpProblem::addCoefficient(int block, int var, int r, int c, double v) {
  if (std::abs(v) < kDropTol) return;
  auto& b = blocks.at(block);
  auto [it, inserted] = b.coeffIndex.try_emplace(var, static_cast<int>(b.coeffs.size()));
  if (inserted) b.coeffs.push_back({var, {}});
  auto& entries = b.coeffs[it->second].entries;
  entries.push_back({r, c, v});
  if (r != c) entries.push_back({c, r, v});
}

void SdpProblem::addEquality(std::vector<std::pair<int, double>> coeffs, double rhs) {
  equalities.push_back({std::move(coeffs), rhs});
}

void SdpProblem::validate() const {
  if (objective.size() != numVars)
    throw std::invalid_argument("SdpProblem: objective size mismatch");
  for (const auto& b : blocks) {
    if (b.constant.rows() != b.size || b.constant.cols() != b.size)
      throw std::invalid_argument("SdpProblem: block constant size mismatch");
    if ((b.constant - b.constant.transpose()).norm() > 1e-12 * (1 + b.constant.norm()))
      throw std::invalid_argument("SdpProblem: block constant must be symmetric");
    for (const auto& vc : b.coeffs) {
      if (vc.var < 0 || vc.var >= numVars)
        throw std::invalid_argument("SdpProblem: coefficient variable out of range");
      for (const auto& e : vc.entries) {
        if (e.row < 0 || e.row >= b.size || e.col < 0 || e.col >= b.size)
          throw std::invalid_argument("SdpProblem: coefficient entry out of range");
      }
    }
  }
  for (const auto& eq : equalities) {
    for (const auto& [v, _] : eq.coeffs) {
      if (v < 0 || v >= numVars)
        throw std::invalid_argument("SdpProblem: equality variable out of range");
    }
  }
}

namespace {

struct BlockWork {
  RealMatrix s, z;          // current iterates
  RealMatrix sinv, winv;    // S^-1 and NT scaling W^-1
  RealMatrix rd;            // F0 + sum x_i F_i - S
  RealMatrix urd;           // W^-1 rd W^-1
  Eigen::LLT<RealMatrix> cholS, cholZ;
};

double max_step(const Eigen::LLT<RealMatrix>& chol, const RealMatrix& delta) {
  const RealMatrix y0 = chol.matrixL().solve(delta);
  const RealMatrix y = chol.matrixL().solve(y0.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (y + y.transpose()),
                                               Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct Residuals {
  std::vector<RealMatrix> rd;
  RealVector rp;
  RealVector re;
  double pinf = 0, dinf = 0;
};

SdpSolution solve_sdp_core(const SdpProblem& problem, const SdpOptions& options);

// Phase-1 feasibility problem: min t subject to F(x) + t I >= 0 per block and
// t >= -1. A strictly positive optimum certifies infeasibility of F(x) >= 0.
SdpStatus classify_by_phase1(const SdpProblem& problem, const SdpOptions& options) {
  SdpProblem aux;
  aux.numVars = problem.numVars;
  aux.objective = RealVector::Zero(problem.numVars);
  aux.blocks = problem.blocks;
  aux.equalities = problem.equalities;
  const int t = aux.addVariable(1.0);
  for (int b = 0; b < static_cast<int>(aux.blocks.size()); ++b) {
    for (int i = 0; i < aux.blocks[b].size; ++i) aux.addCoefficient(b, t, i, i, 1.0);
  }
  const int tb = aux.addBlock(1);
  aux.setConstant(tb, 0, 0, 1.0);
  aux.addCoefficient(tb, t, 0, 0, 1.0);
  SdpOptions aux_options = options;
  aux_options.gapTol = std::max(options.gapTol, 1e-9);
  aux_options.feasTol = std::max(options.feasTol, 1e-9);
  const SdpSolution aux_sol = solve_sdp_core(aux, aux_options);
  if (aux_sol.status == SdpStatus::Optimal && aux_sol.objectiveValue > 100 * aux_options.feasTol) {
    return SdpStatus::Infeasible;
  }
  return SdpStatus::NumericalFailure;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  SdpSolution sol = solve_sdp_core(problem, options);
  if (sol.status == SdpStatus::NumericalFailure && problem.numVars > 0) {
    const SdpStatus cls = classify_by_phase1(problem, options);
    if (cls == SdpStatus::Infeasible) {
      sol.status = SdpStatus::Infeasible;
      sol.message += "; phase-1 certified infeasibility";
    }
  }
  return sol;
}

namespace {

SdpSolution solve_sdp_core(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const int m = problem.numVars;
  const int nb = static_cast<int>(problem.blocks.size());
  const int ne = static_cast<int>(problem.equalities.size());

  SdpSolution sol;
  sol.x = RealVector::Zero(m);

  double f0_scale = 0, fi_scale = 0;
  for (const auto& b : problem.blocks) {
    f0_scale = std::max(f0_scale, b.constant.norm());
    for (const auto& vc : b.coeffs) {
      double n2 = 0;
      for (const auto& e : vc.entries) n2 += e.value * e.value;
      fi_scale = std::max(fi_scale, std::sqrt(n2));
    }
  }
  const double c_scale = m ? problem.objective.cwiseAbs().maxCoeff() : 0.0;

  // no decision variables: the LMI is a constant feasibility question
  if (m == 0) {
    double worst = 0;
    for (const auto& b : problem.blocks) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(b.constant, Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues().minCoeff() / (1 + b.constant.norm()));
    }
    for (const auto& eq : problem.equalities) worst = std::max(worst, std::abs(eq.rhs));
    sol.maxConstraintViolation = worst;
    sol.status = worst <= options.feasTol ? SdpStatus::Optimal : SdpStatus::Infeasible;
    sol.message = worst <= options.feasTol ? "constant problem feasible" : "constant block not PSD";
    for (const auto& b : problem.blocks) sol.dualBlocks.push_back(RealMatrix::Zero(b.size, b.size));
    return sol;
  }

  int n_total = 0;
  std::vector<BlockWork> work(nb);
  for (int b = 0; b < nb; ++b) {
    const int n = problem.blocks[b].size;
    n_total += n;
    const double eta = std::max({10.0, 2.0 * problem.blocks[b].constant.norm(), 2.0 * fi_scale});
    const double zeta = std::max(10.0, 2.0 * c_scale);
    work[b].s = eta * RealMatrix::Identity(n, n);
    work[b].z = zeta * RealMatrix::Identity(n, n);
  }
  RealVector lambda = RealVector::Zero(ne);
  RealVector g(ne);
  for (int e = 0; e < ne; ++e) g(e) = problem.equalities[e].rhs;

  auto eval_lmi = [&](int b, const RealVector& x) {
    RealMatrix s = problem.blocks[b].constant;
    for (const auto& vc : problem.blocks[b].coeffs) {
      const double xv = x(vc.var);
      if (xv == 0.0) continue;
      for (const auto& e : vc.entries) s(e.row, e.col) += xv * e.value;
    }
    return s;
  };
  auto etx = [&](const RealVector& lam) {
    RealVector v = RealVector::Zero(m);
    for (int e = 0; e < ne; ++e)
      for (const auto& [j, c] : problem.equalities[e].coeffs) v(j) += c * lam(e);
    return v;
  };

  auto compute_residuals = [&](Residuals& r) {
    r.rd.resize(nb);
    r.pinf = 0;
    for (int b = 0; b < nb; ++b) {
      r.rd[b] = eval_lmi(b, sol.x) - work[b].s;
      r.pinf = std::max(r.pinf, r.rd[b].norm() / (1 + problem.blocks[b].constant.norm()));
    }
    r.rp = problem.objective - etx(lambda);
    for (int b = 0; b < nb; ++b)
      for (const auto& vc : problem.blocks[b].coeffs)
        r.rp(vc.var) -= sparse_trace_dot(vc.entries, work[b].z);
    r.re = RealVector::Zero(ne);
    for (int e = 0; e < ne; ++e) {
      double ax = 0;
      for (const auto& [j, c] : problem.equalities[e].coeffs) ax += c * sol.x(j);
      r.re(e) = problem.equalities[e].rhs - ax;
    }
    r.dinf = r.rp.size() ? r.rp.cwiseAbs().maxCoeff() / (1 + c_scale) : 0.0;
    if (ne) r.dinf = std::max(r.dinf, r.re.cwiseAbs().maxCoeff() / (1 + g.cwiseAbs().maxCoeff()));
  };

  auto finish = [&](SdpStatus st, const std::string& msg, int iters) {
    sol.status = st;
    sol.message = msg;
    sol.iterations = iters;
    sol.objectiveValue = problem.objective.dot(sol.x);
    double dobj = lambda.size() ? g.dot(lambda) : 0.0;
    for (int b = 0; b < nb; ++b) dobj -= sym_dot(problem.blocks[b].constant, work[b].z);
    sol.dualObjective = dobj;
    sol.dualityGap = std::abs(sol.objectiveValue - dobj) /
                     (1 + std::abs(sol.objectiveValue) + std::abs(dobj));
    double worst = 0;
    for (int b = 0; b < nb; ++b) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(eval_lmi(b, sol.x), Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues().minCoeff() / (1 + problem.blocks[b].constant.norm()));
    }
    for (int e = 0; e < ne; ++e) {
      double ax = 0;
      for (const auto& [j, c] : problem.equalities[e].coeffs) ax += c * sol.x(j);
      worst = std::max(worst, std::abs(ax - problem.equalities[e].rhs) /
                                  (1 + std::abs(problem.equalities[e].rhs)));
    }
    sol.maxConstraintViolation = std::max(0.0, worst);
    sol.dualBlocks.clear();
    for (int b = 0; b < nb; ++b) sol.dualBlocks.push_back(work[b].z);
    return sol;
  };

  Residuals res;
  RealMatrix M(m, m);
  RealVector h(m), q(m);
  std::vector<std::vector<RealMatrix>> deltaS(2), deltaZ(2);
  for (auto& v : deltaS) v.resize(nb);
  for (auto& v : deltaZ) v.resize(nb);

  double mu_prev = std::numeric_limits<double>::infinity();
  int stall = 0;

  // best iterate by scaled residual-and-gap merit, restored at terminal events
  double best_merit = std::numeric_limits<double>::infinity();
  RealVector best_x = sol.x, best_lambda = lambda;
  std::vector<RealMatrix> best_s, best_z;
  for (int b = 0; b < nb; ++b) {
    best_s.push_back(work[b].s);
    best_z.push_back(work[b].z);
  }
  auto restore_best = [&]() {
    sol.x = best_x;
    lambda = best_lambda;
    for (int b = 0; b < nb; ++b) {
      work[b].s = best_s[b];
      work[b].z = best_z[b];
    }
  };
  auto finish_restored = [&](SdpStatus fallback, const std::string& msg, int iters) {
    restore_best();
    compute_residuals(res);
    double trsz = 0;
    for (int b = 0; b < nb; ++b) trsz += sym_dot(work[b].s, work[b].z);
    const double pobj = problem.objective.dot(sol.x);
    double dobj = lambda.size() ? g.dot(lambda) : 0.0;
    for (int b = 0; b < nb; ++b) dobj -= sym_dot(problem.blocks[b].constant, work[b].z);
    const double relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const double mugap = trsz / (1 + std::abs(pobj) + std::abs(dobj));
    if (res.pinf <= options.feasTol && res.dinf <= options.feasTol &&
        std::min(relgap, mugap) <= options.gapTol) {
      return finish(SdpStatus::Optimal, "converged (best iterate at " + msg + ")", iters);
    }
    return finish(fallback, msg, iters);
  };

  for (int iter = 0; iter < options.maxIter; ++iter) {
    compute_residuals(res);
    double trsz = 0;
    for (int b = 0; b < nb; ++b) trsz += sym_dot(work[b].s, work[b].z);
    const double mu = trsz / n_total;

    const double pobj = problem.objective.dot(sol.x);
    double dobj = lambda.size() ? g.dot(lambda) : 0.0;
    for (int b = 0; b < nb; ++b) dobj -= sym_dot(problem.blocks[b].constant, work[b].z);
    const double relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const double mugap = trsz / (1 + std::abs(pobj) + std::abs(dobj));

    static const bool trace = std::getenv("QMET_SDP_TRACE") != nullptr;
    if (trace) {
      std::fprintf(stderr, "[sdp] it=%3d mu=%10.3e pinf=%10.3e dinf=%10.3e gap=%10.3e pobj=%+.9e\n",
                   iter, mu, res.pinf, res.dinf, relgap, pobj);
    }

    if (res.pinf <= options.feasTol && res.dinf <= options.feasTol &&
        std::min(relgap, mugap) <= options.gapTol) {
      return finish(SdpStatus::Optimal, "converged", iter);
    }
    const double merit = std::max({res.pinf / options.feasTol, res.dinf / options.feasTol,
                                   std::min(relgap, mugap) / options.gapTol});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = sol.x;
      best_lambda = lambda;
      for (int b = 0; b < nb; ++b) {
        best_s[b] = work[b].s;
        best_z[b] = work[b].z;
      }
    }

    // Farkas-type certificate of primal (LMI) infeasibility from the dual ray
    {
      double trz = 0;
      for (int b = 0; b < nb; ++b) trz += work[b].z.trace();
      if (trz > 0) {
        double ray = lambda.size() ? g.dot(lambda) / trz : 0.0;
        for (int b = 0; b < nb; ++b)
          ray -= sym_dot(problem.blocks[b].constant, work[b].z) / trz;
        RealVector viol = etx(lambda) / trz;
        for (int b = 0; b < nb; ++b)
          for (const auto& vc : problem.blocks[b].coeffs)
            viol(vc.var) += sparse_trace_dot(vc.entries, work[b].z) / trz;
        const double vnorm = viol.cwiseAbs().maxCoeff();
        if (ray > 1e-6 * (1 + f0_scale) && vnorm <= 1e-7 * ray * std::max(1.0, fi_scale)) {
          return finish(SdpStatus::Infeasible, "dual improving ray found", iter);
        }
      }
    }
    // divergence heuristics
    if (pobj < -1e11 * (1 + c_scale) && res.pinf <= 1e-6) {
      return finish(SdpStatus::Unbounded, "objective diverging below with feasible iterates", iter);
    }
    if (sol.x.size() && sol.x.cwiseAbs().maxCoeff() > 1e13) {
      return finish(pobj < 0 ? SdpStatus::Unbounded : SdpStatus::NumericalFailure,
                    "iterates diverged", iter);
    }

    if (mu < mu_prev * 0.99995) {
      stall = 0;
    } else if (++stall >= 15) {
      return finish_restored(SdpStatus::NumericalFailure, "progress stalled", iter);
    }
    mu_prev = mu;

    // NT scaling and Schur complement
    M.setZero();
    h.setZero();
    q.setZero();
    bool scaling_ok = true;
    for (int b = 0; b < nb; ++b) {
      BlockWork& w = work[b];
      const int n = problem.blocks[b].size;
      w.cholS.compute(w.s);
      w.cholZ.compute(w.z);
      if (w.cholS.info() != Eigen::Success || w.cholZ.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const RealMatrix l = w.cholS.matrixL();
      const RealMatrix a = l.transpose() * w.z * l;
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (a + a.transpose()));
      if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0) {
        scaling_ok = false;
        break;
      }
      const RealMatrix cmat =
          l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
      w.winv.noalias() =
          cmat * es.eigenvalues().cwiseSqrt().asDiagonal() * cmat.transpose();
      const RealMatrix linv_id = l.triangularView<Eigen::Lower>().solve(RealMatrix::Identity(n, n));
      w.sinv.noalias() = linv_id.transpose() * linv_id;
      w.rd = res.rd[b];
      w.urd.noalias() = w.winv * w.rd * w.winv;

      const auto& coeffs = problem.blocks[b].coeffs;
      RealMatrix t(n, n);
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const auto& fi = coeffs[i];
        t.setZero();
        for (const auto& e : fi.entries)
          t.noalias() += e.value * (w.winv.col(e.row) * w.winv.row(e.col));
        for (size_t j = 0; j <= i; ++j) {
          const auto& fj = coeffs[j];
          const double v = sparse_trace_dot(fj.entries, t);
          M(fi.var, fj.var) += v;
          if (fi.var != fj.var) M(fj.var, fi.var) += v;
        }
        h(fi.var) += sparse_trace_dot(fi.entries, w.sinv);
        q(fi.var) += sparse_trace_dot(fi.entries, w.urd);
      }
    }
    if (!scaling_ok) {
      return finish_restored(SdpStatus::NumericalFailure, "iterate left the cone (scaling failed)",
                             iter);
    }

    // Schur complement factorization, shared by predictor and corrector;
    // equality multipliers are eliminated through the range-space method
    Eigen::LLT<RealMatrix> lltM;
    {
      RealMatrix mreg = M;
      double ridge = 0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        lltM.compute(mreg);
        if (lltM.info() == Eigen::Success) break;
        ridge = (ridge == 0) ? 1e-13 * (1 + M.diagonal().cwiseAbs().maxCoeff()) : ridge * 100;
        mreg = M + ridge * RealMatrix::Identity(m, m);
      }
      if (lltM.info() != Eigen::Success) {
        return finish_restored(SdpStatus::NumericalFailure,
                               "Schur complement factorization failed", iter);
      }
    }
    RealMatrix etrans;        // m x ne
    RealMatrix minv_etrans;   // m x ne
    Eigen::LLT<RealMatrix> lltEq;
    if (ne) {
      etrans = RealMatrix::Zero(m, ne);
      for (int e = 0; e < ne; ++e)
        for (const auto& [j, c] : problem.equalities[e].coeffs) etrans(j, e) = c;
      minv_etrans = lltM.solve(etrans);
      lltEq.compute(RealMatrix(etrans.transpose() * minv_etrans));
      if (lltEq.info() != Eigen::Success) {
        return finish_restored(SdpStatus::NumericalFailure, "equality Schur factorization failed",
                               iter);
      }
    }

    const RealVector elam = etx(lambda);
    RealVector dx[2];
    RealVector dlam[2];
    double alpha_s = 1.0, alpha_z = 1.0;
    double sigma = 0.0;
    for (int phase = 0; phase < 2; ++phase) {
      RealVector rhs1 = sigma * mu * h - q - problem.objective + elam;
      if (ne == 0) {
        dx[phase] = lltM.solve(rhs1);
        dlam[phase] = RealVector::Zero(0);
      } else {
        // M dx - E^T dlam = rhs1, E dx = re
        const RealVector minv_rhs = lltM.solve(rhs1);
        const RealVector neg_dlam =
            lltEq.solve(RealVector(etrans.transpose() * minv_rhs - res.re));
        dx[phase] = minv_rhs - minv_etrans * neg_dlam;
        dlam[phase] = -neg_dlam;
      }
      double as = std::numeric_limits<double>::infinity();
      double az = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nb; ++b) {
        BlockWork& w = work[b];
        RealMatrix ds = res.rd[b];
        for (const auto& vc : problem.blocks[b].coeffs) {
          const double xv = dx[phase](vc.var);
          if (xv == 0.0) continue;
          for (const auto& e : vc.entries) ds(e.row, e.col) += xv * e.value;
        }
        RealMatrix dz = sigma * mu * w.sinv - w.z - w.winv * ds * w.winv;
        dz = 0.5 * (dz + dz.transpose()).eval();
        deltaS[phase][b] = std::move(ds);
        deltaZ[phase][b] = std::move(dz);
        as = std::min(as, max_step(w.cholS, deltaS[phase][b]));
        az = std::min(az, max_step(w.cholZ, deltaZ[phase][b]));
      }
      if (phase == 0) {
        const double as_aff = std::min(1.0, as);
        const double az_aff = std::min(1.0, az);
        double tr_aff = 0;
        for (int b = 0; b < nb; ++b) {
          tr_aff += sym_dot(work[b].s, work[b].z);
          tr_aff += as_aff * sym_dot(deltaS[0][b], work[b].z);
          tr_aff += az_aff * sym_dot(work[b].s, deltaZ[0][b]);
          tr_aff += as_aff * az_aff * sym_dot(deltaS[0][b], deltaZ[0][b]);
        }
        const double mu_aff = std::max(tr_aff / n_total, 0.0);
        sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-12, 1.0);
      } else {
        const double tau = (mu > 1e-7 * (1 + f0_scale)) ? 0.95 : 0.98;
        alpha_s = std::min(1.0, tau * as);
        alpha_z = std::min(1.0, tau * az);
      }
    }

    sol.x += alpha_s * dx[1];
    if (ne) lambda += alpha_z * dlam[1];
    for (int b = 0; b < nb; ++b) {
      work[b].s += alpha_s * deltaS[1][b];
      work[b].z += alpha_z * deltaZ[1][b];
    }
  }

  return finish_restored(SdpStatus::NumericalFailure, "iteration limit reached", options.maxIter);
}

}  // namespace

RealMatrix embed_hermitian_matrix(const ComplexMatrix& h) {
  const int n = static_cast<int>(h.rows());
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

namespace {

void check_hermitian(const ComplexMatrix& h, const char* what) {
  if (h.rows() != h.cols()) throw std::invalid_argument(std::string(what) + ": must be square");
  if ((h - h.adjoint()).norm() > 1e-12 * (1 + h.norm()))
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

void add_real_entries(SdpProblem& problem, int block, int var, const RealMatrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r; c < m.cols(); ++c)
      if (std::abs(m(r, c)) >= kDropTol) problem.addCoefficient(block, var, r, c, m(r, c));
}

}  // namespace

int embed_hermitian_lmi(SdpProblem& problem, const HermitianAffine& affine) {
  check_hermitian(affine.constant, "embed_hermitian_lmi constant");
  const int n = static_cast<int>(affine.constant.rows());
  const int block = problem.addBlock(2 * n);
  problem.blocks[block].constant = embed_hermitian_matrix(affine.constant);
  for (const auto& [var, coeff] : affine.coefficients) {
    check_hermitian(coeff, "embed_hermitian_lmi coefficient");
    if (coeff.rows() != n) throw std::invalid_argument("embed_hermitian_lmi: size mismatch");
    add_real_entries(problem, block, var, embed_hermitian_matrix(coeff));
  }
  return block;
}

int add_hermitian_lmi(SdpProblem& problem, const HermitianAffine& affine) {
  bool all_real = affine.constant.imag().norm() <= kDropTol;
  for (const auto& [_, coeff] : affine.coefficients)
    all_real = all_real && coeff.imag().norm() <= kDropTol;
  if (!all_real) return embed_hermitian_lmi(problem, affine);
  check_hermitian(affine.constant, "add_hermitian_lmi constant");
  const int n = static_cast<int>(affine.constant.rows());
  const int block = problem.addBlock(n);
  problem.blocks[block].constant = affine.constant.real();
  for (const auto& [var, coeff] : affine.coefficients) {
    check_hermitian(coeff, "add_hermitian_lmi coefficient");
    if (coeff.rows() != n) throw std::invalid_argument("add_hermitian_lmi: size mismatch");
    add_real_entries(problem, block, var, coeff.real());
  }
  return block;
}

}  // namespace qmet
