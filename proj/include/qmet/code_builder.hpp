#ifndef QMET_CODE_BUILDER_HPP
#define QMET_CODE_BUILDER_HPP

#include "qmet/lindblad_span.hpp"

namespace qmet {

/// Orthonormal code states c_0..c_P living on system x ancilla. c_0 doubles
/// as the input state of the protocol.
struct CodeSpace {
  BipartiteLayout layout;
  std::vector<ComplexVector> codeStates;
  std::vector<double> qecResiduals;  // per span element, filled by verify_qec
  int parameterCount() const { return static_cast<int>(codeStates.size()) - 1; }
};

/// Applies S (x) 1_ancilla to a state in the system-major index convention.
ComplexVector apply_system_operator(const ComplexMatrix& s, const ComplexVector& v,
                                    const BipartiteLayout& layout);

double code_orthonormality_residual(const CodeSpace& code);

/// Eigendecomposes Q, keeps eigenvalues above rankTol * lambda_max (ancilla
/// labels in descending eigenvalue order) and reads the code states off the
/// purification.
CodeSpace purify_code(const ComplexMatrix& q, int dimSystem, double rankTol = 1e-9);

struct QecReport {
  std::vector<double> residuals;  // || M_S - (Tr M_S / (P+1)) I ||_F per span element
  std::vector<double> lambdas;    // Tr M_S / (P+1)
  double maxResidual = 0;
  bool pass(double tol = 1e-6) const { return maxResidual <= tol; }
};

QecReport verify_qec(const CodeSpace& code, const LindbladSpan& span);

/// [G^eff_i]_{kl} = <c_k| G_i (x) 1 |c_l>.
std::vector<ComplexMatrix> effective_generators(const CodeSpace& code,
                                                const std::vector<HermitianOperator>& generators);

struct ProtocolCost {
  RealMatrix dMatrix;  // D_ij = 2T Im <c_i| G_j (x) 1 |c_0>
  RealMatrix gamma;    // D / (2T)
  double cost = 0;     // Tr(W (D^T D)^-1)
};

ProtocolCost protocol_cost(const CodeSpace& code, const std::vector<HermitianOperator>& generators,
                           const RealMatrix& costMatrix, double totalTime);

/// Projective measurement E_l = |b_l><b_l| (l = 1..P+1) with E_0 absorbing
/// the rest, plus the locally unbiased estimator values; row l of
/// estimatorValues holds the estimates for outcome l (row 0 is zero).
struct Protocol {
  CodeSpace codeSpace;
  std::vector<ComplexVector> xVectors;          // x_1..x_P
  std::vector<ComplexVector> measurementBasis;  // b_1..b_{P+1}
  RealMatrix estimatorValues;                   // (P+2) x P
  RealMatrix dMatrix;
};

Protocol derive_measurement(const CodeSpace& code, const RealMatrix& dMatrix);

struct ProtocolReport {
  double measurementGramResidual = 0;   // b-basis orthonormality
  double completenessResidual = 0;      // max(0, lambda_max(sum E_l) - 1)
  double inputOverlapResidual = 0;      // max |<x_i|c_0>|
  double gramImagResidual = 0;          // max |Im <x_i|x_j>|
  double reconstructionResidual = 0;    // x_i = sum_l (w_i(l) - w_i) E_l c_0
};

ProtocolReport check_protocol(const Protocol& protocol);

struct CovarianceReport {
  RealMatrix sigma;
  double cost = 0;  // Tr(W Sigma)
  double meanResidual = 0;      // sum_l w_j(l) p(l) = 0
  double jacobianResidual = 0;  // sum_l w_j(l) Tr(d_i rho E_l) = delta_ij
};

CovarianceReport covariance_check(const Protocol& protocol,
                                  const std::vector<HermitianOperator>& generators,
                                  const RealMatrix& costMatrix, double totalTime);

struct QfiReport {
  RealMatrix fisher;
  double compatibilityResidual = 0;  // max_ij |<psi|[g_i, g_j]|psi>|
};

/// Pure-state Fisher information for derivatives -iT (G_i (x) 1) psi.
QfiReport qfi_and_compatibility(const ComplexVector& psi, const BipartiteLayout& layout,
                                const std::vector<HermitianOperator>& generators,
                                double totalTime);

/// Same, with the generators projected onto the code space first (the
/// dynamics seen by an error-corrected probe).
QfiReport qfi_and_compatibility(const CodeSpace& code,
                                const std::vector<HermitianOperator>& generators,
                                double totalTime);

}  // namespace qmet

#endif
