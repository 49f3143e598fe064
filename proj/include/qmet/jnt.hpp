#ifndef QMET_JNT_HPP
#define QMET_JNT_HPP

#include "qmet/lindblad_span.hpp"
#include "qmet/sdp.hpp"

namespace qmet {

class HnlsNotAchievableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormal Hermitian basis of the system space split around the Lindblad
/// span: {I/sqrt(d)} + generators (perp to span) + span complements + the
/// remainder completing the basis.
struct BasisPartition {
  int dim = 0;
  HermitianOperator identityElement;
  std::vector<HermitianOperator> generators;       // G_1..G_P, orthonormal, in S^perp
  std::vector<HermitianOperator> spanComplements;  // S_i: span basis minus identity
  std::vector<HermitianOperator> remainder;        // R_i: orthonormal completion
  int parameterCount() const { return static_cast<int>(generators.size()); }
};

/// Everything the joint-code SDP yields. Matrices are expressed in the
/// orthonormalized generator frame (user generators = A^-1 * frame
/// generators); the scalar cost is frame independent and refers to the
/// user's cost matrix.
struct JntSolution {
  double w = 0;     // cost * 4T^2 / P
  double cost = 0;  // P * w / (4 T^2)
  std::vector<ComplexMatrix> effectiveGenerators;  // (P+1)x(P+1) Hermitian
  std::vector<double> nu;
  std::vector<ComplexMatrix> bMatrices;
  RealMatrix gamma;    // P x P, Im[G^eff_j]_{i0}
  RealMatrix kMatrix;  // P x P symmetric
  ComplexMatrix q;     // (P+1)d x (P+1)d Hermitian PSD code matrix
  RealMatrix transform;               // A with A * G_perp orthonormal
  RealMatrix costMatrixTransformed;   // W' = A W A^T
  BasisPartition partition;
  LindbladSpan span;
  double totalTime = 1;
  SdpSolution solverInfo;
  int parameterCount() const { return static_cast<int>(gamma.rows()); }
};

/// Completes {I/sqrt(d), generators, span minus identity} to a full
/// orthonormal Hermitian basis. The generators must already be orthonormal
/// and orthogonal to the span (use check_hnls's transform).
BasisPartition build_basis_partition(const LindbladSpan& span,
                                     const std::vector<HermitianOperator>& generators);

/// Variable packing of the joint-code SDP in its native form: Hermitian
/// parameters of every G^eff_i and B_i, the nu_i, K and the matrix upper
/// bound Y on K^2 (minimized through its trace).
struct JntSpecAssembly {
  SdpProblem problem;
  int p = 0, d = 0;
  int qBlock = 0, boundBlock = 0, gammaBlock = 0;
  // variable indices: Hermitian packing is diag(k), then (re, im) for k < l
  std::vector<std::vector<int>> geffVars;  // [i][packed]
  std::vector<int> nuVars;
  std::vector<std::vector<int>> bVars;  // [i][packed]
  std::vector<int> kVars;               // upper triangle row-major
  std::vector<int> yVars;               // upper triangle row-major
};

JntSpecAssembly assemble_jnt_sdp(const BasisPartition& partition, const RealMatrix& costMatrix);

enum class JntRoute {
  Auto,      // spec packing when small, reduced otherwise
  SpecForm,  // native variable packing
  Reduced    // code-matrix (Q) formulation, solved through conic duality
};

JntSolution solve_jnt(const SensingModel& model, JntRoute route = JntRoute::Auto);

}  // namespace qmet

#endif
