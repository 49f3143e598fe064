#ifndef QMET_SDP_HPP
#define QMET_SDP_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "qmet/operator_core.hpp"

namespace qmet {

/// Standard-form semidefinite program over real decision variables x:
///   minimize c.x  subject to  F0 + sum_i x_i F_i >= 0 per block,  E x = g.
/// All F matrices are real symmetric; coefficient matrices are stored
/// sparsely per (block, variable).
struct SdpProblem {
  struct Entry {
    int row = 0, col = 0;
    double value = 0;
  };
  struct VarCoeff {
    int var = 0;
    std::vector<Entry> entries;  // both triangles listed, diagonal once
  };
  struct Block {
    int size = 0;
    RealMatrix constant;  // F0
    std::vector<VarCoeff> coeffs;
    std::unordered_map<int, int> coeffIndex;  // var -> position in coeffs
  };
  struct EqualityRow {
    std::vector<std::pair<int, double>> coeffs;
    double rhs = 0;
  };

  int numVars = 0;
  RealVector objective;
  std::vector<Block> blocks;
  std::vector<EqualityRow> equalities;

  int addVariable(double cost = 0.0);
  int addBlock(int size);
  /// Symmetric assignment into F0 of a block: sets (r,c) and (c,r).
  void setConstant(int block, int r, int c, double v);
  /// Symmetric accumulation into the coefficient of variable `var`.
  void addCoefficient(int block, int var, int r, int c, double v);
  void addEquality(std::vector<std::pair<int, double>> coeffs, double rhs);
  void validate() const;
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  RealVector x;
  double objectiveValue = 0;
  double dualObjective = 0;
  /// Relative duality gap |primal - dual| / (1 + |primal| + |dual|).
  double dualityGap = 0;
  /// max over blocks of max(0, -lambda_min(F0 + sum x_i F_i)) / (1 + ||F0||).
  double maxConstraintViolation = 0;
  int iterations = 0;
  /// Dual matrix per block (Z >= 0 with sum_b Tr(F_i^b Z_b) ~ c_i).
  std::vector<RealMatrix> dualBlocks;
  std::string message;
};

struct SdpOptions {
  double gapTol = 1e-8;
  double feasTol = 1e-8;
  int maxIter = 200;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// A complex-Hermitian-valued affine expression in the decision variables.
struct HermitianAffine {
  ComplexMatrix constant;
  std::vector<std::pair<int, ComplexMatrix>> coefficients;
};

/// [[Re H, -Im H], [Im H, Re H]]; every eigenvalue of H appears twice.
RealMatrix embed_hermitian_matrix(const ComplexMatrix& h);

/// Appends the doubled real symmetric block encoding `affine >= 0`.
/// Rejects expressions whose constant or coefficients are not Hermitian.
int embed_hermitian_lmi(SdpProblem& problem, const HermitianAffine& affine);

/// Appends `affine >= 0` using the real matrices directly when the whole
/// expression is real, falling back to the doubled embedding otherwise.
int add_hermitian_lmi(SdpProblem& problem, const HermitianAffine& affine);

}  // namespace qmet

#endif
