#ifndef QMET_LINDBLAD_SPAN_HPP
#define QMET_LINDBLAD_SPAN_HPP

#include <optional>
#include <string>

#include "qmet/operator_core.hpp"

namespace qmet {

struct SolveOptions {
  double gapTol = 1e-8;
  double feasTol = 1e-8;
  int maxIter = 200;
  int restarts = 64;
  unsigned long long seed = 0;
};

/// A Markovian sensing model: H = sum_i omega_i G_i, strong Lindblad noise
/// L_k (fully corrected), weak noise J_m (sets the residual rate only), cost
/// matrix W and total interrogation time T.
struct SensingModel {
  int dim = 0;
  std::vector<HermitianOperator> generators;
  std::vector<ComplexMatrix> strongLindblads;
  std::vector<ComplexMatrix> weakLindblads;
  RealMatrix costMatrix;
  double totalTime = 1.0;
  SolveOptions options;

  int parameterCount() const { return static_cast<int>(generators.size()); }
  /// Throws std::invalid_argument when a field violates the invariants.
  void validate() const;
};

/// Real span of {1, L_k^H, i L_k^AH, (L_k^dag L_j)^H, i (L_k^dag L_j)^AH},
/// stored as an orthonormal Hermitian basis whose first element is 1/sqrt(d).
struct LindbladSpan {
  int dim = 0;
  std::vector<HermitianOperator> basis;
  int dimension() const { return static_cast<int>(basis.size()); }
};

struct HnlsVerdict {
  bool achievable = false;
  std::vector<HermitianOperator> projectedGenerators;
  int projectedRank = 0;
  double smallestSingularValue = 0.0;
  /// Present iff achievable: invertible P x P transform making the projected
  /// generators orthonormal (Gram-Schmidt in input order).
  std::optional<RealMatrix> orthonormalizingTransform;
};

LindbladSpan build_lindblad_span(int dim, const std::vector<ComplexMatrix>& strongLindblads);

/// G minus its components along the span basis.
HermitianOperator project_out(const HermitianOperator& g, const LindbladSpan& span);

HnlsVerdict check_hnls(const SensingModel& model);

/// epsilon = ||sum_m J_m^dag J_m||; zero for an empty list.
double weak_noise_rate(const std::vector<ComplexMatrix>& weakLindblads);

}  // namespace qmet

#endif
