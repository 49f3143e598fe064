#ifndef QMET_OPERATOR_CORE_HPP
#define QMET_OPERATOR_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmet {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Dense d x d Hermitian operator. Construction symmetrizes the input and
/// rejects matrices whose anti-Hermitian part exceeds 1e-9 relative, so a
/// malformed model file fails loudly instead of being silently repaired.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

  static HermitianOperator identity(int d);
  static HermitianOperator zero(int d);

 private:
  ComplexMatrix mat_;
};

/// Index convention for composite spaces: the first ("system") factor is the
/// slow index, composite = system_index * dimAncilla + ancilla_index.
struct BipartiteLayout {
  int dimSystem = 0;
  int dimAncilla = 0;
  int total() const { return dimSystem * dimAncilla; }
};

enum class Subsystem { System, Ancilla };

struct SpectralDecomposition {
  RealVector eigenvalues;    // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

struct OrthonormalSet {
  std::vector<HermitianOperator> basis;
  int rank = 0;
};

/// Hilbert-Schmidt scalar product Tr(A B), real for Hermitian inputs.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

/// Split L into Hermitian part (L+L^dag)/2 and i-times-anti-Hermitian part
/// i(L-L^dag)/2; both outputs are Hermitian by construction.
std::pair<HermitianOperator, HermitianOperator> split_hermitian(const ComplexMatrix& l);

/// Modified Gram-Schmidt over the real vector space of Hermitian matrices.
/// Inputs are processed in the given order; a vector is dropped when its
/// post-projection norm is at most tol times the largest input norm.
OrthonormalSet orthonormalize_hermitian_set(const std::vector<HermitianOperator>& ops,
                                            double tol = 1e-9);

/// Partial trace of a matrix on dimSystem (x) dimAncilla over one factor.
ComplexMatrix partial_trace(const ComplexMatrix& m, const BipartiteLayout& layout,
                            Subsystem over);

SpectralDecomposition spectral(const HermitianOperator& a);
double operator_norm(const HermitianOperator& a);
/// lambda_max - lambda_min.
double spread(const HermitianOperator& a);

/// Kronecker product, first factor slow (see BipartiteLayout).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Orthonormal traceless Hermitian basis of d x d matrices (d^2 - 1 elements):
/// symmetric off-diagonal pairs ordered by (k,l), then antisymmetric, then
/// the diagonal ladder.
std::vector<HermitianOperator> gell_mann_basis(int d);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Spin operator J_z = diag(j, j-1, ..., -j) on d = 2j+1 levels.
ComplexMatrix spin_jz(int d);

}  // namespace qmet

#endif
