#include <doctest.h>

#include <cmath>

#include "qmet/jnt.hpp"

using namespace qmet;

namespace {

SensingModel single_qubit_model(RealMatrix w = RealMatrix::Identity(2, 2)) {
  SensingModel m;
  m.dim = 2;
  m.generators = {HermitianOperator{pauli_x()}, HermitianOperator{pauli_y()}};
  m.strongLindblads = {pauli_z()};
  m.costMatrix = std::move(w);
  return m;
}

SensingModel maximal_advantage_model(int p) {
  SensingModel m;
  m.dim = p + 1;
  for (int i = 1; i <= p; ++i) {
    ComplexMatrix g = ComplexMatrix::Zero(p + 1, p + 1);
    g(0, i) = g(i, 0) = 1.0 / std::sqrt(2.0);
    m.generators.emplace_back(g);
  }
  m.costMatrix = RealMatrix::Identity(p, p);
  return m;
}

SensingModel su2_noiseless_model() {
  SensingModel m;
  m.dim = 2;
  const double s = 1.0 / std::sqrt(2.0);
  m.generators = {HermitianOperator{ComplexMatrix(s * pauli_x())},
                  HermitianOperator{ComplexMatrix(s * pauli_y())},
                  HermitianOperator{ComplexMatrix(s * pauli_z())}};
  m.costMatrix = RealMatrix::Identity(3, 3);
  return m;
}

SensingModel two_qubit_model() {
  SensingModel m;
  m.dim = 4;
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  for (const ComplexMatrix& s : {pauli_x(), pauli_y(), pauli_z()}) {
    m.generators.emplace_back(ComplexMatrix(0.5 * (tensor(s, id) + tensor(id, s))));
  }
  m.strongLindblads = {std::sqrt(2.0) * (tensor(pauli_z(), id) - tensor(id, pauli_z()))};
  m.costMatrix = RealMatrix::Identity(3, 3);
  return m;
}

}  // namespace

TEST_CASE("basis partition counts") {
  // qubit with dephasing: 1 + 2 + 1 + 0 = 4
  auto span = build_lindblad_span(2, {pauli_z()});
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<HermitianOperator> gens = {HermitianOperator{ComplexMatrix(s * pauli_x())},
                                         HermitianOperator{ComplexMatrix(s * pauli_y())}};
  auto part = build_basis_partition(span, gens);
  CHECK(part.parameterCount() == 2);
  CHECK(part.spanComplements.size() == 1);
  CHECK(part.remainder.empty());

  // noiseless qubit with all three Paulis: 1 + 3 + 0 + 0 = 4
  auto span0 = build_lindblad_span(2, {});
  std::vector<HermitianOperator> all = {HermitianOperator{ComplexMatrix(s * pauli_x())},
                                        HermitianOperator{ComplexMatrix(s * pauli_y())},
                                        HermitianOperator{ComplexMatrix(s * pauli_z())}};
  auto part0 = build_basis_partition(span0, all);
  CHECK(part0.spanComplements.empty());
  CHECK(part0.remainder.empty());

  // J_z noise on a qutrit with six generators: 1 + 6 + 2 + 0 = 9
  auto span3 = build_lindblad_span(3, {spin_jz(3)});
  std::vector<HermitianOperator> seed = span3.basis;
  for (auto& g : gell_mann_basis(3)) seed.push_back(std::move(g));
  auto completed = orthonormalize_hermitian_set(seed, 1e-9);
  std::vector<HermitianOperator> gens3(completed.basis.begin() + span3.dimension(),
                                       completed.basis.end());
  REQUIRE(gens3.size() == 6);
  auto part3 = build_basis_partition(span3, gens3);
  CHECK(part3.spanComplements.size() == 2);
  CHECK(part3.remainder.empty());

  // union is an orthonormal basis
  std::vector<HermitianOperator> all9;
  all9.push_back(part3.identityElement);
  for (auto& g : part3.generators) all9.push_back(g);
  for (auto& g : part3.spanComplements) all9.push_back(g);
  for (auto& g : part3.remainder) all9.push_back(g);
  CHECK(all9.size() == 9);
  for (size_t i = 0; i < all9.size(); ++i)
    for (size_t j = i; j < all9.size(); ++j) {
      const double expect = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(hs_inner(all9[i], all9[j]) - expect) <= 1e-10);
    }

  // generators overlapping the span are rejected
  CHECK_THROWS_AS(build_basis_partition(span, {HermitianOperator{ComplexMatrix(s * pauli_z())}}),
                  std::invalid_argument);
}

TEST_CASE("spec assembly shape for the qubit model") {
  auto span = build_lindblad_span(2, {pauli_z()});
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<HermitianOperator> gens = {HermitianOperator{ComplexMatrix(s * pauli_x())},
                                         HermitianOperator{ComplexMatrix(s * pauli_y())}};
  auto part = build_basis_partition(span, gens);
  auto asem = assemble_jnt_sdp(part, RealMatrix::Identity(2, 2));
  // 2 x 9 effective-generator parameters, 1 nu, 3 K, 3 Y
  CHECK(asem.problem.numVars == 25);
  // complex Q block of size 6 is embedded into 12
  CHECK(asem.problem.blocks[asem.qBlock].size == 12);
  CHECK(asem.problem.blocks[asem.boundBlock].size == 4);
  CHECK(asem.problem.blocks[asem.gammaBlock].size == 4);
}

TEST_CASE("single-qubit joint cost") {
  auto sol = solve_jnt(single_qubit_model());
  CHECK(sol.cost == doctest::Approx(1.0).epsilon(2e-5));
  RealMatrix w2(2, 2);
  w2 << 4, 0, 0, 1;
  auto sol2 = solve_jnt(single_qubit_model(w2));
  CHECK(sol2.cost == doctest::Approx(2.25).epsilon(2e-5));
}

TEST_CASE("noiseless SU(2) joint cost is d(d^2-1)/4") {
  auto sol = solve_jnt(su2_noiseless_model());
  CHECK(sol.cost == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("maximal advantage model costs P/2") {
  for (int p : {2, 3}) {
    auto sol = solve_jnt(maximal_advantage_model(p));
    CHECK(sol.cost == doctest::Approx(0.5 * p).epsilon(1e-4));
  }
}

TEST_CASE("two-qubit anticorrelated dephasing cost") {
  auto sol = solve_jnt(two_qubit_model());
  CHECK(sol.cost == doctest::Approx(5.3078 / 4.0).epsilon(0.01));
  // Q is PSD with unit partial trace
  const int n = 4, d = 4;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sol.q);
  CHECK(es.eigenvalues().minCoeff() >= -1e-7);
  ComplexMatrix red = partial_trace(sol.q, BipartiteLayout{n, d}, Subsystem::Ancilla);
  CHECK((red - ComplexMatrix::Identity(n, n)).norm() <= 1e-6);
}

TEST_CASE("both assembly routes agree") {
  for (const auto& model : {single_qubit_model(), maximal_advantage_model(2)}) {
    auto spec = solve_jnt(model, JntRoute::SpecForm);
    auto reduced = solve_jnt(model, JntRoute::Reduced);
    CHECK(spec.cost == doctest::Approx(reduced.cost).epsilon(1e-5));
    CHECK((spec.gamma - reduced.gamma).norm() <= 1e-4 * (1 + spec.gamma.norm()));
  }
}

TEST_CASE("cost scales as 1/T^2 and linearly in W") {
  auto m = single_qubit_model();
  m.totalTime = 1.0;
  auto s1 = solve_jnt(m);
  m.totalTime = 2.0;
  auto s2 = solve_jnt(m);
  CHECK(s1.cost / s2.cost == doctest::Approx(4.0).epsilon(1e-9));

  auto mw = single_qubit_model(RealMatrix(3.0 * RealMatrix::Identity(2, 2)));
  auto sw = solve_jnt(mw);
  CHECK(sw.cost == doctest::Approx(3.0 * s1.cost).epsilon(1e-5));
}

TEST_CASE("reconstruction identities of the code matrix") {
  auto sol = solve_jnt(two_qubit_model());
  const int n = sol.parameterCount() + 1;
  const int d = 4;
  // (G^eff_i)^T = Tr_S[Q (1 x G_i)]
  for (int i = 0; i < sol.parameterCount(); ++i) {
    ComplexMatrix prod =
        sol.q * tensor(ComplexMatrix::Identity(n, n), sol.partition.generators[i].matrix());
    ComplexMatrix red = partial_trace(prod, BipartiteLayout{n, d}, Subsystem::Ancilla);
    CHECK((red - sol.effectiveGenerators[i].transpose()).norm() <= 1e-6);
  }
  // Tr_S[Q (1 x S_i)] proportional to the identity
  for (const auto& s : sol.partition.spanComplements) {
    ComplexMatrix prod = sol.q * tensor(ComplexMatrix::Identity(n, n), s.matrix());
    ComplexMatrix red = partial_trace(prod, BipartiteLayout{n, d}, Subsystem::Ancilla);
    const Complex lambda = red.trace() / static_cast<double>(n);
    CHECK((red - lambda * ComplexMatrix::Identity(n, n)).norm() <= 1e-6);
  }
  // gauge: Gamma sqrt(W'^-1) symmetric PSD
  Eigen::SelfAdjointEigenSolver<RealMatrix> ew(sol.costMatrixTransformed);
  RealMatrix sqw = ew.eigenvectors() * ew.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                   ew.eigenvectors().transpose();
  RealMatrix nmat = sol.gamma * sqw;
  CHECK((nmat - nmat.transpose()).norm() <= 1e-7 * (1 + nmat.norm()));
}

TEST_CASE("solve_jnt rejects models violating the achievability condition") {
  SensingModel m;
  m.dim = 2;
  m.generators = {HermitianOperator{pauli_z()}};
  m.strongLindblads = {pauli_z()};
  m.costMatrix = RealMatrix::Identity(1, 1);
  CHECK_THROWS_AS(solve_jnt(m), HnlsNotAchievableError);
}
