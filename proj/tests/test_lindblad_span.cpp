#include <doctest.h>

#include <random>

#include "qmet/lindblad_span.hpp"

using namespace qmet;

namespace {

SensingModel qubit_model(std::vector<ComplexMatrix> gens) {
  SensingModel m;
  m.dim = 2;
  for (auto& g : gens) m.generators.emplace_back(g);
  m.strongLindblads = {pauli_z()};
  m.costMatrix = RealMatrix::Identity(m.parameterCount(), m.parameterCount());
  m.totalTime = 1.0;
  return m;
}

ComplexMatrix kron2(const ComplexMatrix& a, const ComplexMatrix& b) { return tensor(a, b); }

}  // namespace

TEST_CASE("span of single-qubit dephasing") {
  auto span = build_lindblad_span(2, {pauli_z()});
  CHECK(span.dimension() == 2);
  // identity first
  CHECK((span.basis[0].matrix() - ComplexMatrix::Identity(2, 2) / std::sqrt(2.0)).norm() <= 1e-12);
  // sigma_z in span
  HermitianOperator sz{pauli_z()};
  auto proj = project_out(sz, span);
  CHECK(proj.matrix().norm() <= 1e-10);
}

TEST_CASE("span of two-qubit anticorrelated dephasing has dimension 3") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix l = std::sqrt(2.0) * (kron2(pauli_z(), id) - kron2(id, pauli_z()));
  auto span = build_lindblad_span(4, {l});
  CHECK(span.dimension() == 3);
  // contains ZZ through L^2
  HermitianOperator zz{kron2(pauli_z(), pauli_z())};
  CHECK(project_out(zz, span).matrix().norm() <= 1e-9);
}

TEST_CASE("span of J_z noise on a qutrit") {
  auto span = build_lindblad_span(3, {spin_jz(3)});
  CHECK(span.dimension() == 3);
  ComplexMatrix jz2 = spin_jz(3) * spin_jz(3);
  CHECK(project_out(HermitianOperator{jz2}, span).matrix().norm() <= 1e-9);
}

TEST_CASE("project_out basics") {
  auto span = build_lindblad_span(2, {pauli_z()});
  HermitianOperator sx{pauli_x()};
  CHECK((project_out(sx, span).matrix() - pauli_x()).norm() <= 1e-12);
  HermitianOperator mix{(pauli_x() + pauli_z()) / std::sqrt(2.0)};
  CHECK((project_out(mix, span).matrix() - pauli_x() / std::sqrt(2.0)).norm() <= 1e-12);
}

TEST_CASE("project_out is idempotent and contractive") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n;
  auto span = build_lindblad_span(3, {spin_jz(3)});
  for (int rep = 0; rep < 10; ++rep) {
    ComplexMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = Complex(n(rng), n(rng));
    HermitianOperator h{ComplexMatrix(0.5 * (m + m.adjoint()))};
    auto once = project_out(h, span);
    auto twice = project_out(once, span);
    CHECK((once.matrix() - twice.matrix()).norm() <= 1e-10 * (1 + once.matrix().norm()));
    CHECK(once.matrix().norm() <= h.matrix().norm() + 1e-12);
    for (const auto& b : span.basis) {
      CHECK(std::abs(hs_inner(b, once)) <= 1e-10);
    }
  }
}

TEST_CASE("check_hnls verdicts for the qubit examples") {
  auto yes = check_hnls(qubit_model({pauli_x(), pauli_y()}));
  CHECK(yes.achievable);
  CHECK(yes.projectedRank == 2);
  REQUIRE(yes.orthonormalizingTransform.has_value());
  // A G_perp is orthonormal
  const RealMatrix a = *yes.orthonormalizingTransform;
  std::vector<ComplexMatrix> g = {pauli_x(), pauli_y()};
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      ComplexMatrix gi = ComplexMatrix::Zero(2, 2), gj = ComplexMatrix::Zero(2, 2);
      for (int k = 0; k < 2; ++k) {
        gi += a(i, k) * yes.projectedGenerators[k].matrix();
        gj += a(j, k) * yes.projectedGenerators[k].matrix();
      }
      const double expect = (i == j) ? 1.0 : 0.0;
      CHECK(hs_inner(HermitianOperator{gi}, HermitianOperator{gj}) ==
            doctest::Approx(expect).epsilon(1e-9));
    }
  }

  auto dep = check_hnls(qubit_model({pauli_x(), pauli_x() + pauli_z()}));
  CHECK_FALSE(dep.achievable);
  CHECK(dep.projectedRank == 1);

  auto inspan = check_hnls(qubit_model({pauli_z()}));
  CHECK_FALSE(inspan.achievable);
}

TEST_CASE("hnls verdict is invariant under generator reparametrization") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  auto base = qubit_model({pauli_x(), pauli_y()});
  for (int rep = 0; rep < 20; ++rep) {
    RealMatrix t(2, 2);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t(i, j) = n(rng);
    } while (std::abs(t.determinant()) < 0.1);
    SensingModel m = base;
    m.generators.clear();
    for (int i = 0; i < 2; ++i) {
      ComplexMatrix gi = t(i, 0) * pauli_x() + t(i, 1) * pauli_y();
      m.generators.emplace_back(gi);
    }
    CHECK(check_hnls(m).achievable);
  }
}

TEST_CASE("weak noise does not enter the span or the verdict") {
  auto with_weak = qubit_model({pauli_x(), pauli_y()});
  with_weak.weakLindblads = {0.3 * pauli_x()};
  auto v1 = check_hnls(with_weak);
  auto v2 = check_hnls(qubit_model({pauli_x(), pauli_y()}));
  CHECK(v1.achievable == v2.achievable);
  CHECK(v1.projectedRank == v2.projectedRank);
}

TEST_CASE("weak_noise_rate") {
  CHECK(weak_noise_rate({}) == doctest::Approx(0.0));
  ComplexMatrix sminus = ComplexMatrix::Zero(2, 2);
  sminus(1, 0) = std::sqrt(0.25);  // sqrt(eps0) sigma_-
  CHECK(weak_noise_rate({sminus}) == doctest::Approx(0.25));
  CHECK(weak_noise_rate({pauli_x()}) == doctest::Approx(1.0));
}

TEST_CASE("span dimension bounded by d^2 and contains identity") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<ComplexMatrix> ls;
    for (int k = 0; k < 3; ++k) {
      ComplexMatrix l(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) l(i, j) = Complex(n(rng), n(rng));
      ls.push_back(l);
    }
    auto span = build_lindblad_span(3, ls);
    CHECK(span.dimension() <= 9);
    HermitianOperator id = HermitianOperator::identity(3);
    CHECK(project_out(id, span).matrix().norm() <= 1e-9);
  }
}

TEST_CASE("model validation") {
  SensingModel m = qubit_model({pauli_x()});
  m.costMatrix = RealMatrix::Zero(1, 1);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.costMatrix = RealMatrix::Identity(1, 1);
  m.totalTime = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.totalTime = 2.0;
  CHECK_NOTHROW(m.validate());
}
