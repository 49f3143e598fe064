#include <doctest.h>

#include <random>

#include "qmet/operator_core.hpp"

using namespace qmet;

namespace {

ComplexMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  return 0.5 * (m + m.adjoint().eval());
}

}  // namespace

TEST_CASE("hs_inner on Paulis") {
  HermitianOperator sx{pauli_x()}, sz{pauli_z()};
  HermitianOperator id_norm{ComplexMatrix::Identity(2, 2) / std::sqrt(2.0)};
  CHECK(hs_inner(sx, sx) == doctest::Approx(2.0));
  CHECK(hs_inner(sx, sz) == doctest::Approx(0.0));
  CHECK(hs_inner(id_norm, id_norm) == doctest::Approx(1.0));
  HermitianOperator big{ComplexMatrix::Identity(3, 3)};
  CHECK_THROWS_AS(hs_inner(sx, big), std::invalid_argument);
}

TEST_CASE("hermitian construction rejects gross asymmetry") {
  ComplexMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 1;  // not Hermitian
  CHECK_THROWS_AS(HermitianOperator{m}, std::invalid_argument);
  ComplexMatrix ok = pauli_y();
  ok(0, 1) += Complex(1e-13, 0);
  HermitianOperator h{ok};
  CHECK((h.matrix() - h.matrix().adjoint()).norm() <= 1e-12);
}

TEST_CASE("split_hermitian conventions") {
  ComplexMatrix l = ComplexMatrix::Zero(2, 2);
  l(0, 1) = 1;  // |0><1|
  auto [h, iah] = split_hermitian(l);
  CHECK((h.matrix() - 0.5 * pauli_x()).norm() == doctest::Approx(0.0));
  CHECK((iah.matrix() + 0.5 * pauli_y()).norm() == doctest::Approx(0.0));

  auto [hz, iz] = split_hermitian(pauli_z());
  CHECK((hz.matrix() - pauli_z()).norm() == doctest::Approx(0.0));
  CHECK(iz.matrix().norm() == doctest::Approx(0.0));

  auto [h2, i2] = split_hermitian(Complex(0, 1) * pauli_z());
  CHECK(h2.matrix().norm() == doctest::Approx(0.0));
  CHECK((i2.matrix() + pauli_z()).norm() == doctest::Approx(0.0));
}

TEST_CASE("orthonormalize_hermitian_set") {
  HermitianOperator sz{pauli_z()};
  HermitianOperator mix{ComplexMatrix::Identity(2, 2) + pauli_z()};
  auto set = orthonormalize_hermitian_set({sz, mix, sz});
  CHECK(set.rank == 2);
  // span{sigma_z/sqrt2, I/sqrt2}
  RealMatrix gram(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) gram(i, j) = hs_inner(set.basis[i], set.basis[j]);
  CHECK((gram - RealMatrix::Identity(2, 2)).norm() <= 1e-10);

  auto single = orthonormalize_hermitian_set({HermitianOperator{pauli_x()}});
  CHECK(single.rank == 1);
  CHECK((single.basis[0].matrix() - pauli_x() / std::sqrt(2.0)).norm() <= 1e-12);

  // powers of sigma_z collapse to rank 2
  std::vector<HermitianOperator> pows;
  ComplexMatrix acc = ComplexMatrix::Identity(2, 2);
  for (int k = 0; k < 4; ++k) {
    pows.emplace_back(acc);
    acc = acc * pauli_z();
  }
  CHECK(orthonormalize_hermitian_set(pows).rank == 2);

  CHECK(orthonormalize_hermitian_set({}).rank == 0);
}

TEST_CASE("orthonormalize preserves span") {
  std::mt19937_64 rng(7);
  std::vector<HermitianOperator> ops;
  for (int k = 0; k < 6; ++k) ops.emplace_back(random_hermitian(4, rng));
  auto set = orthonormalize_hermitian_set(ops);
  CHECK(set.rank == 6);
  for (const auto& op : ops) {
    ComplexMatrix resid = op.matrix();
    for (const auto& b : set.basis) {
      resid -= hs_inner(b, HermitianOperator{op.matrix()}) * b.matrix();
    }
    CHECK(resid.norm() <= 1e-9 * op.matrix().norm());
  }
}

TEST_CASE("partial trace") {
  // maximally entangled pair of qubits
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  ComplexMatrix rho = phi * phi.adjoint();
  BipartiteLayout layout{2, 2};
  ComplexMatrix red = partial_trace(rho, layout, Subsystem::Ancilla);
  CHECK((red - 0.5 * ComplexMatrix::Identity(2, 2)).norm() <= 1e-12);

  std::mt19937_64 rng(3);
  ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  ComplexMatrix prod = tensor(a, b);
  BipartiteLayout l23{2, 3};
  CHECK((partial_trace(prod, l23, Subsystem::Ancilla) - a * b.trace()).norm() <= 1e-12);
  CHECK((partial_trace(prod, l23, Subsystem::System) - b * a.trace()).norm() <= 1e-12);

  ComplexMatrix any = random_hermitian(6, rng);
  ComplexMatrix ta = partial_trace(any, l23, Subsystem::System);
  CHECK(std::abs(ta.trace() - any.trace()) <= 1e-12);

  CHECK_THROWS_AS(partial_trace(a, l23, Subsystem::System), std::invalid_argument);
}

TEST_CASE("partial trace maps PSD to PSD and preserves trace") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    ComplexMatrix g = random_hermitian(6, rng);
    ComplexMatrix psd = g * g.adjoint();
    BipartiteLayout l{3, 2};
    ComplexMatrix red = partial_trace(psd, l, Subsystem::Ancilla);
    auto dec = spectral(HermitianOperator{red});
    CHECK(dec.eigenvalues.minCoeff() >= -1e-10 * psd.norm());
    CHECK(std::abs(red.trace() - psd.trace()) <= 1e-10 * std::abs(psd.trace()));
  }
}

TEST_CASE("spectral routines") {
  auto dz = spectral(HermitianOperator{pauli_z()});
  CHECK(dz.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(dz.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(operator_norm(HermitianOperator{pauli_z()}) == doctest::Approx(1.0));
  CHECK(spread(HermitianOperator{pauli_z()}) == doctest::Approx(2.0));

  HermitianOperator mix{(pauli_x() + pauli_z()) / std::sqrt(2.0)};
  auto dm = spectral(mix);
  CHECK(dm.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(dm.eigenvalues(1) == doctest::Approx(1.0));

  auto jz = spectral(HermitianOperator{spin_jz(3)});
  CHECK(jz.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(jz.eigenvalues(1) == doctest::Approx(0.0));
  CHECK(jz.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(spread(HermitianOperator{spin_jz(3)}) == doctest::Approx(2.0));
}

TEST_CASE("spectral reconstruction residual") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 8; ++rep) {
    HermitianOperator a{random_hermitian(7, rng)};
    auto dec = spectral(a);
    ComplexMatrix rebuilt = dec.eigenvectors * dec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                            dec.eigenvectors.adjoint();
    CHECK((rebuilt - a.matrix()).norm() <= 1e-9 * a.matrix().norm());
    for (int i = 0; i < a.dim(); ++i) {
      CHECK((a.matrix() * dec.eigenvectors.col(i) - dec.eigenvalues(i) * dec.eigenvectors.col(i))
                .norm() <= 1e-9 * a.matrix().norm());
    }
  }
}

TEST_CASE("gell-mann basis is orthonormal and traceless") {
  for (int d : {2, 3, 5}) {
    auto basis = gell_mann_basis(d);
    CHECK(static_cast<int>(basis.size()) == d * d - 1);
    for (size_t i = 0; i < basis.size(); ++i) {
      CHECK(std::abs(basis[i].matrix().trace()) <= 1e-12);
      for (size_t j = i; j < basis.size(); ++j) {
        const double expect = (i == j) ? 1.0 : 0.0;
        CHECK(hs_inner(basis[i], basis[j]) == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}
