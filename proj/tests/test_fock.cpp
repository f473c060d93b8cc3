#include <doctest.h>

#include <random>

#include "oracle_helpers.hpp"
#include "osctrace/fock.hpp"
#include "osctrace/linalg.hpp"
#include "osctrace/pipelines.hpp"

using namespace osctrace;
using cplx = std::complex<double>;

namespace {

InvariantSymbol constant_one(int d) {
  // |z|^2 / |z|^2 = 1
  std::vector<double> w(d, 1.0);
  return diagonal_symbol(w, 0);
}

}  // namespace

TEST_CASE("level dimensions") {
  CHECK(level_dimension(3, 2) == 4);
  CHECK(level_dimension(0, 5) == 1);
  CHECK(level_dimension(2, 3) == 6);
}

TEST_CASE("monomial integrals: exact rationals and quadrature oracle") {
  using rat = boost::rational<long long>;
  CHECK(monomial_integral({1, 0}, {1, 0}, 2) == rat(1, 2));
  CHECK(monomial_integral({1, 0}, {0, 1}, 2) == rat(0));
  CHECK(monomial_integral({0, 0, 0}, {0, 0, 0}, 3) == rat(1));
  CHECK_THROWS_AS(monomial_integral({2, 0}, {1, 0}, 2), std::invalid_argument);

  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      double exact = boost::rational_cast<double>(monomial_integral({a, b}, {a, b}, 2));
      CHECK(exact == doctest::Approx(oracle::sphere_moment_d2(a, b)).epsilon(1e-6));
    }
  }
}

TEST_CASE("toeplitz of the constant symbol is the identity") {
  for (int d : {2, 3, 4}) {
    for (int n : {0, 1, 5, 12}) {
      ToeplitzBlock t = toeplitz(constant_one(d), n);
      CHECK((t.matrix - Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols()))
                .cwiseAbs()
                .maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("Bargmann-Fock compression of |z|^2 - d is N Id") {
  for (int d : {1, 2, 3}) {
    PhasePolynomial p(VariableKind::ComplexPhase, d);
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      p.add_term(e, e, 1.0);
    }
    p.add_term(MultiIndex(d, 0), MultiIndex(d, 0), cplx(-double(d), 0.0));
    for (int n : {0, 3, 9}) {
      ToeplitzBlock t = toeplitz_ambient_bf(p, n);
      CHECK((t.matrix - double(n) * Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols()))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Bargmann-Fock compression of the pulled-back oscillator is N + d/2") {
  // Berezin pair: H0 = Op(p2) corresponds to the contravariant symbol
  // e^{-Delta/8}(p2 o kappa) = |z|^2 - d/2, and Pi_N (|z|^2 - d/2) Pi_N
  // must equal (N + d/2) Id exactly.
  for (int d : {1, 2}) {
    PhasePolynomial q = berezin_forward(kappa_pullback(oscillator_quadratic(d)));
    for (int n : {0, 2, 7}) {
      ToeplitzBlock t = toeplitz_ambient_bf(q, n);
      CHECK((t.matrix -
             (n + 0.5 * d) * Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols()))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("height Toeplitz block at N=1 has the moment-ratio diagonal") {
  InvariantSymbol h = diagonal_symbol({1.0, 0.0}, 0);  // |z1|^2/|z|^2
  ToeplitzBlock t = toeplitz(h, 1);
  REQUIRE(t.matrix.rows() == 2);
  // basis order (0,1), (1,0); diagonal entries (a+1)/(N+2)
  CHECK(t.matrix(0, 0).real() == doctest::Approx(1.0 / 3.0));
  CHECK(t.matrix(1, 1).real() == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(t.matrix(0, 1)) + std::abs(t.matrix(1, 0)) < 1e-15);
  // quadrature oracle: <H z1, z1>/<z1, z1>
  double num = oracle::sphere_moment_d2(2, 0);
  double den = oracle::sphere_moment_d2(1, 0);
  CHECK(t.matrix(1, 1).real() == doctest::Approx(num / den).epsilon(1e-8));
}

TEST_CASE("toeplitz requires an order-0 Hermitian symbol") {
  InvariantSymbol h1 = diagonal_symbol({1.0, -1.0}, 1);
  CHECK_THROWS_AS(toeplitz(h1, 4), std::invalid_argument);
  CHECK_NOTHROW(toeplitz(h1.restricted_to_sphere(), 4));
}

TEST_CASE("propagator traces from eigenvalues") {
  InvariantSymbol one = constant_one(2);
  int n = 16;
  // zero block: trace = dim
  std::vector<double> zeros(level_dimension(n, 2), 0.0);
  CHECK(block_propagator_trace(zeros, n, 2.0).real() == doctest::Approx(n + 1.0));
  // scalar block: dim * e^{i t sqrt(N) c}
  ToeplitzBlock t = toeplitz(2.5 * one + diagonal_symbol({-1.5, -1.5}, 0), n);
  cplx tr = block_propagator_trace(t, 0.7);
  cplx expect = double(n + 1) * std::polar(1.0, 0.7 * std::sqrt(double(n)) * 1.0);
  CHECK(std::abs(tr - expect) < 1e-10 * (n + 1));
}

TEST_CASE("spectrum containment for the height family") {
  for (double w : {1.0, 0.35}) {
    InvariantSymbol h = diagonal_symbol({w * 0.7, -w * 0.9}, 0);
    for (int n : {8, 32, 64}) {
      auto eigs = toeplitz_eigenvalues(toeplitz(h, n));
      CHECK(eigs.front() >= -0.9 * w - 1e-10);
      CHECK(eigs.back() <= 0.7 * w + 1e-10);
    }
  }
}

TEST_CASE("toeplitz is positivity preserving") {
  InvariantSymbol h = diagonal_symbol({1.0, 0.0}, 0);
  for (int n : {4, 16, 48}) {
    auto eigs = toeplitz_eigenvalues(toeplitz(h, n));
    CHECK(eigs.front() >= -1e-10);
  }
}

TEST_CASE("toeplitz is linear in the symbol") {
  std::mt19937_64 rng(83);
  InvariantSymbol h = oracle::random_bidegree1(rng, 2);
  InvariantSymbol g = oracle::random_bidegree1(rng, 2);
  for (int n : {3, 9}) {
    Eigen::MatrixXcd lhs = toeplitz(2.0 * h + (-0.5) * g, n).matrix;
    Eigen::MatrixXcd rhs = 2.0 * toeplitz(h, n).matrix - 0.5 * toeplitz(g, n).matrix;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("trace identity: Tr T_N[H] = dim * FS average") {
  std::mt19937_64 rng(89);
  for (int d : {2, 3}) {
    InvariantSymbol h = oracle::random_bidegree1(rng, d);
    for (int n : {2, 6, 15}) {
      double tr_matrix = toeplitz(h, n).matrix.trace().real();
      double tr_fast = toeplitz_trace(h, n);
      double expect = level_dimension(n, d) * symbol_fs_average(h);
      CHECK(tr_matrix == doctest::Approx(expect).epsilon(1e-9));
      CHECK(tr_fast == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  // bidegree 2 as well
  InvariantSymbol g = diagonal_symbol({0.8, 0.4}, 0);
  InvariantSymbol g2 = descend(g.numerator() * g.numerator(), 0);
  double tr = toeplitz(g2, 7).matrix.trace().real();
  CHECK(tr == doctest::Approx(level_dimension(7, 2) * symbol_fs_average(g2)).epsilon(1e-9));
}

TEST_CASE("hermitian by construction") {
  std::mt19937_64 rng(97);
  InvariantSymbol h = oracle::random_bidegree1(rng, 3);
  ToeplitzBlock t = toeplitz(h, 6);
  CHECK(hermitian_deviation(t.matrix) == 0.0);
}

TEST_CASE("cross_model_compare: self-consistency and zero cases") {
  InvariantSymbol h = diagonal_symbol({0.7, -0.9}, 1);
  int n = 12, d = 2;
  ToeplitzBlock t = toeplitz(h.restricted_to_sphere(), n);
  Eigen::MatrixXcd b = std::sqrt(n + 0.5 * d) * t.matrix;
  CHECK(cross_model_compare(b, h, n, d) < 1e-12);

  InvariantSymbol zero(d, 1, 1);
  Eigen::MatrixXcd zb = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  CHECK(cross_model_compare(zb, zero, n, d) == 0.0);

  Eigen::MatrixXcd wrong_size = Eigen::MatrixXcd::Zero(n, n);
  CHECK_THROWS_AS(cross_model_compare(wrong_size, h, n, d), std::invalid_argument);
}

TEST_CASE("FS and BF variants coincide at bidegree 1 and differ at O(1/N) beyond") {
  InvariantSymbol h1 = diagonal_symbol({0.7, -0.9}, 0);
  Eigen::MatrixXcd fs1 = toeplitz(h1, 16, InnerProduct::FubiniStudy).matrix;
  Eigen::MatrixXcd bf1 = toeplitz(h1, 16, InnerProduct::BargmannFock).matrix;
  CHECK((fs1 - bf1).cwiseAbs().maxCoeff() < 1e-14);

  // bidegree 2: level factors 1/((N+2)(N+3)) vs 1/(N+2)^2
  InvariantSymbol h2 = descend(h1.numerator() * h1.numerator(), 0);
  std::vector<double> ns{32, 64, 128, 256}, devs;
  for (double nd : ns) {
    int n = static_cast<int>(nd);
    Eigen::MatrixXcd fs = toeplitz(h2, n, InnerProduct::FubiniStudy).matrix;
    Eigen::MatrixXcd bf = toeplitz(h2, n, InnerProduct::BargmannFock).matrix;
    devs.push_back((fs - bf).cwiseAbs().maxCoeff());
  }
  RateFit fit = fit_rate(ns, devs);
  CHECK(fit.slope <= -0.9);
}
