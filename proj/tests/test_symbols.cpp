#include <doctest.h>

#include <random>

#include "oracle_helpers.hpp"
#include "osctrace/invariant_symbol.hpp"
#include "osctrace/phase_polynomial.hpp"

using namespace osctrace;
using cplx = std::complex<double>;

namespace {

PhasePolynomial monomial(VariableKind kind, int d, MultiIndex a, MultiIndex b, cplx c) {
  PhasePolynomial p(kind, d);
  p.add_term(a, b, c);
  return p;
}

PhasePolynomial random_complex_poly(std::mt19937_64& rng, int d, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PhasePolynomial p(VariableKind::ComplexPhase, d);
  for (int t = 0; t < 8; ++t) {
    MultiIndex a(d, 0), b(d, 0);
    for (int j = 0; j < d; ++j) {
      a[j] = deg(rng) % (max_deg + 1);
      b[j] = deg(rng) % (max_deg + 1);
    }
    p.add_term(a, b, cplx(gauss(rng), gauss(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("flow_average kills non-invariant terms and fixes invariant ones") {
  // z1 -> 0
  PhasePolynomial z1 = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {0, 0}, 1.0);
  CHECK(flow_average(z1).empty());
  // z1 zbar1 fixed
  PhasePolynomial n1 = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {1, 0}, 1.0);
  CHECK(flow_average(n1) == n1);
  // bidegree (1,1) cross terms fixed
  PhasePolynomial cross = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {0, 1}, 1.0) +
                          monomial(VariableKind::ComplexPhase, 2, {0, 1}, {1, 0}, 1.0);
  CHECK(flow_average(cross) == cross);
}

TEST_CASE("flow_average rejects RealPhase input") {
  PhasePolynomial q(VariableKind::RealPhase, 1);
  q.add_term({1}, {0}, 1.0);
  CHECK_THROWS_AS(flow_average(q), std::invalid_argument);
}

TEST_CASE("flow_average is a projection") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    PhasePolynomial p = random_complex_poly(rng, 2, 3);
    PhasePolynomial once = flow_average(p);
    CHECK(flow_average(once) == once);
  }
}

TEST_CASE("flow_average output is S^1 invariant at random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  PhasePolynomial p = random_complex_poly(rng, 2, 3);
  PhasePolynomial avg = flow_average(p);
  for (int rep = 0; rep < 100; ++rep) {
    auto z = oracle::random_unit_vector(rng, 2);
    double th = angle(rng);
    auto zrot = z;
    for (auto& v : zrot) v *= std::polar(1.0, th);
    CHECK(std::abs(evaluate_complex(avg, z) - evaluate_complex(avg, zrot)) < 1e-12);
  }
}

TEST_CASE("kappa_pullback sends p2 to |z|^2") {
  for (int d : {1, 2, 3}) {
    PhasePolynomial p2 = oscillator_quadratic(d);
    PhasePolynomial pulled = kappa_pullback(p2);
    PhasePolynomial expect(VariableKind::ComplexPhase, d);
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      expect.add_term(e, e, 1.0);
    }
    for (const auto& [key, c] : pulled.terms()) {
      CHECK(std::abs(c - expect.coefficient(key.first, key.second)) < 1e-15);
    }
    CHECK(pulled.terms().size() == expect.terms().size());
  }
}

TEST_CASE("kappa_pullback keeps constants") {
  PhasePolynomial c = PhasePolynomial::constant(VariableKind::RealPhase, 2, cplx(3.5, 0.0));
  PhasePolynomial pulled = kappa_pullback(c);
  CHECK(pulled.terms().size() == 1);
  CHECK(std::abs(pulled.coefficient({0, 0}, {0, 0}) - cplx(3.5, 0.0)) < 1e-15);
}

TEST_CASE("kappa_pullback of x^2 - xi^2 and pointwise value preservation") {
  // convention z = (x - i xi)/sqrt(2): x^2 - xi^2 = z^2 + zbar^2
  PhasePolynomial q(VariableKind::RealPhase, 1);
  q.add_term({2}, {0}, 1.0);
  q.add_term({0}, {2}, -1.0);
  PhasePolynomial pulled = kappa_pullback(q);
  CHECK(std::abs(pulled.coefficient({2}, {0}) - cplx(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(pulled.coefficient({0}, {2}) - cplx(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(pulled.coefficient({1}, {1})) < 1e-14);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> x{gauss(rng)}, xi{gauss(rng)};
    cplx lhs = evaluate_real(q, x, xi);
    cplx rhs = evaluate_complex(pulled, kappa_point(x, xi));
    CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("kappa_pullback value preservation for random quadratics") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int d : {1, 2, 3}) {
    PhasePolynomial q = oracle::random_quadratic(rng, d);
    PhasePolynomial pulled = kappa_pullback(q);
    for (int rep = 0; rep < 300; ++rep) {
      std::vector<double> x(d), xi(d);
      for (int j = 0; j < d; ++j) {
        x[j] = gauss(rng);
        xi[j] = gauss(rng);
      }
      cplx lhs = evaluate_real(q, x, xi);
      cplx rhs = evaluate_complex(pulled, kappa_point(x, xi));
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("laplacian matches a finite-difference oracle") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    PhasePolynomial p = random_complex_poly(rng, 2, 2);
    PhasePolynomial lap = p.laplacian();
    for (int pt = 0; pt < 5; ++pt) {
      auto z = oracle::random_unit_vector(rng, 2);
      cplx analytic = evaluate_complex(lap, z);
      cplx fd = oracle::fd_laplacian(p, z);
      CHECK(std::abs(analytic - fd) < 1e-5 * (1.0 + std::abs(analytic)));
    }
  }
}

TEST_CASE("berezin_forward of |z|^2 - d/2 is |z|^2 - d") {
  for (int d : {1, 2, 3}) {
    PhasePolynomial p(VariableKind::ComplexPhase, d);
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      p.add_term(e, e, 1.0);
    }
    MultiIndex zero(d, 0);
    p.add_term(zero, zero, cplx(-0.5 * d, 0.0));
    PhasePolynomial q = berezin_forward(p);
    CHECK(std::abs(q.coefficient(zero, zero) - cplx(-double(d), 0.0)) == 0.0);
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      CHECK(std::abs(q.coefficient(e, e) - cplx(1.0, 0.0)) == 0.0);
    }
  }
}

TEST_CASE("berezin_forward keeps constants") {
  PhasePolynomial c = PhasePolynomial::constant(VariableKind::ComplexPhase, 2, cplx(2.25, -1.0));
  CHECK(berezin_forward(c) == c);
}

TEST_CASE("berezin_forward of z^2 zbar^2 (d=1)") {
  // Delta(z^2 zbar^2) = 16 z zbar, Delta^2 = 64:
  // e^{-Delta/8} p = p - 2 z zbar + 1/2
  PhasePolynomial p = monomial(VariableKind::ComplexPhase, 1, {2}, {2}, 1.0);
  PhasePolynomial lap = p.laplacian();
  CHECK(std::abs(lap.coefficient({1}, {1}) - cplx(16.0, 0.0)) == 0.0);
  CHECK(std::abs(lap.laplacian().coefficient({0}, {0}) - cplx(64.0, 0.0)) == 0.0);
  PhasePolynomial q = berezin_forward(p);
  CHECK(std::abs(q.coefficient({2}, {2}) - cplx(1.0, 0.0)) == 0.0);
  CHECK(std::abs(q.coefficient({1}, {1}) - cplx(-2.0, 0.0)) == 0.0);
  CHECK(std::abs(q.coefficient({0}, {0}) - cplx(0.5, 0.0)) == 0.0);
}

TEST_CASE("berezin flow round-trips exactly in rational arithmetic") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> deg(0, 4);
  std::uniform_int_distribution<long long> num(-20, 20);
  for (int rep = 0; rep < 10; ++rep) {
    RationalPhasePolynomial p(VariableKind::ComplexPhase, 2);
    for (int t = 0; t < 6; ++t) {
      MultiIndex a{deg(rng), deg(rng)}, b{deg(rng), deg(rng)};
      p.add_term(a, b,
                 RationalComplex(BigRational(num(rng), 7), BigRational(num(rng), 5)));
    }
    CHECK(p.total_degree() <= 16);
    RationalPhasePolynomial back = berezin_inverse(berezin_forward(p));
    CHECK(back == p);
  }
}

TEST_CASE("descend examples and errors") {
  // height-type order 1: values at the poles
  PhasePolynomial h = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {1, 0}, 1.0) +
                      monomial(VariableKind::ComplexPhase, 2, {0, 1}, {0, 1}, -1.0);
  InvariantSymbol sym = descend(h, 1);
  CHECK(sym.bidegree() == 1);
  CHECK(evaluate(sym, {cplx(1.0, 0.0), cplx(0.0, 0.0)}) == doctest::Approx(1.0));
  CHECK(evaluate(sym, {cplx(0.0, 0.0), cplx(1.0, 0.0)}) == doctest::Approx(-1.0));

  // |z|^2 descends to the constant 1
  PhasePolynomial norm2(VariableKind::ComplexPhase, 3);
  for (int j = 0; j < 3; ++j) {
    MultiIndex e(3, 0);
    e[j] = 1;
    norm2.add_term(e, e, 1.0);
  }
  InvariantSymbol one = descend(norm2, 0);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep)
    CHECK(evaluate(one, oracle::random_unit_vector(rng, 3)) == doctest::Approx(1.0));

  // cross term vanishes at [1:0]
  PhasePolynomial cross = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {0, 1}, 1.0) +
                          monomial(VariableKind::ComplexPhase, 2, {0, 1}, {1, 0}, 1.0);
  InvariantSymbol xh = descend(cross, 0);
  CHECK(evaluate(xh, {cplx(1.0, 0.0), cplx(0.0, 0.0)}) == doctest::Approx(0.0));

  // rejects non-invariant and mixed-bidegree input
  CHECK_THROWS_AS(descend(monomial(VariableKind::ComplexPhase, 2, {1, 0}, {0, 0}, 1.0), 0),
                  std::invalid_argument);
  PhasePolynomial mixed = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {1, 0}, 1.0) +
                          monomial(VariableKind::ComplexPhase, 2, {1, 1}, {1, 1}, 1.0);
  CHECK_THROWS_AS(descend(mixed, 0), std::invalid_argument);
}

TEST_CASE("evaluate: height symbol and unit-sphere guard") {
  InvariantSymbol h = diagonal_symbol({1.0, -1.0}, 0);
  CHECK(evaluate(h, {cplx(1.0, 0.0), cplx(0.0, 0.0)}) == doctest::Approx(1.0));
  CHECK(evaluate(h, {cplx(0.0, 0.0), cplx(1.0, 0.0)}) == doctest::Approx(-1.0));
  double s = 1.0 / std::sqrt(2.0);
  CHECK(evaluate(h, {cplx(s, 0.0), cplx(s, 0.0)}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(evaluate(h, {cplx(1.0, 0.0), cplx(0.5, 0.0)}), std::invalid_argument);
}

TEST_CASE("descend validates Hermitian tables") {
  PhasePolynomial bad = monomial(VariableKind::ComplexPhase, 2, {1, 0}, {0, 1}, cplx(1.0, 0.0));
  // missing the conjugate mirror term
  CHECK_THROWS_AS(descend(bad, 0), std::invalid_argument);
}

TEST_CASE("unitary_rotate agrees with evaluation at rotated points") {
  std::mt19937_64 rng(31);
  InvariantSymbol h = oracle::random_bidegree1(rng, 3);
  std::vector<std::vector<cplx>> u(3, std::vector<cplx>(3, cplx(0.0, 0.0)));
  u[0][1] = std::polar(1.0, 0.3);
  u[1][2] = std::polar(1.0, -1.1);
  u[2][0] = std::polar(1.0, 2.0);
  InvariantSymbol hr = unitary_rotate(h, u);
  for (int rep = 0; rep < 20; ++rep) {
    auto z = oracle::random_unit_vector(rng, 3);
    std::vector<cplx> uz(3, cplx(0.0, 0.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) uz[i] += u[i][j] * z[j];
    CHECK(evaluate(hr, z) == doctest::Approx(evaluate(h, uz)).epsilon(1e-10));
  }
}
