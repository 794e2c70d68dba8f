#include "esd/errors.hpp"
#include "esd/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace esd;

namespace {

Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {normal(rng), normal(rng)};
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("integrate_adaptive: exponential decay reaches e^-1") {
  const OdeRhs rhs = [](double, const ComplexVector& y, ComplexVector& dy) { dy[0] = -y[0]; };
  const std::vector<double> times = {0.0, 1.0};
  const auto traj = integrate_adaptive(rhs, {1.0}, times);
  REQUIRE(traj.states.size() == 2);
  CHECK(std::abs(traj.states[1][0] - std::exp(-1.0)) < 1e-9);
  CHECK(std::abs(traj.states[1][0].real() - 0.3678794412) < 1e-9);
}

TEST_CASE("integrate_adaptive: rotation returns after 2 pi") {
  const OdeRhs rhs = [](double, const ComplexVector& y, ComplexVector& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const auto y = integrate_to(rhs, {1.0, 0.0}, 0.0, 2.0 * std::numbers::pi);
  CHECK(std::abs(y[0] - 1.0) < 1e-8);
  CHECK(std::abs(y[1]) < 1e-8);
}

TEST_CASE("integrate_adaptive: zero-length span leaves y0 unchanged") {
  const OdeRhs rhs = [](double, const ComplexVector& y, ComplexVector& dy) { dy[0] = 3.0 * y[0]; };
  const auto y = integrate_to(rhs, {Complex(0.3, -0.2)}, 1.5, 1.5);
  CHECK(y[0] == Complex(0.3, -0.2));
}

TEST_CASE("integrate_adaptive: samples land on requested times") {
  const OdeRhs rhs = [](double t, const ComplexVector&, ComplexVector& dy) { dy[0] = 2.0 * t; };
  const std::vector<double> times = {0.0, 0.25, 0.5, 1.7, 3.0};
  const auto traj = integrate_adaptive(rhs, {0.0}, times);
  REQUIRE(traj.times.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(traj.times[i] == times[i]);
    CHECK(std::abs(traj.states[i][0] - times[i] * times[i]) < 1e-9);
  }
}

TEST_CASE("integrate_adaptive: tightening tolerance reduces the error") {
  const OdeRhs rhs = [](double t, const ComplexVector& y, ComplexVector& dy) {
    dy[0] = Complex(0.0, 1.0) * (1.0 + std::cos(3.0 * t)) * y[0];
  };
  auto error = [&](double tol) {
    OdeSettings s;
    s.rel_tol = tol;
    s.abs_tol = tol * 1e-3;
    const auto y = integrate_to(rhs, {1.0}, 0.0, 10.0, s);
    const Complex exact = std::exp(Complex(0.0, 10.0 + std::sin(30.0) / 3.0));
    return std::abs(y[0] - exact);
  };
  CHECK(error(1e-10) < error(1e-6));
  CHECK(error(1e-10) < 1e-8);
}

TEST_CASE("integrate_adaptive: invalid input") {
  const OdeRhs rhs = [](double, const ComplexVector& y, ComplexVector& dy) { dy = y; };
  const std::vector<double> descending = {1.0, 0.5};
  CHECK_THROWS_AS(integrate_adaptive(rhs, {1.0}, descending), ValidationError);
  CHECK_THROWS_AS(integrate_adaptive(rhs, {1.0}, std::vector<double>{}), ValidationError);
  OdeSettings bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate_to(rhs, {1.0}, 0.0, 1.0, bad), ValidationError);
}

TEST_CASE("integrate_adaptive: blow-up is reported as IntegrationError") {
  const OdeRhs rhs = [](double, const ComplexVector& y, ComplexVector& dy) { dy[0] = y[0] * y[0]; };
  // y = 1 / (1 - t) is singular at t = 1
  CHECK_THROWS_AS(integrate_to(rhs, {1.0}, 0.0, 2.0), IntegrationError);
}

TEST_CASE("hermitian_eigensystem: known spectra") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  auto s = hermitian_eigensystem(d);
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));

  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  s = hermitian_eigensystem(x);
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eigensystem: random 10x10 reconstruction") {
  const Eigen::MatrixXcd h = random_hermitian(10, 7);
  const auto s = hermitian_eigensystem(h);
  const Eigen::MatrixXcd rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXcd gram = s.eigenvectors.adjoint() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 1; k < 10; ++k) CHECK(s.eigenvalues[k - 1] <= s.eigenvalues[k]);
}

TEST_CASE("hermitian_eigensystem: rejects non-Hermitian input") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigensystem(a), ValidationError);
}

TEST_CASE("unitary_evolve: null Hamiltonian and phase rotation") {
  Eigen::VectorXcd psi(2);
  psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
  CHECK((unitary_evolve(zero, psi, 3.7) - psi).norm() < 1e-14);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  Eigen::VectorXcd up(2);
  up << 1.0, 0.0;
  const auto out = unitary_evolve(h, up, std::numbers::pi);
  CHECK(std::abs(out[0] - Complex(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(out[1]) < 1e-12);
  CHECK(std::abs(std::abs(out.dot(up)) - 1.0) < 1e-12);
}

TEST_CASE("unitary_evolve: norm preserved and evolutions compose") {
  const Eigen::MatrixXcd h = random_hermitian(12, 3);
  const auto spectrum = hermitian_eigensystem(h);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(12);
  psi[0] = 1.0;
  for (double t : {0.1, 1.0, 17.3, 250.0}) CHECK(std::abs(unitary_evolve(spectrum, psi, t).norm() - 1.0) < 1e-10);
  const auto two_steps = unitary_evolve(spectrum, unitary_evolve(spectrum, psi, 0.7), 1.1);
  CHECK((two_steps - unitary_evolve(spectrum, psi, 1.8)).norm() < 1e-12);
}

TEST_CASE("unitary_evolve: rejects unnormalized states") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXcd psi(2);
  psi << 1.0, 1.0;
  CHECK_THROWS_AS(unitary_evolve(h, psi, 1.0), ValidationError);
}
