#include "esd/entanglement.hpp"

#include "esd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace esd {

std::string_view to_string(StateKind kind) { return kind == StateKind::Phi ? "Phi" : "Psi"; }

StateKind parse_state_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "phi") return StateKind::Phi;
  if (lower == "psi") return StateKind::Psi;
  throw ValidationError("state: expected Phi or Psi, got '" + std::string(text) + "'");
}

InitialStateSpec InitialStateSpec::from_beta_sq(StateKind kind, double beta_sq, double phase) {
  if (!(beta_sq > 0.0 && beta_sq < 1.0)) throw ValidationError("beta_sq must lie in (0, 1)");
  return {kind, std::sqrt(beta_sq), phase};
}

Complex InitialStateSpec::eta() const { return std::polar(std::sqrt(1.0 - beta * beta), phase); }

void InitialStateSpec::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!std::isfinite(phase)) throw ValidationError("phase must be finite");
}

JointState initial_state(const InitialStateSpec& spec) {
  spec.validate();
  const Complex eta = spec.eta();
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  if (spec.kind == StateKind::Phi) {
    psi[2] = spec.beta;  // |01>
    psi[1] = eta;        // |10>
  } else {
    psi[3] = spec.beta;  // |00>
    psi[0] = eta;        // |11>
  }
  return {psi * psi.adjoint()};
}

double off_x_magnitude(const Matrix4& rho) {
  constexpr int idx[8][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 3}, {2, 0}, {2, 3}, {3, 1}, {3, 2}};
  double worst = 0.0;
  for (const auto& ij : idx) worst = std::max(worst, std::abs(rho(ij[0], ij[1])));
  return worst;
}

double concurrence_x(const JointState& state) {
  const Matrix4& r = state.rho;
  if (off_x_magnitude(r) > 1e-10)
    throw StructureError("concurrence_x: not an X state; use concurrence_general");
  const double p11 = std::max(0.0, r(0, 0).real()), p22 = std::max(0.0, r(1, 1).real());
  const double p33 = std::max(0.0, r(2, 2).real()), p44 = std::max(0.0, r(3, 3).real());
  const double c1 = 2.0 * (std::abs(r(1, 2)) - std::sqrt(p11 * p44));
  const double c2 = 2.0 * (std::abs(r(0, 3)) - std::sqrt(p22 * p33));
  return std::clamp(std::max({0.0, c1, c2}), 0.0, 1.0);
}

double trace_residual(const Matrix4& rho) { return std::abs(rho.trace() - 1.0); }

double hermiticity_residual(const Matrix4& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double positivity_residual(const Matrix4& rho) {
  const Matrix4 h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(h, Eigen::EigenvaluesOnly);
  return std::max(0.0, -solver.eigenvalues()[0]);
}

double concurrence_general(const Matrix4& rho) {
  if (hermiticity_residual(rho) > 1e-8) throw ValidationError("concurrence_general: input is not Hermitian");
  if (trace_residual(rho) > 1e-6) throw PhysicalityError("concurrence_general: trace differs from 1");

  const Matrix4 h = 0.5 * (rho + rho.adjoint());
  const SpectralDecomposition spec = hermitian_eigensystem(h);
  if (spec.eigenvalues[0] < -1e-6) throw PhysicalityError("concurrence_general: density matrix is not positive");

  // With rho = W W^dagger, the square roots of the spin-flip eigenvalues are
  // the singular values of W^T (sigma_y x sigma_y) W.
  const Eigen::Vector4d root = spec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const Matrix4 w = spec.eigenvectors * root.asDiagonal();

  Matrix4 flip = Matrix4::Zero();  // sigma_y (x) sigma_y
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Matrix4 tau = w.transpose() * flip * w;
  const Eigen::Vector4d lambda = Eigen::JacobiSVD<Matrix4>(tau).singularValues();  // descending
  const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace esd
