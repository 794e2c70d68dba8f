#pragma once

#include "esd/propagator.hpp"

#include <string_view>
#include <vector>

namespace esd {

/// Phi = beta|01> + eta|10>,  Psi = beta|00> + eta|11>,  eta = sqrt(1-beta^2) e^{i phase}.
enum class StateKind { Phi, Psi };

std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view text);

struct InitialStateSpec {
  StateKind kind = StateKind::Phi;
  double beta = 0.70710678118654752;
  double phase = 0.0;

  static InitialStateSpec from_beta_sq(StateKind kind, double beta_sq, double phase = 0.0);
  Complex eta() const;
  void validate() const;
};

struct ConcurrenceSeries {
  std::vector<double> times;
  std::vector<double> values;
};

JointState initial_state(const InitialStateSpec& spec);

/// Largest modulus among the eight entries outside the X pattern.
double off_x_magnitude(const Matrix4& rho);

/// Closed form for X states. Throws StructureError for anything else;
/// use concurrence_general there.
double concurrence_x(const JointState& state);

/// Wootters concurrence of an arbitrary two-qubit density matrix. Throws
/// PhysicalityError when an eigenvalue of rho is below -1e-6 or the trace is
/// off by more than 1e-6, ValidationError when rho is not Hermitian.
double concurrence_general(const Matrix4& rho);

/// Diagnostics used by the sweep output and the tests.
double trace_residual(const Matrix4& rho);
double hermiticity_residual(const Matrix4& rho);
double positivity_residual(const Matrix4& rho);  // max(0, -lambda_min)

}  // namespace esd
