#pragma once

#include "esd/numerics.hpp"

namespace esd {

/// Atom and cavity frequencies for one atom-cavity pair. Frequencies are
/// expressed in units of the coupling g, so the defaults correspond to g = 1.
struct SystemParams {
  double omega0 = 1.0;  // atomic transition frequency
  double omega = 1.0;   // cavity mode frequency
  double g = 1.0;       // atom-field coupling

  /// Sum frequency omega + omega0.
  double sum_frequency() const { return omega + omega0; }
  /// Detuning omega0 - omega.
  double detuning() const { return omega0 - omega; }

  /// Throws ValidationError unless omega0, omega, g are finite and positive.
  void validate() const;

  /// Resonant or detuned pair given omega0/g and detuning/g.
  static SystemParams from_detuning(double omega0, double detuning, double g = 1.0);
};

/// Memory-kernel integrals of the vacuum cavity correlation at time t.
///   alpha        = (1 - e^{-i Delta t}) / (i Delta)
///   f            = (e^{i delta t} - 1) / (i delta)
///   alpha_tilde  = int_0^t alpha,   F_int = int_0^t f
///   gamma_k      = g^2 (Re alpha_tilde + Re F_int)
struct KernelValues {
  Complex alpha;
  Complex f;
  Complex alpha_tilde;
  Complex F_int;
  double gamma_k = 0.0;
};

/// Time-dependent rates multiplying each superoperator in the master equation.
/// `gamma_rate` is the rate of the scalar damping term, i.e. d(gamma_k)/dt.
struct CoefficientSet {
  Complex eps0;
  Complex eps_plus;
  Complex eps_minus;
  double nu0 = 0.0;
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  double gamma_rate = 0.0;
};

/// Below this |detuning * t| the detuning kernels switch to their Taylor series.
inline constexpr double kSmallDetuningThreshold = 1e-4;

KernelValues evaluate_kernels(double t, const SystemParams& params);
CoefficientSet coefficient_set(double t, const SystemParams& params);

}  // namespace esd
