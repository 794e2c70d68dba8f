#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace esd {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Tolerances for the adaptive Dormand-Prince integrator. Times are in units of 1/g.
struct OdeSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.05;
  double initial_step = 1e-4;

  void validate() const;
};

/// dy/dt = rhs(t, y). The callee writes into `dydt`, which is pre-sized.
using OdeRhs = std::function<void(double t, const ComplexVector& y, ComplexVector& dydt)>;

/// Called after every accepted step; may throw to abort the integration.
using StepObserver = std::function<void(double t, const ComplexVector& y)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexVector> states;
};

/// Integrates from `sample_times.front()` to `sample_times.back()` and returns the
/// state at every requested sample time. Steps are clipped so that each sample
/// is hit exactly, so no interpolation error enters the samples.
///
/// Throws ValidationError for an empty or descending grid and IntegrationError
/// (carrying the failure time) on step-size underflow or a non-finite state.
Trajectory integrate_adaptive(const OdeRhs& rhs, const ComplexVector& y0,
                              std::span<const double> sample_times,
                              const OdeSettings& settings = {},
                              const StepObserver& observer = {});

/// Convenience form returning only the state at `t1`.
ComplexVector integrate_to(const OdeRhs& rhs, const ComplexVector& y0, double t0, double t1,
                           const OdeSettings& settings = {});

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns, unitary
};

/// Throws ValidationError when `h` is not square or not Hermitian to 1e-10 relative.
SpectralDecomposition hermitian_eigensystem(const Eigen::MatrixXcd& h);

/// exp(-i H t) psi0 using the spectral decomposition of H.
Eigen::VectorXcd unitary_evolve(const SpectralDecomposition& spectrum, const Eigen::VectorXcd& psi0,
                                double t);
Eigen::VectorXcd unitary_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t);

}  // namespace esd
