#include "esd/numerics.hpp"

#include "esd/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

namespace esd {

namespace odeint = boost::numeric::odeint;

void OdeSettings::validate() const {
  if (!(rel_tol > 0.0)) throw ValidationError("OdeSettings.rel_tol must be > 0");
  if (!(abs_tol > 0.0)) throw ValidationError("OdeSettings.abs_tol must be > 0");
  if (!(max_step > 0.0)) throw ValidationError("OdeSettings.max_step must be > 0");
  if (!(initial_step > 0.0)) throw ValidationError("OdeSettings.initial_step must be > 0");
}

namespace {

bool all_finite(const ComplexVector& y) {
  return std::all_of(y.begin(), y.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

Trajectory integrate_adaptive(const OdeRhs& rhs, const ComplexVector& y0,
                              std::span<const double> sample_times, const OdeSettings& settings,
                              const StepObserver& observer) {
  settings.validate();
  if (sample_times.empty()) throw ValidationError("integrate_adaptive: empty sample grid");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()))
    throw ValidationError("integrate_adaptive: sample times must be ascending");
  if (!all_finite(y0)) throw ValidationError("integrate_adaptive: non-finite initial state");

  auto system = [&rhs](const ComplexVector& y, ComplexVector& dydt, double t) {
    dydt.resize(y.size());
    rhs(t, y, dydt);
  };
  auto stepper = odeint::make_controlled(settings.abs_tol, settings.rel_tol,
                                         odeint::runge_kutta_dopri5<ComplexVector>());

  Trajectory out;
  out.times.reserve(sample_times.size());
  out.states.reserve(sample_times.size());

  ComplexVector y = y0;
  double t = sample_times.front();
  double dt = std::min(settings.initial_step, settings.max_step);

  for (double target : sample_times) {
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = dt >= remaining;
      double trial = clipped ? remaining : dt;
      const double t_before = t;
      if (stepper.try_step(system, y, t, trial) == odeint::success) {
        if (!all_finite(y)) throw IntegrationError("non-finite state", t_before);
        if (observer) observer(t, y);
        // A clipped step says nothing about the natural step size; keep the old proposal.
        if (!clipped || trial < dt) dt = std::min(trial, settings.max_step);
        if (clipped) t = target;
      } else {
        dt = trial;
        if (dt < 1e-14 * std::max(1.0, std::abs(t)))
          throw IntegrationError("step size underflow", t);
      }
    }
    out.times.push_back(target);
    out.states.push_back(y);
  }
  return out;
}

ComplexVector integrate_to(const OdeRhs& rhs, const ComplexVector& y0, double t0, double t1,
                           const OdeSettings& settings) {
  const double grid[2] = {t0, t1};
  return integrate_adaptive(rhs, y0, grid, settings).states.back();
}

SpectralDecomposition hermitian_eigensystem(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw ValidationError("hermitian_eigensystem: matrix is not square");
  const double scale = h.norm();
  const double asym = (h - h.adjoint()).norm();
  if (!(asym <= 1e-10 * scale)) throw ValidationError("hermitian_eigensystem: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalError("hermitian_eigensystem: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXcd unitary_evolve(const SpectralDecomposition& spectrum, const Eigen::VectorXcd& psi0,
                                double t) {
  if (psi0.size() != spectrum.eigenvectors.rows())
    throw ValidationError("unitary_evolve: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("unitary_evolve: psi0 is not normalized");
  if (t == 0.0) return psi0;

  const auto& v = spectrum.eigenvectors;
  Eigen::VectorXcd coeffs = v.adjoint() * psi0;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    coeffs[k] *= std::exp(Complex(0.0, -spectrum.eigenvalues[k] * t));
  return v * coeffs;
}

Eigen::VectorXcd unitary_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t) {
  return unitary_evolve(hermitian_eigensystem(h), psi0, t);
}

}  // namespace esd
