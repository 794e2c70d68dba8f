#include "esd/kernels.hpp"

#include "esd/errors.hpp"

#include <cmath>

namespace esd {

void SystemParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(omega0)) throw ValidationError("omega0 must be finite and > 0");
  if (!positive(omega)) throw ValidationError("omega must be finite and > 0");
  if (!(std::isfinite(g) && g >= 0.0)) throw ValidationError("g must be finite and >= 0");
}

SystemParams SystemParams::from_detuning(double omega0, double detuning, double g) {
  SystemParams p{omega0, omega0 - detuning, g};
  p.validate();
  return p;
}

namespace {

// x - sin(x) without cancellation for small |x|.
double x_minus_sin(double x) {
  if (std::abs(x) >= 0.5) return x - std::sin(x);
  const double x2 = x * x;
  double term = x * x2 / 6.0;
  double sum = term;
  for (int k = 2; k < 12; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
  }
  return sum;
}

// 1 - cos(x) = 2 sin^2(x/2)
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

struct KernelPair {
  Complex first;     // e.g. f
  Complex integral;  // e.g. F
};

// f(t) = (e^{i w t} - 1)/(i w) and its integral from 0 to t, for any real w.
KernelPair oscillating_kernel(double w, double t) {
  const double x = w * t;
  if (std::abs(x) < kSmallDetuningThreshold) {
    // Series through (w t)^3; the neglected term is O(t (w t)^4).
    const double t2 = t * t;
    const Complex f(t - w * w * t * t2 / 6.0, w * t2 / 2.0 - w * w * w * t2 * t2 / 24.0);
    const Complex F(t2 / 2.0 - w * w * t2 * t2 / 24.0, w * t2 * t / 6.0 - w * w * w * t2 * t2 * t / 120.0);
    return {f, F};
  }
  const Complex f(std::sin(x) / w, one_minus_cos(x) / w);
  const Complex F(one_minus_cos(x) / (w * w), x_minus_sin(x) / (w * w));
  return {f, F};
}

}  // namespace

KernelValues evaluate_kernels(double t, const SystemParams& params) {
  if (!(t >= 0.0)) throw ValidationError("evaluate_kernels: t must be >= 0");
  KernelValues k;
  // alpha oscillates at -Delta: alpha(t) = conj(f-type kernel with w = Delta).
  const auto sum = oscillating_kernel(params.sum_frequency(), t);
  k.alpha = std::conj(sum.first);
  k.alpha_tilde = std::conj(sum.integral);
  const auto diff = oscillating_kernel(params.detuning(), t);
  k.f = diff.first;
  k.F_int = diff.integral;
  const double g2 = params.g * params.g;
  k.gamma_k = g2 * (k.alpha_tilde.real() + k.F_int.real());
  return k;
}

CoefficientSet coefficient_set(double t, const SystemParams& params) {
  const KernelValues k = evaluate_kernels(t, params);
  const double g2 = params.g * params.g;
  CoefficientSet c;
  c.eps0 = Complex(0.0, -2.0 * (params.omega0 - g2 * k.alpha.imag() + g2 * k.f.imag()));
  c.eps_plus = g2 * (k.alpha + std::conj(k.f));
  c.eps_minus = g2 * (std::conj(k.alpha) + k.f);
  c.nu0 = 2.0 * g2 * (k.alpha.real() - k.f.real());
  c.nu_plus = 2.0 * g2 * k.alpha.real();
  c.nu_minus = 2.0 * g2 * k.f.real();
  c.gamma_rate = g2 * (k.alpha.real() + k.f.real());
  return c;
}

}  // namespace esd
