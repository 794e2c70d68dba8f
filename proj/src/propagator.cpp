#include "esd/propagator.hpp"

#include "esd/errors.hpp"

#include <cmath>

namespace esd {

QubitState QubitState::excited() {
  QubitState s;
  s.rho(0, 0) = 1.0;
  return s;
}

QubitState QubitState::ground() {
  QubitState s;
  s.rho(1, 1) = 1.0;
  return s;
}

Eigen::Vector4cd vectorize(const Matrix2& rho) {
  return {rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1)};
}

Matrix2 unvectorize(const Eigen::Vector4cd& v) {
  Matrix2 rho;
  rho << v[0], v[1], v[2], v[3];
  return rho;
}

namespace {

void require_origin(std::span<const double> t_grid, const char* who) {
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw ValidationError(std::string(who) + ": time grid must start at 0");
}

bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

std::vector<RiccatiTriple> solve_riccati_family(const std::function<Su2Drive(double)>& drive,
                                                std::span<const double> t_grid,
                                                const OdeSettings& settings) {
  auto rhs = [&drive](double t, const ComplexVector& x, ComplexVector& dx) {
    const Su2Drive mu = drive(t);
    dx[0] = mu.plus - mu.minus * x[0] * x[0] + mu.zero * x[0];
    dx[1] = mu.zero - 2.0 * mu.minus * x[0];
    dx[2] = mu.minus * std::exp(x[1]);
  };
  auto guard = [](double t, const ComplexVector& x) {
    if (std::abs(x[0]) > kRiccatiBlowup) throw SingularityError("Riccati variable X+ diverged", t);
  };

  Trajectory traj;
  try {
    traj = integrate_adaptive(rhs, ComplexVector(3, Complex{}), t_grid, settings, guard);
  } catch (const IntegrationError& e) {
    // Step collapse here means the quadratic term is running away.
    throw SingularityError("Riccati integration failed: " + std::string(e.what()), e.time());
  }

  std::vector<RiccatiTriple> out;
  out.reserve(traj.states.size());
  for (const auto& x : traj.states) out.push_back({x[0], x[1], x[2]});
  return out;
}

OdeSettings riccati_settings() {
  OdeSettings s;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-14;
  return s;
}

std::vector<RiccatiState> solve_riccati(const SystemParams& params, std::span<const double> t_grid,
                                        const OdeSettings& settings) {
  params.validate();
  require_origin(t_grid, "solve_riccati");

  const auto j = solve_riccati_family(
      [&params](double t) {
        const CoefficientSet c = coefficient_set(t, params);
        return Su2Drive{c.eps_plus, c.eps0, c.eps_minus};
      },
      t_grid, settings);
  const auto k = solve_riccati_family(
      [&params](double t) {
        const CoefficientSet c = coefficient_set(t, params);
        return Su2Drive{c.nu_plus, c.nu0, c.nu_minus};
      },
      t_grid, settings);

  std::vector<RiccatiState> out(t_grid.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {j[i].plus, j[i].zero, j[i].minus, k[i].plus, k[i].zero, k[i].minus};
  return out;
}

MapCoefficients map_coefficients(const RiccatiState& s, double gamma_k) {
  const Complex ek = std::exp(0.5 * s.k_zero);
  const Complex ek_inv = std::exp(-0.5 * s.k_zero);
  const Complex ej = std::exp(0.5 * s.j_zero);
  const Complex ej_inv = std::exp(-0.5 * s.j_zero);
  if (!finite(ek) || !finite(ek_inv) || !finite(ej) || !finite(ej_inv))
    throw RangeError("map_coefficients: exp(X0/2) overflow");

  MapCoefficients c;
  c.l = (ek + ek_inv * s.k_plus * s.k_minus).real();
  c.m = (ek_inv * s.k_plus).real();
  c.n = ek_inv.real();
  c.p = (ek_inv * s.k_minus).real();
  c.q = ej_inv;
  c.r = ej_inv * s.j_minus;
  c.x = ej + ej_inv * s.j_plus * s.j_minus;
  c.y = ej_inv * s.j_plus;
  c.gamma_k = gamma_k;

  for (const Complex z : {Complex(c.l), Complex(c.m), Complex(c.n), Complex(c.p), c.q, c.r, c.x, c.y})
    if (!finite(z)) throw RangeError("map_coefficients: non-finite coefficient");
  return c;
}

TransferMatrix MapCoefficients::transfer() const {
  const double s = std::exp(-gamma_k);
  TransferMatrix t = TransferMatrix::Zero();
  t(0, 0) = l * s;
  t(0, 3) = m * s;
  t(3, 0) = p * s;
  t(3, 3) = n * s;
  t(1, 1) = x * s;
  t(1, 2) = y * s;
  t(2, 1) = r * s;
  t(2, 2) = q * s;
  return t;
}

MapCoefficients map_from_transfer(const TransferMatrix& t, double gamma_k) {
  const double s = std::exp(gamma_k);
  MapCoefficients c;
  c.l = t(0, 0).real() * s;
  c.m = t(0, 3).real() * s;
  c.p = t(3, 0).real() * s;
  c.n = t(3, 3).real() * s;
  c.x = t(1, 1) * s;
  c.y = t(1, 2) * s;
  c.r = t(2, 1) * s;
  c.q = t(2, 2) * s;
  c.gamma_k = gamma_k;
  return c;
}

TransferMatrix generator_matrix(const CoefficientSet& c) {
  TransferMatrix gen = TransferMatrix::Zero();
  // populations (rho11, rho00) mix through the nu rates
  gen(0, 0) = -c.gamma_rate + 0.5 * c.nu0;
  gen(0, 3) = c.nu_plus;
  gen(3, 0) = c.nu_minus;
  gen(3, 3) = -c.gamma_rate - 0.5 * c.nu0;
  // coherences (rho10, rho01) mix through the eps rates
  gen(1, 1) = -c.gamma_rate + 0.5 * c.eps0;
  gen(1, 2) = c.eps_plus;
  gen(2, 1) = c.eps_minus;
  gen(2, 2) = -c.gamma_rate - 0.5 * c.eps0;
  return gen;
}

std::vector<TransferMatrix> build_transfer_matrix(const SystemParams& params,
                                                  std::span<const double> t_grid,
                                                  const OdeSettings& settings) {
  params.validate();
  require_origin(t_grid, "build_transfer_matrix");

  auto rhs = [&params](double t, const ComplexVector& y, ComplexVector& dy) {
    const TransferMatrix gen = generator_matrix(coefficient_set(t, params));
    Eigen::Map<const TransferMatrix> current(y.data());
    Eigen::Map<TransferMatrix> rate(dy.data());
    rate.noalias() = gen * current;
  };

  ComplexVector y0(16);
  Eigen::Map<TransferMatrix>(y0.data()).setIdentity();
  const Trajectory traj = integrate_adaptive(rhs, y0, t_grid, settings);

  std::vector<TransferMatrix> out;
  out.reserve(traj.states.size());
  for (const auto& y : traj.states) out.emplace_back(Eigen::Map<const TransferMatrix>(y.data()));
  return out;
}

QubitState propagate_single(const QubitState& rho0, const MapCoefficients& c) {
  const double s = std::exp(-c.gamma_k);
  const Matrix2& r = rho0.rho;
  QubitState out;
  out.rho(0, 0) = s * (c.l * r(0, 0) + c.m * r(1, 1));
  out.rho(0, 1) = s * (c.x * r(0, 1) + c.y * r(1, 0));
  out.rho(1, 0) = s * (c.q * r(1, 0) + c.r * r(0, 1));
  out.rho(1, 1) = s * (c.n * r(1, 1) + c.p * r(0, 0));
  return out;
}

JointState assemble_joint(const JointState& rho0, const MapCoefficients& c) {
  const Matrix4& r = rho0.rho;
  constexpr int off_x[8][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 3}, {2, 0}, {2, 3}, {3, 1}, {3, 2}};
  for (const auto& ij : off_x)
    if (std::abs(r(ij[0], ij[1])) > 1e-12)
      throw StructureError("assemble_joint: input is not an X state");

  // Scale each factor by exp(-gamma_k) first so products never overflow.
  const double s = std::exp(-c.gamma_k);
  const double l = c.l * s, m = c.m * s, n = c.n * s, p = c.p * s;
  const Complex q = c.q * s, rr = c.r * s, x = c.x * s, y = c.y * s;

  const Complex r11 = r(0, 0), r22 = r(1, 1), r33 = r(2, 2), r44 = r(3, 3);
  const Complex r14 = r(0, 3), r23 = r(1, 2), r32 = r(2, 1), r41 = r(3, 0);

  JointState out;
  Matrix4& o = out.rho;
  o(0, 0) = l * l * r11 + l * m * r22 + m * l * r33 + m * m * r44;
  o(1, 1) = l * p * r11 + l * n * r22 + m * p * r33 + m * n * r44;
  o(2, 2) = p * l * r11 + p * m * r22 + n * l * r33 + n * m * r44;
  o(3, 3) = p * p * r11 + p * n * r22 + n * p * r33 + n * n * r44;
  o(0, 3) = x * x * r14 + x * y * r23 + y * x * r32 + y * y * r41;
  o(1, 2) = x * rr * r14 + x * q * r23 + y * rr * r32 + y * q * r41;
  o(2, 1) = rr * x * r14 + rr * y * r23 + q * x * r32 + q * y * r41;
  o(3, 0) = rr * rr * r14 + rr * q * r23 + q * rr * r32 + q * q * r41;
  return out;
}

JointState apply_joint_transfer(const TransferMatrix& t, const JointState& rho0) {
  JointState out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp) {
          Complex acc{};
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              for (int cp = 0; cp < 2; ++cp)
                for (int dp = 0; dp < 2; ++dp)
                  acc += t(2 * a + ap, 2 * c + cp) * t(2 * b + bp, 2 * d + dp) *
                         rho0.rho(2 * c + d, 2 * cp + dp);
          out.rho(2 * a + b, 2 * ap + bp) = acc;
        }
  return out;
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("grid step must be > 0");
  if (!(stop >= start)) throw ValidationError("grid stop must be >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-6)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = start + static_cast<double>(k) * step;
  return grid;
}

}  // namespace esd
