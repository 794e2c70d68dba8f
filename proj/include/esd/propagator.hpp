#pragma once

#include "esd/kernels.hpp"
#include "esd/numerics.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace esd {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

/// Single-qubit density matrix over the basis {|1>, |0>} (excited first).
struct QubitState {
  Matrix2 rho = Matrix2::Zero();

  static QubitState excited();
  static QubitState ground();
};

/// Two-qubit density matrix over {|11>, |10>, |01>, |00>}, atom A first.
struct JointState {
  Matrix4 rho = Matrix4::Zero();
};

/// Linear map on row-major vectorized 2x2 matrices: (rho11, rho10, rho01, rho00).
using TransferMatrix = Eigen::Matrix4cd;

Eigen::Vector4cd vectorize(const Matrix2& rho);
Matrix2 unvectorize(const Eigen::Vector4cd& v);

// ---- Riccati (SU(2) disentangling) route -------------------------------

/// Coefficients of the generator mu0 A0 + mu+ A+ + mu- A- of one SU(2) family.
struct Su2Drive {
  Complex plus;
  Complex zero;
  Complex minus;
};

/// Disentangling exponents (X+, X0, X-) of exp(X+ A+) exp(X0 A0) exp(X- A-).
struct RiccatiTriple {
  Complex plus;
  Complex zero;
  Complex minus;
};

/// |X+| above this value is treated as a divergence of the disentangled form.
inline constexpr double kRiccatiBlowup = 1e8;

/// Integrates X+' = mu+ - mu- X+^2 + mu0 X+, X0' = mu0 - 2 mu- X+, X-' = mu- exp(X0)
/// from zero initial conditions at `t_grid.front()`. Throws SingularityError
/// with the failure time when |X+| exceeds kRiccatiBlowup.
std::vector<RiccatiTriple> solve_riccati_family(const std::function<Su2Drive(double)>& drive,
                                                std::span<const double> t_grid,
                                                const OdeSettings& settings = {});

/// j-family (driven by the eps rates, acts on coherences) and k-family
/// (driven by the nu rates, acts on populations).
struct RiccatiState {
  Complex j_plus, j_zero, j_minus;
  Complex k_plus, k_zero, k_minus;
};

/// Tighter than the integrator defaults: the algebraic route reconstructs
/// conjugate pairs (x, q) from different formulas, so ODE error shows up
/// directly as Hermiticity error.
OdeSettings riccati_settings();

/// Both Riccati families on `t_grid` (which must start at 0).
std::vector<RiccatiState> solve_riccati(const SystemParams& params, std::span<const double> t_grid,
                                        const OdeSettings& settings = riccati_settings());

/// Entries of the single-qubit map. The physical map is exp(-gamma_k) times
///   rho11 -> l rho11 + m rho00     rho10 -> x rho10 + y rho01
///   rho00 -> n rho00 + p rho11     rho01 -> q rho01 + r rho10
struct MapCoefficients {
  double l = 1.0, m = 0.0, n = 1.0, p = 0.0;
  Complex q{1.0, 0.0}, r{0.0, 0.0}, x{1.0, 0.0}, y{0.0, 0.0};
  double gamma_k = 0.0;

  static MapCoefficients identity() { return {}; }
  /// The physical map as a transfer matrix (exp(-gamma_k) folded in).
  TransferMatrix transfer() const;
};

/// Closed-form coefficients from the disentangling exponents. Throws
/// RangeError when an exponential overflows.
MapCoefficients map_coefficients(const RiccatiState& state, double gamma_k);

/// Inverse of MapCoefficients::transfer() for a given gamma_k.
MapCoefficients map_from_transfer(const TransferMatrix& transfer, double gamma_k);

// ---- Transfer-matrix route ----------------------------------------------

/// The master-equation generator at time t as a 4x4 matrix on vectorized states.
TransferMatrix generator_matrix(const CoefficientSet& c);

/// Integrates dT/dt = L(t) T from T(0) = identity; one matrix per grid time.
std::vector<TransferMatrix> build_transfer_matrix(const SystemParams& params,
                                                  std::span<const double> t_grid,
                                                  const OdeSettings& settings = {});

// ---- Applying the map ----------------------------------------------------

QubitState propagate_single(const QubitState& rho0, const MapCoefficients& coeffs);

/// Element formulas for X-shaped joint states with the exp(-2 gamma_k)
/// prefactor folded in. Throws StructureError for non-X input.
JointState assemble_joint(const JointState& rho0, const MapCoefficients& coeffs);

/// (T (x) T) applied to an arbitrary joint state.
JointState apply_joint_transfer(const TransferMatrix& transfer, const JointState& rho0);

/// Uniform grid start, start+step, ... up to and including stop (within step/1e6).
std::vector<double> uniform_grid(double start, double stop, double step);

}  // namespace esd
