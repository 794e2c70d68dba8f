#pragma once

#include "esd/entanglement.hpp"
#include "esd/kernels.hpp"
#include "esd/numerics.hpp"
#include "esd/propagator.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esd {

// ---- Direct integration of the master equation ---------------------------

/// The six superoperators of the time-local generator:
///   J0 r = [sz/4, r]      J+ r = s+ r s+      J- r = s- r s-
///   K0 r = (s+s- r + r s+s- - r)/2    K+ r = s+ r s-    K- r = s- r s+
enum class Superoperator { J0, JPlus, JMinus, K0, KPlus, KMinus };

/// Pauli operators of one atom embedded in the state space being evolved.
struct SiteOperators {
  Eigen::MatrixXcd sigma_z;
  Eigen::MatrixXcd sigma_plus;
  Eigen::MatrixXcd sigma_minus;

  static SiteOperators single();
  /// Operators of atom `site` (0 = A, 1 = B) on the two-qubit space.
  static SiteOperators joint(int site);
};

Eigen::MatrixXcd apply_superoperator(Superoperator op, const Eigen::MatrixXcd& rho,
                                     const SiteOperators& site);

/// Full right-hand side for one atom: -gamma_rate rho + eps0 J0 + eps+ J+ + ...
Eigen::MatrixXcd tcl_generator(const CoefficientSet& c, const Eigen::MatrixXcd& rho,
                               const SiteOperators& site);

/// Direct ODE integration of the single-atom master equation.
std::vector<QubitState> tcl_direct(const QubitState& rho0, const SystemParams& params,
                                   std::span<const double> t_grid, const OdeSettings& settings = {});

/// Direct ODE integration of the two-atom master equation with generator
/// L_A + L_B acting on the 4x4 joint density matrix.
std::vector<JointState> tcl_direct_joint(const JointState& rho0, const SystemParams& params,
                                         std::span<const double> t_grid,
                                         const OdeSettings& settings = {});

// ---- Truncated Rabi model --------------------------------------------------

enum class Coupling {
  Full,          // g sigma_x (a + a^dagger)
  RotatingWave,  // g (sigma_+ a + sigma_- a^dagger)
};

struct RabiConfig {
  int n_cut = 40;  // photon states 0 .. n_cut-1
  SystemParams params;
  Coupling coupling = Coupling::Full;

  void validate() const;
};

/// Atom (x) cavity Hamiltonian, index = atom * n_cut + photons with atom 0 = |1>.
Eigen::MatrixXcd rabi_hamiltonian(const RabiConfig& config);

struct RabiResult {
  std::vector<JointState> states;
  ConcurrenceSeries concurrence;
  std::vector<double> norms;  // total-state norm before tracing
  double max_off_x = 0.0;     // largest entry outside the X pattern
  int n_cut = 0;
  double truncation_residual = 0.0;  // max |C(n_cut) - C(2 n_cut)|, when checked
  bool truncation_converged = true;
};

/// Exact unitary evolution of both atom-cavity pairs from vacuum cavities.
RabiResult rabi_joint(const InitialStateSpec& spec, const RabiConfig& config,
                      std::span<const double> t_grid);

/// Doubles n_cut until the concurrence changes by less than `tolerance`, up
/// to `max_n_cut`. When it never settles the last result is returned with
/// truncation_converged = false and the measured residual.
RabiResult rabi_joint_converged(const InitialStateSpec& spec, const RabiConfig& config,
                                std::span<const double> t_grid, double tolerance = 1e-8,
                                int max_n_cut = 320);

// ---- Jaynes-Cummings closed form ---------------------------------------------

/// Amplitude of |1, vac> after time t under the single-excitation JC dynamics.
Complex jc_excited_amplitude(const SystemParams& params, double t);

/// Two-atom reduced state under the closed-form JC map.
JointState jc_joint_state(const InitialStateSpec& spec, const SystemParams& params, double t);

ConcurrenceSeries jc_reference(const InitialStateSpec& spec, const SystemParams& params,
                               std::span<const double> t_grid);

// ---- Figure scenarios ---------------------------------------------------------

enum class FigureId { Fig1, Fig2a, Fig2b, Fig2c, Fig3, Fig4a, Fig4b, Fig4c, Fig5, Fig6 };

inline constexpr std::array<FigureId, 10> kAllFigures = {
    FigureId::Fig1,  FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig2c, FigureId::Fig3,
    FigureId::Fig4a, FigureId::Fig4b, FigureId::Fig4c, FigureId::Fig5,  FigureId::Fig6};

enum class Engine { TclAlgebraic, TclRiccati, TclDirect, Rabi, JcRwa };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

std::string_view to_string(FigureId id);
/// Throws ValidationError listing the valid ids.
FigureId parse_figure_id(std::string_view text);

struct FigureScenario {
  FigureId id = FigureId::Fig1;
  SystemParams params;
  StateKind state = StateKind::Phi;
  Engine engine = Engine::TclAlgebraic;
  std::vector<double> beta_sq;  // default 50 points in (0, 1)
  double gt_max = 25.0;
  double gt_step = 0.05;
  std::string caption;
  /// Caption/body-text discrepancies; empty when there are none.
  std::string notes;
  /// Alternative omega0/g quoted in the body text, when it differs.
  double text_omega0 = 0.0;
};

/// Caption parameters are canonical; set `use_text_values` to run the body-text variant.
FigureScenario figure_scenario(FigureId id, bool use_text_values = false);

}  // namespace esd
