#include "esd/oracles.hpp"

#include "esd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

namespace esd {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Pauli {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd minus = Eigen::MatrixXcd::Zero(2, 2);

  Pauli() {
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    plus(0, 1) = 1.0;   // |1><0|
    minus(1, 0) = 1.0;  // |0><1|
  }
};

}  // namespace

SiteOperators SiteOperators::single() {
  const Pauli s;
  return {s.z, s.plus, s.minus};
}

SiteOperators SiteOperators::joint(int site) {
  if (site != 0 && site != 1) throw ValidationError("SiteOperators::joint: site must be 0 or 1");
  const Pauli s;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  auto embed = [&](const Eigen::MatrixXcd& op) { return site == 0 ? kron(op, id) : kron(id, op); };
  return {embed(s.z), embed(s.plus), embed(s.minus)};
}

Eigen::MatrixXcd apply_superoperator(Superoperator op, const Eigen::MatrixXcd& rho,
                                     const SiteOperators& site) {
  const auto& sp = site.sigma_plus;
  const auto& sm = site.sigma_minus;
  switch (op) {
    case Superoperator::J0: {
      const Eigen::MatrixXcd q = 0.25 * site.sigma_z;
      return q * rho - rho * q;
    }
    case Superoperator::JPlus:
      return sp * rho * sp;
    case Superoperator::JMinus:
      return sm * rho * sm;
    case Superoperator::K0: {
      const Eigen::MatrixXcd n = sp * sm;
      return 0.5 * (n * rho + rho * n - rho);
    }
    case Superoperator::KPlus:
      return sp * rho * sm;
    case Superoperator::KMinus:
      return sm * rho * sp;
  }
  throw ValidationError("apply_superoperator: unknown superoperator");
}

Eigen::MatrixXcd tcl_generator(const CoefficientSet& c, const Eigen::MatrixXcd& rho,
                               const SiteOperators& site) {
  Eigen::MatrixXcd out = -c.gamma_rate * rho;
  out += c.eps0 * apply_superoperator(Superoperator::J0, rho, site);
  out += c.eps_plus * apply_superoperator(Superoperator::JPlus, rho, site);
  out += c.eps_minus * apply_superoperator(Superoperator::JMinus, rho, site);
  out += c.nu_plus * apply_superoperator(Superoperator::KPlus, rho, site);
  out += c.nu0 * apply_superoperator(Superoperator::K0, rho, site);
  out += c.nu_minus * apply_superoperator(Superoperator::KMinus, rho, site);
  return out;
}

namespace {

// Integrates rho' = sum over sites of tcl_generator for a dim x dim density matrix.
std::vector<Eigen::MatrixXcd> integrate_generator(const Eigen::MatrixXcd& rho0, const SystemParams& params,
                                                  const std::vector<SiteOperators>& sites,
                                                  std::span<const double> t_grid,
                                                  const OdeSettings& settings) {
  params.validate();
  const Eigen::Index dim = rho0.rows();
  auto rhs = [&](double t, const ComplexVector& y, ComplexVector& dy) {
    const CoefficientSet c = coefficient_set(t, params);
    const Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(y.data(), dim, dim);
    Eigen::Map<Eigen::MatrixXcd> rate(dy.data(), dim, dim);
    rate.setZero();
    for (const auto& site : sites) rate += tcl_generator(c, rho, site);
  };
  ComplexVector y0(rho0.data(), rho0.data() + rho0.size());
  const Trajectory traj = integrate_adaptive(rhs, y0, t_grid, settings);

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(traj.states.size());
  for (const auto& y : traj.states) out.emplace_back(Eigen::Map<const Eigen::MatrixXcd>(y.data(), dim, dim));
  return out;
}

}  // namespace

std::vector<QubitState> tcl_direct(const QubitState& rho0, const SystemParams& params,
                                   std::span<const double> t_grid, const OdeSettings& settings) {
  const auto traj = integrate_generator(rho0.rho, params, {SiteOperators::single()}, t_grid, settings);
  std::vector<QubitState> out;
  out.reserve(traj.size());
  for (const auto& m : traj) out.push_back({Matrix2(m)});
  return out;
}

std::vector<JointState> tcl_direct_joint(const JointState& rho0, const SystemParams& params,
                                         std::span<const double> t_grid, const OdeSettings& settings) {
  const auto traj = integrate_generator(rho0.rho, params, {SiteOperators::joint(0), SiteOperators::joint(1)},
                                        t_grid, settings);
  std::vector<JointState> out;
  out.reserve(traj.size());
  for (const auto& m : traj) out.push_back({Matrix4(m)});
  return out;
}

// ---- Rabi ----------------------------------------------------------------

void RabiConfig::validate() const {
  params.validate();
  if (n_cut < 8) throw ValidationError("RabiConfig.n_cut must be >= 8");
}

Eigen::MatrixXcd rabi_hamiltonian(const RabiConfig& config) {
  config.validate();
  const int n = config.n_cut;
  const auto& p = config.params;
  auto idx = [n](int atom, int photons) { return atom * n + photons; };

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    h(idx(0, k), idx(0, k)) = 0.5 * p.omega0 + p.omega * k;
    h(idx(1, k), idx(1, k)) = -0.5 * p.omega0 + p.omega * k;
  }
  for (int k = 0; k + 1 < n; ++k) {
    const double amp = p.g * std::sqrt(static_cast<double>(k + 1));
    // sigma_+ a: |0, k+1> -> |1, k>
    h(idx(0, k), idx(1, k + 1)) = amp;
    h(idx(1, k + 1), idx(0, k)) = amp;
    if (config.coupling == Coupling::Full) {
      // sigma_+ a^dagger: |0, k> -> |1, k+1>
      h(idx(0, k + 1), idx(1, k)) = amp;
      h(idx(1, k), idx(0, k + 1)) = amp;
    }
  }
  return h;
}

RabiResult rabi_joint(const InitialStateSpec& spec, const RabiConfig& config,
                      std::span<const double> t_grid) {
  spec.validate();
  const SpectralDecomposition spectrum = hermitian_eigensystem(rabi_hamiltonian(config));
  const int n = config.n_cut;

  // Product terms coef |atomA>|atomB> with atom index 0 = |1>, 1 = |0>.
  struct Term {
    Complex coef;
    int a;
    int b;
  };
  const Complex eta = spec.eta();
  const std::array<Term, 2> terms = spec.kind == StateKind::Phi
                                        ? std::array<Term, 2>{Term{spec.beta, 1, 0}, Term{eta, 0, 1}}
                                        : std::array<Term, 2>{Term{spec.beta, 1, 1}, Term{eta, 0, 0}};

  std::array<Eigen::VectorXcd, 2> start;
  for (int atom = 0; atom < 2; ++atom) {
    start[atom] = Eigen::VectorXcd::Zero(2 * n);
    start[atom][atom * n] = 1.0;  // |atom, vacuum>
  }

  RabiResult result;
  result.n_cut = n;
  for (double t : t_grid) {
    const std::array<Eigen::VectorXcd, 2> u = {unitary_evolve(spectrum, start[0], t),
                                               unitary_evolve(spectrum, start[1], t)};
    // field-traced overlaps G[i][j](a, a') = sum_n u_i(a, n) conj(u_j(a', n))
    Matrix2 overlap[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a)
          for (int ap = 0; ap < 2; ++ap)
            overlap[i][j](a, ap) = u[j].segment(ap * n, n).dot(u[i].segment(a * n, n));

    JointState state;
    for (const Term& k : terms)
      for (const Term& kp : terms) {
        const Complex w = k.coef * std::conj(kp.coef);
        const Matrix2& ga = overlap[k.a][kp.a];
        const Matrix2& gb = overlap[k.b][kp.b];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
              for (int bp = 0; bp < 2; ++bp) state.rho(2 * a + b, 2 * ap + bp) += w * ga(a, ap) * gb(b, bp);
      }

    result.norms.push_back(std::sqrt(state.rho.trace().real()));
    result.max_off_x = std::max(result.max_off_x, off_x_magnitude(state.rho));
    result.concurrence.times.push_back(t);
    result.concurrence.values.push_back(concurrence_general(state.rho));
    result.states.push_back(state);
  }
  return result;
}

RabiResult rabi_joint_converged(const InitialStateSpec& spec, const RabiConfig& config,
                                std::span<const double> t_grid, double tolerance, int max_n_cut) {
  RabiConfig current = config;
  RabiResult coarse = rabi_joint(spec, current, t_grid);
  while (true) {
    RabiConfig finer = current;
    finer.n_cut = 2 * current.n_cut;
    RabiResult fine = rabi_joint(spec, finer, t_grid);
    double residual = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      residual = std::max(residual, std::abs(fine.concurrence.values[i] - coarse.concurrence.values[i]));
    fine.truncation_residual = residual;
    fine.truncation_converged = residual < tolerance;
    if (fine.truncation_converged || 2 * finer.n_cut > max_n_cut) return fine;
    current = finer;
    coarse = std::move(fine);
  }
}

// ---- Jaynes-Cummings -------------------------------------------------------

Complex jc_excited_amplitude(const SystemParams& params, double t) {
  const double half_detuning = 0.5 * params.detuning();
  const double rabi = std::hypot(params.g, half_detuning);
  const Complex envelope(std::cos(rabi * t), -half_detuning / rabi * std::sin(rabi * t));
  return std::polar(1.0, -0.5 * params.omega * t) * envelope;
}

JointState jc_joint_state(const InitialStateSpec& spec, const SystemParams& params, double t) {
  params.validate();
  const Complex c = jc_excited_amplitude(params, t);
  const Complex ground_phase = std::polar(1.0, 0.5 * params.omega0 * t);
  const double survival = std::norm(c);

  TransferMatrix map = TransferMatrix::Zero();
  map(0, 0) = survival;
  map(3, 0) = 1.0 - survival;
  map(3, 3) = 1.0;
  map(1, 1) = c * std::conj(ground_phase);
  map(2, 2) = std::conj(map(1, 1));
  return apply_joint_transfer(map, initial_state(spec));
}

ConcurrenceSeries jc_reference(const InitialStateSpec& spec, const SystemParams& params,
                               std::span<const double> t_grid) {
  ConcurrenceSeries out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.values.reserve(t_grid.size());
  for (double t : t_grid) out.values.push_back(concurrence_x(jc_joint_state(spec, params, t)));
  return out;
}

// ---- Names -----------------------------------------------------------------

namespace {

std::string lowercase(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

constexpr std::array<std::pair<Engine, std::string_view>, 5> kEngineNames = {{
    {Engine::TclAlgebraic, "tcl_algebraic"},
    {Engine::TclRiccati, "tcl_riccati"},
    {Engine::TclDirect, "tcl_direct"},
    {Engine::Rabi, "rabi"},
    {Engine::JcRwa, "jc_rwa"},
}};

constexpr std::array<std::string_view, 10> kFigureNames = {"Fig1",  "Fig2a", "Fig2b", "Fig2c", "Fig3",
                                                           "Fig4a", "Fig4b", "Fig4c", "Fig5",  "Fig6"};

}  // namespace

std::string_view to_string(Engine engine) {
  for (const auto& [e, name] : kEngineNames)
    if (e == engine) return name;
  return "unknown";
}

Engine parse_engine(std::string_view text) {
  const std::string key = lowercase(text);
  for (const auto& [e, name] : kEngineNames)
    if (key == name) return e;
  throw ValidationError("engine: unknown engine '" + std::string(text) +
                        "' (expected tcl_algebraic, tcl_riccati, tcl_direct, rabi or jc_rwa)");
}

std::string_view to_string(FigureId id) { return kFigureNames[static_cast<std::size_t>(id)]; }

FigureId parse_figure_id(std::string_view text) {
  const std::string key = lowercase(text);
  for (std::size_t i = 0; i < kFigureNames.size(); ++i)
    if (key == lowercase(kFigureNames[i])) return kAllFigures[i];
  std::string valid;
  for (auto name : kFigureNames) valid += (valid.empty() ? "" : ", ") + std::string(name);
  throw ValidationError("unknown figure id '" + std::string(text) + "'; valid ids: " + valid);
}

FigureScenario figure_scenario(FigureId id, bool use_text_values) {
  FigureScenario s;
  s.id = id;
  for (int k = 1; k <= 50; ++k) s.beta_sq.push_back(k / 51.0);

  auto resonant = [&](double omega0, StateKind state, Engine engine) {
    s.params = SystemParams::from_detuning(omega0, 0.0);
    s.state = state;
    s.engine = engine;
  };
  auto alternate = [&](double caption_omega0, double text_omega0) {
    s.text_omega0 = text_omega0;
    std::ostringstream note;
    note << "omega0/g = " << caption_omega0 << " (figure label); alternate value " << text_omega0
         << " quoted in the discussion";
    s.notes = note.str();
    if (use_text_values) s.params = SystemParams::from_detuning(text_omega0, 0.0);
  };

  switch (id) {
    case FigureId::Fig1:
      resonant(30.0, StateKind::Phi, Engine::JcRwa);
      s.caption = "C_Phi vs gt and beta^2, resonant, rotating-wave (Jaynes-Cummings) model";
      s.notes = "no frequencies given; JC concurrence depends only on g and the detuning";
      break;
    case FigureId::Fig2a:
      resonant(1.5, StateKind::Phi, Engine::TclAlgebraic);
      s.caption = "C_Phi vs gt and beta^2, delta = 0, omega0 = 1.5 g";
      break;
    case FigureId::Fig2b:
      resonant(3.0, StateKind::Phi, Engine::TclAlgebraic);
      s.caption = "C_Phi vs gt and beta^2, delta = 0, omega0 = 3 g";
      break;
    case FigureId::Fig2c:
      resonant(30.0, StateKind::Phi, Engine::TclAlgebraic);
      s.caption = "C_Phi vs gt and beta^2, delta = 0, omega0 = 30 g";
      break;
    case FigureId::Fig3:
      resonant(30.0, StateKind::Psi, Engine::JcRwa);
      s.caption = "C_Psi vs gt and beta^2, resonant, rotating-wave (Jaynes-Cummings) model";
      s.notes = "no frequencies given; JC concurrence depends only on g and the detuning";
      break;
    case FigureId::Fig4a:
      resonant(2.0, StateKind::Psi, Engine::TclAlgebraic);
      s.caption = "C_Psi vs gt and beta^2, delta = 0, omega0 = 2 g";
      alternate(2.0, 1.5);
      break;
    case FigureId::Fig4b:
      resonant(3.5, StateKind::Psi, Engine::TclAlgebraic);
      s.caption = "C_Psi vs gt and beta^2, delta = 0, omega0 = 3.5 g";
      alternate(3.5, 3.0);
      break;
    case FigureId::Fig4c:
      resonant(40.0, StateKind::Psi, Engine::TclAlgebraic);
      s.caption = "C_Psi vs gt and beta^2, delta = 0, omega0 = 40 g";
      alternate(40.0, 30.0);
      break;
    case FigureId::Fig5:
      s.params = SystemParams::from_detuning(10.0, 1.0);
      s.state = StateKind::Phi;
      s.engine = Engine::TclAlgebraic;
      s.caption = "C_Phi vs gt and beta^2, omega0 = 10 g, delta = 0.1 omega0";
      s.notes = "figure label names C_Psi for both detuned plots; the Phi/Psi split follows the discussion";
      break;
    case FigureId::Fig6:
      s.params = SystemParams::from_detuning(10.0, 1.0);
      s.state = StateKind::Psi;
      s.engine = Engine::TclAlgebraic;
      s.caption = "C_Psi vs gt and beta^2, omega0 = 10 g, delta = 0.1 omega0";
      s.notes = "figure label is identical to Fig5";
      break;
  }
  return s;
}

}  // namespace esd
