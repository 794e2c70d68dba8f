#pragma once

#include "esd/entanglement.hpp"
#include "esd/oracles.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esd {

inline constexpr double kDefaultRevivalThreshold = 1e-3;
inline constexpr double kDefaultZeroThreshold = 1e-6;

struct EngineOptions {
  int n_cut = 40;
  bool auto_truncation = false;  // rabi: double n_cut until converged
  OdeSettings ode;
};

/// Concurrence trajectory of one engine for one initial state.
struct EngineRun {
  std::vector<double> gt;
  std::vector<std::optional<JointState>> states;  // empty where the engine failed
  std::vector<double> concurrence;                // NaN where the engine failed
  std::vector<std::string> errors;                // empty string = no error
  std::string route;                              // which route produced the data
};

/// Precomputed single-qubit maps for the algebraic engines; independent of
/// the initial state so one computation serves a whole beta^2 sweep.
struct MapSeries {
  std::vector<double> gt;
  std::vector<std::optional<MapCoefficients>> maps;
  std::vector<std::string> errors;
  std::string route;
};

/// Riccati coefficients up to the first singularity. With `fallback` the
/// remaining points come from the transfer-matrix route; otherwise they are
/// reported as errors.
MapSeries algebraic_maps(const SystemParams& params, std::span<const double> gt_grid, bool fallback,
                         const OdeSettings& ode = {});

EngineRun run_engine(Engine engine, const InitialStateSpec& spec, const SystemParams& params,
                     std::span<const double> gt_grid, const EngineOptions& options = {});

/// Applies precomputed maps (tcl_algebraic / tcl_riccati) to one initial state.
EngineRun apply_maps(const MapSeries& maps, const InitialStateSpec& spec);

// ---- Scenario configuration ------------------------------------------------

struct ScenarioConfig {
  StateKind state = StateKind::Phi;
  std::vector<double> beta_sq = {0.5};
  double gt_start = 0.0;
  double gt_stop = 25.0;
  double gt_step = 0.01;
  SystemParams params;
  Engine engine = Engine::TclAlgebraic;
  std::optional<Engine> compare;  // cross-check engine
  std::string output;             // empty = stdout
  int n_cut = 40;
  bool auto_truncation = false;
  double phase = 0.0;
  double revival_threshold = kDefaultRevivalThreshold;
  double zero_threshold = kDefaultZeroThreshold;
  int threads = 0;  // 0 = ESD_THREADS or hardware concurrency

  std::vector<double> gt_grid() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Parses "a:b:step" into an inclusive uniform grid, or "x,y,z" into a list.
std::vector<double> parse_grid(std::string_view text, std::string_view field);

/// Flat key=value text with '#' comments. Throws ValidationError on malformed lines.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies one key (config-file spelling, e.g. "beta_sq" or "gt_step") to the config.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

ScenarioConfig load_config_file(const std::string& path);

// ---- Results -----------------------------------------------------------------

struct SweepRecord {
  Engine engine = Engine::TclAlgebraic;
  StateKind state = StateKind::Phi;
  double beta_sq = 0.0;
  double gt = 0.0;
  double concurrence = 0.0;
  double trace_residual = 0.0;
  double positivity_residual = 0.0;
  double hermiticity_residual = 0.0;
  std::string error;
};

struct SeriesSummary {
  double beta_sq = 0.0;
  double min_concurrence = 0.0;
  double max_concurrence = 0.0;
  std::optional<double> first_zero;  // first gt with C below the zero threshold
  int revival_count = 0;             // excursions above the revival threshold after a zero
  std::vector<double> revival_peaks;
};

/// Revival = a maximal run of samples at or above the zero threshold that
/// follows a zero, counted when its peak exceeds the revival threshold.
SeriesSummary summarize_series(double beta_sq, std::span<const double> gt, std::span<const double> values,
                               double zero_threshold = kDefaultZeroThreshold,
                               double revival_threshold = kDefaultRevivalThreshold);

/// Time from the first zero until C first climbs back to `recover_level`.
/// 0 when C never reaches zero, nullopt when it never recovers.
std::optional<double> dark_interval(std::span<const double> gt, std::span<const double> values,
                                    double zero_threshold, double recover_level);

struct ScenarioSummary {
  std::vector<SeriesSummary> series;
  double min_concurrence = 0.0;
  double max_concurrence = 0.0;
  double max_trace_residual = 0.0;
  double max_positivity_residual = 0.0;
  double max_hermiticity_residual = 0.0;
  std::size_t error_count = 0;
  std::optional<double> max_engine_difference;  // set in compare mode
  std::vector<std::string> routes;
};

struct JoinedRecord {
  double beta_sq = 0.0;
  double gt = 0.0;
  double concurrence_a = 0.0;
  double concurrence_b = 0.0;
};

struct ScenarioResult {
  std::vector<SweepRecord> records;  // beta^2-major, then gt
  std::vector<JoinedRecord> joined;  // compare mode only
  ScenarioSummary summary;
};

/// Worker count: ESD_THREADS when set and positive, else hardware concurrency.
int default_thread_count();

ScenarioResult run_scenario(const ScenarioConfig& config);

void write_csv(std::ostream& out, std::span<const SweepRecord> records);
void write_joined_csv(std::ostream& out, const ScenarioConfig& config, std::span<const JoinedRecord> joined);
void write_summary(std::ostream& out, const ScenarioConfig& config, const ScenarioSummary& summary);

/// Scenario for a figure on a 50 x 501 (beta^2, gt) grid over gt in [0, 25].
ScenarioConfig figure_config(const FigureScenario& scenario);

struct FigureOutput {
  FigureScenario scenario;
  ScenarioConfig config;
  ScenarioResult result;
};

/// Runs the figure's scenario; writes the dataset to `output` (stdout when
/// empty) and, for a file output, a "<output>.meta" key=value record.
FigureOutput reproduce_figure(FigureId id, const std::string& output, bool use_text_values = false,
                              std::optional<int> threads = std::nullopt);

void write_figure_metadata(std::ostream& out, const FigureScenario& scenario);

// ---- Cross-validation --------------------------------------------------------

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Fast oracle cross-checks behind the `check` subcommand.
std::vector<CheckResult> run_cross_validation();

}  // namespace esd
