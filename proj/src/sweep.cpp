#include "esd/sweep.hpp"

#include "esd/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace esd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Maps gt samples to times 1/g and prepends t = 0 when the grid starts later.
struct TimeGrid {
  std::vector<double> times;
  std::size_t offset = 0;  // index of the first requested sample in `times`
};

TimeGrid to_times(std::span<const double> gt_grid, double g) {
  TimeGrid grid;
  if (!gt_grid.empty() && gt_grid.front() != 0.0) {
    grid.times.push_back(0.0);
    grid.offset = 1;
  }
  for (double gt : gt_grid) grid.times.push_back(gt / g);
  return grid;
}

std::string format_gt(double gt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", gt);
  return buf;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

// ---- Engines -------------------------------------------------------------------

MapSeries algebraic_maps(const SystemParams& params, std::span<const double> gt_grid, bool fallback,
                         const OdeSettings& ode) {
  params.validate();
  const TimeGrid grid = to_times(gt_grid, params.g);
  const std::size_t total = grid.times.size();

  std::vector<RiccatiState> riccati;
  std::size_t covered = total;
  std::string failure;
  try {
    riccati = solve_riccati(params, grid.times);
  } catch (const NumericalError& e) {
    failure = e.what();
    const double t_fail = e.time().value_or(0.0);
    covered = static_cast<std::size_t>(
        std::lower_bound(grid.times.begin(), grid.times.end(), t_fail) - grid.times.begin());
    riccati.clear();
    if (covered > 0) {
      try {
        riccati = solve_riccati(params, std::span(grid.times).first(covered));
      } catch (const NumericalError&) {
        covered = 0;
      }
    }
  }

  std::vector<std::optional<MapCoefficients>> maps(total);
  for (std::size_t i = 0; i < covered; ++i) {
    try {
      maps[i] = map_coefficients(riccati[i], evaluate_kernels(grid.times[i], params).gamma_k);
    } catch (const RangeError& e) {
      failure = e.what();
      covered = i;
      maps[i].reset();
      break;
    }
  }

  MapSeries out;
  out.gt.assign(gt_grid.begin(), gt_grid.end());
  out.route = "riccati";
  std::vector<std::string> errors(total);
  if (covered < total) {
    if (fallback) {
      const auto transfer = build_transfer_matrix(params, grid.times, ode);
      for (std::size_t i = covered; i < total; ++i)
        maps[i] = map_from_transfer(transfer[i], evaluate_kernels(grid.times[i], params).gamma_k);
      out.route = covered == 0 ? "transfer"
                               : "riccati+transfer from gt=" + format_gt(grid.times[covered] * params.g);
    } else {
      for (std::size_t i = covered; i < total; ++i) errors[i] = failure;
    }
  }
  out.maps.assign(maps.begin() + static_cast<std::ptrdiff_t>(grid.offset), maps.end());
  out.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(grid.offset), errors.end());
  return out;
}

EngineRun apply_maps(const MapSeries& maps, const InitialStateSpec& spec) {
  const JointState rho0 = initial_state(spec);
  EngineRun run;
  run.gt = maps.gt;
  run.route = maps.route;
  run.states.resize(maps.gt.size());
  run.concurrence.assign(maps.gt.size(), kNaN);
  run.errors = maps.errors;
  for (std::size_t i = 0; i < maps.gt.size(); ++i) {
    if (!maps.maps[i]) continue;
    try {
      run.states[i] = assemble_joint(rho0, *maps.maps[i]);
      run.concurrence[i] = concurrence_x(*run.states[i]);
    } catch (const Error& e) {
      run.states[i].reset();
      run.errors[i] = e.what();
    }
  }
  return run;
}

namespace {

// X-shaped states use the closed form; it stays well conditioned where a
// 2x2 block is rank deficient, which the eigenvalue route is not.
double concurrence_auto(const JointState& state) {
  return off_x_magnitude(state.rho) <= 1e-10 ? concurrence_x(state) : concurrence_general(state.rho);
}

EngineRun from_states(std::span<const double> gt_grid, std::vector<JointState> states, std::string route) {
  EngineRun run;
  run.gt.assign(gt_grid.begin(), gt_grid.end());
  run.route = std::move(route);
  run.errors.resize(gt_grid.size());
  run.concurrence.assign(gt_grid.size(), kNaN);
  run.states.resize(gt_grid.size());
  for (std::size_t i = 0; i < gt_grid.size(); ++i) {
    try {
      run.concurrence[i] = concurrence_auto(states[i]);
      run.states[i] = states[i];
    } catch (const Error& e) {
      run.errors[i] = e.what();
    }
  }
  return run;
}

}  // namespace

EngineRun run_engine(Engine engine, const InitialStateSpec& spec, const SystemParams& params,
                     std::span<const double> gt_grid, const EngineOptions& options) {
  spec.validate();
  params.validate();
  switch (engine) {
    case Engine::TclAlgebraic:
      return apply_maps(algebraic_maps(params, gt_grid, true, options.ode), spec);
    case Engine::TclRiccati:
      return apply_maps(algebraic_maps(params, gt_grid, false, options.ode), spec);
    case Engine::TclDirect: {
      const TimeGrid grid = to_times(gt_grid, params.g);
      auto states = tcl_direct_joint(initial_state(spec), params, grid.times, options.ode);
      states.erase(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(grid.offset));
      return from_states(gt_grid, std::move(states), "direct");
    }
    case Engine::Rabi: {
      RabiConfig config{options.n_cut, params, Coupling::Full};
      const TimeGrid grid = to_times(gt_grid, params.g);
      const std::span<const double> times = std::span(grid.times).subspan(grid.offset);
      RabiResult result =
          options.auto_truncation ? rabi_joint_converged(spec, config, times) : rabi_joint(spec, config, times);
      std::string route = "rabi n_cut=" + std::to_string(result.n_cut);
      if (options.auto_truncation && !result.truncation_converged)
        route += " (unconverged, residual " + format_gt(result.truncation_residual) + ")";
      return from_states(gt_grid, std::move(result.states), std::move(route));
    }
    case Engine::JcRwa: {
      std::vector<JointState> states;
      states.reserve(gt_grid.size());
      for (double gt : gt_grid) states.push_back(jc_joint_state(spec, params, gt / params.g));
      return from_states(gt_grid, std::move(states), "jc closed form");
    }
  }
  throw ValidationError("run_engine: unknown engine");
}

// ---- Configuration ---------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(std::string_view text, std::string_view field) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    throw ValidationError(std::string(field) + ": expected a number, got '" + s + "'");
  return value;
}

int parse_int(std::string_view text, std::string_view field) {
  const double v = parse_number(text, field);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ValidationError(std::string(field) + ": expected an integer");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view text, std::string_view field) {
  const std::string s = trim(text);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ValidationError(std::string(field) + ": expected true or false");
}

std::string normalize_key(std::string_view key) {
  std::string k = trim(key);
  std::replace(k.begin(), k.end(), '-', '_');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return k;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text, std::string_view field) {
  const std::string s = trim(text);
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ValidationError(std::string(field) + ": range must be start:stop:step");
    const double start = parse_number(parts[0], field);
    const double stop = parse_number(parts[1], field);
    const double step = parse_number(parts[2], field);
    if (!(step > 0.0) || stop < start)
      throw ValidationError(std::string(field) + ": range needs step > 0 and stop >= start");
    return uniform_grid(start, stop, step);
  }
  std::vector<double> values;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) values.push_back(parse_number(item, field));
  if (values.empty()) throw ValidationError(std::string(field) + ": empty list");
  return values;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::stringstream ss{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = normalize_key(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

void apply_setting(ScenarioConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = normalize_key(raw_key);
  const double detuning = c.params.detuning();
  if (key == "state") {
    c.state = parse_state_kind(trim(value));
  } else if (key == "beta_sq") {
    c.beta_sq = parse_grid(value, key);
  } else if (key == "gt") {
    const auto parts = parse_grid(value, key);
    if (trim(value).find(':') == std::string::npos) throw ValidationError("gt: expected start:stop:step");
    std::vector<std::string> fields;
    std::stringstream ss(trim(value));
    for (std::string part; std::getline(ss, part, ':');) fields.push_back(part);
    c.gt_start = parse_number(fields[0], key);
    c.gt_stop = parse_number(fields[1], key);
    c.gt_step = parse_number(fields[2], key);
    (void)parts;
  } else if (key == "gt_start") {
    c.gt_start = parse_number(value, key);
  } else if (key == "gt_max" || key == "gt_stop") {
    c.gt_stop = parse_number(value, key);
  } else if (key == "gt_step") {
    c.gt_step = parse_number(value, key);
  } else if (key == "omega0") {
    c.params.omega0 = parse_number(value, key);
    c.params.omega = c.params.omega0 - detuning;  // keep the detuning fixed
  } else if (key == "delta") {
    c.params.omega = c.params.omega0 - parse_number(value, key);
  } else if (key == "delta_rel") {
    c.params.omega = c.params.omega0 * (1.0 - parse_number(value, key));
  } else if (key == "omega") {
    c.params.omega = parse_number(value, key);
  } else if (key == "g") {
    c.params.g = parse_number(value, key);
  } else if (key == "engine") {
    c.engine = parse_engine(trim(value));
  } else if (key == "compare") {
    const std::string v = trim(value);
    if (v.empty() || v == "none") c.compare.reset();
    else c.compare = parse_engine(v);
  } else if (key == "out" || key == "output") {
    c.output = trim(value);
  } else if (key == "n_cut") {
    c.n_cut = parse_int(value, key);
  } else if (key == "auto_truncation") {
    c.auto_truncation = parse_bool(value, key);
  } else if (key == "phase") {
    c.phase = parse_number(value, key);
  } else if (key == "revival_threshold") {
    c.revival_threshold = parse_number(value, key);
  } else if (key == "zero_threshold") {
    c.zero_threshold = parse_number(value, key);
  } else if (key == "threads") {
    c.threads = parse_int(value, key);
  } else {
    throw ValidationError("unknown config key '" + std::string(raw_key) + "'");
  }
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  ScenarioConfig config;
  // omega0 before delta so that a relative detuning sees the final omega0
  auto entries = parse_key_values(buffer.str());
  if (auto it = entries.find("omega0"); it != entries.end()) {
    apply_setting(config, it->first, it->second);
    entries.erase(it);
  }
  for (const auto& [key, value] : entries) apply_setting(config, key, value);
  return config;
}

std::vector<double> ScenarioConfig::gt_grid() const { return uniform_grid(gt_start, gt_stop, gt_step); }

void ScenarioConfig::validate() const {
  if (beta_sq.empty()) throw ValidationError("beta_sq: grid is empty");
  for (double b : beta_sq)
    if (!(b > 0.0 && b < 1.0)) throw ValidationError("beta_sq: values must lie in (0, 1)");
  if (!std::is_sorted(beta_sq.begin(), beta_sq.end()) ||
      std::adjacent_find(beta_sq.begin(), beta_sq.end()) != beta_sq.end())
    throw ValidationError("beta_sq: grid must be strictly ascending");
  if (!(gt_start >= 0.0)) throw ValidationError("gt_start: must be >= 0");
  if (!(gt_step > 0.0)) throw ValidationError("gt_step: must be > 0");
  if (!(gt_stop >= gt_start)) throw ValidationError("gt_max: must be >= gt_start");
  try {
    params.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  if (!(params.g > 0.0)) throw ValidationError("g: must be > 0 (time grid is in units of 1/g)");
  if ((engine == Engine::Rabi || compare == Engine::Rabi) && n_cut < 8)
    throw ValidationError("n_cut: must be >= 8");
  if (!(zero_threshold > 0.0)) throw ValidationError("zero_threshold: must be > 0");
  if (!(revival_threshold > zero_threshold))
    throw ValidationError("revival_threshold: must exceed zero_threshold");
  if (threads < 0) throw ValidationError("threads: must be >= 0");
}

// ---- Summaries ------------------------------------------------------------------------

SeriesSummary summarize_series(double beta_sq, std::span<const double> gt, std::span<const double> values,
                               double zero_threshold, double revival_threshold) {
  SeriesSummary s;
  s.beta_sq = beta_sq;
  s.min_concurrence = std::numeric_limits<double>::infinity();
  s.max_concurrence = -std::numeric_limits<double>::infinity();

  bool seen_zero = false;
  bool in_excursion = false;
  double peak = 0.0;
  auto close = [&] {
    if (in_excursion && peak > revival_threshold) {
      ++s.revival_count;
      s.revival_peaks.push_back(peak);
    }
    in_excursion = false;
    peak = 0.0;
  };

  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    s.min_concurrence = std::min(s.min_concurrence, v);
    s.max_concurrence = std::max(s.max_concurrence, v);
    if (v < zero_threshold) {
      if (!seen_zero) s.first_zero = gt[i];
      close();
      seen_zero = true;
    } else if (seen_zero) {
      in_excursion = true;
      peak = std::max(peak, v);
    }
  }
  close();
  if (s.min_concurrence > s.max_concurrence) s.min_concurrence = s.max_concurrence = kNaN;
  return s;
}

std::optional<double> dark_interval(std::span<const double> gt, std::span<const double> values,
                                    double zero_threshold, double recover_level) {
  std::size_t i = 0;
  while (i < values.size() && !(values[i] < zero_threshold)) ++i;
  if (i == values.size()) return 0.0;
  const double start = gt[i];
  for (; i < values.size(); ++i)
    if (values[i] >= recover_level) return gt[i] - start;
  return std::nullopt;
}

// ---- Running ---------------------------------------------------------------------------

int default_thread_count() {
  if (const char* env = std::getenv("ESD_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min<long>(n, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// One engine over the full beta^2 grid; per-beta^2 failures become error runs.
std::vector<EngineRun> run_engine_grid(Engine engine, const ScenarioConfig& config,
                                       std::span<const double> gt_grid, int threads) {
  EngineOptions options;
  options.n_cut = config.n_cut;
  options.auto_truncation = config.auto_truncation;

  std::optional<MapSeries> maps;
  std::string shared_failure;
  if (engine == Engine::TclAlgebraic || engine == Engine::TclRiccati) {
    try {
      maps = algebraic_maps(config.params, gt_grid, engine == Engine::TclAlgebraic, options.ode);
    } catch (const NumericalError& e) {
      shared_failure = e.what();
    }
  }

  std::vector<EngineRun> runs(config.beta_sq.size());
  parallel_for(runs.size(), threads, [&](std::size_t b) {
    const auto spec = InitialStateSpec::from_beta_sq(config.state, config.beta_sq[b], config.phase);
    try {
      if (!shared_failure.empty()) throw NumericalError(shared_failure);
      runs[b] = maps ? apply_maps(*maps, spec) : run_engine(engine, spec, config.params, gt_grid, options);
    } catch (const NumericalError& e) {
      EngineRun failed;
      failed.gt.assign(gt_grid.begin(), gt_grid.end());
      failed.states.resize(gt_grid.size());
      failed.concurrence.assign(gt_grid.size(), kNaN);
      failed.errors.assign(gt_grid.size(), e.what());
      failed.route = "failed";
      runs[b] = std::move(failed);
    }
  });
  return runs;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::vector<double> gt_grid = config.gt_grid();
  const int threads = config.threads > 0 ? config.threads : default_thread_count();

  const auto runs = run_engine_grid(config.engine, config, gt_grid, threads);

  ScenarioResult result;
  ScenarioSummary& summary = result.summary;
  summary.min_concurrence = std::numeric_limits<double>::infinity();
  summary.max_concurrence = -std::numeric_limits<double>::infinity();
  result.records.reserve(runs.size() * gt_grid.size());

  for (std::size_t b = 0; b < runs.size(); ++b) {
    const EngineRun& run = runs[b];
    if (std::find(summary.routes.begin(), summary.routes.end(), run.route) == summary.routes.end())
      summary.routes.push_back(run.route);
    for (std::size_t i = 0; i < gt_grid.size(); ++i) {
      SweepRecord rec;
      rec.engine = config.engine;
      rec.state = config.state;
      rec.beta_sq = config.beta_sq[b];
      rec.gt = gt_grid[i];
      rec.concurrence = run.concurrence[i];
      rec.error = run.errors[i];
      if (run.states[i]) {
        const Matrix4& rho = run.states[i]->rho;
        rec.trace_residual = trace_residual(rho);
        rec.positivity_residual = positivity_residual(rho);
        rec.hermiticity_residual = hermiticity_residual(rho);
        summary.max_trace_residual = std::max(summary.max_trace_residual, rec.trace_residual);
        summary.max_positivity_residual = std::max(summary.max_positivity_residual, rec.positivity_residual);
        summary.max_hermiticity_residual =
            std::max(summary.max_hermiticity_residual, rec.hermiticity_residual);
      } else {
        rec.trace_residual = rec.positivity_residual = rec.hermiticity_residual = kNaN;
      }
      if (std::isnan(rec.concurrence)) {
        ++summary.error_count;
      } else {
        summary.min_concurrence = std::min(summary.min_concurrence, rec.concurrence);
        summary.max_concurrence = std::max(summary.max_concurrence, rec.concurrence);
      }
      result.records.push_back(std::move(rec));
    }
    summary.series.push_back(summarize_series(config.beta_sq[b], gt_grid, run.concurrence,
                                              config.zero_threshold, config.revival_threshold));
  }
  if (summary.min_concurrence > summary.max_concurrence) summary.min_concurrence = summary.max_concurrence = kNaN;

  if (config.compare) {
    const auto other = run_engine_grid(*config.compare, config, gt_grid, threads);
    double worst = 0.0;
    for (std::size_t b = 0; b < runs.size(); ++b)
      for (std::size_t i = 0; i < gt_grid.size(); ++i) {
        const JoinedRecord j{config.beta_sq[b], gt_grid[i], runs[b].concurrence[i], other[b].concurrence[i]};
        if (!std::isnan(j.concurrence_a) && !std::isnan(j.concurrence_b))
          worst = std::max(worst, std::abs(j.concurrence_a - j.concurrence_b));
        result.joined.push_back(j);
      }
    summary.max_engine_difference = worst;
  }
  return result;
}

// ---- Output -------------------------------------------------------------------------------

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "engine,state,beta_sq,gt,concurrence,trace_residual,positivity_residual\n";
  for (const auto& r : records)
    out << to_string(r.engine) << ',' << to_string(r.state) << ',' << num(r.beta_sq) << ',' << num(r.gt) << ','
        << num(r.concurrence) << ',' << num(r.trace_residual) << ',' << num(r.positivity_residual) << '\n';
}

void write_joined_csv(std::ostream& out, const ScenarioConfig& config, std::span<const JoinedRecord> joined) {
  const std::string a(to_string(config.engine));
  const std::string b(config.compare ? to_string(*config.compare) : "none");
  out << "beta_sq,gt,concurrence_" << a << ",concurrence_" << b << ",abs_diff\n";
  for (const auto& j : joined)
    out << num(j.beta_sq) << ',' << num(j.gt) << ',' << num(j.concurrence_a) << ',' << num(j.concurrence_b) << ','
        << num(std::abs(j.concurrence_a - j.concurrence_b)) << '\n';
}

void write_summary(std::ostream& out, const ScenarioConfig& config, const ScenarioSummary& s) {
  out << "summary engine=" << to_string(config.engine) << " state=" << to_string(config.state)
      << " omega0=" << num(config.params.omega0) << " delta=" << num(config.params.detuning())
      << " g=" << num(config.params.g) << '\n';
  for (const auto& route : s.routes) out << "summary route=" << route << '\n';
  for (const auto& series : s.series) {
    out << "summary beta_sq=" << num(series.beta_sq) << " min=" << num(series.min_concurrence)
        << " max=" << num(series.max_concurrence)
        << " first_zero=" << (series.first_zero ? num(*series.first_zero) : std::string("none"))
        << " revivals=" << series.revival_count;
    if (!series.revival_peaks.empty()) {
      out << " peaks=";
      for (std::size_t k = 0; k < series.revival_peaks.size(); ++k)
        out << (k ? ";" : "") << num(series.revival_peaks[k]);
    }
    out << '\n';
  }
  out << "summary min=" << num(s.min_concurrence) << " max=" << num(s.max_concurrence)
      << " max_trace_residual=" << num(s.max_trace_residual)
      << " max_positivity_residual=" << num(s.max_positivity_residual)
      << " max_hermiticity_residual=" << num(s.max_hermiticity_residual) << " errors=" << s.error_count << '\n';
  if (s.max_engine_difference)
    out << "summary compare=" << (config.compare ? to_string(*config.compare) : "none")
        << " max_abs_diff=" << num(*s.max_engine_difference) << '\n';
}

ScenarioConfig figure_config(const FigureScenario& scenario) {
  ScenarioConfig c;
  c.state = scenario.state;
  c.beta_sq = scenario.beta_sq;
  c.gt_start = 0.0;
  c.gt_stop = scenario.gt_max;
  c.gt_step = scenario.gt_step;
  c.params = scenario.params;
  c.engine = scenario.engine;
  return c;
}

void write_figure_metadata(std::ostream& out, const FigureScenario& s) {
  out << "figure=" << to_string(s.id) << '\n'
      << "description=" << s.caption << '\n'
      << "state=" << to_string(s.state) << '\n'
      << "engine=" << to_string(s.engine) << '\n'
      << "omega0=" << num(s.params.omega0) << '\n'
      << "omega=" << num(s.params.omega) << '\n'
      << "delta=" << num(s.params.detuning()) << '\n'
      << "g=" << num(s.params.g) << '\n'
      << "beta_sq_points=" << s.beta_sq.size() << '\n'
      << "gt_max=" << num(s.gt_max) << '\n'
      << "gt_step=" << num(s.gt_step) << '\n';
  if (s.text_omega0 > 0.0) out << "alternate_omega0=" << num(s.text_omega0) << '\n';
  if (!s.notes.empty()) out << "notes=" << s.notes << '\n';
}

FigureOutput reproduce_figure(FigureId id, const std::string& output, bool use_text_values,
                              std::optional<int> threads) {
  FigureOutput fig;
  fig.scenario = figure_scenario(id, use_text_values);
  fig.config = figure_config(fig.scenario);
  fig.config.output = output;
  if (threads) fig.config.threads = *threads;
  fig.result = run_scenario(fig.config);

  if (output.empty()) return fig;  // caller prints to stdout
  std::ofstream data(output);
  if (!data) throw ValidationError("cannot write '" + output + "'");
  write_csv(data, fig.result.records);
  std::ofstream meta(output + ".meta");
  if (!meta) throw ValidationError("cannot write '" + output + ".meta'");
  write_figure_metadata(meta, fig.scenario);
  return fig;
}

// ---- Cross-validation ---------------------------------------------------------------------------

namespace {

// Adaptive Gauss-Kronrod quadrature of a complex integrand on [0, t].
template <class Fn>
Complex quadrature(Fn&& fn, double t) {
  using boost::math::quadrature::gauss_kronrod;
  const auto re = gauss_kronrod<double, 61>::integrate([&](double s) { return fn(s).real(); }, 0.0, t, 12, 1e-11);
  const auto im = gauss_kronrod<double, 61>::integrate([&](double s) { return fn(s).imag(); }, 0.0, t, 12, 1e-11);
  return {re, im};
}

CheckResult make_check(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, measured < tolerance};
}

}  // namespace

std::vector<CheckResult> run_cross_validation() {
  std::vector<CheckResult> checks;

  {  // kernel integrals against quadrature of their integrands
    double worst = 0.0;
    for (const auto& p : {SystemParams::from_detuning(1.5, 0.0), SystemParams::from_detuning(10.0, 1.0)})
      for (double t : {0.7, 3.3, 11.0, 25.0}) {
        const KernelValues k = evaluate_kernels(t, p);
        const Complex alpha_q = quadrature([&](double s) { return evaluate_kernels(s, p).alpha; }, t);
        const Complex f_q = quadrature([&](double s) { return evaluate_kernels(s, p).f; }, t);
        worst = std::max({worst, std::abs(alpha_q - k.alpha_tilde), std::abs(f_q - k.F_int)});
      }
    checks.push_back(make_check("kernel integrals vs Gauss-Kronrod quadrature", worst, 1e-9));
  }

  {  // Riccati coefficients against the transfer matrix
    const auto p = SystemParams::from_detuning(30.0, 0.0);
    const auto grid = uniform_grid(0.0, 25.0, 0.05);
    const auto ric = solve_riccati(p, grid);
    const auto tm = build_transfer_matrix(p, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto m = map_coefficients(ric[i], evaluate_kernels(grid[i], p).gamma_k);
      worst = std::max(worst, (m.transfer() - tm[i]).cwiseAbs().maxCoeff());
    }
    checks.push_back(make_check("riccati vs transfer matrix (omega0=30g)", worst, 1e-7));
  }

  for (FigureId id : {FigureId::Fig2a, FigureId::Fig4a, FigureId::Fig5}) {
    const FigureScenario s = figure_scenario(id);
    const auto grid = uniform_grid(0.0, 25.0, 0.05);
    const MapSeries maps = algebraic_maps(s.params, grid, true);
    double worst = 0.0;
    for (double b2 : {0.2, 0.5, 0.8}) {
      const auto spec = InitialStateSpec::from_beta_sq(s.state, b2);
      const EngineRun a = apply_maps(maps, spec);
      const EngineRun d = run_engine(Engine::TclDirect, spec, s.params, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(a.concurrence[i] - d.concurrence[i]));
    }
    checks.push_back(make_check("tcl_algebraic vs tcl_direct " + std::string(to_string(id)), worst, 1e-6));
  }

  {  // X-state closed form against the Wootters eigenvalue route
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::Vector4d p;
      for (int k = 0; k < 4; ++k) p[k] = unit(rng) + 1e-3;
      p /= p.sum();
      JointState x;
      for (int k = 0; k < 4; ++k) x.rho(k, k) = p[k];
      x.rho(1, 2) = std::polar(unit(rng) * std::sqrt(p[1] * p[2]), 6.283185307179586 * unit(rng));
      x.rho(2, 1) = std::conj(x.rho(1, 2));
      x.rho(0, 3) = std::polar(unit(rng) * std::sqrt(p[0] * p[3]), 6.283185307179586 * unit(rng));
      x.rho(3, 0) = std::conj(x.rho(0, 3));
      worst = std::max(worst, std::abs(concurrence_x(x) - concurrence_general(x.rho)));
    }
    checks.push_back(make_check("concurrence_x vs concurrence_general (200 X states)", worst, 1e-8));
  }

  {  // JC closed form against a truncated rotating-wave Hamiltonian
    const auto p = SystemParams::from_detuning(10.0, 1.0);
    const auto grid = uniform_grid(0.0, 10.0, 0.1);
    double worst = 0.0;
    for (StateKind kind : {StateKind::Phi, StateKind::Psi}) {
      const auto spec = InitialStateSpec::from_beta_sq(kind, 0.3);
      const ConcurrenceSeries closed = jc_reference(spec, p, grid);
      const RabiResult rwa = rabi_joint(spec, RabiConfig{8, p, Coupling::RotatingWave}, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(closed.values[i] - rwa.concurrence.values[i]));
    }
    checks.push_back(make_check("jc closed form vs truncated RWA evolution", worst, 1e-10));
  }

  {  // Fock truncation convergence of the Rabi oracle
    const auto p = SystemParams::from_detuning(30.0, 0.0);
    const auto spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.5);
    const auto grid = uniform_grid(0.0, 10.0, 0.05);
    const auto a = rabi_joint(spec, RabiConfig{30, p, Coupling::Full}, grid);
    const auto b = rabi_joint(spec, RabiConfig{50, p, Coupling::Full}, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(a.concurrence.values[i] - b.concurrence.values[i]));
    checks.push_back(make_check("rabi truncation n_cut 30 vs 50 (omega0=30g)", worst, 1e-6));
  }

  return checks;
}

}  // namespace esd
