#include "esd/errors.hpp"
#include "esd/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace esd;

namespace {

std::string csv_of(const ScenarioResult& r) {
  std::ostringstream out;
  write_csv(out, r.records);
  return out.str();
}

std::string validation_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("grid cardinality: 3 beta^2 values x 101 samples") {
  ScenarioConfig c;
  c.beta_sq = {0.2, 0.5, 0.8};
  c.gt_stop = 1.0;
  c.gt_step = 0.01;
  c.engine = Engine::JcRwa;
  const auto r = run_scenario(c);
  CHECK(r.records.size() == 303);
  CHECK(r.summary.series.size() == 3);
  CHECK(r.records[101].beta_sq == 0.5);  // beta^2-major order
  CHECK(r.records[101].gt == 0.0);
}

TEST_CASE("jc_rwa engine reproduces 2 beta |eta| cos^2(gt)") {
  ScenarioConfig c;
  c.engine = Engine::JcRwa;
  c.beta_sq = {0.5};
  c.params = SystemParams::from_detuning(30.0, 0.0);
  c.gt_stop = std::numbers::pi;
  c.gt_step = std::numbers::pi / 100.0;
  const auto r = run_scenario(c);
  REQUIRE(r.records.size() == 101);
  for (const auto& rec : r.records) {
    const double expected = 2.0 * std::sqrt(0.5 * 0.5) * std::pow(std::cos(rec.gt), 2);
    CHECK(std::abs(rec.concurrence - expected) < 1e-10);
  }
}

TEST_CASE("csv format") {
  ScenarioConfig c;
  c.engine = Engine::JcRwa;
  c.beta_sq = {1.0 / 3.0};
  c.gt_stop = 0.1;
  c.gt_step = 0.1;
  const std::string csv = csv_of(run_scenario(c));
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "engine,state,beta_sq,gt,concurrence,trace_residual,positivity_residual");
  CHECK(first.rfind("jc_rwa,Phi,0.333333333333,0,", 0) == 0);
}

TEST_CASE("determinism across runs and thread counts") {
  ScenarioConfig c;
  c.beta_sq = parse_grid("0.1:0.9:0.2", "beta_sq");
  c.params = SystemParams::from_detuning(1.5, 0.0);
  c.gt_stop = 5.0;
  c.gt_step = 0.05;
  c.threads = 1;
  const std::string a = csv_of(run_scenario(c));
  c.threads = 3;
  const std::string b = csv_of(run_scenario(c));
  CHECK(a == b);
  CHECK(a == csv_of(run_scenario(c)));
}

TEST_CASE("compare mode: tcl_algebraic vs tcl_direct") {
  ScenarioConfig c;
  c.beta_sq = {0.3, 0.7};
  c.params = SystemParams::from_detuning(3.0, 0.0);
  c.gt_step = 0.05;
  c.compare = Engine::TclDirect;
  const auto r = run_scenario(c);
  REQUIRE(r.summary.max_engine_difference.has_value());
  CHECK(*r.summary.max_engine_difference < 1e-6);
  CHECK(r.joined.size() == r.records.size());
  std::ostringstream out;
  write_joined_csv(out, c, r.joined);
  CHECK(out.str().rfind("beta_sq,gt,concurrence_tcl_algebraic,concurrence_tcl_direct,abs_diff\n", 0) == 0);
}

TEST_CASE("every engine runs and keeps residual columns populated") {
  for (Engine e : {Engine::TclAlgebraic, Engine::TclRiccati, Engine::TclDirect, Engine::Rabi, Engine::JcRwa}) {
    ScenarioConfig c;
    c.engine = e;
    c.state = StateKind::Psi;
    c.beta_sq = {0.4};
    c.params = SystemParams::from_detuning(10.0, 1.0);
    c.gt_stop = 3.0;
    c.gt_step = 0.1;
    const auto r = run_scenario(c);
    CHECK(r.summary.error_count == 0);
    for (const auto& rec : r.records) {
      CHECK(std::isfinite(rec.trace_residual));
      CHECK(std::isfinite(rec.positivity_residual));
      CHECK(rec.trace_residual < 1e-6);
    }
    CHECK(r.records.front().concurrence == doctest::Approx(2.0 * std::sqrt(0.4 * 0.6)).epsilon(1e-10));
  }
}

TEST_CASE("grid start away from zero integrates from the origin") {
  ScenarioConfig c;
  c.params = SystemParams::from_detuning(1.5, 0.0);
  c.gt_step = 0.5;
  c.gt_stop = 5.0;
  const auto full = run_scenario(c);
  c.gt_start = 2.0;
  const auto tail = run_scenario(c);
  REQUIRE(tail.records.size() == 7);
  for (std::size_t i = 0; i < tail.records.size(); ++i)
    CHECK(std::abs(tail.records[i].concurrence - full.records[i + 4].concurrence) < 1e-9);
}

TEST_CASE("config parsing") {
  const auto kv = parse_key_values("# comment\nstate = Psi  # trailing\n\nbeta_sq=0.1:0.3:0.1\n");
  CHECK(kv.at("state") == "Psi");
  CHECK(kv.at("beta_sq") == "0.1:0.3:0.1");

  ScenarioConfig c;
  apply_setting(c, "omega0", "10");
  apply_setting(c, "delta", "1");
  CHECK(c.params.omega == 9.0);
  apply_setting(c, "beta_sq", "0.1:0.3:0.1");
  CHECK(c.beta_sq.size() == 3);
  apply_setting(c, "gt", "0:2:0.5");
  CHECK(c.gt_grid().size() == 5);
  apply_setting(c, "engine", "rabi");
  CHECK(c.engine == Engine::Rabi);
  apply_setting(c, "gt-max", "3");
  CHECK(c.gt_stop == 3.0);

  CHECK(validation_message([] { parse_key_values("just text\n"); }).find("line 1") != std::string::npos);
  CHECK(validation_message([&] { apply_setting(c, "omega0", "fast"); }).find("omega0") != std::string::npos);
  CHECK(validation_message([&] { apply_setting(c, "colour", "red"); }).find("colour") != std::string::npos);
  CHECK(validation_message([&] { apply_setting(c, "beta_sq", "0.1:0.5"); }).find("beta_sq") != std::string::npos);
  CHECK(validation_message([&] { apply_setting(c, "engine", "euler"); }).find("engine") != std::string::npos);

  ScenarioConfig bad;
  bad.beta_sq = {0.5, 1.2};
  CHECK(validation_message([&] { bad.validate(); }).find("beta_sq") != std::string::npos);
  bad = ScenarioConfig{};
  bad.gt_step = 0.0;
  CHECK(validation_message([&] { bad.validate(); }).find("gt_step") != std::string::npos);
  bad = ScenarioConfig{};
  bad.beta_sq = {0.6, 0.4};
  CHECK(validation_message([&] { bad.validate(); }).find("ascending") != std::string::npos);
  bad = ScenarioConfig{};
  bad.params.g = 0.0;
  CHECK(validation_message([&] { bad.validate(); }).find("g:") != std::string::npos);
}

TEST_CASE("config file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "esd_test_config.txt";
  {
    std::ofstream out(path);
    out << "# detuned Psi sweep\nstate=Psi\nbeta_sq=0.2,0.4\ndelta=1\nomega0=10\ngt_max=2\ngt_step=0.5\n"
        << "engine=tcl_direct\n";
  }
  const auto c = load_config_file(path.string());
  std::filesystem::remove(path);
  CHECK(c.state == StateKind::Psi);
  CHECK(c.beta_sq == std::vector<double>{0.2, 0.4});
  CHECK(c.params.omega0 == 10.0);
  CHECK(c.params.detuning() == 1.0);
  CHECK(c.gt_grid().size() == 5);
  CHECK(c.engine == Engine::TclDirect);
  CHECK_THROWS_AS(load_config_file("/nonexistent/esd.cfg"), ValidationError);
}

TEST_CASE("series summary: zeros, revivals and dark intervals") {
  const std::vector<double> gt = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<double> c = {1.0, 0.5, 0.0, 0.0, 0.2, 0.0, 0.0005, 0.0, 0.3, 0.4};
  const auto s = summarize_series(0.5, gt, c);
  REQUIRE(s.first_zero.has_value());
  CHECK(*s.first_zero == 2.0);
  CHECK(s.revival_count == 2);  // 0.2 and the open-ended 0.4; 0.0005 is below threshold
  CHECK(s.revival_peaks == std::vector<double>{0.2, 0.4});
  CHECK(s.min_concurrence == 0.0);
  CHECK(s.max_concurrence == 1.0);

  CHECK(dark_interval(gt, c, 1e-6, 0.1).value() == 2.0);
  CHECK(dark_interval(gt, c, 1e-6, 0.35).value() == 7.0);
  CHECK_FALSE(dark_interval(gt, c, 1e-6, 0.9).has_value());
  const std::vector<double> never = {1.0, 0.8, 0.6};
  CHECK(dark_interval(std::span(gt).first(3), never, 1e-6, 0.1).value() == 0.0);
  CHECK_FALSE(summarize_series(0.5, std::span(gt).first(3), never).first_zero.has_value());
}

TEST_CASE("riccati engine reports per-point errors past a singularity") {
  // Strong coupling with large detuning drives X+ through a pole near gt = 11.
  ScenarioConfig c;
  c.engine = Engine::TclRiccati;
  c.params = SystemParams{0.505756, 0.17374, 1.0};
  c.gt_stop = 25.0;
  c.gt_step = 0.05;
  const auto riccati = run_scenario(c);
  c.engine = Engine::TclAlgebraic;
  const auto algebraic = run_scenario(c);
  CHECK(algebraic.summary.error_count == 0);
  CHECK(riccati.summary.error_count > 0);
  CHECK(algebraic.summary.routes.front().find("transfer") != std::string::npos);
  for (std::size_t i = 0; i < riccati.records.size(); ++i) {
    const auto& r = riccati.records[i];
    if (r.error.empty())
      CHECK(std::abs(r.concurrence - algebraic.records[i].concurrence) < 1e-7);
    else
      CHECK(std::isnan(r.concurrence));
  }
  MESSAGE("tcl_riccati failed points: " << riccati.summary.error_count
                                        << ", tcl_algebraic route: " << algebraic.summary.routes.front());
}

TEST_CASE("ESD_THREADS caps the worker count") {
  ::setenv("ESD_THREADS", "3", 1);
  CHECK(default_thread_count() == 3);
  ::setenv("ESD_THREADS", "zero", 1);
  CHECK(default_thread_count() >= 1);
  ::unsetenv("ESD_THREADS");
}

TEST_CASE("figure metadata records caption and alternate values") {
  std::ostringstream out;
  write_figure_metadata(out, figure_scenario(FigureId::Fig4b));
  const std::string meta = out.str();
  CHECK(meta.find("figure=Fig4b\n") != std::string::npos);
  CHECK(meta.find("omega0=3.5\n") != std::string::npos);
  CHECK(meta.find("alternate_omega0=3\n") != std::string::npos);
  CHECK(meta.find("state=Psi\n") != std::string::npos);
}
