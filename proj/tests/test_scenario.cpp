#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <ebh/runner.hpp>
#include <ebh/scenario.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

using namespace ebh;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny_evolve() {
  ScenarioConfig c;
  c.name = "tiny";
  c.kind = ScenarioKind::evolve;
  c.model.n_sites = 40;
  c.model.u = 7.0;
  c.model.v = 6.0;
  c.packet.k0 = -0.8 * M_PI;
  c.packet.alpha = 0.3;
  c.packet.n_a = 20;
  c.field = FieldProtocol::constant(0.05);
  c.t_start = 0.0;
  c.t_final = 2.0;
  c.dt = 0.05;
  c.sample_interval = 0.5;
  c.r_max = 60;
  return c;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

fs::path fresh_out_root(const std::string& tag) {
  const fs::path root = fs::temp_directory_path() / ("ebh-test-" + tag);
  fs::remove_all(root);
  return root;
}

}  // namespace

TEST_CASE("scenario kind names round-trip") {
  for (ScenarioKind k : {ScenarioKind::band, ScenarioKind::phase_map,
                         ScenarioKind::evolve, ScenarioKind::filter})
    CHECK(scenario_kind_from_string(to_string(k)) == k);
  CHECK(scenario_kind_from_string("phase_map") == ScenarioKind::phase_map);
  CHECK_THROWS_AS(scenario_kind_from_string("bananas"), std::invalid_argument);
}

TEST_CASE("momentum strings parse as multiples of pi") {
  auto parse_k0 = [](const std::string& k0_json) {
    const std::string text = R"({
      "name": "x", "kind": "evolve",
      "model": {"n_sites": 40, "u": 7.0, "v": 6.0},
      "packet": {"k0": )" + k0_json + R"(, "n_a": 20},
      "field": {"kind": "constant", "f0": 0.05},
      "time": {"t_final": 2.0}, "r_max": 60
    })";
    return scenario_from_json_text(text).packet.k0;
  };
  CHECK(parse_k0("\"-0.8pi\"") == doctest::Approx(-0.8 * M_PI).epsilon(1e-15));
  CHECK(parse_k0("\"0.5*pi\"") == doctest::Approx(0.5 * M_PI).epsilon(1e-15));
  CHECK(parse_k0("\" 0.25 pi \"") == doctest::Approx(0.25 * M_PI).epsilon(1e-15));
  CHECK(parse_k0("\"pi\"") == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(parse_k0("\"-pi\"") == doctest::Approx(-M_PI).epsilon(1e-15));
  CHECK(parse_k0("1.25") == doctest::Approx(1.25).epsilon(1e-15));
  CHECK_THROWS_AS(parse_k0("\"0.5tau\""), std::invalid_argument);
  CHECK_THROWS_AS(parse_k0("\"pi2\""), std::invalid_argument);
  CHECK_THROWS_AS(parse_k0("true"), std::invalid_argument);
}

TEST_CASE("unknown configuration keys are rejected at every level") {
  auto parse = [](const std::string& text) { return scenario_from_json_text(text); };
  const std::string base = R"("model": {"n_sites": 40, "u": 7.0, "v": 6.0},
      "packet": {"n_a": 20}, "field": {"kind": "constant", "f0": 0.05},
      "time": {"t_final": 2.0}, "r_max": 60)";

  CHECK_THROWS_WITH_AS(parse(R"({"name":"x","kind":"evolve","surprise":1,)" + base + "}"),
                       doctest::Contains("unknown key 'surprise'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse(R"({"name":"x","kind":"evolve",
        "model": {"n_sites": 40, "u": 7.0, "v": 6.0, "hopping": 2.0},
        "packet": {"n_a": 20}, "field": {"kind": "constant", "f0": 0.05},
        "time": {"t_final": 2.0}, "r_max": 60})"),
      doctest::Contains("in model"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse(R"({"name":"x","kind":"evolve",
        "model": {"n_sites": 40, "u": 7.0, "v": 6.0},
        "packet": {"n_a": 20, "width": 0.2},
        "field": {"kind": "constant", "f0": 0.05},
        "time": {"t_final": 2.0}, "r_max": 60})"),
      doctest::Contains("in packet"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse(R"({"name":"x","kind":"evolve",
        "model": {"n_sites": 40, "u": 7.0, "v": 6.0},
        "packet": {"n_a": 20},
        "field": {"kind": "constant", "f0": 0.05, "shape": "smooth"},
        "time": {"t_final": 2.0}, "r_max": 60})"),
      doctest::Contains("in field"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse(R"({"name":"x","kind":"evolve",
        "model": {"n_sites": 40, "u": 7.0, "v": 6.0},
        "packet": {"n_a": 20}, "field": {"kind": "constant", "f0": 0.05},
        "time": {"t_final": 2.0, "steps": 100}, "r_max": 60})"),
      doctest::Contains("in time"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse(R"({"name":"x","kind":"phase-map",
        "phase_map": {"n_u": 10, "n_v": 10, "cells": 100}})"),
      doctest::Contains("in phase_map"), std::invalid_argument);
}

TEST_CASE("configuration validation rejects malformed scenarios") {
  auto broken = [](auto&& mutate) {
    ScenarioConfig c = tiny_evolve();
    mutate(c);
    return c;
  };
  CHECK_NOTHROW(tiny_evolve().validate());

  CHECK_THROWS_AS(broken([](auto& c) { c.name = ""; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.name = "bad name"; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.name = "a/b"; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.r_max = 4; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.model.n_sites = 3; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.t_final = c.t_start; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.dt = 0.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.sample_interval = -1.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.packet.alpha = 0.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.packet.n_a = 40; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](auto& c) { c.packet.n_a = 0; }).validate(),
                  std::invalid_argument);
  // a driven ring has no consistent tilt
  CHECK_THROWS_AS(
      broken([](auto& c) { c.model.boundary = Boundary::periodic; }).validate(),
      std::invalid_argument);
  // an undriven ring is fine
  CHECK_NOTHROW(broken([](auto& c) {
                  c.model.boundary = Boundary::periodic;
                  c.field = FieldProtocol::none_field();
                }).validate());

  // filter-specific rules
  auto filter_base = [](auto&& mutate) {
    ScenarioConfig c = tiny_evolve();
    c.kind = ScenarioKind::filter;
    c.t_final = 6.0;
    c.field = FieldProtocol::sine_pulse(0.3, 4.0, 2.0);
    mutate(c);
    return c;
  };
  CHECK_NOTHROW(filter_base([](auto&) {}).validate());
  CHECK_THROWS_AS(
      filter_base([](auto& c) { c.field = FieldProtocol::constant(0.05); }).validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(
      filter_base([](auto& c) { c.field = FieldProtocol::sine_pulse(0.3, 10.0, 2.0); })
          .validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(filter_base([](auto& c) { c.fidelity_t_target = 99.0; }).validate(),
                  std::invalid_argument);

  // static kinds skip the dynamics rules
  ScenarioConfig band = tiny_evolve();
  band.kind = ScenarioKind::band;
  band.model.n_sites = 3;
  CHECK_NOTHROW(band.validate());
  ScenarioConfig pm;
  pm.name = "pm";
  pm.kind = ScenarioKind::phase_map;
  CHECK_NOTHROW(pm.validate());
  CHECK_THROWS_AS(
      [&] { auto c = pm; c.phase_map.u_max = c.phase_map.u_min; c.validate(); }(),
      std::invalid_argument);
  CHECK_THROWS_AS([&] { auto c = pm; c.phase_map.n_u = 1; c.validate(); }(),
                  std::invalid_argument);
}

TEST_CASE("scenario JSON serialisation round-trips") {
  ScenarioConfig c = tiny_evolve();
  c.packet.band = BandId::upper;
  c.packet.tail_tolerance = 0.02;
  const ScenarioConfig r = scenario_from_json_text(to_json_text(c));
  CHECK(r.name == c.name);
  CHECK(r.kind == c.kind);
  CHECK(r.model.n_sites == c.model.n_sites);
  CHECK(r.model.kappa == c.model.kappa);
  CHECK(r.model.u == c.model.u);
  CHECK(r.model.v == c.model.v);
  CHECK(r.model.boundary == c.model.boundary);
  CHECK(r.packet.k0 == doctest::Approx(c.packet.k0).epsilon(1e-15));
  CHECK(r.packet.alpha == c.packet.alpha);
  CHECK(r.packet.n_a == c.packet.n_a);
  CHECK(r.packet.band == BandId::upper);
  CHECK(r.packet.tail_tolerance == c.packet.tail_tolerance);
  CHECK(r.field.kind == FieldKind::constant);
  CHECK(r.field.f0 == c.field.f0);
  CHECK(r.t_start == c.t_start);
  CHECK(r.t_final == c.t_final);
  CHECK(r.dt == c.dt);
  CHECK(r.sample_interval == c.sample_interval);
  CHECK(r.r_max == c.r_max);
  CHECK(r.write_density == c.write_density);
  CHECK_FALSE(r.fidelity_t_target.has_value());

  // optional fields and pulse shapes survive the trip
  ScenarioConfig f = tiny_evolve();
  f.kind = ScenarioKind::filter;
  f.t_final = 6.0;
  f.field = FieldProtocol::sine_pulse(0.3, 4.0, 2.0);
  f.fidelity_t_target = 5.0;
  f.write_density = false;
  const ScenarioConfig fr = scenario_from_json_text(to_json_text(f));
  CHECK(fr.kind == ScenarioKind::filter);
  CHECK(fr.field.kind == FieldKind::sine);
  CHECK(fr.field.period == 4.0);
  CHECK(fr.field.t_center == 2.0);
  REQUIRE(fr.fidelity_t_target.has_value());
  CHECK(*fr.fidelity_t_target == 5.0);
  CHECK_FALSE(fr.write_density);
}

TEST_CASE("content hash is stable and content-sensitive") {
  const ScenarioConfig a = tiny_evolve();
  const std::string h = a.content_hash();
  CHECK(h.size() == 8);
  for (char ch : h) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
  CHECK(a.content_hash() == h);                                      // deterministic
  CHECK(scenario_from_json_text(to_json_text(a)).content_hash() == h);  // round-trip

  ScenarioConfig b = tiny_evolve();
  b.model.u = 7.5;
  CHECK(b.content_hash() != h);
}

TEST_CASE("bundled presets load and validate") {
  const auto names = preset_names();
  for (const char* expected :
       {"fig2-a", "fig2-b", "fig2-c", "fig2-d", "fig3-e", "fig3-f", "fig3-g",
        "fig3-h", "fig6-square", "fig6-sine", "phase-map"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());

  for (const auto& name : names) {
    CAPTURE(name);
    const ScenarioConfig c = load_preset(name);  // load implies validate
    CHECK(c.name == name);
  }
  CHECK(load_preset("fig2-a").kind == ScenarioKind::evolve);
  CHECK(load_preset("fig6-sine").kind == ScenarioKind::filter);
  CHECK(load_preset("phase-map").kind == ScenarioKind::phase_map);

  try {
    load_preset("no-such-preset");
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("available") != std::string::npos);
    CHECK(msg.find("fig2-a") != std::string::npos);
  }
}

TEST_CASE("bundled presets pin the published scenario parameters") {
  struct Row {
    const char* name;
    double u, v;
  };
  // the eight constant-tilt launches
  const Row drift[] = {{"fig2-a", 7.0, 6.0},  {"fig2-b", 3.0, -2.0},
                       {"fig2-c", 7.0, 7.0},  {"fig2-d", 7.0, 6.7},
                       {"fig3-e", 2.0, -0.6}, {"fig3-f", -2.0, 3.0},
                       {"fig3-g", 5.0, 4.0},  {"fig3-h", 5.0, 5.0}};
  for (const Row& row : drift) {
    CAPTURE(row.name);
    const ScenarioConfig c = load_preset(row.name);
    CHECK(c.kind == ScenarioKind::evolve);
    CHECK(c.model.u == row.u);
    CHECK(c.model.v == row.v);
    CHECK(c.model.n_sites == 160);
    CHECK(c.model.kappa == 1.0);
    CHECK(c.packet.k0 == doctest::Approx(-0.8 * M_PI));
    CHECK(c.packet.alpha == 0.15);
    CHECK(c.packet.n_a == 80);
    CHECK(c.packet.band == BandId::lower);
    CHECK(c.field.kind == FieldKind::constant);
    CHECK(c.field.f0 == 0.05);
  }
  // the two pulsed-filter scenarios differ only in pulse shape
  for (const char* name : {"fig6-square", "fig6-sine"}) {
    CAPTURE(name);
    const ScenarioConfig c = load_preset(name);
    CHECK(c.kind == ScenarioKind::filter);
    CHECK(c.model.u == 5.0);
    CHECK(c.model.v == 4.0);
    CHECK(c.model.n_sites == 140);
    CHECK(std::abs(c.packet.k0) == doctest::Approx(0.6 * M_PI));
    CHECK(c.packet.n_a == 70);
    CHECK(c.packet.band == BandId::lower);
    CHECK(c.field.f0 == 0.05);
    CHECK(c.field.period == 20.0);
    CHECK(c.field.t_center == 15.0);
  }
  CHECK(load_preset("fig6-square").field.kind == FieldKind::square);
  CHECK(load_preset("fig6-sine").field.kind == FieldKind::sine);

  const ScenarioConfig pm = load_preset("phase-map");
  CHECK(pm.phase_map.u_min == -8.0);
  CHECK(pm.phase_map.u_max == 8.0);
  CHECK(pm.phase_map.v_min == -8.0);
  CHECK(pm.phase_map.v_max == 8.0);
  CHECK(pm.phase_map.n_u == 100);
  CHECK(pm.phase_map.n_v == 100);
}

TEST_CASE("identical configurations produce byte-identical artifacts") {
  const ScenarioConfig c = tiny_evolve();
  RunOptions opts;
  opts.quiet = true;
  opts.out_root = fresh_out_root("det-a").string();
  const RunResult a = run_scenario(c, opts);
  const std::string root_a = opts.out_root;
  opts.out_root = fresh_out_root("det-b").string();
  const RunResult b = run_scenario(c, opts);
  for (const char* rel : {"trajectory.csv", "observables.csv", "density.csv",
                          "semiclassical.csv", "summary.json", "config.json"}) {
    CAPTURE(rel);
    CHECK(read_file(fs::path(a.run_dir) / rel) ==
          read_file(fs::path(b.run_dir) / rel));
  }
  fs::remove_all(root_a);
  fs::remove_all(opts.out_root);
}

TEST_CASE("preset directory honours the environment override") {
  const fs::path dir = fresh_out_root("presets");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "custom.json");
    out << R"({"name": "custom", "kind": "band",
               "model": {"n_sites": 40, "u": 1.0, "v": 1.0}, "r_max": 40})";
  }
  REQUIRE(setenv("EBH_PRESETS", dir.c_str(), 1) == 0);
  CHECK(preset_dir() == dir.string());
  const auto names = preset_names();
  REQUIRE(names.size() == 1);
  CHECK(names[0] == "custom");
  CHECK(load_preset("custom").model.u == 1.0);
  REQUIRE(unsetenv("EBH_PRESETS") == 0);
  CHECK(preset_dir() != dir.string());
  fs::remove_all(dir);
}

TEST_CASE("runner writes the advertised artifacts for an evolve run") {
  const ScenarioConfig c = tiny_evolve();
  RunOptions opts;
  opts.out_root = fresh_out_root("evolve").string();
  opts.quiet = true;
  const RunResult res = run_scenario(c, opts);

  CHECK(fs::path(res.run_dir).filename().string() == "tiny-" + c.content_hash());
  for (const char* rel : {"config.json", "trajectory.csv", "observables.csv",
                          "density.csv", "semiclassical.csv", "summary.json",
                          "trajectory.gp", "density.gp"}) {
    CAPTURE(rel);
    CHECK(std::find(res.artifacts.begin(), res.artifacts.end(), rel) !=
          res.artifacts.end());
    CHECK(fs::exists(fs::path(res.run_dir) / rel));
  }

  CHECK(first_line(fs::path(res.run_dir) / "trajectory.csv") ==
        "t,x_c,r_mean,leakage,norm");
  CHECK(first_line(fs::path(res.run_dir) / "observables.csv") ==
        "t,x_c,r_mean,leakage,norm,w_lower,w_upper,k_c,energy");
  CHECK(first_line(fs::path(res.run_dir) / "density.csv").rfind("t,site_1,site_2", 0) == 0);
  // header + one row per sample time (0, 0.5, ..., 2.0)
  CHECK(line_count(fs::path(res.run_dir) / "trajectory.csv") == 6);
  CHECK(line_count(fs::path(res.run_dir) / "density.csv") == 6);

  // the stored config reproduces the run directory hash
  const ScenarioConfig stored =
      load_scenario_file((fs::path(res.run_dir) / "config.json").string());
  CHECK(stored.content_hash() == c.content_hash());

  const auto summary = nlohmann::json::parse(read_file(res.summary_path));
  CHECK(summary.at("name") == "tiny");
  CHECK(summary.at("kind") == "evolve");
  const auto& results = summary.at("results");
  CHECK(results.at("x_c_initial").get<double>() == doctest::Approx(40.0).epsilon(0.01));
  CHECK(results.at("drift_rate").get<double>() == doctest::Approx(-0.1));
  CHECK(results.at("lifetime_prediction").is_null());  // complete band
  CHECK(results.at("death_detected") == false);
  CHECK(results.at("semiclassical_hit_edge") == false);
  fs::remove_all(opts.out_root);
}

TEST_CASE("runner handles band and phase-map scenarios") {
  RunOptions opts;
  opts.out_root = fresh_out_root("static").string();
  opts.quiet = true;

  ScenarioConfig b;
  b.name = "bands";
  b.kind = ScenarioKind::band;
  b.model.n_sites = 64;
  b.model.u = 5.0;
  b.model.v = 4.0;
  b.r_max = 120;
  const RunResult rb = run_scenario(b, opts);
  CHECK(first_line(fs::path(rb.run_dir) / "band.csv") ==
        "k,lower_energy,upper_energy,scat_min,scat_max");
  CHECK(line_count(fs::path(rb.run_dir) / "band.csv") == 65);
  const auto sb = nlohmann::json::parse(read_file(rb.summary_path));
  CHECK(sb.at("results").at("lower_complete") == false);
  CHECK(sb.at("results").at("upper_complete") == true);
  CHECK(sb.at("results").at("lower_k_edge").get<double>() ==
        doctest::Approx(1.386319815154).epsilon(0.05));

  ScenarioConfig p;
  p.name = "map";
  p.kind = ScenarioKind::phase_map;
  p.phase_map.n_u = 8;
  p.phase_map.n_v = 8;
  const RunResult rp = run_scenario(p, opts);
  CHECK(first_line(fs::path(rp.run_dir) / "phase_map.csv") ==
        "u,v,region,n_bound,on_boundary");
  CHECK(line_count(fs::path(rp.run_dir) / "phase_map.csv") == 65);
  const auto sp = nlohmann::json::parse(read_file(rp.summary_path));
  CHECK(sp.at("results").at("cells") == 64);
  int total = 0;
  for (const auto& [name, count] : sp.at("results").at("region_counts").items())
    total += count.get<int>();
  CHECK(total == 64);
  fs::remove_all(opts.out_root);
}

TEST_CASE("runner filter scenario evolves both launch directions") {
  ScenarioConfig c = tiny_evolve();
  c.name = "filt";
  c.kind = ScenarioKind::filter;
  c.packet.k0 = 0.6 * M_PI;
  c.t_final = 6.0;
  c.field = FieldProtocol::sine_pulse(0.3, 4.0, 2.0);
  c.dt = 0.008;  // a pulse this strong needs finer steps to meet the accuracy check
  c.fidelity_t_target = 5.0;
  RunOptions opts;
  opts.out_root = fresh_out_root("filter").string();
  opts.quiet = true;
  const RunResult res = run_scenario(c, opts);

  for (const char* rel :
       {"trajectory_k_plus.csv", "trajectory_k_minus.csv", "observables_k_plus.csv",
        "observables_k_minus.csv", "density_k_plus.csv", "density_k_minus.csv",
        "filter.gp", "summary.json"}) {
    CAPTURE(rel);
    CHECK(fs::exists(fs::path(res.run_dir) / rel));
  }
  // per-side observables carry the fidelity column
  CHECK(first_line(fs::path(res.run_dir) / "observables_k_plus.csv") ==
        "t,x_c,r_mean,leakage,norm,w_lower,w_upper,k_c,energy,fidelity");

  const auto summary = nlohmann::json::parse(read_file(res.summary_path));
  const auto& results = summary.at("results");
  CHECK(results.at("fidelity_t_target").get<double>() == 5.0);
  const std::string side = results.at("surviving_side").get<std::string>();
  CHECK((side == "k_plus" || side == "k_minus"));
  CHECK(results.at("fidelity_survivor").get<double>() >=
        results.at("fidelity_blocked").get<double>());
  // sides are ranked by their overlap after the pulse ends (here t = 4)
  const double pulse_end = c.field.t_center + c.field.period / 2;
  for (const char* tag : {"k_plus", "k_minus"}) {
    CAPTURE(tag);
    const auto& part = results.at(tag);
    CHECK(part.at("fidelity_max_post_pulse").get<double>() <=
          part.at("fidelity_max").get<double>() + 1e-12);
    CHECK(part.at("fidelity_t_at_max_post_pulse").get<double>() >=
          pulse_end - 1e-9);
  }
  CHECK(results.at("fidelity_survivor").get<double>() ==
        results.at(side).at("fidelity_max_post_pulse").get<double>());
  CHECK(results.at("k_plus").at("x_c_initial").get<double>() ==
        doctest::Approx(40.0).epsilon(0.01));
  CHECK(results.at("k_minus").at("x_c_initial").get<double>() ==
        doctest::Approx(40.0).epsilon(0.01));
  fs::remove_all(opts.out_root);
}

TEST_CASE("runner sweep varies one field by JSON pointer") {
  ScenarioConfig c = tiny_evolve();
  c.name = "sw";
  RunOptions opts;
  opts.out_root = fresh_out_root("sweep").string();
  opts.quiet = true;
  const RunResult res = run_sweep(c, "/field/f0", {0.03, 0.06}, opts);

  CHECK(fs::exists(fs::path(res.run_dir) / "sweep.csv"));
  CHECK(fs::exists(fs::path(res.run_dir) / "summary.json"));
  const std::string header = first_line(fs::path(res.run_dir) / "sweep.csv");
  CHECK(header.rfind("index,value", 0) == 0);
  CHECK(header.find("drift_rate") != std::string::npos);
  CHECK(line_count(fs::path(res.run_dir) / "sweep.csv") == 3);

  const auto summary = nlohmann::json::parse(read_file(res.summary_path));
  CHECK(summary.at("pointer") == "/field/f0");
  REQUIRE(summary.at("runs").size() == 2);
  for (const auto& run : summary.at("runs")) {
    const fs::path child = fs::path(res.run_dir) / run.get<std::string>();
    CHECK(fs::exists(child / "summary.json"));
    CHECK(fs::exists(child / "trajectory.csv"));
  }

  // drift rate scales with the swept force
  const auto s0 = nlohmann::json::parse(
      read_file(fs::path(res.run_dir) / summary.at("runs")[0].get<std::string>() /
                "summary.json"));
  const auto s1 = nlohmann::json::parse(
      read_file(fs::path(res.run_dir) / summary.at("runs")[1].get<std::string>() /
                "summary.json"));
  CHECK(s0.at("results").at("drift_rate").get<double>() == doctest::Approx(-0.06));
  CHECK(s1.at("results").at("drift_rate").get<double>() == doctest::Approx(-0.12));
  fs::remove_all(opts.out_root);
}
