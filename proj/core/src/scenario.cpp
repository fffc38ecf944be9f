#include "ebh/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

/// Momenta may be given as radians or as strings like "-0.8pi" / "0.5*pi".
double parse_momentum(const ordered_json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    const auto pos = s.find("pi");
    if (pos == std::string::npos || pos + 2 != s.size())
      throw std::invalid_argument("config: cannot parse momentum '" + s + "' in " + where);
    std::string coeff = s.substr(0, pos);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double c = 1.0;
    if (coeff == "-")
      c = -1.0;
    else if (!coeff.empty())
      c = std::stod(coeff);
    return c * kPi;
  }
  throw std::invalid_argument("config: momentum must be a number or string in " + where);
}

ordered_json model_to_json(const ModelParams& m) {
  return {{"n_sites", m.n_sites},
          {"kappa", m.kappa},
          {"u", m.u},
          {"v", m.v},
          {"boundary", to_string(m.boundary)}};
}

ModelParams model_from_json(const ordered_json& j) {
  check_keys(j, {"n_sites", "kappa", "u", "v", "boundary"}, "model");
  ModelParams m;
  m.n_sites = j.value("n_sites", m.n_sites);
  m.kappa = j.value("kappa", m.kappa);
  m.u = j.value("u", m.u);
  m.v = j.value("v", m.v);
  if (j.contains("boundary")) m.boundary = boundary_from_string(j.at("boundary"));
  return m;
}

ordered_json packet_to_json(const PacketSpec& p) {
  return {{"k0", p.k0},
          {"alpha", p.alpha},
          {"n_a", p.n_a},
          {"band", to_string(p.band)},
          {"tail_tolerance", p.tail_tolerance}};
}

PacketSpec packet_from_json(const ordered_json& j) {
  check_keys(j, {"k0", "alpha", "n_a", "band", "tail_tolerance"}, "packet");
  PacketSpec p;
  if (j.contains("k0")) p.k0 = parse_momentum(j.at("k0"), "packet.k0");
  p.alpha = j.value("alpha", p.alpha);
  p.n_a = j.value("n_a", p.n_a);
  if (j.contains("band")) p.band = band_id_from_string(j.at("band"));
  p.tail_tolerance = j.value("tail_tolerance", p.tail_tolerance);
  return p;
}

ordered_json field_to_json(const FieldProtocol& f) {
  ordered_json j{{"kind", to_string(f.kind)}};
  if (f.kind == FieldKind::constant) j["f0"] = f.f0;
  if (f.kind == FieldKind::square || f.kind == FieldKind::sine) {
    j["f0"] = f.f0;
    j["period"] = f.period;
    j["t_center"] = f.t_center;
  }
  if (f.kind == FieldKind::sampled) j["samples"] = f.samples;
  return j;
}

FieldProtocol field_from_json(const ordered_json& j) {
  check_keys(j, {"kind", "f0", "period", "t_center", "samples"}, "field");
  FieldProtocol f;
  if (j.contains("kind")) f.kind = field_kind_from_string(j.at("kind"));
  f.f0 = j.value("f0", 0.0);
  f.period = j.value("period", 0.0);
  f.t_center = j.value("t_center", 0.0);
  if (j.contains("samples"))
    f.samples = j.at("samples").get<std::vector<std::pair<double, double>>>();
  f.validate();
  return f;
}

ordered_json phase_map_to_json(const PhaseMapSpec& p) {
  return {{"u_min", p.u_min}, {"u_max", p.u_max}, {"v_min", p.v_min},
          {"v_max", p.v_max}, {"n_u", p.n_u},     {"n_v", p.n_v}};
}

PhaseMapSpec phase_map_from_json(const ordered_json& j) {
  check_keys(j, {"u_min", "u_max", "v_min", "v_max", "n_u", "n_v"}, "phase_map");
  PhaseMapSpec p;
  p.u_min = j.value("u_min", p.u_min);
  p.u_max = j.value("u_max", p.u_max);
  p.v_min = j.value("v_min", p.v_min);
  p.v_max = j.value("v_max", p.v_max);
  p.n_u = j.value("n_u", p.n_u);
  p.n_v = j.value("n_v", p.n_v);
  return p;
}

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::band: return "band";
    case ScenarioKind::phase_map: return "phase-map";
    case ScenarioKind::evolve: return "evolve";
    case ScenarioKind::filter: return "filter";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "band") return ScenarioKind::band;
  if (s == "phase-map" || s == "phase_map") return ScenarioKind::phase_map;
  if (s == "evolve") return ScenarioKind::evolve;
  if (s == "filter") return ScenarioKind::filter;
  throw std::invalid_argument("config: unknown scenario kind '" + s + "'");
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw std::invalid_argument("config: name must not be empty");
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
      throw std::invalid_argument("config: name may use letters, digits, '-', '_', '.'");
  model.validate();
  field.validate();
  if (r_max < 8) throw std::invalid_argument("config: r_max must be at least 8");

  if (kind == ScenarioKind::phase_map) {
    if (!(phase_map.u_min < phase_map.u_max) || !(phase_map.v_min < phase_map.v_max))
      throw std::invalid_argument("config: phase-map rectangle is empty");
    if (phase_map.n_u < 2 || phase_map.n_v < 2)
      throw std::invalid_argument("config: phase-map raster needs at least 2x2 cells");
    return;
  }
  if (kind == ScenarioKind::band) return;

  // dynamic kinds
  if (model.n_sites < 4)
    throw std::invalid_argument("config: dynamics needs at least 4 sites");
  if (!(t_final > t_start)) throw std::invalid_argument("config: empty time span");
  if (!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
  if (!(sample_interval > 0))
    throw std::invalid_argument("config: sample_interval must be positive");
  if (!(packet.alpha > 0)) throw std::invalid_argument("config: alpha must be positive");
  if (packet.n_a < 1 || packet.n_a > model.n_sites - 1)
    throw std::invalid_argument("config: packet centre n_a must lie inside the lattice");
  if (model.boundary == Boundary::periodic && !field.is_zero())
    throw std::invalid_argument(
        "config: a driven ring is not supported; use open boundaries");
  if (kind == ScenarioKind::filter) {
    if (field.kind != FieldKind::square && field.kind != FieldKind::sine)
      throw std::invalid_argument("config: filter runs need a square or sine pulse");
    const double t_end_pulse = field.t_center + field.period / 2;
    if (field.t_center - field.period / 2 < t_start || t_end_pulse > t_final)
      throw std::invalid_argument("config: pulse must fit inside the time span");
    if (fidelity_t_target &&
        (*fidelity_t_target < t_start || *fidelity_t_target > t_final))
      throw std::invalid_argument("config: fidelity_t_target outside the time span");
  }
}

std::string to_json_text(const ScenarioConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  j["kind"] = to_string(c.kind);
  j["model"] = model_to_json(c.model);
  if (c.kind == ScenarioKind::phase_map) {
    j["phase_map"] = phase_map_to_json(c.phase_map);
  } else if (c.kind != ScenarioKind::band) {
    j["packet"] = packet_to_json(c.packet);
    j["field"] = field_to_json(c.field);
    j["time"] = ordered_json{{"t_start", c.t_start},
                             {"t_final", c.t_final},
                             {"dt", c.dt},
                             {"sample_interval", c.sample_interval}};
    if (c.fidelity_t_target) j["fidelity_t_target"] = *c.fidelity_t_target;
    j["write_density"] = c.write_density;
  }
  j["r_max"] = c.r_max;
  return j.dump(2) + "\n";
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  check_keys(j,
             {"name", "kind", "model", "packet", "field", "time", "phase_map",
              "fidelity_t_target", "write_density", "r_max"},
             "the top level");
  ScenarioConfig c;
  c.name = j.value("name", c.name);
  if (j.contains("kind")) c.kind = scenario_kind_from_string(j.at("kind"));
  if (j.contains("model")) c.model = model_from_json(j.at("model"));
  if (j.contains("packet")) c.packet = packet_from_json(j.at("packet"));
  if (j.contains("field")) c.field = field_from_json(j.at("field"));
  if (j.contains("phase_map")) c.phase_map = phase_map_from_json(j.at("phase_map"));
  if (j.contains("time")) {
    const auto& t = j.at("time");
    check_keys(t, {"t_start", "t_final", "dt", "sample_interval"}, "time");
    c.t_start = t.value("t_start", c.t_start);
    c.t_final = t.value("t_final", c.t_final);
    c.dt = t.value("dt", c.dt);
    c.sample_interval = t.value("sample_interval", c.sample_interval);
  }
  if (j.contains("fidelity_t_target") && !j.at("fidelity_t_target").is_null())
    c.fidelity_t_target = j.at("fidelity_t_target").get<double>();
  c.write_density = j.value("write_density", c.write_density);
  c.r_max = j.value("r_max", c.r_max);
  c.validate();
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return scenario_from_json_text(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string ScenarioConfig::content_hash() const {
  const std::string text = to_json_text(*this);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 8);  // 8 hex chars are plenty for run tagging
}

std::string preset_dir() {
  if (const char* env = std::getenv("EBH_PRESETS"))
    if (fs::is_directory(env)) return env;
  if (fs::is_directory("presets")) return "presets";
#ifdef EBH_PRESET_SOURCE_DIR
  if (fs::is_directory(EBH_PRESET_SOURCE_DIR)) return EBH_PRESET_SOURCE_DIR;
#endif
  throw std::runtime_error(
      "config: no preset directory found; set EBH_PRESETS or run from the "
      "project root");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(preset_dir()))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

ScenarioConfig load_preset(const std::string& name) {
  const fs::path path = fs::path(preset_dir()) / (name + ".json");
  if (!fs::exists(path)) {
    std::string msg = "config: no preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw std::runtime_error(msg);
  }
  return load_scenario_file(path.string());
}

}  // namespace ebh
