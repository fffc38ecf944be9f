#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebh/band.hpp"
#include "ebh/field.hpp"
#include "ebh/model.hpp"
#include "ebh/packet.hpp"

namespace ebh {

/// What a run should produce.
enum class ScenarioKind {
  band,       ///< band structure only
  phase_map,  ///< (u, v) region raster
  evolve,     ///< single wavepacket evolution
  filter      ///< two packets, opposite momenta, pulsed field
};

const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

/// Rectangle and resolution of a phase-map raster.
struct PhaseMapSpec {
  double u_min = -8.0, u_max = 8.0;
  double v_min = -8.0, v_max = 8.0;
  int n_u = 100, n_v = 100;
};

/// Complete, serialisable description of one run.
struct ScenarioConfig {
  std::string name = "run";
  ScenarioKind kind = ScenarioKind::evolve;

  ModelParams model;
  PacketSpec packet;
  FieldProtocol field;
  PhaseMapSpec phase_map;

  double t_start = 0.0;
  double t_final = 100.0;
  double dt = 0.02;              ///< integrator cap for driven evolution
  double sample_interval = 0.5;  ///< observable sampling cadence
  int r_max = 400;               ///< relative-coordinate truncation

  /// filter runs: fidelity of the transferred packet is evaluated against the
  /// surviving packet's field-free evolution at this time.
  std::optional<double> fidelity_t_target;

  bool write_density = true;  ///< emit the site-resolved density matrix file

  void validate() const;  ///< throws std::invalid_argument with context

  /// Stable hex digest of the physical content (used to tag run directories).
  std::string content_hash() const;
};

std::string to_json_text(const ScenarioConfig& c);
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Bundled configurations. Lookup order for the preset directory:
/// $EBH_PRESETS, ./presets, then the install/source default.
std::vector<std::string> preset_names();
ScenarioConfig load_preset(const std::string& name);
std::string preset_dir();

}  // namespace ebh
