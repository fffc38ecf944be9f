#include "ebh/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <json.hpp>

#include "ebh/bethe.hpp"
#include "ebh/propagate.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ebh {

namespace {

constexpr double kPi = std::numbers::pi;

ordered_json json_or_null(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

class RunWriter {
 public:
  RunWriter(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& rel) {
    std::ofstream out(fs::path(dir_) / rel);
    if (!out) throw std::runtime_error("runner: cannot write " + rel + " in " + dir_);
    artifacts_.push_back(rel);
    return out;
  }

  void write_text(const std::string& rel, const std::string& text) {
    open(rel) << text;
  }

  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  std::string dir_;
  std::vector<std::string> artifacts_;
};

void write_csv_row(std::ofstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    out << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

/// The externally pinned five-column trajectory format.
void write_trajectory_csv(std::ofstream out, const ObservableSeries& s) {
  out << "t,x_c,r_mean,leakage,norm\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const std::string leak = s.leakage.empty() ? "" : format_double(s.leakage[i]);
    write_csv_row(out, {format_double(s.times[i]), format_double(s.x_c[i]),
                        format_double(s.r_mean[i]), leak, format_double(s.norm[i])});
  }
}

struct EvolveOutput {
  ObservableSeries series;
  FidelityResult fidelity;
  bool has_fidelity = false;
};

EvolveOutput evolve_one(const ScenarioConfig& c, const PairBasis& basis,
                        const BandStructure& bs, const SparseOperator& h0,
                        const PacketSpec& packet_spec,
                        std::optional<double> fidelity_t_target) {
  const StateVector packet = build_packet(packet_spec, bs, basis);
  const std::vector<double> times = sample_times(c.t_start, c.t_final, c.sample_interval);

  TrajectoryRecorder rec(c.model, basis, &bs, &h0, static_cast<int>(times.size()));
  EvolveOutput out;
  if (fidelity_t_target) {
    // reference: the same packet evolved field-free to the target time
    Eigen::VectorXcd target = packet.amplitudes;
    if (*fidelity_t_target > c.t_start + 1e-12) {
      EvolveOptions ref_opts;
      ref_opts.max_stored_states = 2;
      const Trajectory ref = evolve_static(
          h0, packet.amplitudes, {c.t_start, *fidelity_t_target}, ref_opts);
      target = ref.final_state();
    }
    rec.set_fidelity_target(std::move(target));
    out.has_fidelity = true;
  }

  EvolveOptions opts;
  opts.max_stored_states = 4;
  opts.observer = &rec;
  evolve_driven(c.model, basis, c.field, packet.amplitudes, times, c.dt, opts);
  out.series = rec.take_series();

  if (out.has_fidelity) {
    out.fidelity.times = out.series.times;
    out.fidelity.f = out.series.fidelity;
    const auto it = std::max_element(out.fidelity.f.begin(), out.fidelity.f.end());
    out.fidelity.f_max = *it;
    out.fidelity.t_at_max =
        out.fidelity.times[static_cast<std::size_t>(it - out.fidelity.f.begin())];
  }
  return out;
}

void write_density_file(RunWriter& w, const std::string& rel,
                        const ObservableSeries& s) {
  std::ofstream out = w.open(rel);
  out << "t";
  for (int j = 0; j < s.density.cols(); ++j) out << ",site_" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]);
    for (int j = 0; j < s.density.cols(); ++j)
      out << ',' << format_double(s.density(static_cast<int>(i), j));
    out << "\n";
  }
}

ordered_json series_tail_summary(const ObservableSeries& s) {
  ordered_json r;
  r["x_c_initial"] = s.x_c.front();
  r["x_c_final"] = s.x_c.back();
  r["x_c_min"] = *std::min_element(s.x_c.begin(), s.x_c.end());
  r["x_c_max"] = *std::max_element(s.x_c.begin(), s.x_c.end());
  r["r_mean_initial"] = s.r_mean.front();
  r["r_mean_final"] = s.r_mean.back();
  r["r_mean_max"] = *std::max_element(s.r_mean.begin(), s.r_mean.end());
  if (!s.leakage.empty()) {
    r["leakage_final"] = s.leakage.back();
    r["leakage_max"] = *std::max_element(s.leakage.begin(), s.leakage.end());
  }
  if (!s.k_c.empty()) {
    r["k_c_initial"] = s.k_c.front();
    r["k_c_final"] = s.k_c.back();
  }
  return r;
}

void run_band(const ScenarioConfig& c, RunWriter& w, ordered_json& results) {
  const BandStructure bs = compute_band_structure(c.model, c.model.n_sites, c.r_max);
  {
    std::ofstream out = w.open("band.csv");
    out.close();
    write_band_csv(bs, (fs::path(w.dir()) / "band.csv").string());
  }
  for (BandId which : {BandId::lower, BandId::upper}) {
    const BandInfo& info = bs.info(which);
    const std::string tag = to_string(which);
    results[tag + "_complete"] = info.complete;
    results[tag + "_k_edge"] = json_or_null(info.k_edge);
    double emin = 0, emax = 0;
    bool any = false;
    for (const auto& pt : bs.band(which)) {
      if (!pt) continue;
      if (!any) {
        emin = emax = pt->energy;
        any = true;
      } else {
        emin = std::min(emin, pt->energy);
        emax = std::max(emax, pt->energy);
      }
    }
    if (any) {
      results[tag + "_energy_min"] = emin;
      results[tag + "_energy_max"] = emax;
    }
  }
  results["gap_at_zone_edge"] = bs.gap_at_zone_edge();

  w.write_text("band.gp",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set xlabel 'k'\n"
               "set ylabel 'E'\n"
               "plot 'band.csv' using 1:4 with lines lc 'gray' title 'continuum', \\\n"
               "     'band.csv' using 1:5 with lines lc 'gray' notitle, \\\n"
               "     'band.csv' using 1:2 with points pt 7 ps 0.3 title 'lower', \\\n"
               "     'band.csv' using 1:3 with points pt 7 ps 0.3 title 'upper'\n");
}

void run_phase_map(const ScenarioConfig& c, RunWriter& w, ordered_json& results) {
  const PhaseMapSpec& pm = c.phase_map;
  const double du = (pm.u_max - pm.u_min) / pm.n_u;
  const double dv = (pm.v_max - pm.v_min) / pm.n_v;
  std::map<std::string, int> counts;
  int boundary_cells = 0;
  std::ofstream out = w.open("phase_map.csv");
  out << "u,v,region,n_bound,on_boundary\n";
  for (int iv = 0; iv < pm.n_v; ++iv) {
    for (int iu = 0; iu < pm.n_u; ++iu) {
      const double u = pm.u_min + (iu + 0.5) * du;
      const double v = pm.v_min + (iv + 0.5) * dv;
      const PhasePoint pt = classify_region(u, v, 1e-9);
      counts[to_string(pt.region)]++;
      boundary_cells += pt.on_boundary ? 1 : 0;
      write_csv_row(out, {format_double(u), format_double(v), to_string(pt.region),
                          std::to_string(pt.bound_content.size()),
                          pt.on_boundary ? "1" : "0"});
    }
  }
  results["cells"] = pm.n_u * pm.n_v;
  results["boundary_cells"] = boundary_cells;
  ordered_json jc;
  for (const auto& [name, n] : counts) jc[name] = n;
  results["region_counts"] = jc;

  w.write_text(
      "phase_map.gp",
      "set datafile separator ','\n"
      "set xlabel 'U/J'\n"
      "set ylabel 'V/J'\n"
      "set palette maxcolors 6\n"
      "region(s) = (strcol(3) eq 'I') ? 1 : (strcol(3) eq 'II') ? 2 : "
      "(strcol(3) eq 'III') ? 3 : (strcol(3) eq 'IV') ? 4 : (strcol(3) eq 'V') ? 5 : 6\n"
      "plot 'phase_map.csv' every ::1 using 1:2:(region(0)) with points pt 5 ps 0.5 "
      "palette notitle\n");
}

void run_evolve(const ScenarioConfig& c, RunWriter& w, ordered_json& results) {
  const PairBasis basis(c.model.n_sites);
  const BandStructure bs = compute_band_structure(c.model, c.model.n_sites, c.r_max);
  const SparseOperator h0 = build_full_hamiltonian(c.model, basis, 0.0);

  EvolveOutput out = evolve_one(c, basis, bs, h0, c.packet, c.fidelity_t_target);
  const ObservableSeries& s = out.series;

  write_trajectory_csv(w.open("trajectory.csv"), s);
  {
    std::ofstream obs = w.open("observables.csv");
    obs.close();
    write_series_csv((fs::path(w.dir()) / "observables.csv").string(), s);
  }
  if (c.write_density) write_density_file(w, "density.csv", s);

  results.update(series_tail_summary(s));
  results["period_estimate"] = json_or_null(estimate_period(s.times, s.x_c));

  const SuddenDeathResult death =
      detect_sudden_death(s.times, s.r_mean, s.leakage);
  results["death_detected"] = death.detected;
  results["t_death"] = death.detected ? ordered_json(death.t_death) : ordered_json(nullptr);

  if (c.field.kind == FieldKind::constant && c.field.f0 != 0.0) {
    const double rate = pair_drift_factor * c.field.f0;
    results["drift_rate"] = rate;
    results["lifetime_prediction"] = json_or_null(
        predict_lifetime(bs.info(c.packet.band).k_edge, c.packet.k0, rate));
    const SemiclassicalPath path = semiclassical_path(
        bs, c.packet.band, c.packet.k0, s.x_c.front(), c.field, s.times);
    std::ofstream sc = w.open("semiclassical.csv");
    sc << "t,k_c,x_c\n";
    for (std::size_t i = 0; i < path.times.size(); ++i)
      write_csv_row(sc, {format_double(path.times[i]), format_double(path.k_c[i]),
                         format_double(path.x_c[i])});
    results["semiclassical_hit_edge"] = path.hit_edge;
    if (path.hit_edge) results["semiclassical_t_edge"] = path.t_edge;
  }
  if (out.has_fidelity) {
    results["fidelity_max"] = out.fidelity.f_max;
    results["fidelity_t_at_max"] = out.fidelity.t_at_max;
  }

  w.write_text("trajectory.gp",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set xlabel 't'\n"
               "plot 'trajectory.csv' using 1:2 with lines title 'x_c'\n");
  if (c.write_density)
    w.write_text("density.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'site'\n"
                 "set ylabel 't'\n"
                 "plot 'density.csv' matrix every ::1:1 with image notitle\n");
}

void run_filter(const ScenarioConfig& c, RunWriter& w, ordered_json& results) {
  const PairBasis basis(c.model.n_sites);
  const BandStructure bs = compute_band_structure(c.model, c.model.n_sites, c.r_max);
  const SparseOperator h0 = build_full_hamiltonian(c.model, basis, 0.0);

  const double pulse_end = c.field.t_center + c.field.period / 2;
  double t_target;
  if (c.fidelity_t_target) {
    t_target = *c.fidelity_t_target;
  } else {
    t_target = pulse_end + 0.3 * (c.t_final - pulse_end);
  }

  struct Side {
    std::string tag;
    double k0;
    EvolveOutput out;
    double post_max = 0.0;
    double post_t = 0.0;
  };
  std::vector<Side> sides;
  sides.push_back({"k_plus", std::abs(c.packet.k0), {}});
  sides.push_back({"k_minus", -std::abs(c.packet.k0), {}});
  for (Side& side : sides) {
    PacketSpec spec = c.packet;
    spec.k0 = side.k0;
    side.out = evolve_one(c, basis, bs, h0, spec, t_target);

    write_trajectory_csv(w.open("trajectory_" + side.tag + ".csv"), side.out.series);
    std::ofstream obs = w.open("observables_" + side.tag + ".csv");
    obs.close();
    write_series_csv((fs::path(w.dir()) / ("observables_" + side.tag + ".csv")).string(),
                     side.out.series);
    if (c.write_density)
      write_density_file(w, "density_" + side.tag + ".csv", side.out.series);

    // A transmitted packet can only be recognized once the pulse is over:
    // while it is still near the launch site, the slowly moving, dispersing
    // reference overlaps it regardless of whether transfer will succeed, so a
    // full-record maximum flatters the blocked side.  Judge both sides by
    // their best overlap after the pulse.
    side.post_t = pulse_end;
    for (std::size_t i = 0; i < side.out.fidelity.times.size(); ++i) {
      if (side.out.fidelity.times[i] + 1e-12 < pulse_end) continue;
      if (side.out.fidelity.f[i] > side.post_max) {
        side.post_max = side.out.fidelity.f[i];
        side.post_t = side.out.fidelity.times[i];
      }
    }

    ordered_json part = series_tail_summary(side.out.series);
    part["fidelity_max"] = side.out.fidelity.f_max;
    part["fidelity_t_at_max"] = side.out.fidelity.t_at_max;
    part["fidelity_max_post_pulse"] = side.post_max;
    part["fidelity_t_at_max_post_pulse"] = side.post_t;
    results[side.tag] = part;
  }
  results["fidelity_t_target"] = t_target;
  const bool plus_wins = sides[0].post_max >= sides[1].post_max;
  results["surviving_side"] = plus_wins ? "k_plus" : "k_minus";
  results["fidelity_survivor"] = (plus_wins ? sides[0] : sides[1]).post_max;
  results["fidelity_blocked"] = (plus_wins ? sides[1] : sides[0]).post_max;

  w.write_text("filter.gp",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set xlabel 't'\n"
               "plot 'trajectory_k_plus.csv' using 1:2 with lines title 'x_c (+k0)', \\\n"
               "     'trajectory_k_minus.csv' using 1:2 with lines title 'x_c (-k0)'\n");
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_series_csv(const std::string& path, const ObservableSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("runner: cannot open " + path);
  out << "t,x_c,r_mean,leakage,norm";
  const bool bands = !s.w_lower.empty();
  const bool energy = !s.energy.empty();
  const bool fid = !s.fidelity.empty();
  if (bands) out << ",w_lower,w_upper,k_c";
  if (energy) out << ",energy";
  if (fid) out << ",fidelity";
  out << "\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.x_c[i]) << ','
        << format_double(s.r_mean[i]) << ','
        << (s.leakage.empty() ? "" : format_double(s.leakage[i])) << ','
        << format_double(s.norm[i]);
    if (bands)
      out << ',' << format_double(s.w_lower[i]) << ',' << format_double(s.w_upper[i])
          << ',' << format_double(s.k_c[i]);
    if (energy) out << ',' << format_double(s.energy[i]);
    if (fid) out << ',' << format_double(s.fidelity[i]);
    out << "\n";
  }
}

void write_density_csv(const std::string& path, const ObservableSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("runner: cannot open " + path);
  out << "t";
  for (int j = 0; j < s.density.cols(); ++j) out << ",site_" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]);
    for (int j = 0; j < s.density.cols(); ++j)
      out << ',' << format_double(s.density(static_cast<int>(i), j));
    out << "\n";
  }
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
  ScenarioConfig c = config;
  if (opts.dt_override) c.dt = *opts.dt_override;
  if (opts.n_sites_override) c.model.n_sites = *opts.n_sites_override;
  c.validate();
  if (opts.threads > 0) Eigen::setNbThreads(opts.threads);

  const std::string dir_name = c.name + "-" + c.content_hash();
  RunWriter w((fs::path(opts.out_root) / dir_name).string());
  w.write_text("config.json", to_json_text(c));

  ordered_json results;
  switch (c.kind) {
    case ScenarioKind::band: run_band(c, w, results); break;
    case ScenarioKind::phase_map: run_phase_map(c, w, results); break;
    case ScenarioKind::evolve: run_evolve(c, w, results); break;
    case ScenarioKind::filter: run_filter(c, w, results); break;
  }

  ordered_json summary;
  summary["name"] = c.name;
  summary["kind"] = to_string(c.kind);
  summary["hash"] = c.content_hash();
  summary["results"] = results;
  summary["artifacts"] = w.artifacts();
  const std::string summary_rel = "summary.json";
  w.write_text(summary_rel, summary.dump(2) + "\n");

  if (!opts.quiet)
    std::fprintf(stdout, "wrote %s\n", (fs::path(w.dir()) / summary_rel).string().c_str());

  RunResult res;
  res.run_dir = w.dir();
  res.summary_path = (fs::path(w.dir()) / summary_rel).string();
  res.artifacts = w.artifacts();
  return res;
}

RunResult run_sweep(const ScenarioConfig& base, const std::string& pointer,
                    const std::vector<double>& values, const RunOptions& opts) {
  base.validate();
  if (values.empty()) throw std::invalid_argument("runner: sweep needs values");

  const std::string parent_name = base.name + "-sweep-" + base.content_hash();
  RunWriter parent((fs::path(opts.out_root) / parent_name).string());

  std::vector<std::pair<double, ordered_json>> harvest;
  std::vector<std::string> run_dirs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ordered_json doc = ordered_json::parse(to_json_text(base));
    doc[ordered_json::json_pointer(pointer)] = values[i];
    doc["name"] = base.name + "-" + std::to_string(i);
    ScenarioConfig child = scenario_from_json_text(doc.dump());

    RunOptions child_opts = opts;
    child_opts.out_root = parent.dir();
    const RunResult r = run_scenario(child, child_opts);
    run_dirs.push_back(fs::path(r.run_dir).filename().string());

    std::ifstream in(r.summary_path);
    ordered_json summary = ordered_json::parse(in);
    harvest.emplace_back(values[i], summary["results"]);
  }

  std::set<std::string> columns;
  for (const auto& [value, results] : harvest)
    for (const auto& [key, val] : results.items())
      if (val.is_number() || val.is_boolean()) columns.insert(key);

  {
    std::ofstream out = parent.open("sweep.csv");
    out << "index,value";
    for (const auto& col : columns) out << ',' << col;
    out << "\n";
    for (std::size_t i = 0; i < harvest.size(); ++i) {
      out << i << ',' << format_double(harvest[i].first);
      for (const auto& col : columns) {
        out << ',';
        const auto& results = harvest[i].second;
        if (results.contains(col)) {
          const auto& v = results.at(col);
          if (v.is_boolean())
            out << (v.get<bool>() ? 1 : 0);
          else
            out << format_double(v.get<double>());
        }
      }
      out << "\n";
    }
  }

  ordered_json summary;
  summary["name"] = base.name;
  summary["pointer"] = pointer;
  summary["values"] = values;
  summary["runs"] = run_dirs;
  parent.write_text("summary.json", summary.dump(2) + "\n");

  RunResult res;
  res.run_dir = parent.dir();
  res.summary_path = (fs::path(parent.dir()) / "summary.json").string();
  res.artifacts = parent.artifacts();
  return res;
}

}  // namespace ebh
