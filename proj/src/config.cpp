#include "pulsecell/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pulsecell/version.hpp"

namespace pulsecell {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Wraps one JSON object; every key must be consumed or finish() throws.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& child(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key))
      throw ConfigError(path_ + ": missing required field '" + key + "'");
    return node_.at(key);
  }

  template <class T>
  T require(const std::string& key) {
    return convert<T>(key, child(key));
  }

  template <class T>
  T get_or(const std::string& key, T def) {
    if (!node_.contains(key)) return def;
    return convert<T>(key, child(key));
  }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
  }

  const std::string& path() const { return path_; }

 private:
  template <class T>
  T convert(const std::string& key, const json& v) const {
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

RunMode parse_mode(const std::string& s) {
  if (s == "simulate") return RunMode::Simulate;
  if (s == "bench") return RunMode::Bench;
  if (s == "validate") return RunMode::Validate;
  throw ConfigError("mode: expected simulate|bench|validate, got '" + s + "'");
}

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Bench: return "bench";
    case RunMode::Validate: return "validate";
  }
  return "simulate";
}

Waveform parse_waveform(const std::string& s) {
  if (s == "rectangular") return Waveform::Rectangular;
  if (s == "transient") return Waveform::Transient;
  throw ConfigError("source.waveform: expected rectangular|transient, got '" + s + "'");
}

std::string waveform_name(Waveform w) {
  return w == Waveform::Rectangular ? "rectangular" : "transient";
}

HalfPointRule parse_halfpoint(const std::string& s) {
  if (s == "mean_temperature") return HalfPointRule::MeanTemperature;
  if (s == "mean_lambda") return HalfPointRule::MeanLambda;
  if (s == "two_sided_harmonic") return HalfPointRule::TwoSidedHarmonic;
  throw ConfigError(
      "solver.halfpoint_rule: expected mean_temperature|mean_lambda|two_sided_harmonic, "
      "got '" +
      s + "'");
}

std::string halfpoint_name(HalfPointRule r) {
  switch (r) {
    case HalfPointRule::MeanTemperature: return "mean_temperature";
    case HalfPointRule::MeanLambda: return "mean_lambda";
    case HalfPointRule::TwoSidedHarmonic: return "two_sided_harmonic";
  }
  return "mean_temperature";
}

Chunking parse_chunking(const std::string& s) {
  if (s == "static-block") return Chunking::StaticBlock;
  if (s == "static-interleave") return Chunking::StaticInterleave;
  throw ConfigError("exec.chunking: expected static-block|static-interleave, got '" + s +
                    "'");
}

std::string chunking_name(Chunking c) {
  return c == Chunking::StaticBlock ? "static-block" : "static-interleave";
}

std::string resolve_path(const std::string& raw, const std::string& base_dir) {
  if (raw.empty()) throw ConfigError("materials_file: empty path");
  std::filesystem::path p(raw);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

PropertyTable parse_pairs(const json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path + ": expected an array of [T, value] pairs");
  std::vector<Real> t, v;
  for (const auto& pair : node) {
    if (!pair.is_array() || pair.size() != 2)
      throw ConfigError(path + ": each entry must be a [T, value] pair");
    t.push_back(pair[0].get<Real>());
    v.push_back(pair[1].get<Real>());
  }
  try {
    return PropertyTable(std::move(t), std::move(v));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig cfg;
  Section top(root, "config");

  cfg.mode = parse_mode(top.get_or<std::string>("mode", "simulate"));
  std::string out = top.get_or<std::string>("output_dir", "");
  if (out.empty()) {
    const char* env = std::getenv("PULSECELL_OUT");
    out = env && *env ? env : "out";
  }
  cfg.output_dir = out;

  {
    Section dom(top.child("domain"), "domain");
    cfg.domain.layer_radii = dom.require<std::vector<Real>>("layer_radii");
    cfg.domain.core_length = dom.require<Real>("core_length");
    cfg.domain.outer_length = dom.require<Real>("outer_length");
    cfg.domain.layer_materials = dom.require<std::vector<std::string>>("layer_materials");
    cfg.domain.source_layer = dom.require<int>("source_layer");
    dom.finish();
    cfg.domain.validate();
  }
  {
    Section grid(top.child("grid"), "grid");
    cfg.grid.radial_divisions = grid.require<std::vector<int>>("radial_divisions");
    cfg.grid.axial_divisions_core = grid.require<int>("axial_divisions_core");
    cfg.grid.axial_divisions_outer = grid.require<int>("axial_divisions_outer");
    grid.finish();
    cfg.grid.validate(cfg.domain);
  }

  cfg.materials_file = resolve_path(top.require<std::string>("materials_file"), base_dir);
  if (!std::filesystem::exists(cfg.materials_file))
    throw ConfigError("materials_file: no such file: " + cfg.materials_file);

  {
    Section src(top.child("source"), "source");
    cfg.source.t_per = src.require<Real>("t_per");
    cfg.source.t_src = src.require<Real>("t_src");
    cfg.source.t_trs = src.require<Real>("t_trs");
    cfg.source.xi = src.get_or<Real>("xi", 4.0);
    cfg.source.zeta = src.get_or<Real>("zeta", 2.0);
    cfg.source.I0 = src.require<Real>("I0");
    cfg.source.S_C = src.get_or<Real>("S_C", 0.0);
    cfg.source.waveform = parse_waveform(src.get_or<std::string>("waveform", "transient"));
    cfg.source.joule_dimensional = src.get_or<bool>("joule_dimensional", false);
    src.finish();
    cfg.source.validate();
    if (cfg.source.S_C <= 0) cfg.source.S_C = cfg.domain.source_cross_section();
  }

  if (top.has("solver")) {
    Section sol(top.child("solver"), "solver");
    cfg.solver.epsilon = sol.get_or<Real>("epsilon", cfg.solver.epsilon);
    cfg.solver.max_iter = sol.get_or<int>("max_iter", cfg.solver.max_iter);
    cfg.solver.tau_min = sol.get_or<Real>("tau_min", cfg.solver.tau_min);
    cfg.solver.tau_transient_divisor =
        sol.get_or<Real>("tau_transient_divisor", cfg.solver.tau_transient_divisor);
    cfg.solver.tau_source_divisor =
        sol.get_or<Real>("tau_source_divisor", cfg.solver.tau_source_divisor);
    cfg.solver.halfpoint_rule = parse_halfpoint(
        sol.get_or<std::string>("halfpoint_rule", halfpoint_name(cfg.solver.halfpoint_rule)));
    cfg.solver.range_policy = sol.get_or<bool>("strict_range", false)
                                  ? RangePolicy::Strict
                                  : RangePolicy::Clamp;
    cfg.solver.all_neumann = sol.get_or<bool>("all_neumann", false);
    cfg.solver.T0 = sol.get_or<Real>("T0", cfg.solver.T0);
    cfg.solver.t_ceiling = sol.get_or<Real>("t_ceiling", cfg.solver.t_ceiling);
    sol.finish();
  }
  cfg.solver.validate();

  {
    Section run(top.child("runner"), "runner");
    cfg.runner.t_end = run.require<Real>("t_end");
    if (run.has("detector")) {
      Section det(run.child("detector"), "runner.detector");
      cfg.runner.detector.samples_per_period =
          det.get_or<int>("samples_per_period", cfg.runner.detector.samples_per_period);
      cfg.runner.detector.tolerance =
          det.get_or<Real>("tolerance", cfg.runner.detector.tolerance);
      cfg.runner.detector.min_periods =
          det.get_or<int>("min_periods", cfg.runner.detector.min_periods);
      det.finish();
    }
    if (run.has("probes")) {
      const json& probes = run.child("probes");
      if (!probes.is_array())
        throw ConfigError("runner.probes: expected an array of [r, z] pairs");
      for (const auto& p : probes) {
        if (!p.is_array() || p.size() != 2)
          throw ConfigError("runner.probes: each probe must be a [r, z] pair");
        cfg.runner.probes.push_back(ProbeSpec{p[0].get<Real>(), p[1].get<Real>()});
      }
    }
    cfg.runner.snapshot_times = run.get_or<std::vector<Real>>("snapshot_times", {});
    const std::string phase = run.get_or<std::string>("snapshot_phase", "both");
    if (phase == "both") {
      cfg.runner.snapshot_pre_on = cfg.runner.snapshot_post_off = true;
    } else if (phase == "on") {
      cfg.runner.snapshot_pre_on = true;
      cfg.runner.snapshot_post_off = false;
    } else if (phase == "off") {
      cfg.runner.snapshot_pre_on = false;
      cfg.runner.snapshot_post_off = true;
    } else if (phase == "none") {
      cfg.runner.snapshot_pre_on = cfg.runner.snapshot_post_off = false;
    } else {
      throw ConfigError("runner.snapshot_phase: expected on|off|both|none, got '" + phase +
                        "'");
    }
    run.finish();
    cfg.runner.validate();
  }

  if (top.has("exec")) {
    Section ex(top.child("exec"), "exec");
    cfg.exec.workers = ex.get_or<int>("workers", 1);
    cfg.exec.chunking = parse_chunking(ex.get_or<std::string>("chunking", "static-block"));
    cfg.exec.pin_hint = ex.get_or<bool>("pin_hint", false);
    ex.finish();
  } else {
    cfg.exec.pin_hint = false;
  }
  cfg.exec.validate();

  if (top.has("bench")) {
    Section be(top.child("bench"), "bench");
    cfg.bench.worker_counts =
        be.get_or<std::vector<int>>("worker_counts", cfg.bench.worker_counts);
    cfg.bench.steps = be.get_or<int>("steps", cfg.bench.steps);
    be.finish();
    if (cfg.bench.steps < 1) throw ConfigError("bench.steps: must be >= 1");
    for (int w : cfg.bench.worker_counts)
      if (w < 1) throw ConfigError("bench.worker_counts: workers must be >= 1");
  }

  top.finish();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config_text(ss.str(), base);
}

std::string dump_resolved(const RunConfig& cfg) {
  ordered_json j;
  j["mode"] = mode_name(cfg.mode);
  j["output_dir"] = cfg.output_dir;
  j["domain"] = {{"layer_radii", cfg.domain.layer_radii},
                 {"core_length", cfg.domain.core_length},
                 {"outer_length", cfg.domain.outer_length},
                 {"layer_materials", cfg.domain.layer_materials},
                 {"source_layer", cfg.domain.source_layer}};
  j["grid"] = {{"radial_divisions", cfg.grid.radial_divisions},
               {"axial_divisions_core", cfg.grid.axial_divisions_core},
               {"axial_divisions_outer", cfg.grid.axial_divisions_outer}};
  j["materials_file"] = cfg.materials_file;
  j["source"] = {{"t_per", cfg.source.t_per},
                 {"t_src", cfg.source.t_src},
                 {"t_trs", cfg.source.t_trs},
                 {"xi", cfg.source.xi},
                 {"zeta", cfg.source.zeta},
                 {"I0", cfg.source.I0},
                 {"S_C", cfg.source.S_C},
                 {"waveform", waveform_name(cfg.source.waveform)},
                 {"joule_dimensional", cfg.source.joule_dimensional}};
  j["solver"] = {{"epsilon", cfg.solver.epsilon},
                 {"max_iter", cfg.solver.max_iter},
                 {"tau_min", cfg.solver.tau_min},
                 {"tau_transient_divisor", cfg.solver.tau_transient_divisor},
                 {"tau_source_divisor", cfg.solver.tau_source_divisor},
                 {"halfpoint_rule", halfpoint_name(cfg.solver.halfpoint_rule)},
                 {"strict_range", cfg.solver.range_policy == RangePolicy::Strict},
                 {"all_neumann", cfg.solver.all_neumann},
                 {"T0", cfg.solver.T0},
                 {"t_ceiling", cfg.solver.t_ceiling}};
  ordered_json probes = ordered_json::array();
  for (const auto& p : cfg.runner.probes) probes.push_back({p.r, p.z});
  std::string phase = "none";
  if (cfg.runner.snapshot_pre_on && cfg.runner.snapshot_post_off)
    phase = "both";
  else if (cfg.runner.snapshot_pre_on)
    phase = "on";
  else if (cfg.runner.snapshot_post_off)
    phase = "off";
  j["runner"] = {{"t_end", cfg.runner.t_end},
                 {"detector",
                  {{"samples_per_period", cfg.runner.detector.samples_per_period},
                   {"tolerance", cfg.runner.detector.tolerance},
                   {"min_periods", cfg.runner.detector.min_periods}}},
                 {"probes", probes},
                 {"snapshot_times", cfg.runner.snapshot_times},
                 {"snapshot_phase", phase}};
  j["exec"] = {{"workers", cfg.exec.workers},
               {"chunking", chunking_name(cfg.exec.chunking)},
               {"pin_hint", cfg.exec.pin_hint.value_or(false)}};
  j["bench"] = {{"worker_counts", cfg.bench.worker_counts}, {"steps", cfg.bench.steps}};
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(dump_resolved(cfg)); }

std::string output_header(const RunConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return "pulsecell " + std::string(kVersion) + " config=" + buf;
}

MaterialSet load_materials(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open materials file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": parse error: " + e.what());
  }
  Section top(root, "materials_file");
  const json& arr = top.child("materials");
  top.finish();
  if (!arr.is_array()) throw ConfigError(path + ": 'materials' must be an array");
  MaterialSet set;
  for (const auto& node : arr) {
    Section m(node, "material");
    const std::string name = m.require<std::string>("name");
    const Real rho = m.require<Real>("rho");
    PropertyTable cv = parse_pairs(m.child("cv"), name + ".cv");
    PropertyTable lambda = parse_pairs(m.child("lambda"), name + ".lambda");
    PropertyTable chi;
    if (m.has("chi")) chi = parse_pairs(m.child("chi"), name + ".chi");
    m.finish();
    set.add(MaterialTable(name, rho, std::move(cv), std::move(lambda), std::move(chi)));
  }
  return set;
}

Simulation::Simulation(RunConfig run_cfg)
    : cfg(std::move(run_cfg)),
      grid(build_grid(cfg.domain, cfg.grid)),
      materials(load_materials(cfg.materials_file)),
      layers(resolve_layers(materials, cfg.domain.layer_materials)) {
  // Property tables must cover the run's evaluation window.
  for (size_t m = 0; m < layers.size(); ++m) {
    const auto& mat = *layers[m];
    const Real lo = cfg.solver.T0;
    const Real hi = cfg.solver.t_ceiling;
    if (!mat.table(Property::HeatCapacity).covers(lo, hi) ||
        !mat.table(Property::Conductivity).covers(lo, hi))
      throw ConfigError("material " + mat.name() + ": tables must cover [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (const auto& p : cfg.runner.probes) probe_cell(grid, p.r, p.z);

  if (cfg.source.I0 > 0) {
    const auto& src_mat = *layers[cfg.domain.source_layer];
    if (!src_mat.table(Property::Resistivity).covers(cfg.solver.T0, cfg.solver.t_ceiling))
      throw ConfigError("material " + src_mat.name() +
                        ": source layer resistivity must cover the run window");
    source_model = std::make_unique<JouleSource>(cfg.source, cfg.domain.source_layer,
                                                 src_mat, cfg.solver.range_policy);
  } else {
    source_model = std::make_unique<NullSource>();
  }
}

}  // namespace pulsecell
