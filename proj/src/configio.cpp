#include "qpg/configio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qpg/units.hpp"

namespace qpg {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& s, int lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + s + "'", lineno);
  }
}

ConfigFile::Value parse_value(const std::string& raw, int lineno) {
  if (raw.empty()) throw ParseError("empty value", lineno);
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ParseError("unterminated string", lineno);
    return raw.substr(1, raw.size() - 2);
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ParseError("unterminated array", lineno);
    std::vector<double> values;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) values.push_back(parse_number(item, lineno));
    }
    return values;
  }
  return parse_number(raw, lineno);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated table header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) throw ParseError("invalid table name '" + section + "'", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", lineno);
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
    cfg.values_.emplace(key, parse_value(trim(line.substr(eq + 1)), lineno));
  }
  return cfg;
}

const ConfigFile::Value& ConfigFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing config key '" + key + "' (" + origin_ + ")");
  }
  return it->second;
}

double ConfigFile::number(const std::string& key) const {
  const Value& v = get(key);
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw ConfigError("config key '" + key + "' is not a number");
}

double ConfigFile::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

bool ConfigFile::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  throw ConfigError("config key '" + key + "' is not a boolean");
}

std::string ConfigFile::str(const std::string& key) const {
  const Value& v = get(key);
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("config key '" + key + "' is not a string");
}

std::string ConfigFile::str_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

std::vector<double> ConfigFile::numbers(const std::string& key) const {
  const Value& v = get(key);
  if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  throw ConfigError("config key '" + key + "' is not an array");
}

std::vector<std::string> ConfigFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> keys;
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) keys.push_back(k);
  }
  return keys;
}

namespace {

Axis axis_from_string(const std::string& s) {
  if (s == "ordinary") return Axis::ordinary;
  if (s == "extraordinary") return Axis::extraordinary;
  throw ConfigError("unknown axis '" + s + "' (expected ordinary|extraordinary)");
}

}  // namespace

ProcessConfig load_process_config(const ConfigFile& cfg) {
  ProcessConfig p;
  p.signal_center_nm = cfg.number_or("process.signal_center_nm", p.signal_center_nm);
  p.pump_center_nm = cfg.number_or("process.pump_center_nm", p.pump_center_nm);
  p.output_center_nm = cfg.number_or("process.output_center_nm", 0.0);
  p.poling_period_um = cfg.number_or("process.poling_period_um", p.poling_period_um);
  p.qpm_order = static_cast<int>(cfg.number_or("process.qpm_order", p.qpm_order));
  p.temperature_c = cfg.number_or("process.temperature_c", p.temperature_c);
  p.length_mm = cfg.number_or("process.length_mm", p.length_mm);
  p.signal_axis = axis_from_string(cfg.str_or("process.signal_axis", "ordinary"));
  p.pump_axis = axis_from_string(cfg.str_or("process.pump_axis", "extraordinary"));
  p.output_axis = axis_from_string(cfg.str_or("process.output_axis", "ordinary"));
  p.delta_beta_offset = cfg.number_or("process.delta_beta_offset_per_m", 0.0);
  if (cfg.has("process.width_sensitivity_per_m_per_um")) {
    p.width_sensitivity = cfg.number("process.width_sensitivity_per_m_per_um");
  }
  p.finalize();
  return p;
}

DispersionModel load_dispersion_model(const ConfigFile& cfg) {
  const std::string backend = cfg.str_or("dispersion.backend", "sellmeier");
  if (backend == "sellmeier") {
    SellmeierModel m = SellmeierModel::congruent_lithium_niobate();
    auto load_axis = [&](const std::string& table, SellmeierModel::AxisCoefficients& c) {
      c.A1 = cfg.number_or(table + ".A1", c.A1);
      c.A2 = cfg.number_or(table + ".A2", c.A2);
      c.A3 = cfg.number_or(table + ".A3", c.A3);
      c.A4 = cfg.number_or(table + ".A4", c.A4);
      c.B1 = cfg.number_or(table + ".B1", c.B1);
      c.B2 = cfg.number_or(table + ".B2", c.B2);
      c.B3 = cfg.number_or(table + ".B3", c.B3);
    };
    load_axis("dispersion.sellmeier.ordinary", m.ordinary);
    load_axis("dispersion.sellmeier.extraordinary", m.extraordinary);
    m.reference_temperature_c =
        cfg.number_or("dispersion.sellmeier.reference_temperature_c", m.reference_temperature_c);
    m.wavelength_min_um = cfg.number_or("dispersion.sellmeier.wavelength_min_um", m.wavelength_min_um);
    m.wavelength_max_um = cfg.number_or("dispersion.sellmeier.wavelength_max_um", m.wavelength_max_um);
    m.temperature_min_c = cfg.number_or("dispersion.sellmeier.temperature_min_c", m.temperature_min_c);
    m.temperature_max_c = cfg.number_or("dispersion.sellmeier.temperature_max_c", m.temperature_max_c);
    return m;
  }
  if (backend == "taylor") {
    TaylorDispersionModel t;
    t.signal_ref = cfg.number("dispersion.taylor.signal_ref_rad_s");
    t.pump_ref = cfg.number("dispersion.taylor.pump_ref_rad_s");
    t.output_ref = cfg.number("dispersion.taylor.output_ref_rad_s");
    t.delta_beta_ref = cfg.number_or("dispersion.taylor.delta_beta_ref_per_m", 0.0);
    t.signal_beta1 = cfg.number_or("dispersion.taylor.signal_beta1_s_m", 0.0);
    t.pump_beta1 = cfg.number_or("dispersion.taylor.pump_beta1_s_m", 0.0);
    t.output_beta1 = cfg.number_or("dispersion.taylor.output_beta1_s_m", 0.0);
    t.signal_beta2 = cfg.number_or("dispersion.taylor.signal_beta2_s2_m", 0.0);
    t.pump_beta2 = cfg.number_or("dispersion.taylor.pump_beta2_s2_m", 0.0);
    t.output_beta2 = cfg.number_or("dispersion.taylor.output_beta2_s2_m", 0.0);
    return t;
  }
  throw ConfigError("unknown dispersion backend '" + backend + "'");
}

PumpEnvelope load_pump(const ConfigFile& cfg) {
  PumpEnvelope pump;
  pump.order = static_cast<int>(cfg.number_or("pump.order", 0.0));
  pump.center_nm = cfg.number_or("pump.center_nm", pump.center_nm);
  const double sigma_ghz = cfg.number_or("pump.sigma_ghz", 963.0);
  pump.sigma = 2.0 * kPi * sigma_ghz * 1e9;
  pump.chirp = cfg.number_or("pump.chirp_s2", 0.0);
  return pump;
}

GaConfig load_ga_config(const ConfigFile& cfg) {
  GaConfig g;
  g.population = static_cast<int>(cfg.number_or("ga.population", g.population));
  g.generations = static_cast<int>(cfg.number_or("ga.generations", g.generations));
  g.tournament = static_cast<int>(cfg.number_or("ga.tournament", g.tournament));
  g.sections = static_cast<int>(cfg.number_or("ga.sections", g.sections));
  g.mutation_scale = cfg.number_or("ga.mutation_scale_per_m", 0.0);
  g.crossover_rate = cfg.number_or("ga.crossover_rate", g.crossover_rate);
  g.elites = static_cast<int>(cfg.number_or("ga.elites", g.elites));
  g.refine_fraction = cfg.number_or("ga.refine_fraction", g.refine_fraction);
  g.refine_all = cfg.boolean_or("ga.refine_all", false);
  g.init_refine_iters = static_cast<int>(cfg.number_or("ga.init_refine_iters", g.init_refine_iters));
  g.refine_iters = static_cast<int>(cfg.number_or("ga.refine_iters", g.refine_iters));
  g.seed = static_cast<std::uint64_t>(cfg.number_or("ga.seed", 1.0));
  g.delta_beta_bound = cfg.number_or("ga.delta_beta_bound_per_m", 0.0);
  g.mse_target = cfg.number_or("ga.mse_target", 0.0);
  g.threads = static_cast<int>(cfg.number_or("ga.threads", 1.0));
  g.validate();
  return g;
}

DeltaBetaProfile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open profile '" + path + "'");
  std::vector<double> from, to, offset;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("z_from_mm", 0) == 0) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ParseError("expected 'z_from_mm,z_to_mm,delta_beta_per_m'", lineno);
    }
    from.push_back(parse_number(trim(a), lineno));
    to.push_back(parse_number(trim(b), lineno));
    offset.push_back(parse_number(trim(c), lineno));
  }
  if (from.empty()) throw ParseError("no profile rows in '" + path + "'");
  DeltaBetaProfile p;
  p.boundaries_mm.resize(from.size() + 1);
  p.offsets.resize(offset.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (i > 0 && std::abs(from[i] - to[i - 1]) > 1e-9) {
      throw ParseError("profile sections must be contiguous", static_cast<int>(i) + 1);
    }
    p.boundaries_mm(static_cast<Eigen::Index>(i)) = from[i];
    p.offsets(static_cast<Eigen::Index>(i)) = offset[i];
  }
  p.boundaries_mm(p.boundaries_mm.size() - 1) = to.back();
  p.validate();
  return p;
}

void write_profile_csv(const DeltaBetaProfile& profile, const std::string& path) {
  profile.validate();
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << "z_from_mm,z_to_mm,delta_beta_per_m\n";
  char buf[96];
  for (int j = 0; j < profile.sections(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", profile.boundaries_mm(j),
                  profile.boundaries_mm(j + 1), profile.offsets(j));
    f << buf;
  }
}

}  // namespace qpg
