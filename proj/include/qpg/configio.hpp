#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qpg/dispersion.hpp"
#include "qpg/errors.hpp"
#include "qpg/inverse.hpp"
#include "qpg/modes.hpp"

namespace qpg {

/// Structured text configuration: `[section.subsection]` table headers,
/// `key = value` entries (numbers, "strings", true/false, [number arrays]),
/// `#` comments. Keys are exposed flattened as `section.subsection.key`.
/// Physical quantities carry their unit in the key name (length_mm, ...).
class ConfigFile {
 public:
  using Value = std::variant<double, bool, std::string, std::vector<double>>;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  std::map<std::string, Value> values_;
  std::string origin_;

  const Value& get(const std::string& key) const;
};

/// [process] table -> finalized ProcessConfig.
ProcessConfig load_process_config(const ConfigFile& cfg);

/// [dispersion] table: backend = "sellmeier" (default; coefficient overrides
/// under dispersion.sellmeier.{ordinary,extraordinary}.*) or "taylor"
/// (explicit coefficients under dispersion.taylor.*).
DispersionModel load_dispersion_model(const ConfigFile& cfg);

/// [pump] table; sigma given as 1/e-intensity half-width in GHz (nu, not omega).
PumpEnvelope load_pump(const ConfigFile& cfg);

/// [ga] table.
GaConfig load_ga_config(const ConfigFile& cfg);

/// Piecewise-constant profile CSV: `z_from_mm,z_to_mm,delta_beta_per_m` rows,
/// contiguous from 0 to the device length.
DeltaBetaProfile read_profile_csv(const std::string& path);
void write_profile_csv(const DeltaBetaProfile& profile, const std::string& path);

}  // namespace qpg
