#pragma once

#include <map>
#include <string>
#include <vector>

namespace deit {

enum class Dim { Frequency, Field, Density, Length, Time, Number, Text };

struct KeySpec {
  Dim dim;
  std::string fallback; // default, with unit
  std::string help;
};

const std::map<std::string, KeySpec>& config_schema();

struct Entry {
  std::string value;
  std::string source;
  int line = 0;
};

// Layered "[section] key = value unit" configuration. Later layers win.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source);
  static Config load(const std::string& path);
  static Config preset(const std::string& name); // presets/<name>.cfg

  void merge(const Config& over);
  void set(const std::string& key, const std::string& value, const std::string& source = "override");

  bool has(const std::string& key) const; // set explicitly (not default)
  std::string text(const std::string& key) const;
  // SI value; frequencies are angular (MHz -> 2 pi 1e6 rad/s)
  double quantity(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  bool is_auto(const std::string& key) const;

  // sweep axes in declaration order: key -> raw value list
  const std::vector<std::pair<std::string, Entry>>& sweep() const { return sweep_; }

  // every schema key with its resolved value, one "key = value" per line
  std::string dump(const std::string& prefix = "") const;

 private:
  std::map<std::string, Entry> values_;
  std::vector<std::pair<std::string, Entry>> sweep_;
};

// Parse "<number> <unit>" for a dimension; throws ConfigError mentioning `where`.
double parse_quantity(const std::string& s, Dim dim, const std::string& where);
std::vector<double> parse_list(const std::string& s, Dim dim, const std::string& where);

} // namespace deit
