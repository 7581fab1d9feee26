// Experiment configuration: an INI-style file of `key = value` lines under
// `[section]` headers (comments start with ';').
//
//   [model]    a, b, gamma, orientation = aligned | isotropic
//   [domain]   boundary = torus | minus, L, margin = <number> | auto,
//              window_boundary = exclude | include
//   [run]      replications, seed, bootstrap, bootstrap_seed
//   [sweep]    gammas = comma-separated list
//   [hist]     bins, min, max
//   [validate] z_threshold, min_samples
//   [output]   dir
//
// Every key is optional; unknown sections or keys are rejected.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "boolmodel/simulate.hpp"
#include "boolmodel/stats.hpp"

namespace boolmodel {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct RunConfig {
  double a = 1.0;
  double b = 1.0;
  double gamma = 1.0;
  Orientation orientation = Orientation::Aligned;

  Boundary boundary = Boundary::TorusPeriodic;
  double L = 4.0;
  /// Absent means "auto": the grain circumradius.
  std::optional<double> margin;
  WindowBoundary window_boundary = WindowBoundary::Exclude;

  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  std::size_t bootstrap = stats::kDefaultBootstrap;
  std::uint64_t bootstrap_seed = stats::kDefaultBootstrapSeed;

  /// Intensities to sweep; absent means just `gamma`.
  std::optional<std::vector<double>> gammas;

  std::size_t hist_bins = 40;
  double hist_min = -5.0;
  double hist_max = 5.0;

  double z_threshold = 4.0;
  std::size_t min_samples = 1000;

  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;

  std::vector<double> intensities() const { return gammas ? *gammas : std::vector<double>{gamma}; }

  ModelSpec model_spec(double at_gamma) const {
    ModelSpec s;
    s.a = a;
    s.b = b;
    s.gamma = at_gamma;
    s.orientation = orientation;
    s.boundary = boundary;
    s.L = L;
    s.margin = margin ? *margin : (boundary == Boundary::MinusSampling ? s.circumradius() : 0.0);
    s.window_boundary = window_boundary;
    s.replications = replications;
    s.master_seed = seed;
    return s;
  }
  ModelSpec model_spec() const { return model_spec(gamma); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

template <class Enum>
Enum parse_choice(const std::string& key, const std::string& text,
                  const std::map<std::string, Enum>& choices) {
  const auto it = choices.find(trim(text));
  if (it != choices.end()) return it->second;
  std::string names;
  for (const auto& [name, _] : choices) names += (names.empty() ? "" : ", ") + name;
  throw ConfigError(key + ": expected one of " + names + ", got '" + text + "'");
}

inline const std::map<std::string, Orientation> kOrientations{{"aligned", Orientation::Aligned},
                                                              {"isotropic", Orientation::Isotropic}};
inline const std::map<std::string, Boundary> kBoundaries{{"torus", Boundary::TorusPeriodic},
                                                         {"minus", Boundary::MinusSampling}};
inline const std::map<std::string, WindowBoundary> kWindowBoundaries{
    {"exclude", WindowBoundary::Exclude}, {"include", WindowBoundary::Include}};

template <class Enum>
std::string choice_name(Enum v, const std::map<std::string, Enum>& choices) {
  for (const auto& [name, value] : choices)
    if (value == v) return name;
  return {};
}

}  // namespace detail

/// Parses a configuration, starting from the defaults of RunConfig.
inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  const std::map<std::string, std::map<std::string, Setter>> schema{
      {"model",
       {{"a", [](RunConfig& c, auto& k, auto& v) { c.a = detail::parse_double(k, v); }},
        {"b", [](RunConfig& c, auto& k, auto& v) { c.b = detail::parse_double(k, v); }},
        {"gamma", [](RunConfig& c, auto& k, auto& v) { c.gamma = detail::parse_double(k, v); }},
        {"orientation",
         [](RunConfig& c, auto& k, auto& v) { c.orientation = detail::parse_choice(k, v, detail::kOrientations); }}}},
      {"domain",
       {{"boundary",
         [](RunConfig& c, auto& k, auto& v) { c.boundary = detail::parse_choice(k, v, detail::kBoundaries); }},
        {"L", [](RunConfig& c, auto& k, auto& v) { c.L = detail::parse_double(k, v); }},
        {"margin",
         [](RunConfig& c, auto& k, auto& v) {
           if (detail::trim(v) == "auto") {
             c.margin.reset();
           } else {
             c.margin = detail::parse_double(k, v);
           }
         }},
        {"window_boundary", [](RunConfig& c, auto& k, auto& v) {
           c.window_boundary = detail::parse_choice(k, v, detail::kWindowBoundaries);
         }}}},
      {"run",
       {{"replications",
         [](RunConfig& c, auto& k, auto& v) { c.replications = detail::parse_integer<std::size_t>(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = detail::parse_integer<std::uint64_t>(k, v); }},
        {"bootstrap",
         [](RunConfig& c, auto& k, auto& v) { c.bootstrap = detail::parse_integer<std::size_t>(k, v); }},
        {"bootstrap_seed",
         [](RunConfig& c, auto& k, auto& v) { c.bootstrap_seed = detail::parse_integer<std::uint64_t>(k, v); }}}},
      {"sweep", {{"gammas", [](RunConfig& c, auto& k, auto& v) { c.gammas = detail::parse_list(k, v); }}}},
      {"hist",
       {{"bins", [](RunConfig& c, auto& k, auto& v) { c.hist_bins = detail::parse_integer<std::size_t>(k, v); }},
        {"min", [](RunConfig& c, auto& k, auto& v) { c.hist_min = detail::parse_double(k, v); }},
        {"max", [](RunConfig& c, auto& k, auto& v) { c.hist_max = detail::parse_double(k, v); }}}},
      {"validate",
       {{"z_threshold", [](RunConfig& c, auto& k, auto& v) { c.z_threshold = detail::parse_double(k, v); }},
        {"min_samples",
         [](RunConfig& c, auto& k, auto& v) { c.min_samples = detail::parse_integer<std::size_t>(k, v); }}}},
      {"output", {{"dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = detail::trim(v); }}}},
  };

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto sec = schema.find(section);
    if (sec == schema.end()) {
      if (body.empty()) throw ConfigError("config: unknown section or key '" + section + "' outside a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      it->second(cfg, section + "." + key, node.data());
    }
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

/// Writes every field, so that parse_config(to_ini(c)) == c.
inline std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o << "[model]\n"
    << "a = " << format_double(c.a) << "\n"
    << "b = " << format_double(c.b) << "\n"
    << "gamma = " << format_double(c.gamma) << "\n"
    << "orientation = " << detail::choice_name(c.orientation, detail::kOrientations) << "\n\n"
    << "[domain]\n"
    << "boundary = " << detail::choice_name(c.boundary, detail::kBoundaries) << "\n"
    << "L = " << format_double(c.L) << "\n"
    << "margin = " << (c.margin ? format_double(*c.margin) : "auto") << "\n"
    << "window_boundary = " << detail::choice_name(c.window_boundary, detail::kWindowBoundaries) << "\n\n"
    << "[run]\n"
    << "replications = " << c.replications << "\n"
    << "seed = " << c.seed << "\n"
    << "bootstrap = " << c.bootstrap << "\n"
    << "bootstrap_seed = " << c.bootstrap_seed << "\n\n";
  if (c.gammas) {
    o << "[sweep]\ngammas = ";
    for (std::size_t k = 0; k < c.gammas->size(); ++k) o << (k ? ", " : "") << format_double((*c.gammas)[k]);
    o << "\n\n";
  }
  o << "[hist]\n"
    << "bins = " << c.hist_bins << "\n"
    << "min = " << format_double(c.hist_min) << "\n"
    << "max = " << format_double(c.hist_max) << "\n\n"
    << "[validate]\n"
    << "z_threshold = " << format_double(c.z_threshold) << "\n"
    << "min_samples = " << c.min_samples << "\n\n"
    << "[output]\n"
    << "dir = " << c.out_dir << "\n";
  return o.str();
}

}  // namespace boolmodel
