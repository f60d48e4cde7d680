#include "mfg/error.hpp"
#include "mfg/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mfg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(std::string const &key, std::string const &expected)
{
  throw ConfigError("config key '" + key + "': expected " + expected);
}

void only_keys(json const &obj, std::string const &where, std::initializer_list<char const *> keys)
{
  for (auto const &[k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](char const *x) { return k == x; })) {
      throw ConfigError("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
    }
  }
}

double number(json const &v, std::string const &key)
{
  if (!v.is_number()) bad(key, "number");
  return v.get<double>();
}

long integer(json const &v, std::string const &key)
{
  if (!v.is_number_integer()) bad(key, "integer");
  return v.get<long>();
}

std::string string(json const &v, std::string const &key)
{
  if (!v.is_string()) bad(key, "string");
  return v.get<std::string>();
}

} // namespace

bool RunConfig::wants(std::string_view format) const
{
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(json const &doc)
{
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  only_keys(doc, "",
            {"preset", "overrides", "grid", "steps", "max_iters", "tol", "history_stride", "output_dir", "snapshots",
             "formats"});
  RunConfig c;
  if (!doc.contains("preset")) throw ConfigError("config key 'preset': required");
  c.preset = string(doc["preset"], "preset");

  if (doc.contains("overrides")) {
    if (!doc["overrides"].is_object()) bad("overrides", "object");
    c.overrides = doc["overrides"];
  }
  // Name and override keys are checked here so a bad config fails before any work.
  preset_parameters(c.preset, c.overrides);

  if (doc.contains("grid")) {
    json const &g = doc["grid"];
    if (!g.is_object()) bad("grid", "object");
    only_keys(g, "grid", {"nx", "nt"});
    if (g.contains("nx")) c.grid.nx = static_cast<int>(integer(g["nx"], "grid.nx"));
    if (g.contains("nt")) c.grid.nt = static_cast<int>(integer(g["nt"], "grid.nt"));
    if (c.grid.nx < 2) bad("grid.nx", "integer >= 2");
    if (c.grid.nt < 2) bad("grid.nt", "integer >= 2");
  }

  if (doc.contains("steps")) {
    json const &s = doc["steps"];
    if (!s.is_object()) bad("steps", "object");
    only_keys(s, "steps", {"tau_rho", "tau_m", "tau_a", "tau_phi_t", "tau_grad_phi", "tau_phi0"});
    auto set = [&](char const *k, double &dst) {
      if (!s.contains(k)) return;
      dst = number(s[k], std::string("steps.") + k);
      if (!(dst > 0.0)) bad(std::string("steps.") + k, "number > 0");
    };
    set("tau_rho", c.steps.tau_rho);
    set("tau_m", c.steps.tau_m);
    set("tau_a", c.steps.tau_a);
    set("tau_phi_t", c.steps.tau_phi_t);
    set("tau_grad_phi", c.steps.tau_grad_phi);
    set("tau_phi0", c.steps.tau_phi0);
  }

  if (doc.contains("max_iters")) {
    c.max_iters = integer(doc["max_iters"], "max_iters");
    if (c.max_iters < 1) bad("max_iters", "integer >= 1");
  }
  if (doc.contains("tol")) {
    c.tol = number(doc["tol"], "tol");
    if (!(c.tol > 0.0)) bad("tol", "number > 0");
  }
  if (doc.contains("history_stride")) {
    c.history_stride = integer(doc["history_stride"], "history_stride");
    if (c.history_stride < 1) bad("history_stride", "integer >= 1");
  }
  if (doc.contains("output_dir")) c.output_dir = string(doc["output_dir"], "output_dir");

  if (doc.contains("snapshots")) {
    json const &s = doc["snapshots"];
    if (!s.is_array()) bad("snapshots", "array of numbers in [0, 1]");
    c.snapshots.clear();
    for (auto const &v : s) {
      if (!v.is_number()) bad("snapshots", "array of numbers in [0, 1]");
      double const t = v.get<double>();
      if (!(t >= 0.0 && t <= 1.0)) bad("snapshots", "array of numbers in [0, 1]");
      c.snapshots.push_back(t);
    }
  }
  if (doc.contains("formats")) {
    json const &f = doc["formats"];
    if (!f.is_array()) bad("formats", "array of \"csv\" / \"pgm\"");
    c.formats.clear();
    for (auto const &v : f) {
      if (!v.is_string() || (v != "csv" && v != "pgm")) bad("formats", "array of \"csv\" / \"pgm\"");
      c.formats.push_back(v.get<std::string>());
    }
  }
  return c;
}

RunConfig parse_config_text(std::string const &text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (json::parse_error const &e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json config_to_json(RunConfig const &c)
{
  return {
    {"preset", c.preset},
    {"overrides", c.overrides},
    {"grid", {{"nx", c.grid.nx}, {"nt", c.grid.nt}}},
    {"steps",
     {{"tau_rho", c.steps.tau_rho},
      {"tau_m", c.steps.tau_m},
      {"tau_a", c.steps.tau_a},
      {"tau_phi_t", c.steps.tau_phi_t},
      {"tau_grad_phi", c.steps.tau_grad_phi},
      {"tau_phi0", c.steps.tau_phi0}}},
    {"max_iters", c.max_iters},
    {"tol", c.tol},
    {"history_stride", c.history_stride},
    {"output_dir", c.output_dir},
    {"snapshots", c.snapshots},
    {"formats", c.formats},
  };
}

std::string serialize_config(RunConfig const &c)
{
  return config_to_json(c).dump(2) + "\n";
}

} // namespace mfg
