#include "run_config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace hyperksh::cli {

using nlohmann::json;

namespace {

double parse_double(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError(field, "not a finite number: '" + text + "'");
  }
  return v;
}

long parse_long(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "not an integer: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(field, "not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

void validate_range(const Range& r, const std::string& field) {
  if (r.count < 1) throw ConfigError(field, "count must be >= 1");
  if (!std::isfinite(r.start) || !std::isfinite(r.stop)) {
    throw ConfigError(field, "bounds must be finite");
  }
  if (r.count > 1 && !(r.stop > r.start)) {
    throw ConfigError(field, "grid with count > 1 needs stop > start");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + "." + key, "missing");
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

long integer_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + "." + key, "missing");
  if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key, "expected an integer");
  return j.at(key).get<long>();
}

Range range_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"start", "stop", "count"}, where);
  Range r{number_at(j, "start", where), number_at(j, "stop", where),
          static_cast<int>(integer_at(j, "count", where))};
  validate_range(r, where);
  return r;
}

json range_to_json(const Range& r) { return {{"start", r.start}, {"stop", r.stop}, {"count", r.count}}; }

}  // namespace

std::vector<double> Range::values() const {
  std::vector<double> v;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) v.push_back(start + (stop - start) * i / (count - 1));
  return v;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults = {
      {"norm_closed", 1e-12}, {"norm_quad", 1e-8}, {"gram", 1e-8},
      {"fourier", 1e-10},     {"sb", 1e-9},        {"sb_constant", 1e-9},
  };
  return defaults;
}

double RunConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

Range parse_range(const std::string& text, const std::string& field) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(field, "expected start:stop:count, got '" + text + "'");
  Range r{parse_double(parts[0], field), parse_double(parts[1], field),
          static_cast<int>(parse_long(parts[2], field))};
  validate_range(r, field);
  return r;
}

std::vector<PiRational> parse_pi_list(const std::string& text, const std::string& field) {
  std::vector<PiRational> out;
  for (const auto& item : split(text, ',')) {
    const auto kd = split(item, '/');
    if (kd.size() != 2) throw ConfigError(field, "expected k/d, got '" + item + "'");
    PiRational t{parse_long(kd[0], field), parse_long(kd[1], field)};
    if (t.d <= 0) throw ConfigError(field, "denominator must be positive in '" + item + "'");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::pair<Range, Range> parse_y_grid(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw ConfigError("--y-grid", "expected pmin:pmax:n,qmin:qmax:n, got '" + text + "'");
  }
  return {parse_range(parts[0], "--y-grid"), parse_range(parts[1], "--y-grid")};
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("--tol", "expected NAME=VALUE, got '" + text + "'");
  const std::string name = text.substr(0, eq);
  if (!default_tolerances().count(name)) throw ConfigError("--tol", "unknown tolerance '" + name + "'");
  const double v = parse_double(text.substr(eq + 1), "--tol " + name);
  if (!(v > 0.0)) throw ConfigError("--tol " + name, "must be positive");
  return {name, v};
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ConfigError("format", "expected csv or json, got '" + text + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

void validate(const RunConfig& cfg) {
  const auto& H = cfg.hamiltonian;
  if (!std::isfinite(H.h11) || !std::isfinite(H.h12) || !std::isfinite(H.h22)) {
    throw ConfigError("hamiltonian", "coefficients must be finite");
  }
  if (!H.is_hyperbolic()) {
    std::ostringstream msg;
    msg << "not hyperbolic (h11 h22 - h12^2 = " << H.disc() << " >= 0)";
    throw ConfigError("hamiltonian", msg.str());
  }
  if (cfg.t_grid && !cfg.t_pi.empty()) throw ConfigError("t_grid", "give either t_grid or t_pi");
  if (cfg.t_grid) validate_range(*cfg.t_grid, "t_grid");
  for (const auto& t : cfg.t_pi) {
    if (t.d <= 0) throw ConfigError("t_pi", "denominator must be positive");
  }
  validate_range(cfg.p_grid, "y_grid.p");
  validate_range(cfg.q_grid, "y_grid.q");
  for (const auto& [name, value] : cfg.tolerances) {
    if (!default_tolerances().count(name)) throw ConfigError("tolerances." + name, "unknown tolerance");
    if (!(value > 0.0)) throw ConfigError("tolerances." + name, "must be positive");
  }
}

json to_json(const RunConfig& cfg) {
  json j;
  j["hamiltonian"] = {{"h11", cfg.hamiltonian.h11}, {"h12", cfg.hamiltonian.h12},
                      {"h22", cfg.hamiltonian.h22}};
  if (cfg.t_grid) j["t_grid"] = range_to_json(*cfg.t_grid);
  if (!cfg.t_pi.empty()) {
    json list = json::array();
    for (const auto& t : cfg.t_pi) list.push_back({t.k, t.d});
    j["t_pi"] = list;
  }
  j["y_grid"] = {{"p", range_to_json(cfg.p_grid)}, {"q", range_to_json(cfg.q_grid)}};
  j["tolerances"] = json::object();
  for (const auto& [name, value] : cfg.tolerances) j["tolerances"][name] = value;
  j["output"] = {{"path", cfg.output_path}, {"format", to_string(cfg.format)}};
  j["seed"] = cfg.seed;
  return j;
}

RunConfig from_json(const json& j) {
  reject_unknown(j, {"hamiltonian", "alpha", "t_grid", "t_pi", "y_grid", "tolerances", "output", "seed"},
                 "");
  RunConfig cfg;
  if (j.contains("alpha")) {
    if (!j["alpha"].is_number() || !(j["alpha"].get<double>() > 0.0)) {
      throw ConfigError("alpha", "expected a positive number");
    }
    cfg.hamiltonian = QuadraticHamiltonian::canonical(j["alpha"].get<double>());
  }
  if (j.contains("hamiltonian")) {
    const json& h = j["hamiltonian"];
    reject_unknown(h, {"h11", "h12", "h22"}, "hamiltonian");
    cfg.hamiltonian = {number_at(h, "h11", "hamiltonian"), number_at(h, "h12", "hamiltonian"),
                       number_at(h, "h22", "hamiltonian")};
    if (j.contains("alpha") && cfg.hamiltonian.is_hyperbolic() &&
        std::abs(cfg.hamiltonian.alpha() - j["alpha"].get<double>()) >
            1e-12 * j["alpha"].get<double>()) {
      throw ConfigError("alpha", "inconsistent with the hamiltonian coefficients");
    }
  }
  if (j.contains("t_grid")) cfg.t_grid = range_from_json(j["t_grid"], "t_grid");
  if (j.contains("t_pi")) {
    if (!j["t_pi"].is_array()) throw ConfigError("t_pi", "expected a list of [k, d] pairs");
    for (const auto& item : j["t_pi"]) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
          !item[1].is_number_integer()) {
        throw ConfigError("t_pi", "expected a list of [k, d] integer pairs");
      }
      cfg.t_pi.push_back({item[0].get<long>(), item[1].get<long>()});
    }
  }
  if (j.contains("y_grid")) {
    reject_unknown(j["y_grid"], {"p", "q"}, "y_grid");
    if (j["y_grid"].contains("p")) cfg.p_grid = range_from_json(j["y_grid"]["p"], "y_grid.p");
    if (j["y_grid"].contains("q")) cfg.q_grid = range_from_json(j["y_grid"]["q"], "y_grid.q");
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("tolerances", "expected an object");
    for (const auto& [name, value] : j["tolerances"].items()) {
      if (!value.is_number()) throw ConfigError("tolerances." + name, "expected a number");
      cfg.tolerances[name] = value.get<double>();
    }
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], {"path", "format"}, "output");
    if (j["output"].contains("path")) {
      if (!j["output"]["path"].is_string()) throw ConfigError("output.path", "expected a string");
      cfg.output_path = j["output"]["path"].get<std::string>();
    }
    if (j["output"].contains("format")) {
      if (!j["output"]["format"].is_string()) throw ConfigError("output.format", "expected a string");
      cfg.format = parse_format(j["output"]["format"].get<std::string>());
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  validate(cfg);
  return cfg;
}

}  // namespace hyperksh::cli
