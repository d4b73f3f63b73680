// Run configuration of the hyperksh command line tool, shared by flags and
// JSON config files.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperksh/quadratic_dynamics.hpp"

namespace hyperksh::cli {

/// A configuration problem; field() names the offending key or flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  QuadraticHamiltonian hamiltonian = QuadraticHamiltonian::canonical(1.0);
  /// Exactly one of t_grid / t_pi is used; neither means the command default.
  std::optional<Range> t_grid;
  std::vector<PiRational> t_pi;
  Range p_grid{-2.0, 2.0, 5};
  Range q_grid{-2.0, 2.0, 5};
  std::map<std::string, double> tolerances;
  std::string output_path = "-";
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 20240611;

  bool has_times() const { return t_grid.has_value() || !t_pi.empty(); }
  double tolerance(const std::string& name) const;
};

/// Tolerance names understood by the commands, with their defaults.
const std::map<std::string, double>& default_tolerances();

Range parse_range(const std::string& text, const std::string& field);
std::vector<PiRational> parse_pi_list(const std::string& text, const std::string& field);
/// "pmin:pmax:n,qmin:qmax:n".
std::pair<Range, Range> parse_y_grid(const std::string& text);
std::pair<std::string, double> parse_tolerance(const std::string& text);
OutputFormat parse_format(const std::string& text);
std::string to_string(OutputFormat f);

/// Checks invariants that flags and files share; throws ConfigError.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
/// Rejects unknown keys.
RunConfig from_json(const nlohmann::json& j);

}  // namespace hyperksh::cli
