// Subcommands of the hyperksh tool and their table output.
#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "run_config.hpp"

namespace hyperksh::cli {

/// An empty cell (monostate) is written as an empty CSV field or JSON null.
using Cell = std::variant<std::monostate, double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CommandResult {
  Table table;
  nlohmann::json summary = nlohmann::json::object();
  int exit_code = 0;
};

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2 };

CommandResult cmd_classify(const RunConfig& cfg);
CommandResult cmd_unitarity(const RunConfig& cfg);
CommandResult cmd_endpoints(const RunConfig& cfg);
CommandResult cmd_accept(const RunConfig& cfg, bool mutate);

/// %.17g floats, header row, LF line endings.
void write_csv(const Table& t, std::ostream& out);
/// {config, rows, summary}.
nlohmann::json to_json(const CommandResult& r, const RunConfig& cfg);

/// Entry point of the executable; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperksh::cli
