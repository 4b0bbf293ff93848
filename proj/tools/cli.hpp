#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellrisk/model.hpp"

namespace ellrisk::cli {

struct ReturnsTable {
  std::vector<std::string> columns;
  Matrix rows;  // one observation per row
};

// Header row of names, then comma-separated decimal rows. ParseError names the
// 1-based line and column of the first bad cell.
ReturnsTable parse_returns_csv(std::istream& in);

nlohmann::json model_to_json(const EllipticalDist& dist);
EllipticalDist model_from_json(const nlohmann::json& j);

// args excludes the program name. Returns the process exit code:
// 0 success, 1 usage error, 2 domain error (error JSON on err).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ellrisk::cli
