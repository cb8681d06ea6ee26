#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perfhom {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitTrend = 3 };

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perfhom
