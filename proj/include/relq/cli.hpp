#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relq {

/// The shell: loads a model, then runs queries from -e, a script file, or an
/// interactive read-eval-print loop with `;` terminators. Exit codes:
/// 0 success, 1 SQL/validation errors, 2 model/config errors.
int runCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err);

}  // namespace relq
