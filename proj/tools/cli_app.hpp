#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace credible::cli {

// Full command-line surface, callable in-process for tests. `args` excludes the
// program name. Exit codes: 0 success, 1 checker found a counterexample, 2 usage,
// 3 malformed input or contract violation, 4 resource limit.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace credible::cli
