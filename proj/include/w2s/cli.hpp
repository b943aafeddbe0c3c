#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace w2s {

// Runs one command-line invocation. `args` holds the arguments after the
// program name, in order. Results go to `out`; failures produce exactly one
// line on `err`. Returns the process exit code: 0 success, 1 runtime
// failure, 2 usage or input error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace w2s
