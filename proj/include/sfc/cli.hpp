#pragma once

namespace sfc {

// Full command-line front end. Returns the process exit code:
//   0 success, 1 validation/usage error, 2 numeric-certificate failure.
int run_cli(int argc, const char* const* argv);

}  // namespace sfc
