#pragma once

#include <iosfwd>

namespace dkb {

/// Entry point of the `declare-kb` tool. Returns the process exit status:
/// 0 success, 1 a trace violates the model (check only), 2 usage or input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dkb
