#pragma once

namespace wlvm {

// Entry point behind the `wlvm` binary. Exit codes: 0 success, 1 usage,
// 2 data error, 3 non-convergence (results are still written).
int cli_main(int argc, const char* const* argv);

}  // namespace wlvm
