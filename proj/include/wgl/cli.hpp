#pragma once

namespace wgl::cli {

/// Exit codes: 0 success, 1 usage, 2 precondition or failed verification,
/// 3 resource budget exceeded.
int run(int argc, char** argv);

}  // namespace wgl::cli
