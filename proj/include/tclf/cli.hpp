#pragma once

namespace tclf::cli {

/// Entry point for the `tclf` tool. Exit codes: 0 success, 1 usage error,
/// 2 data/validation error, 3 numeric failure.
int run(int argc, const char* const* argv);

}  // namespace tclf::cli
