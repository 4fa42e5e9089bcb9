#pragma once

namespace rankstab {

/// Command-line entry point. Exit codes: 0 success, 2 config/usage error,
/// 3 data error, 4 records error, 1 unexpected failure.
int cli_main(int argc, const char* const* argv);

}  // namespace rankstab
