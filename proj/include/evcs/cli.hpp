#pragma once

namespace evcs {

// Entry point behind the evcs binary, separated so tests can drive the full
// command surface in process. Returns the process exit code: 0 on success,
// 2 on a configuration or usage error, 3 on a missing artifact.
int cli_main(int argc, const char* const* argv);

}  // namespace evcs
