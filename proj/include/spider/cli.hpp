#pragma once

namespace spider::cli {

/// Full front end: parse, dispatch, emit. Exit codes: 0 success, 1 usage
/// error, 2 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace spider::cli
