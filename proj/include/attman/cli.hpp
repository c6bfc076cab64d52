#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attman::cli {

/// Runs one command line. Exit codes: 0 success, 1 numerical or I/O
/// failure, 2 bad arguments.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace attman::cli
