#pragma once

#include <ostream>
#include <span>
#include <string>

namespace mixpois::cli {

/// Runs one command line (program name excluded). Data goes to `out`,
/// diagnostics to `err`. Exit codes: 0 success, 1 invalid law or failed
/// computation, 2 usage error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace mixpois::cli
