#pragma once

#include <iosfwd>

namespace litcp {

/// Entry point of the `litcp` tool. Subcommands: ingest, factorize, select,
/// report, pipeline. Returns the process exit status.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace litcp
