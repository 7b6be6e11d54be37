#pragma once

#include <iosfwd>

namespace ppsim {

/// Runs the ppsim command line. Returns the process exit code. On failure a
/// single line "ppsim: error: <kind>: <message>" goes to `err`, where kind is
/// one of usage, manifest, io, config, runtime.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppsim
