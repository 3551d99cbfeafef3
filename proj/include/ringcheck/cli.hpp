#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ringcheck {

// Command-line front end. Subcommands: check, explore, simulate, sweep,
// export-smv. Returns the process exit status: 0 all property verdicts match
// expectations, 1 property mismatch, 2 usage or input error, 3 resource limit.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ringcheck
