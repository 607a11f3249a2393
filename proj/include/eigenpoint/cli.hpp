// cli.hpp — command-line front end: config ingestion, batch commands,
// parameter-space scans, and file emission.

#pragma once

#include <string>
#include <vector>

namespace eigenpoint::cli {

// Exit codes: 0 success, 2 configuration error, 3 numerical indeterminacy.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace eigenpoint::cli
