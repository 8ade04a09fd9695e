#pragma once

namespace maltls {

// Entry point for the maltls command-line tool. Exit codes: 0 success or
// Accepted, 2 Rejected, 3 Indeterminate, 1 operational error.
int cli_main(int argc, char** argv);

}  // namespace maltls
