#pragma once

namespace plateau_cli {

// Parses the command line, runs one subcommand and maps failures to exit codes.
int run_cli(int argc, char** argv);

}  // namespace plateau_cli
