#include "cli.hpp"

int main(int argc, char** argv) { return plateau_cli::run_cli(argc, argv); }
