#include "psido/cli/commands.hpp"

int main(int argc, char** argv) { return psido::cli::run_command(argc, argv); }
