#include "mvop/cli.hpp"

int main(int argc, char** argv) { return mvop::cli::run_cli(argc, argv); }
