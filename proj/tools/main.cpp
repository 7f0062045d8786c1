#include "cli.hpp"

int main(int argc, char** argv) { return seabed::cli::cli_main(argc, argv); }
