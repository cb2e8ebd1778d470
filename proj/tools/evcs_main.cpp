#include "evcs/cli.hpp"

int main(int argc, char** argv) { return evcs::cli_main(argc, argv); }
