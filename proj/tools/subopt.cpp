#include "subopt/cli.hpp"

int main(int argc, char** argv) { return subopt::run_cli(argc, argv); }
