#include "sfc/cli.hpp"

int main(int argc, char** argv) { return sfc::run_cli(argc, argv); }
