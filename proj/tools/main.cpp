#include "wlvm/cli.hpp"

int main(int argc, char** argv) { return wlvm::cli_main(argc, argv); }
