#include "miniworld/cli.hpp"

int main(int argc, char** argv) { return miniworld::cli_main(argc, argv); }
