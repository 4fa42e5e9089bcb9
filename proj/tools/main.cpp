#include "rankstab/cli.hpp"

int main(int argc, char** argv) { return rankstab::cli_main(argc, argv); }
