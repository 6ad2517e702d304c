#include "ark/cli.hpp"

int main(int argc, char** argv) { return ark::cli_main(argc, argv); }
