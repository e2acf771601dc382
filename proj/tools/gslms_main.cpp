#include "gslms/cli.hpp"

int main(int argc, char** argv) { return gslms::cli_main(argc, argv); }
