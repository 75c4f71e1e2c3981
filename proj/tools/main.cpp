#include "loadcast/cli.hpp"

int main(int argc, char** argv) { return loadcast::cli_main(argc, argv); }
