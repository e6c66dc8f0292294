#include "meshsort/cli.hpp"

int main(int argc, char** argv) { return meshsort::cli_main(argc, argv); }
