#include "wcs/cli.hpp"

int main(int argc, char** argv) { return wcs::run_cli(argc, argv); }
