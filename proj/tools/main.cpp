#include "sl2dyn/cli.hpp"

int main(int argc, char** argv) { return sl2dyn::run_cli(argc, argv); }
