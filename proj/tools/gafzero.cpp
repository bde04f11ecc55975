#include "gafzero/cli.hpp"

int main(int argc, char** argv) { return gafzero::run_cli(argc, argv); }
