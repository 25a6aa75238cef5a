#include "vswalk/cli.hpp"

int main(int argc, char** argv) { return vswalk::run_cli(argc, argv); }
