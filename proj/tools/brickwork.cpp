// Command-line front-end; all logic lives in the brickwork_cli library.

#include "brickwork/cli.hpp"

int main(int argc, char** argv) { return brickwork::run(argc, argv); }
