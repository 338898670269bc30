#include "consist/cli.hpp"

int main(int argc, char** argv) { return consist::cli::main(argc, argv); }
