#include "fevolve/cli.hpp"

int main(int argc, char** argv) { return fevolve::cli::main(argc, argv); }
