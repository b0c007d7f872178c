#include "structmatrix/cli.hpp"

int main(int argc, char** argv) { return structmatrix::cli::run(argc, argv); }
