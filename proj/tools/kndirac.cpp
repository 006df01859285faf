#include "kndirac/cli.hpp"

int main(int argc, char** argv) { return kn::cli::main(argc, argv); }
