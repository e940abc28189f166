#include "tclf/cli.hpp"

int main(int argc, char** argv) { return tclf::cli::run(argc, argv); }
