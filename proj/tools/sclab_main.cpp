#include "sclab/cli.hpp"

int main(int argc, char** argv) { return sclab::cli::main_entry(argc, argv); }
