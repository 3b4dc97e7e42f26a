#include "degreelab/cli.hpp"

int main(int argc, char** argv) { return degreelab::cli::main_entry(argc, argv); }
