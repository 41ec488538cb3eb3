#include "attb/cli.hpp"

int main(int argc, char** argv) { return attb::cli::main_entry(argc, argv); }
