#include "cli/commands.hpp"

int main(int argc, char** argv) { return segunc::cli::run(argc, argv); }
