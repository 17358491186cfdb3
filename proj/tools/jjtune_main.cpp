#include <iostream>

#include "jjtune/shell/commands.hpp"

int main(int argc, char** argv) { return jjtune::shell::run_cli(argc, argv, std::cout, std::cerr); }
