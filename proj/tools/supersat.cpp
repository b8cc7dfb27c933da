#include "supersat/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return supersat::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
