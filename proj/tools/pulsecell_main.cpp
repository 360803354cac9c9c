#include <string>
#include <vector>

#include "pulsecell/config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pulsecell::run_cli(args);
}
