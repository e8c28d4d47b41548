#include <string>
#include <vector>

#include "psmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psmc::run_cli(args);
}
