#include <string>
#include <vector>

#include "fermi_landauer/scenario.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fermi_landauer::run_cli(args);
}
