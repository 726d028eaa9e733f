#include <vector>

#include "vrths/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vrths::run_cli(std::move(args));
}
