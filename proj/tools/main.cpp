#include <vector>

#include "cuspfit/cli.hpp"

int main(int argc, char** argv) {
  return cuspfit::run_cli(std::vector<std::string>(argv, argv + argc));
}
