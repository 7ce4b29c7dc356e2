#include <string>
#include <vector>

#include "ealab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ealab::cli::dispatch(args);
}
