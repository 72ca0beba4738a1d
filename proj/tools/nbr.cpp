#include <vector>

#include "nbr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nbr::cli::dispatch(args);
}
