#include <string>
#include <vector>

#include "appeco/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return appeco::cli_dispatch(args);
}
