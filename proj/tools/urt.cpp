#include <iostream>
#include <string>
#include <vector>

#include "urt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return urt::cli_main(args, std::cout, std::cerr);
}
