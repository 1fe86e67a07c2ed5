#include <iostream>
#include <string>
#include <vector>

#include "pdfactor/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pdfactor::cli::run(args, std::cout, std::cerr);
}
