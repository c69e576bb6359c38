#include <iostream>

#include <hamclass/cli.hpp>

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return hamclass::cli::run({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
