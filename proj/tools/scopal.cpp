#include <iostream>

#include "scopal/cli.hpp"
#include "scopal/config.hpp"

int main(int argc, char** argv) {
  return scopal::run_cli({argv + 1, argv + argc}, std::cout, std::cerr,
                         scopal::scopal_environment());
}
