#include <string>
#include <vector>

#include "artinfluence/cli.hpp"

int main(int argc, char** argv) {
  return artinfluence::cli::run(std::vector<std::string>(argv, argv + argc));
}
