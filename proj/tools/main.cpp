#include "cli.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  int threads = 1;
  if (const char* env = std::getenv("GMN_NUM_THREADS")) {
    try {
      threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "error: GMN_NUM_THREADS must be a positive integer, got '" << env << "'\n";
      return 2;
    }
  }
  Eigen::setNbThreads(threads);
  const std::vector<std::string> args(argv, argv + argc);
  return gmn::cli::run(args, std::cout, std::cerr);
}
