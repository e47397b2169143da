#include "gridfisher/cli.hpp"

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  // GRIDFISHER_THREADS takes precedence over OMP_NUM_THREADS.
  if (const char* env = std::getenv("GRIDFISHER_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      std::cerr << "error: GRIDFISHER_THREADS must be a positive integer\n";
      return gridfisher::cli::kValidationError;
    }
  }
  return gridfisher::cli::run(argc, argv, std::cout, std::cerr);
}
