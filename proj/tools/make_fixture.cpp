// Regenerates the bundled synthetic fixture: make_fixture <dir> [seed]
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "ppsim/fixture.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixture <dir> [seed]\n";
    return 2;
  }
  try {
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240601;
    ppsim::fixture::write_fixture(argv[1], seed);
    ppsim::fixture::write_calibration_fixture(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
