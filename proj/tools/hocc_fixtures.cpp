// Writes the synthetic intersection corpus: hocc_fixtures [out_dir]

#include "fixtures.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  try {
    hocc::fixtures::write_corpus(dir);
  } catch (const std::exception& e) {
    std::cerr << "hocc_fixtures: " << e.what() << "\n";
    return 1;
  }
  std::cout << dir.string() << "\n";
  return 0;
}
