// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <cstdlib>
#include <iostream>

#include "spectra/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace spectra::acceptance;
  bool all = true;
  for (const auto& c : checks()) {
    if (argc > 1 && std::atoi(argv[1]) != c.id) continue;
    CheckResult r = run_check(c.id);
    std::cout << format_line(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
