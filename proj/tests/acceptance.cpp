#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "halfwave/acceptance.hpp"

int main(int argc, char** argv) {
  halfwave::AcceptanceOptions options;
  options.output_dir = argc > 1 ? argv[1] : "acceptance_artifacts";
  for (int i = 2; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  try {
    const auto result = halfwave::run_acceptance(options, [](const halfwave::CriterionResult& r) {
      std::cout << r.line() << std::endl;
    });
    std::cout << (result.all_passed() ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
    return result.all_passed() ? 0 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "acceptance: " << ex.what() << '\n';
    return 2;
  }
}
