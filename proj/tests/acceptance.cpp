#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "hypbdry/plane.hpp"
#include "selftest.hpp"

int main() {
  hypbdry::selftest::Options opt;
  opt.cache_dir = hypbdry::OrbitCache::default_dir();
  auto results = hypbdry::selftest::run(opt);
  std::cout << hypbdry::selftest::format_report(results, true);
  bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
