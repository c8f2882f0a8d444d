// Runs every acceptance check at full size and prints one PASS/FAIL line per
// criterion. Exits 0 only when all of them pass.

#include <cstdio>
#include <exception>

#include "edtlab/validation.hpp"

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  try {
    int failed = 0;
    const auto results = edtlab::run_validation({}, [&](const edtlab::CheckResult& r) {
      std::printf("%s\n", edtlab::format_check(r).c_str());
      if (!r.passed) ++failed;
    });
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
                results.size());
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
}
