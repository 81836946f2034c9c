// Release gate: runs every validation check at full scale and prints one
// pass/fail line per check.  Exit status 0 only when all of them pass.

#include <cstdio>
#include <vector>

#include "relaypower/validate.hpp"

int main() {
    using relaypower::validate::CheckResult;
    using relaypower::validate::Scale;

    std::printf("running full validation suite\n");
    std::fflush(stdout);

    std::vector<CheckResult> results;
    try {
        results = relaypower::validate::run_validation(Scale::full);
    } catch (const std::exception& e) {
        std::printf("validation aborted: %s\n", e.what());
        return 1;
    }

    int failed = 0;
    const int total = static_cast<int>(results.size());
    for (int i = 0; i < total; ++i) {
        const CheckResult& r = results[static_cast<std::size_t>(i)];
        if (!r.pass) ++failed;
        std::printf("[%d/%d] %-24s %s (%.1fs) %s\n", i + 1, total,
                    r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
    }
    if (failed == 0)
        std::printf("all %d checks passed\n", total);
    else
        std::printf("%d of %d checks failed\n", failed, total);
    return failed == 0 ? 0 : 1;
}
