#include <chrono>
#include <cstdio>
#include <exception>

#include "criteria.hpp"

int main() {
    int failures = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto fn : acceptance::all_criteria()) {
        acceptance::Result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.pass = false;
            r.name = "(criterion threw)";
            r.detail = e.what();
        }
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s: %d/12 criteria passed in %.1f s\n",
                failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", 12 - failures,
                wall);
    return failures == 0 ? 0 : 1;
}
