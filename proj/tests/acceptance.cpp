// One line per acceptance criterion; the checks behind each failure follow it, indented.
// Exit status is 0 when every criterion ran, whatever its verdict; --strict makes any failure exit 1.
#include <cstdio>
#include <cstring>
#include <string>

#include "lvbif/verify.hpp"

int main(int argc, char** argv) {
    bool strict = false, verbose = false;
    lvbif::VerifyContext ctx;
    ctx.config_dir = LVBIF_CONFIG_DIR;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--strict"))
            strict = true;
        else if (!std::strcmp(argv[i], "--verbose"))
            verbose = true;
        else if (!std::strcmp(argv[i], "--config-dir") && i + 1 < argc)
            ctx.config_dir = argv[++i];
        else {
            std::fprintf(stderr, "usage: %s [--strict] [--verbose] [--config-dir DIR]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (int n = 1; n <= lvbif::kCriterionCount; ++n) {
        const auto r = lvbif::run_criterion(n, ctx);
        std::printf("criterion %2d: %s  %s\n", n, r.pass() ? "PASS" : "FAIL", r.title.c_str());
        for (const auto& c : r.checks)
            if (verbose || !c.pass)
                std::printf("    %s %s value=%.6g tol=%.3g %s\n", c.pass ? "ok  " : "fail", c.name.c_str(), c.value,
                            c.tolerance, c.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass();
    }
    std::printf("%d of %d criteria pass\n", lvbif::kCriterionCount - failed, lvbif::kCriterionCount);
    return strict && failed ? 1 : 0;
}
