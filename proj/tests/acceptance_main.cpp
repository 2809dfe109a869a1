// Acceptance suite: runs every verification experiment at its pinned
// tolerances and prints one pass/fail line per criterion. Exit status is the
// number of failed criteria.

#include <cstdio>
#include <string>
#include <vector>

#include "gafz/harness.hpp"

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 20240601ull;
    const std::vector<std::string> criteria{
        "borchardt-identity",        "intensity-det-perm",
        "two-point-mc",              "count-law-mc",
        "moduli-law-mc",             "hole-probability",
        "euler-binomial-moments",    "clt-proxy",
        "lln-hyperbolic",            "reconstruction-f0",
        "dynamics-sde",              "conformal-invariance",
        "gaussian-moment-permanent",
    };

    int failures = 0;
    double total_seconds = 0.0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        gafz::RunReport report;
        bool passed = false;
        std::string note;
        try {
            report = gafz::run_experiment(gafz::make_config(criteria[i], seed));
            passed = report.all_passed();
            total_seconds += report.wall_clock_seconds;
        } catch (const std::exception& e) {
            note = e.what();
        }
        std::printf("[%s] %2zu. %-28s (%.1fs)\n", passed ? "PASS" : "FAIL", i + 1,
                    criteria[i].c_str(), report.wall_clock_seconds);
        if (!passed) {
            ++failures;
            if (!note.empty()) std::printf("       error: %s\n", note.c_str());
            for (const auto& r : report.records)
                if (!r.pass)
                    std::printf("       %-52s stat=%.6g threshold=%.6g %s\n", r.name.c_str(),
                                r.statistic, r.threshold, r.detail.c_str());
        }
    }
    std::printf("%zu/%zu criteria passed (%.1fs total)\n", criteria.size() - failures,
                criteria.size(), total_seconds);
    return failures;
}
