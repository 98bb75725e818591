// validate.hpp — self-check suites behind the `validate` subcommand

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gridqfi {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed{true};
    bool informational{false}; // reported, never gating
    double worst{0.0};         // worst residual observed
    double tolerance{0.0};
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

inline constexpr std::uint64_t kDefaultValidationSeed = 7;

// suite: generators, qfim, grid or all. Throws ValidationError otherwise.
ValidationReport run_validation(const std::string& suite, std::uint64_t seed = kDefaultValidationSeed);

// One line per check, then a summary naming the worst failing residual.
void print_report(std::ostream& out, const ValidationReport& report);

} // namespace gridqfi
