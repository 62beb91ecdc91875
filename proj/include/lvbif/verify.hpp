#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lvbif/diagram.hpp"

namespace lvbif {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0;      // the measured residual or statistic
    double tolerance = 0;  // what it was compared against
    std::string detail;
};

struct CriterionResult {
    int number = 0;
    std::string title;
    std::vector<Check> checks;
    bool pass() const;
};

// Deliberate faults for exercising the failure paths.
struct FaultHooks {
    double k3_delta = 0;  // added to k3 before the conditions checks
};

struct VerifyContext {
    std::string config_dir;  // saddle.json and elliptic.json are read from here
    FaultHooks faults;
    unsigned seed = 20240611;  // random parameter sets
    // diagrams built once per context, keyed by config file name
    std::shared_ptr<std::map<std::string, Diagram>> diagrams = std::make_shared<std::map<std::string, Diagram>>();
};

struct SuiteReport {
    std::string suite;
    std::vector<CriterionResult> criteria;
    double seconds = 0;
    bool pass() const;
};

// Suites: "normalform" (criteria 3-6), "continuation" (1, 2, 9), "global" (7, 8, 10), "all".
std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& suite, VerifyContext& ctx);

// Individual criteria, numbered as in the acceptance list.
CriterionResult run_criterion(int number, VerifyContext& ctx);
inline constexpr int kCriterionCount = 10;

// The diagram of a config file in ctx.config_dir, built on first use.
const Diagram& context_diagram(VerifyContext& ctx, const std::string& file);

// Applies "fault.<name>=<value>" assignments; returns false for names that are not fault hooks.
bool apply_fault(FaultHooks& f, const std::string& name, double value);

}  // namespace lvbif
