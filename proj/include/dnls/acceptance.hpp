#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace dnls {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::set<int> only;        // empty runs every criterion
    std::string work_dir = "acceptance_out";
    bool verbose = false;      // progress lines on stderr
};

// Runs the acceptance criteria, printing one PASS/FAIL line per criterion
// (plus indented info lines) to `out`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out);

}  // namespace dnls
