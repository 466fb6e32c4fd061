// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#include "spaceform/suites.hpp"

using namespace spaceform;

namespace {

const char* kTitles[] = {
    "",
    "field identities of the four support cases",
    "auxiliary function over the c~ grid",
    "half-space to ball isometry",
    "two-horosphere closed-form example",
    "integral identity on the two-horosphere data",
    "boundary Hessian on the support",
    "Minkowski formula and mean-curvature balance",
    "finite element convergence and rigidity",
    "coercivity and the eigenvalue bound",
    "determinism of the full report",
};

std::string serialize(const VerificationReport& rep) {
  std::ostringstream os;
  write_json_lines(os, rep);
  return os.str();
}

}  // namespace

int main() {
  const SuiteConfig cfg;
  bool all = true;
  VerificationReport first;
  for (int k = 1; k <= kCriterionCount; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    std::string note;
    try {
      rep = run_criterion(k, cfg);
    } catch (const std::exception& e) {
      note = std::string(" threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = note.empty() && rep.all_pass();
    all = all && pass;
    int failed = 0;
    for (const auto& r : rep.records()) failed += r.pass ? 0 : 1;
    std::printf("criterion %2d %s  %-46s %3zu checks, %d failed, %.2fs%s\n", k, pass ? "PASS" : "FAIL", kTitles[k],
                rep.size(), failed, secs, note.c_str());
    for (const auto& r : rep.records())
      if (!r.pass) std::printf("    %s: residual %.4e, tolerance %.4e\n", r.name.c_str(), r.residual, r.tolerance);
    first.append(rep);
  }
  const std::string a = serialize(first);
  const std::string b = serialize(full_suite(cfg));
  const bool same = !a.empty() && a == b;
  all = all && same;
  std::printf("criterion 10 %s  %-46s %zu bytes %s\n", same ? "PASS" : "FAIL", kTitles[10], a.size(),
              same ? "identical" : "differ");
  return all ? 0 : 1;
}
