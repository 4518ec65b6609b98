// Runs the cross-validation matrix at quick scale and prints one line per
// criterion. Exit status is nonzero when any criterion fails.
//
//   acceptance [--full] [--report FILE]

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "occtime/verify.hpp"

int main(int argc, char** argv) {
  occtime::VerifyOptions opts;
  std::string report_path = "acceptance_report.json";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) opts.scale = occtime::VerifyScale::full;
    else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) report_path = argv[++i];
    else {
      std::fprintf(stderr, "usage: %s [--full] [--report FILE]\n", argv[0]);
      return 2;
    }
  }

  const auto report = occtime::run_verification(opts, [](const occtime::VerifyCriterion& c) {
    std::string worst;
    unsigned failed = 0;
    for (const auto& chk : c.checks)
      if (!chk.pass && failed++ == 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ": %.3g vs %.3g", chk.value, chk.tolerance);
        worst = "  [" + chk.name + buf;
      }
    if (failed > 1) worst += "; " + std::to_string(failed - 1) + " more failing";
    if (failed) worst += "]";
    std::printf("%s criterion %2u: %s (%.1f s)%s\n", c.pass() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds,
                worst.c_str());
    std::fflush(stdout);
  });

  std::ofstream(report_path) << report.to_json() << '\n';
  unsigned passed = 0;
  for (const auto& c : report.criteria) passed += c.pass();
  std::printf("%u/%zu criteria passed in %.1f s; report written to %s\n", passed, report.criteria.size(),
              report.seconds, report_path.c_str());
  return report.pass() ? 0 : 1;
}
