#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dnflow/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Verification suite: oracles, derivative tests and property checks"};
  std::string profile = "quick";
  std::string csv;
  std::vector<std::string> only;
  app.add_option("--profile", profile, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--csv", csv, "also write a CSV report to this path");
  app.add_option("--only", only, "run only these check ids");
  CLI11_PARSE(app, argc, argv);

  const auto p = profile == "full" ? dnflow::VerifyProfile::Full : dnflow::VerifyProfile::Quick;
  const auto report = dnflow::run_all(p, {}, only, [](const dnflow::CheckResult& c) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << " (" << c.seconds << "s)" << std::endl;
  });
  std::cout << '\n';
  dnflow::write_report_text(std::cout, report);
  if (!csv.empty()) {
    std::ofstream file(csv);
    dnflow::write_report_csv(file, report);
    if (!file) {
      std::cerr << "cannot write " << csv << '\n';
      return 2;
    }
  }
  return report.all_passed() ? 0 : 1;
}
