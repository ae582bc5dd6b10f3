#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace opfree::report {

enum class Status { Pass, Warn, Fail };

const char* status_name(Status s);

struct CheckRecord {
  std::string label;     // what was evaluated
  std::string identity;  // which algebraic identity the check certifies
  std::string inputs;    // fingerprint of the inputs exercised
  double defect = 0.0;
  double tolerance = 0.0;
  Status status = Status::Pass;
};

struct Report {
  std::string suite;
  std::string identity;
  std::vector<std::pair<std::string, std::string>> environment;
  std::vector<CheckRecord> checks;
  bool vacuous = false;
  std::string note;

  int fail_count() const;
  int warn_count() const;
  double max_defect() const;
  bool passed() const { return fail_count() == 0; }

  CheckRecord& add(std::string label, std::string identity_name, double defect, double tolerance,
                   std::string inputs = "");
  // Defect/tolerance record with WARN band: defect in (tolerance, warn_limit].
  CheckRecord& add_banded(std::string label, std::string identity_name, double defect,
                          double tolerance, double warn_limit, std::string inputs = "");
};

std::string format_defect(double value);
void write(std::ostream& os, const Report& report);
void write_all(std::ostream& os, const std::vector<Report>& reports);

}  // namespace opfree::report
