#include "opfree/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace opfree::report {

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Warn: return "WARN";
    case Status::Fail: return "FAIL";
  }
  return "?";
}

int Report::fail_count() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(),
                    [](const CheckRecord& c) { return c.status == Status::Fail; }));
}

int Report::warn_count() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(),
                    [](const CheckRecord& c) { return c.status == Status::Warn; }));
}

double Report::max_defect() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.defect);
  return worst;
}

CheckRecord& Report::add(std::string label, std::string identity_name, double defect,
                         double tolerance, std::string inputs) {
  CheckRecord rec;
  rec.label = std::move(label);
  rec.identity = std::move(identity_name);
  rec.inputs = std::move(inputs);
  rec.defect = defect;
  rec.tolerance = tolerance;
  rec.status = defect <= tolerance ? Status::Pass : Status::Fail;
  checks.push_back(std::move(rec));
  return checks.back();
}

CheckRecord& Report::add_banded(std::string label, std::string identity_name, double defect,
                                double tolerance, double warn_limit, std::string inputs) {
  CheckRecord& rec = add(std::move(label), std::move(identity_name), defect, tolerance,
                         std::move(inputs));
  if (rec.status == Status::Fail && defect <= warn_limit) rec.status = Status::Warn;
  return rec;
}

std::string format_defect(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", value);
  return buf;
}

void write(std::ostream& os, const Report& report) {
  os << "suite: " << report.suite << "\n";
  os << "identity: " << report.identity << "\n";
  for (const auto& [key, value] : report.environment)
    os << "env: " << key << "=" << value << "\n";
  if (!report.note.empty()) os << "note: " << report.note << "\n";
  if (report.vacuous) os << "note: vacuous (no nontrivial instances at this configuration)\n";
  for (const auto& c : report.checks) {
    os << "check: label=" << c.label << " identity=" << c.identity
       << " defect=" << format_defect(c.defect) << " tolerance=" << format_defect(c.tolerance)
       << " status=" << status_name(c.status);
    if (!c.inputs.empty()) os << " inputs=" << c.inputs;
    os << "\n";
  }
  os << "summary: checks=" << report.checks.size() << " pass="
     << report.checks.size() - report.fail_count() - report.warn_count()
     << " warn=" << report.warn_count() << " fail=" << report.fail_count()
     << " max_defect=" << format_defect(report.max_defect()) << "\n";
}

void write_all(std::ostream& os, const std::vector<Report>& reports) {
  bool first = true;
  for (const auto& r : reports) {
    if (!first) os << "\n";
    first = false;
    write(os, r);
  }
}

}  // namespace opfree::report
