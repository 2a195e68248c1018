#include "convlim/report.hpp"

#include <sstream>

namespace convlim {

void Check::merge(const Check& other) {
  cases += other.cases;
  if (other.failures > 0 && failures == 0) witness = other.witness;
  failures += other.failures;
}

Check& Report::add(std::string name) {
  checks_.push_back(Check{std::move(name)});
  return checks_.back();
}

void Report::absorb(const Report& other, const std::string& prefix) {
  for (Check c : other.checks_) {
    c.name = prefix + c.name;
    checks_.push_back(std::move(c));
  }
}

bool Report::passed() const {
  for (const auto& c : checks_) {
    if (!c.passed()) return false;
  }
  return true;
}

const Check* Report::first_failure() const {
  for (const auto& c : checks_) {
    if (!c.passed()) return &c;
  }
  return nullptr;
}

std::string Report::summary() const {
  std::ostringstream out;
  out << "[" << (passed() ? "PASS" : "FAIL") << "] " << suite_ << "\n";
  for (const auto& c : checks_) {
    out << "  " << (c.passed() ? "ok  " : "FAIL") << " " << c.name << " (" << c.cases << " cases";
    if (!c.passed()) out << ", " << c.failures << " failed";
    out << ")\n";
    if (!c.passed()) out << "       witness: " << c.witness << "\n";
  }
  return out.str();
}

}  // namespace convlim
