#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace convlim {

/// One named verification check: how many cases were examined, how many
/// failed, and a concrete witness for the first failure.
struct Check {
  Check() = default;
  explicit Check(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string witness;

  bool passed() const { return failures == 0; }

  /// Records one case. `describe` is only invoked for the first failure.
  template <class Describe>
  void expect(bool ok, Describe&& describe) {
    ++cases;
    if (!ok && failures++ == 0) witness = std::forward<Describe>(describe)();
  }

  void fail(std::string why) {
    ++cases;
    if (failures++ == 0) witness = std::move(why);
  }

  /// Folds `other` into this check; witnesses keep the order of merging.
  void merge(const Check& other);
};

/// Verdicts of one verification suite.
class Report {
 public:
  explicit Report(std::string suite) : suite_(std::move(suite)) {}

  const std::string& suite() const { return suite_; }
  const std::deque<Check>& checks() const { return checks_; }
  double elapsed_ms() const { return elapsed_ms_; }
  void set_elapsed_ms(double ms) { elapsed_ms_ = ms; }

  /// The returned reference stays valid as further checks are added.
  Check& add(std::string name);
  void add(Check check) { checks_.push_back(std::move(check)); }

  /// Appends all checks of `other`, prefixing their names with `prefix`.
  void absorb(const Report& other, const std::string& prefix = {});

  bool passed() const;
  /// First failing check, or nullptr.
  const Check* first_failure() const;

  std::string summary() const;

 private:
  std::string suite_;
  std::deque<Check> checks_;
  double elapsed_ms_ = 0.0;
};

}  // namespace convlim
