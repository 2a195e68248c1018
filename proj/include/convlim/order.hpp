#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convlim {

/// A finite linearly ordered set of time labels. The order is declaration
/// order, not the lexicographic order of the labels.
class TimeSet {
 public:
  /// Throws std::invalid_argument on fewer than two or duplicate labels.
  explicit TimeSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool contains(std::string_view label) const;
  /// Throws std::out_of_range for unknown labels.
  std::size_t index_of(std::string_view label) const;

  bool operator==(const TimeSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

using TimeSetPtr = std::shared_ptr<const TimeSet>;

TimeSetPtr make_time_set(std::vector<std::string> labels);

/// A finite subset {p_0 < p_1 < ... < p_m} of a TimeSet with at least two
/// points, stored as sorted indices. It belongs to K_{p_0, p_m}; its cells
/// are the adjacent pairs (p_k, p_{k+1}).
class Partition {
 public:
  /// Throws std::invalid_argument unless the indices are strictly increasing,
  /// in range and at least two.
  Partition(TimeSetPtr times, std::vector<std::size_t> points);
  static Partition from_labels(TimeSetPtr times, const std::vector<std::string>& labels);
  /// The trivial partition {s, t}.
  static Partition trivial(TimeSetPtr times, std::size_t s, std::size_t t);
  /// Every point of the TimeSet lying in [s, t].
  static Partition full_grid(TimeSetPtr times, std::size_t s, std::size_t t);

  const TimeSetPtr& times() const { return times_; }
  std::span<const std::size_t> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::size_t cells() const { return points_.size() - 1; }
  std::size_t first() const { return points_.front(); }
  std::size_t last() const { return points_.back(); }
  std::size_t operator[](std::size_t k) const { return points_[k]; }
  bool contains(std::size_t point) const;
  bool is_trivial() const { return points_.size() == 2; }

  /// Points in [lo, hi]; throws if fewer than two remain.
  Partition restrict(std::size_t lo, std::size_t hi) const;
  /// Index of the first cell that starts at `point` (must be a point).
  std::size_t cell_starting_at(std::size_t point) const;

  std::string to_string() const;

  bool operator==(const Partition& other) const { return points_ == other.points_; }
  std::strong_ordering operator<=>(const Partition& other) const {
    return points_ <=> other.points_;
  }

 private:
  TimeSetPtr times_;
  std::vector<std::size_t> points_;
};

/// An ordered pair (s, t) with s <= t, as used for nested windows.
struct PairWindow {
  std::size_t s = 0;
  std::size_t t = 0;

  bool degenerate() const { return s == t; }
  /// (s, t) is contained in (u, v) iff u <= s <= t <= v.
  bool within(const PairWindow& outer) const { return outer.s <= s && t <= outer.t; }
  bool operator==(const PairWindow&) const = default;
};

/// I ⊆ J with both in the same K_{s,t}. Throws on mismatched TimeSets.
bool refines(const Partition& coarse, const Partition& fine);
/// I ⊆ J as point sets (the order of K). Throws on mismatched TimeSets.
bool is_subset(const Partition& coarse, const Partition& fine);

/// Blocks I_k = {j in J : i_k <= j <= i_{k+1}} of a refinement J of I.
/// Throws std::invalid_argument unless refines(I, J).
std::vector<Partition> decompose_blocks(const Partition& coarse, const Partition& fine);

/// Concatenates blocks that share their boundary points.
Partition merge_blocks(std::span<const Partition> blocks);

/// J = I_L ∪ Ĩ ∪ I_R for I ∈ K_{s,t} and J ⊇ I in K.
struct LcrDecomposition {
  std::vector<std::size_t> left;   ///< {j in J : j <= s}
  Partition middle;                ///< J ∩ [s, t]
  std::vector<std::size_t> right;  ///< {j in J : j >= t}
};

/// Throws std::invalid_argument unless I ⊆ J.
LcrDecomposition decompose_lcr(const Partition& coarse, const Partition& fine);

/// A finite poset of partitions together with its maximum element.
struct PartitionPoset {
  std::vector<Partition> elements;
  std::size_t maximum = 0;
};

/// All partitions of [s, t] ∩ T containing both endpoints (K_{s,t}); requires s < t.
PartitionPoset enumerate_window(const TimeSetPtr& times, std::size_t s, std::size_t t);
/// All subsets of T with at least two points (K).
PartitionPoset enumerate_all(const TimeSetPtr& times);

}  // namespace convlim
