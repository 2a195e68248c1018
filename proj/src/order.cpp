#include "convlim/order.hpp"

#include <algorithm>
#include <stdexcept>

namespace convlim {

TimeSet::TimeSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("a time set needs at least 2 labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw std::invalid_argument("duplicate time label '" + labels_[i] + "'");
    }
  }
}

bool TimeSet::contains(std::string_view label) const {
  return index_.find(std::string(label)) != index_.end();
}

std::size_t TimeSet::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) {
    throw std::out_of_range("unknown time label '" + std::string(label) + "'");
  }
  return it->second;
}

TimeSetPtr make_time_set(std::vector<std::string> labels) {
  return std::make_shared<const TimeSet>(std::move(labels));
}

Partition::Partition(TimeSetPtr times, std::vector<std::size_t> points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (!times_) throw std::invalid_argument("partition without a time set");
  if (points_.size() < 2) {
    throw std::invalid_argument("a partition needs at least 2 points");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k] >= times_->size()) {
      throw std::invalid_argument("partition point out of range");
    }
    if (k > 0 && points_[k - 1] >= points_[k]) {
      throw std::invalid_argument("partition points must be strictly increasing");
    }
  }
}

Partition Partition::from_labels(TimeSetPtr times, const std::vector<std::string>& labels) {
  std::vector<std::size_t> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(times->index_of(l));
  return Partition(std::move(times), std::move(idx));
}

Partition Partition::trivial(TimeSetPtr times, std::size_t s, std::size_t t) {
  return Partition(std::move(times), {s, t});
}

Partition Partition::full_grid(TimeSetPtr times, std::size_t s, std::size_t t) {
  std::vector<std::size_t> idx;
  for (std::size_t k = s; k <= t; ++k) idx.push_back(k);
  return Partition(std::move(times), std::move(idx));
}

bool Partition::contains(std::size_t point) const {
  return std::binary_search(points_.begin(), points_.end(), point);
}

Partition Partition::restrict(std::size_t lo, std::size_t hi) const {
  std::vector<std::size_t> idx;
  for (auto p : points_) {
    if (p >= lo && p <= hi) idx.push_back(p);
  }
  return Partition(times_, std::move(idx));
}

std::size_t Partition::cell_starting_at(std::size_t point) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), point);
  if (it == points_.end() || *it != point) {
    throw std::invalid_argument("point is not in the partition");
  }
  return static_cast<std::size_t>(it - points_.begin());
}

std::string Partition::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (k) out += ",";
    out += times_->label(points_[k]);
  }
  return out + "}";
}

namespace {

void require_same_times(const Partition& a, const Partition& b) {
  if (a.times() != b.times() && !(*a.times() == *b.times())) {
    throw std::invalid_argument("partitions belong to different time sets");
  }
}

}  // namespace

bool is_subset(const Partition& coarse, const Partition& fine) {
  require_same_times(coarse, fine);
  return std::includes(fine.points().begin(), fine.points().end(), coarse.points().begin(),
                       coarse.points().end());
}

bool refines(const Partition& coarse, const Partition& fine) {
  return is_subset(coarse, fine) && coarse.first() == fine.first() &&
         coarse.last() == fine.last();
}

std::vector<Partition> decompose_blocks(const Partition& coarse, const Partition& fine) {
  if (!refines(coarse, fine)) {
    throw std::invalid_argument("decompose_blocks: " + coarse.to_string() + " is not refined by " +
                                fine.to_string());
  }
  std::vector<Partition> blocks;
  blocks.reserve(coarse.cells());
  for (std::size_t k = 0; k < coarse.cells(); ++k) {
    blocks.push_back(fine.restrict(coarse[k], coarse[k + 1]));
  }
  return blocks;
}

Partition merge_blocks(std::span<const Partition> blocks) {
  if (blocks.empty()) throw std::invalid_argument("merge_blocks: no blocks");
  std::vector<std::size_t> idx(blocks[0].points().begin(), blocks[0].points().end());
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    if (blocks[b].first() != idx.back()) {
      throw std::invalid_argument("merge_blocks: blocks do not share a boundary point");
    }
    idx.insert(idx.end(), blocks[b].points().begin() + 1, blocks[b].points().end());
  }
  return Partition(blocks[0].times(), std::move(idx));
}

LcrDecomposition decompose_lcr(const Partition& coarse, const Partition& fine) {
  if (!is_subset(coarse, fine)) {
    throw std::invalid_argument("decompose_lcr: " + coarse.to_string() + " is not contained in " +
                                fine.to_string());
  }
  const std::size_t s = coarse.first();
  const std::size_t t = coarse.last();
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (auto p : fine.points()) {
    if (p <= s) left.push_back(p);
    if (p >= t) right.push_back(p);
  }
  return {std::move(left), fine.restrict(s, t), std::move(right)};
}

namespace {

PartitionPoset sorted_poset(std::vector<Partition> parts) {
  std::sort(parts.begin(), parts.end(), [](const Partition& a, const Partition& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  const std::size_t top = parts.size() - 1;
  return {std::move(parts), top};
}

}  // namespace

PartitionPoset enumerate_window(const TimeSetPtr& times, std::size_t s, std::size_t t) {
  if (!(s < t) || t >= times->size()) {
    throw std::invalid_argument("enumerate_window requires s < t");
  }
  const std::size_t interior = t - s - 1;
  std::vector<Partition> parts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
    std::vector<std::size_t> idx{s};
    for (std::size_t k = 0; k < interior; ++k) {
      if (mask >> k & 1) idx.push_back(s + 1 + k);
    }
    idx.push_back(t);
    parts.emplace_back(times, std::move(idx));
  }
  return sorted_poset(std::move(parts));
}

PartitionPoset enumerate_all(const TimeSetPtr& times) {
  const std::size_t n = times->size();
  std::vector<Partition> parts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1) idx.push_back(k);
    }
    if (idx.size() >= 2) parts.emplace_back(times, std::move(idx));
  }
  return sorted_poset(std::move(parts));
}

}  // namespace convlim
