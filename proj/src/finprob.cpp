#include "convlim/finprob.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace convlim {

FinProbSpace::FinProbSpace(std::vector<std::string> outcomes, std::vector<Rational> weights)
    : outcomes_(std::move(outcomes)), weights_(std::move(weights)) {
  if (outcomes_.empty()) throw std::invalid_argument("a probability space needs an outcome");
  if (outcomes_.size() != weights_.size()) {
    throw std::invalid_argument("outcome and weight counts differ");
  }
  if (outcomes_.size() > std::numeric_limits<ProbMorphism::Index>::max()) {
    throw std::invalid_argument("probability space too large");
  }
  std::unordered_set<std::string> seen;
  Rational total = 0;
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (!seen.insert(outcomes_[i]).second) {
      throw std::invalid_argument("duplicate outcome label '" + outcomes_[i] + "'");
    }
    if (sgn(weights_[i]) < 0) {
      throw std::invalid_argument("negative weight for outcome '" + outcomes_[i] + "'");
    }
    total += weights_[i];
  }
  if (total != 1) {
    throw std::invalid_argument("weights sum to " + to_string(total) + ", not 1");
  }
  index_support();
}

FinProbSpace::FinProbSpace(Trusted, std::vector<std::string> outcomes,
                           std::vector<Rational> weights)
    : outcomes_(std::move(outcomes)), weights_(std::move(weights)) {
  index_support();
}

void FinProbSpace::index_support() {
  positive_.resize(weights_.size());
  support_size_ = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    positive_[i] = sgn(weights_[i]) > 0;
    support_size_ += positive_[i];
  }
}

FinProbSpace FinProbSpace::point() { return FinProbSpace({"*"}, {Rational(1)}); }

std::size_t FinProbSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i] == label) return i;
  }
  throw std::out_of_range("unknown outcome '" + std::string(label) + "'");
}

bool FinProbSpace::same_measure(const FinProbSpace& other) const {
  return weights_ == other.weights_;
}

SpacePtr make_space(std::vector<std::string> outcomes, std::vector<Rational> weights) {
  return std::make_shared<const FinProbSpace>(std::move(outcomes), std::move(weights));
}

SpacePtr point_space() {
  static const SpacePtr point = std::make_shared<const FinProbSpace>(FinProbSpace::point());
  return point;
}

SpacePtr product(std::span<const SpacePtr> factors) {
  if (factors.empty()) throw std::invalid_argument("product of no spaces");
  if (factors.size() == 1) return factors[0];
  std::size_t total = 1;
  for (const auto& f : factors) {
    total *= f->size();
    if (total > std::numeric_limits<ProbMorphism::Index>::max()) {
      throw std::invalid_argument("product space too large");
    }
  }
  // Weights and labels grow one factor at a time, so each outcome costs one
  // multiplication rather than one per factor.
  std::vector<Rational> weights{Rational(1)};
  std::vector<std::string> labels{""};
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& f = *factors[k];
    std::vector<Rational> next_w;
    std::vector<std::string> next_l;
    next_w.reserve(weights.size() * f.size());
    next_l.reserve(weights.size() * f.size());
    for (std::size_t x = 0; x < weights.size(); ++x) {
      for (std::size_t y = 0; y < f.size(); ++y) {
        next_w.push_back(weights[x] * f.weight(y));
        next_l.push_back(labels[x] + (k ? "," : "(") + f.outcome(y));
      }
    }
    weights = std::move(next_w);
    labels = std::move(next_l);
  }
  for (auto& l : labels) l += ")";
  return std::shared_ptr<const FinProbSpace>(
      new FinProbSpace(FinProbSpace::Trusted{}, std::move(labels), std::move(weights)));
}

SpacePtr product(std::initializer_list<SpacePtr> factors) {
  return product(std::span<const SpacePtr>(factors.begin(), factors.size()));
}

MixedRadix::MixedRadix(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
  strides_.assign(radices_.size(), 1);
  for (std::size_t k = radices_.size(); k-- > 0;) {
    strides_[k] = total_;
    total_ *= radices_[k];
  }
}

std::size_t MixedRadix::encode(std::span<const std::size_t> digits) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < radices_.size(); ++k) index += digits[k] * strides_[k];
  return index;
}

void MixedRadix::decode(std::size_t index, std::span<std::size_t> digits) const {
  for (std::size_t k = radices_.size(); k-- > 0;) {
    digits[k] = index % radices_[k];
    index /= radices_[k];
  }
}

ProbMorphism::ProbMorphism(SpacePtr domain, SpacePtr codomain, std::vector<Index> table)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table)) {
  if (!domain_ || !codomain_) throw std::invalid_argument("morphism without spaces");
  if (table_.size() != domain_->size()) {
    throw std::invalid_argument("morphism table size does not match its domain");
  }
  for (auto y : table_) {
    if (y >= codomain_->size()) throw std::invalid_argument("morphism value out of range");
  }
}

ProbMorphism ProbMorphism::identity(const SpacePtr& space) {
  std::vector<Index> table(space->size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<Index>(i);
  return ProbMorphism(space, space, std::move(table));
}

ProbMorphism ProbMorphism::constant(const SpacePtr& domain, const SpacePtr& codomain,
                                   Index value) {
  return ProbMorphism(domain, codomain, std::vector<Index>(domain->size(), value));
}

ProbMorphism ProbMorphism::rebind(SpacePtr domain, SpacePtr codomain) const {
  if (!same_space(*domain, *domain_) || !same_space(*codomain, *codomain_)) {
    throw std::invalid_argument("rebind: spaces carry different measures");
  }
  ProbMorphism out = *this;
  out.domain_ = std::move(domain);
  out.codomain_ = std::move(codomain);
  return out;
}

ProbMorphism ProbMorphism::with_entry(std::size_t x, Index y) const {
  std::vector<Index> table = table_;
  table.at(x) = y;
  return ProbMorphism(domain_, codomain_, std::move(table));
}

bool same_space(const FinProbSpace& a, const FinProbSpace& b) {
  return &a == &b || a.same_measure(b);
}

ProbMorphism compose(const ProbMorphism& outer, const ProbMorphism& inner) {
  if (!same_space(inner.codomain(), outer.domain())) {
    throw std::invalid_argument("compose: codomain/domain mismatch");
  }
  std::vector<ProbMorphism::Index> table(inner.domain().size());
  for (std::size_t x = 0; x < table.size(); ++x) table[x] = outer(inner(x));
  return ProbMorphism(inner.domain_ptr(), outer.codomain_ptr(), std::move(table));
}

ProbMorphism product(std::span<const ProbMorphism> factors, SpacePtr domain, SpacePtr codomain) {
  if (factors.empty()) throw std::invalid_argument("product of no morphisms");
  std::vector<std::size_t> in_radices;
  std::vector<std::size_t> out_radices;
  for (const auto& f : factors) {
    in_radices.push_back(f.domain().size());
    out_radices.push_back(f.codomain().size());
  }
  const MixedRadix in(std::move(in_radices));
  const MixedRadix out(std::move(out_radices));
  if (in.total() != domain->size() || out.total() != codomain->size()) {
    throw std::invalid_argument("product: supplied spaces have the wrong size");
  }
  std::vector<ProbMorphism::Index> table(in.total());
  for (std::size_t x = 0; x < in.total(); ++x) {
    std::size_t y = 0;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      y += factors[k](in.digit(x, k)) * out.stride(k);
    }
    table[x] = static_cast<ProbMorphism::Index>(y);
  }
  return ProbMorphism(std::move(domain), std::move(codomain), std::move(table));
}

ProbMorphism product(std::span<const ProbMorphism> factors) {
  std::vector<SpacePtr> doms;
  std::vector<SpacePtr> cods;
  for (const auto& f : factors) {
    doms.push_back(f.domain_ptr());
    cods.push_back(f.codomain_ptr());
  }
  return product(factors, product(std::span<const SpacePtr>(doms)),
                 product(std::span<const SpacePtr>(cods)));
}

ProbMorphism coordinate_projection(const SpacePtr& domain, const MixedRadix& layout,
                                   std::size_t begin, std::size_t end, const SpacePtr& codomain) {
  if (layout.total() != domain->size() || begin > end || end > layout.digits()) {
    throw std::invalid_argument("coordinate_projection: bad layout");
  }
  std::size_t target = 1;
  for (std::size_t k = begin; k < end; ++k) target *= layout.radix(k);
  if (target != codomain->size()) {
    throw std::invalid_argument("coordinate_projection: codomain has the wrong size");
  }
  std::vector<ProbMorphism::Index> table(domain->size());
  for (std::size_t x = 0; x < table.size(); ++x) {
    std::size_t y = 0;
    for (std::size_t k = begin; k < end; ++k) y = y * layout.radix(k) + layout.digit(x, k);
    table[x] = static_cast<ProbMorphism::Index>(y);
  }
  return ProbMorphism(domain, codomain, std::move(table));
}

ProbMorphism inverse_on_support(const ProbMorphism& iso) {
  if (!is_isomorphism(iso)) {
    throw std::invalid_argument("inverse_on_support: map is not an isomorphism");
  }
  std::vector<ProbMorphism::Index> table(iso.codomain().size(), 0);
  for (std::size_t x = 0; x < iso.domain().size(); ++x) {
    if (iso.domain().positive(x)) table[iso(x)] = static_cast<ProbMorphism::Index>(x);
  }
  return ProbMorphism(iso.codomain_ptr(), iso.domain_ptr(), std::move(table));
}

std::vector<Rational> pushforward(std::span<const ProbMorphism::Index> map,
                                  const FinProbSpace& mu, std::size_t codomain_size) {
  if (map.size() != mu.size()) throw std::invalid_argument("pushforward: size mismatch");
  std::vector<Rational> out(codomain_size);
  for (std::size_t x = 0; x < map.size(); ++x) {
    if (map[x] >= codomain_size) throw std::invalid_argument("pushforward: value out of range");
    if (mu.positive(x)) out[map[x]] += mu.weight(x);
  }
  return out;
}

std::vector<Rational> pushforward(const ProbMorphism& map) {
  return pushforward(map.table(), map.domain(), map.codomain().size());
}

bool is_measure_preserving(std::span<const ProbMorphism::Index> map, const FinProbSpace& mu,
                           const FinProbSpace& nu) {
  if (map.size() != mu.size()) return false;
  for (auto y : map) {
    if (y >= nu.size()) return false;
  }
  return pushforward(map, mu, nu.size()) == nu.weights();
}

bool is_measure_preserving(const ProbMorphism& map) {
  return is_measure_preserving(map.table(), map.domain(), map.codomain());
}

std::optional<std::size_t> first_ae_difference(const ProbMorphism& a, const ProbMorphism& b) {
  if (!same_space(a.domain(), b.domain()) || !same_space(a.codomain(), b.codomain())) {
    throw std::invalid_argument("equal_ae: morphisms have different spaces");
  }
  for (std::size_t x = 0; x < a.domain().size(); ++x) {
    if (a.domain().positive(x) && a(x) != b(x)) return x;
  }
  return std::nullopt;
}

bool equal_ae(const ProbMorphism& a, const ProbMorphism& b) {
  return !first_ae_difference(a, b).has_value();
}

bool is_isomorphism(const ProbMorphism& map) {
  const auto& dom = map.domain();
  const auto& cod = map.codomain();
  if (dom.support_size() != cod.support_size()) return false;
  std::vector<char> hit(cod.size(), 0);
  for (std::size_t x = 0; x < dom.size(); ++x) {
    if (!dom.positive(x)) continue;
    const auto y = map(x);
    if (!cod.positive(y) || hit[y]) return false;
    hit[y] = 1;
  }
  return is_measure_preserving(map);
}

bool is_surjective_on_support(const ProbMorphism& map) {
  std::vector<char> hit(map.codomain().size(), 0);
  for (std::size_t x = 0; x < map.domain().size(); ++x) {
    if (map.domain().positive(x)) hit[map(x)] = 1;
  }
  for (std::size_t y = 0; y < hit.size(); ++y) {
    if (map.codomain().positive(y) && !hit[y]) return false;
  }
  return true;
}

std::optional<std::vector<std::size_t>> independence_violation(
    std::span<const ProbMorphism> maps) {
  if (maps.empty()) return std::nullopt;
  const auto& dom = maps[0].domain();
  for (const auto& m : maps) {
    if (!same_space(m.domain(), dom)) {
      throw std::invalid_argument("independent: maps do not share a domain");
    }
  }
  std::vector<std::vector<Rational>> marginals;
  std::vector<std::vector<std::size_t>> supports;
  for (const auto& m : maps) {
    marginals.push_back(pushforward(m.table(), dom, m.codomain().size()));
    std::vector<std::size_t> supp;
    for (std::size_t y = 0; y < marginals.back().size(); ++y) {
      if (sgn(marginals.back()[y]) > 0) supp.push_back(y);
    }
    supports.push_back(std::move(supp));
  }
  std::map<std::vector<std::size_t>, Rational> joint;
  std::vector<std::size_t> key(maps.size());
  for (std::size_t x = 0; x < dom.size(); ++x) {
    if (!dom.positive(x)) continue;
    for (std::size_t k = 0; k < maps.size(); ++k) key[k] = maps[k](x);
    joint[key] += dom.weight(x);
  }
  // Walk the product of marginal supports; joint mass outside it is impossible.
  std::vector<std::size_t> pos(maps.size(), 0);
  while (true) {
    Rational expected = 1;
    for (std::size_t k = 0; k < maps.size(); ++k) {
      key[k] = supports[k][pos[k]];
      expected *= marginals[k][key[k]];
    }
    auto it = joint.find(key);
    const Rational actual = it == joint.end() ? Rational(0) : it->second;
    if (actual != expected) return key;
    std::size_t k = maps.size();
    while (k-- > 0) {
      if (++pos[k] < supports[k].size()) break;
      pos[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return std::nullopt;
}

bool independent(std::span<const ProbMorphism> maps) {
  return !independence_violation(maps).has_value();
}

AtomPartition atoms(const FinProbSpace& domain, std::span<const ProbMorphism> maps) {
  for (const auto& m : maps) {
    if (m.domain().size() != domain.size()) {
      throw std::invalid_argument("atoms: map does not act on the domain");
    }
  }
  std::map<std::vector<ProbMorphism::Index>, std::size_t> block_of;
  AtomPartition out;
  std::vector<ProbMorphism::Index> key(maps.size());
  for (std::size_t x = 0; x < domain.size(); ++x) {
    for (std::size_t k = 0; k < maps.size(); ++k) key[k] = maps[k](x);
    auto [it, inserted] = block_of.emplace(key, out.blocks.size());
    if (inserted) out.blocks.emplace_back();
    out.blocks[it->second].push_back(x);
  }
  return out;
}

bool separates_support(const FinProbSpace& domain, const AtomPartition& partition) {
  for (const auto& block : partition.blocks) {
    const auto positives =
        std::count_if(block.begin(), block.end(), [&](std::size_t x) { return domain.positive(x); });
    if (positives > 1) return false;
  }
  return true;
}

}  // namespace convlim
