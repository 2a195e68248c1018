#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convlim/rational.hpp"

namespace convlim {

/// A finite probability space with power-set σ-field and exact weights.
/// Zero-weight outcomes are allowed; the support is the set of outcomes of
/// positive weight.
class FinProbSpace {
 public:
  /// Throws std::invalid_argument unless labels are distinct, weights are
  /// non-negative, and the weights sum to exactly one.
  FinProbSpace(std::vector<std::string> outcomes, std::vector<Rational> weights);

  /// The one-point space.
  static FinProbSpace point();

  std::size_t size() const { return weights_.size(); }
  const std::string& outcome(std::size_t i) const { return outcomes_[i]; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const Rational& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Rational>& weights() const { return weights_; }
  bool positive(std::size_t i) const { return positive_[i] != 0; }
  std::size_t support_size() const { return support_size_; }
  /// Throws std::out_of_range for unknown labels.
  std::size_t index_of(std::string_view label) const;

  /// Same number of outcomes with identical weights (labels are ignored).
  bool same_measure(const FinProbSpace& other) const;

 private:
  struct Trusted {};
  FinProbSpace(Trusted, std::vector<std::string> outcomes, std::vector<Rational> weights);
  void index_support();

  std::vector<std::string> outcomes_;
  std::vector<Rational> weights_;
  std::vector<char> positive_;
  std::size_t support_size_ = 0;

  friend std::shared_ptr<const FinProbSpace> product(
      std::span<const std::shared_ptr<const FinProbSpace>> factors);
};

using SpacePtr = std::shared_ptr<const FinProbSpace>;

SpacePtr make_space(std::vector<std::string> outcomes, std::vector<Rational> weights);
SpacePtr point_space();

/// Cartesian product with product weights. Tuples are indexed in mixed radix
/// with the first factor most significant, so a product of products has the
/// same flat indexing as the flattened product.
SpacePtr product(std::span<const SpacePtr> factors);
SpacePtr product(std::initializer_list<SpacePtr> factors);

/// Mixed-radix encoder for tuples over a product of finite sets.
class MixedRadix {
 public:
  explicit MixedRadix(std::vector<std::size_t> radices);

  std::size_t total() const { return total_; }
  std::size_t digits() const { return radices_.size(); }
  std::size_t radix(std::size_t k) const { return radices_[k]; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  std::size_t digit(std::size_t index, std::size_t k) const {
    return index / strides_[k] % radices_[k];
  }
  std::size_t encode(std::span<const std::size_t> digits) const;
  void decode(std::size_t index, std::span<std::size_t> digits) const;

 private:
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

/// A total map between the outcome sets of two finite probability spaces,
/// stored as an index table. Measure preservation is not enforced at
/// construction; it is checked by is_measure_preserving and the verifiers.
class ProbMorphism {
 public:
  using Index = std::uint32_t;

  /// Throws std::invalid_argument on size or range errors.
  ProbMorphism(SpacePtr domain, SpacePtr codomain, std::vector<Index> table);

  static ProbMorphism identity(const SpacePtr& space);
  static ProbMorphism constant(const SpacePtr& domain, const SpacePtr& codomain, Index value);

  const FinProbSpace& domain() const { return *domain_; }
  const FinProbSpace& codomain() const { return *codomain_; }
  const SpacePtr& domain_ptr() const { return domain_; }
  const SpacePtr& codomain_ptr() const { return codomain_; }
  Index operator()(std::size_t x) const { return table_[x]; }
  std::span<const Index> table() const { return table_; }

  /// The same table over spaces with identical measures.
  ProbMorphism rebind(SpacePtr domain, SpacePtr codomain) const;
  /// Copy with a single table entry replaced.
  ProbMorphism with_entry(std::size_t x, Index y) const;

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<Index> table_;
};

/// Identical object or identical measure.
bool same_space(const FinProbSpace& a, const FinProbSpace& b);

/// outer ∘ inner. Throws unless inner's codomain matches outer's domain.
ProbMorphism compose(const ProbMorphism& outer, const ProbMorphism& inner);

/// f_1 × ... × f_k on the product spaces.
ProbMorphism product(std::span<const ProbMorphism> factors);
/// Same map, with caller-supplied product spaces (only sizes are checked).
ProbMorphism product(std::span<const ProbMorphism> factors, SpacePtr domain, SpacePtr codomain);

/// Projection of a product space (layout given by `layout`) onto the
/// contiguous factors [begin, end), landing in `codomain`.
ProbMorphism coordinate_projection(const SpacePtr& domain, const MixedRadix& layout,
                                   std::size_t begin, std::size_t end, const SpacePtr& codomain);

/// Mod-0 inverse of an isomorphism: exact on supports, zero-weight
/// codomain points go to outcome 0. Throws unless is_isomorphism(iso).
ProbMorphism inverse_on_support(const ProbMorphism& iso);

std::vector<Rational> pushforward(std::span<const ProbMorphism::Index> map,
                                  const FinProbSpace& mu, std::size_t codomain_size);
std::vector<Rational> pushforward(const ProbMorphism& map);

bool is_measure_preserving(std::span<const ProbMorphism::Index> map, const FinProbSpace& mu,
                           const FinProbSpace& nu);
bool is_measure_preserving(const ProbMorphism& map);

/// First positive-weight outcome where the maps differ. Throws unless both
/// maps share domain and codomain.
std::optional<std::size_t> first_ae_difference(const ProbMorphism& a, const ProbMorphism& b);
bool equal_ae(const ProbMorphism& a, const ProbMorphism& b);

/// Bijection of supports that preserves the measure.
bool is_isomorphism(const ProbMorphism& map);
/// Every positive-weight codomain point has a positive-weight preimage.
bool is_surjective_on_support(const ProbMorphism& map);

/// A tuple of target values where joint ≠ product of marginals, if any.
std::optional<std::vector<std::size_t>> independence_violation(
    std::span<const ProbMorphism> maps);
bool independent(std::span<const ProbMorphism> maps);

/// Partition of outcomes by joint fibers; stand-in for a generated σ-field.
struct AtomPartition {
  std::vector<std::vector<std::size_t>> blocks;
};

/// Atoms of the σ-field generated by `maps` on `domain`. With no maps, a single atom.
AtomPartition atoms(const FinProbSpace& domain, std::span<const ProbMorphism> maps);

/// True iff each atom holds at most one positive-weight outcome, i.e. the
/// generated σ-field is the power set modulo null sets.
bool separates_support(const FinProbSpace& domain, const AtomPartition& partition);

}  // namespace convlim
