#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "convlim/finprob.hpp"
#include "convlim/order.hpp"
#include "convlim/report.hpp"

namespace convlim {

/// Interval-indexed finite probability spaces Ω_{s,t} (s < t) with
/// multiplications T_{r,s,t}: Ω_{r,s} × Ω_{s,t} → Ω_{r,t} (r < s < t).
///
/// Storage is dense: every interval and every triple has an explicit entry.
/// Values are immutable once built; use SystemBuilder to assemble one and
/// with_mult to derive modified copies.
class ConvolutionSystem {
 public:
  const TimeSetPtr& times() const { return times_; }
  std::size_t points() const { return times_->size(); }

  const SpacePtr& space(std::size_t s, std::size_t t) const;
  /// Ω_{r,s} × Ω_{s,t}, the domain of mult(r, s, t).
  const SpacePtr& pair_space(std::size_t r, std::size_t s, std::size_t t) const;
  const ProbMorphism& mult(std::size_t r, std::size_t s, std::size_t t) const;

  ConvolutionSystem with_mult(std::size_t r, std::size_t s, std::size_t t,
                              std::vector<ProbMorphism::Index> table) const;

  /// Whether every multiplication is an isomorphism (a CPPS).
  bool is_cpps() const;

 private:
  friend class SystemBuilder;
  explicit ConvolutionSystem(TimeSetPtr times);

  std::size_t pair_index(std::size_t s, std::size_t t) const;
  std::size_t triple_index(std::size_t r, std::size_t s, std::size_t t) const;

  TimeSetPtr times_;
  std::vector<SpacePtr> spaces_;
  std::vector<SpacePtr> pair_spaces_;
  std::vector<std::optional<ProbMorphism>> mults_;
};

using SystemPtr = std::shared_ptr<const ConvolutionSystem>;

/// Collects spaces and multiplication tables, then validates completeness.
class SystemBuilder {
 public:
  explicit SystemBuilder(TimeSetPtr times);

  SystemBuilder& space(std::size_t s, std::size_t t, SpacePtr space);
  /// Table indexed by x * |Ω_{s,t}| + y for (x, y) ∈ Ω_{r,s} × Ω_{s,t}.
  /// Both spaces must already be set.
  SystemBuilder& mult(std::size_t r, std::size_t s, std::size_t t,
                      std::vector<ProbMorphism::Index> table);

  /// Throws std::invalid_argument if any interval or triple is missing.
  SystemPtr build() const;

 private:
  ConvolutionSystem sys_;
};

/// Verifies measure preservation of every T_{r,s,t} and the associativity
/// square for every r < s < t < u, pointwise on the support of
/// Ω_{r,s} × Ω_{s,t} × Ω_{t,u}.
Report check_system(const ConvolutionSystem& sys);

/// A finite semigroup given by its Cayley table.
class FiniteSemigroup {
 public:
  /// Throws std::invalid_argument on a malformed or non-associative table.
  FiniteSemigroup(std::vector<std::string> elements,
                  std::vector<std::vector<std::size_t>> table);

  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& element(std::size_t i) const { return elements_[i]; }
  std::size_t op(std::size_t a, std::size_t b) const { return table_[a][b]; }
  const std::vector<std::vector<std::size_t>>& table() const { return table_; }

  /// First triple (a, b, c) with (ab)c ≠ a(bc), if any.
  static std::optional<std::array<std::size_t, 3>> associativity_violation(
      const std::vector<std::vector<std::size_t>>& table);

 private:
  std::vector<std::string> elements_;
  std::vector<std::vector<std::size_t>> table_;
};

/// μ ∗ ν: the pushforward of μ × ν by the semigroup operation.
std::vector<Rational> convolve(const FiniteSemigroup& sg, const std::vector<Rational>& mu,
                               const std::vector<Rational>& nu);

/// ν^{∗k}, k >= 1.
std::vector<Rational> convolution_power(const FiniteSemigroup& sg, const std::vector<Rational>& nu,
                                        std::size_t k);

/// The space (S, weights) over the semigroup's elements.
SpacePtr semigroup_space(const FiniteSemigroup& sg, std::vector<Rational> weights);

/// Every Ω_{s,t} = (S, μ_{s,t}) with the semigroup operation as multiplication.
/// No validity check is made; run check_system.
SystemPtr from_semigroup_measures(const FiniteSemigroup& sg, const TimeSetPtr& times,
                                  const std::vector<std::vector<Rational>>& measure_of_interval);

/// The trivial system S_μ of an idempotent μ. Throws std::invalid_argument
/// naming the first element where μ ∗ μ differs from μ.
SystemPtr from_idempotent(const FiniteSemigroup& sg, const std::vector<Rational>& mu,
                          const TimeSetPtr& times);

/// μ_{s,t} = ν^{∗(pos(t) − pos(s))}. `positions` must be strictly increasing.
SystemPtr from_semigroup_generator(const FiniteSemigroup& sg, const std::vector<Rational>& nu,
                                   const TimeSetPtr& times, const std::vector<long long>& positions);

/// A family θ_{s,t}: Ω_{s,t} → Ω'_{s,t} between two systems on the same TimeSet.
class SystemMorphism {
 public:
  /// `components` is dense over s < t, ordered by interval_slot.
  /// Throws on mismatched spaces.
  SystemMorphism(SystemPtr source, SystemPtr target, std::vector<ProbMorphism> components);

  static SystemMorphism identity(const SystemPtr& sys);

  const SystemPtr& source() const { return source_; }
  const SystemPtr& target() const { return target_; }
  const ProbMorphism& component(std::size_t s, std::size_t t) const;
  const std::vector<ProbMorphism>& components() const { return components_; }

  SystemMorphism with_component(std::size_t s, std::size_t t, ProbMorphism theta) const;

 private:
  std::size_t slot(std::size_t s, std::size_t t) const;

  SystemPtr source_;
  SystemPtr target_;
  std::vector<ProbMorphism> components_;
};

/// outer ∘ inner, componentwise.
SystemMorphism compose(const SystemMorphism& outer, const SystemMorphism& inner);

/// Number of intervals s < t and the dense slot of (s, t).
std::size_t interval_count(std::size_t points);
std::size_t interval_slot(std::size_t points, std::size_t s, std::size_t t);

/// Measure preservation of every θ_{s,t} and the square
/// θ_{r,t} ∘ T_{r,s,t} = T'_{r,s,t} ∘ (θ_{r,s} × θ_{s,t}) up to null sets.
Report check_system_morphism(const SystemMorphism& m);

/// A probability space with interval-indexed random variables X_{s,t}.
struct FlowSystem {
  SpacePtr base;
  std::vector<ProbMorphism> increments;  ///< dense over s < t, see interval_slot
  SystemPtr system;

  const ProbMorphism& X(std::size_t s, std::size_t t) const;
};

/// Checks X_{s,t} pushes P to μ_{s,t}, and the flow axioms: the X's generate
/// the σ-field mod 0, consecutive increments along every chain
/// t_1 < ... < t_n are independent, and X_{r,t} = T_{r,s,t}(X_{r,s}, X_{s,t}) a.e.
Report check_flow(const FlowSystem& flow);

}  // namespace convlim
