#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "convlim/convsys.hpp"
#include "convlim/finprob.hpp"
#include "convlim/order.hpp"
#include "convlim/projective.hpp"
#include "convlim/report.hpp"

namespace convlim {

/// The flat system 𝒮♭ of a convolution system: Ω♭_{s,t} is the product over
/// the cells of the full grid of [s, t], and T♭_{r,s,t} is tuple
/// concatenation, so every flat multiplication table is the identity on
/// flat indices.
class ProjectiveCpps {
 public:
  const SystemPtr& base() const { return base_; }
  const SystemPtr& flat() const { return flat_; }
  const TimeSetPtr& times() const { return base_->times(); }

  Partition grid(std::size_t s, std::size_t t) const;
  const SpacePtr& flat_space(std::size_t s, std::size_t t) const { return flat_->space(s, t); }

  /// T♭_I: Ω♭_{s,t} → Ω_I for I ∈ K_{s,t}, i.e. T_{I, grid(s,t)}.
  const ProbMorphism& canonical(const Partition& I) const;
  /// T♭_{s,t}: Ω♭_{s,t} → Ω_{s,t}.
  const ProbMorphism& canonical(std::size_t s, std::size_t t) const;

  /// τ = {T♭_{s,t}}: 𝒮♭ → 𝒮.
  SystemMorphism tau() const;

  /// Shared memo of the base system's partition maps.
  ConnectingMaps& maps() const { return *maps_; }

  /// Copy with one flat multiplication replaced (for corruption tests).
  ProjectiveCpps with_flat_mult(std::size_t r, std::size_t s, std::size_t t,
                                std::vector<ProbMorphism::Index> table) const;

 private:
  friend ProjectiveCpps assemble_cpps(const SystemPtr& sys);
  ProjectiveCpps() = default;

  SystemPtr base_;
  SystemPtr flat_;
  std::shared_ptr<ConnectingMaps> maps_;
};

/// Builds 𝒮♭ without verifying it.
ProjectiveCpps assemble_cpps(const SystemPtr& sys);

/// Builds 𝒮♭ and re-verifies it. Throws std::invalid_argument when `sys`
/// fails check_system.
ProjectiveCpps build_cpps(const SystemPtr& sys);

/// Every T♭_{r,s,t} is an isomorphism; T♭_I ∘ T♭_{r,s,t} = T♭_{I_s} × T♭_{sI}
/// for all I ∈ K_{r,s,t}; the flat system satisfies the axioms; and both
/// bracketings of T♭_I ∘ (triple product) agree with
/// T♭_{I∩[r,s]} × T♭_{I∩[s,t]} × T♭_{I∩[t,u]} for all I ∈ K_{r,s,t,u}.
Report verify_cpps(const ProjectiveCpps& c);

/// τ is a morphism of convolution systems whose components are onto the
/// supports.
Report check_tau(const SystemMorphism& tau);

/// θ♭_{s,t}: θ applied to each cell of the full grid. Throws
/// std::invalid_argument unless every component of θ is an isomorphism.
SystemMorphism lift_isomorphism(const SystemMorphism& theta, const ProjectiveCpps& source,
                                const ProjectiveCpps& target);

/// θ ∘ τ₁ = τ₂ ∘ θ♭ up to null sets, and θ♭ is an isomorphism of flat systems.
Report verify_lift(const SystemMorphism& theta, const SystemMorphism& lifted, const ProjectiveCpps& source,
                   const ProjectiveCpps& target);

/// The flow over the full grid of the whole TimeSet: base Ω_G with the
/// product measure, X_{s,t} = X_{{s,t}, G}. Throws std::invalid_argument
/// when `sys` fails check_system.
FlowSystem build_flow(const SystemPtr& sys);

/// Restriction maps T♭_{(s,t),(u,v)}: Ω♭_{u,v} → Ω♭_{s,t} over the pairs
/// s <= t, ordered by (s,t) ⊆ (u,v) iff u <= s <= t <= v. A degenerate pair
/// (s,s) carries the one-point space.
class RestrictionMaps {
 public:
  const TimeSetPtr& times() const { return times_; }
  const std::vector<PairWindow>& windows() const { return windows_; }
  std::size_t index_of(PairWindow w) const;
  const SpacePtr& space(std::size_t w) const { return spaces_[w]; }
  bool nested(std::size_t inner, std::size_t outer) const {
    return windows_[inner].within(windows_[outer]);
  }
  const ProbMorphism& map(std::size_t inner, std::size_t outer) const;
  const ProbMorphism& map(PairWindow inner, PairWindow outer) const;

  RestrictionMaps with_map(PairWindow inner, PairWindow outer, ProbMorphism m) const;

 private:
  friend RestrictionMaps build_restrictions(const ProjectiveCpps& c);

  TimeSetPtr times_;
  std::vector<PairWindow> windows_;
  std::vector<SpacePtr> spaces_;
  std::map<std::pair<std::size_t, std::size_t>, ProbMorphism> maps_;
};

/// Each map built from the inverses of the flat multiplications followed by
/// the coordinate projection onto the middle factor (factors at a shared
/// endpoint are dropped).
RestrictionMaps build_restrictions(const ProjectiveCpps& c);

/// T♭_I ∘ T♭_{(s,t),(u,v)} = X_{I,J} ∘ T♭_J for all nested windows with
/// s < t and all I ∈ K_{s,t}, J ∈ K_{u,v}, I ⊆ J.
Report verify_ll1(const ProjectiveCpps& c, const RestrictionMaps& r);

/// Compatibility over nested triples of windows, exact marginals, and
/// surjectivity on supports.
Report verify_projint(const RestrictionMaps& r);

/// Each restriction agrees a.e. with the direct projection of the full grid
/// onto the cells inside the inner window.
Report check_restriction_windows(const ProjectiveCpps& c, const RestrictionMaps& r);

/// The two limits compared by the equivalence of K-convergence and
/// convergence of the window system.
struct KimpaConstruction {
  Partition grid;                      ///< full grid of the TimeSet
  SpacePtr global_limit;               ///< Ω♭ = Ω_grid
  std::vector<ProbMorphism> x_flat;    ///< X♭_{s,t}: Ω♭ → Ω♭_{s,t}, dense by interval_slot
  SpacePtr window_limit;               ///< ♭Ω = Ω♭_{first,last}
  std::vector<ProbMorphism> t_prime;   ///< T'_{s,t}: ♭Ω → Ω♭_{s,t}, dense by interval_slot
  ProbMorphism beta;                   ///< ♭Ω → Ω♭ assembled cell by cell from T'
};

KimpaConstruction build_kimpa(const ProjectiveCpps& c, const RestrictionMaps& r);

/// T♭_I X♭_{s,t} = X_I; T♭_{(s,t),(u,v)} X♭_{u,v} = X♭_{s,t};
/// T♭_I T'_{s,t} = X_{I,J} T♭_J T'_{u,v}; β is an isomorphism with
/// X♭_{s,t} ∘ β = T'_{s,t}; and the simply-maximal verdict of the global family.
Report verify_kimpa(const ProjectiveCpps& c, const RestrictionMaps& r, const KimpaConstruction& k);
/// Builds everything from `sys` and runs the checks above.
Report verify_kimpa(const SystemPtr& sys);

}  // namespace convlim
