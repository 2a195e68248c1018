#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "convlim/convsys.hpp"
#include "convlim/finprob.hpp"
#include "convlim/order.hpp"
#include "convlim/report.hpp"

namespace convlim {

/// Product spaces Ω_I and the connecting maps T_{I,J} and X_{I,J} of one
/// convolution system. Results are memoized; an instance is not safe for
/// concurrent use, but the morphisms it hands out are immutable values.
class ConnectingMaps {
 public:
  explicit ConnectingMaps(SystemPtr sys);

  const SystemPtr& system() const { return sys_; }

  /// Ω_I = Ω_{ι_0,ι_1} × ... × Ω_{ι_m,ι_{m+1}}, with product measure μ_I.
  const SpacePtr& space(const Partition& p);

  /// T_{I,J}: Ω_J → Ω_I for a refinement J of I in the same K_{s,t}.
  ///  - I = J: the identity;
  ///  - I = {s, t}: peel the right endpoint of J,
  ///      T_{I,J} = T_{j_0,j_n,j_{n+1}} ∘ (T_{{j_0,j_n}, J∖{j_{n+1}}} × id);
  ///  - otherwise the product over the blocks of J cut at the points of I.
  /// Throws std::invalid_argument unless refines(I, J).
  const ProbMorphism& T(const Partition& coarse, const Partition& fine);

  /// X_{I,J} = T_{I,Ĩ} ∘ π_{Ĩ,J} for I ⊆ J in K, where Ĩ = J ∩ [s, t];
  /// equal to T_{I,J} when both share endpoints.
  ProbMorphism X(const Partition& coarse, const Partition& fine);

  /// π_{J∩[lo,hi], J}: the projection of Ω_J onto the cells of J inside [lo, hi].
  /// `lo` and `hi` must be points of J.
  const ProbMorphism& window_projection(const Partition& fine, std::size_t lo, std::size_t hi);

 private:
  SystemPtr sys_;
  std::map<Partition, SpacePtr> spaces_;
  std::map<std::pair<Partition, Partition>, ProbMorphism> t_cache_;
  std::map<std::tuple<Partition, std::size_t, std::size_t>, ProbMorphism> pi_cache_;
};

/// T_{I,J} built from scratch for one system.
ProbMorphism build_T(const Partition& coarse, const Partition& fine, const SystemPtr& sys);
/// X_{I,J} built from scratch for one system.
ProbMorphism build_X(const Partition& coarse, const Partition& fine, const SystemPtr& sys);

/// Which connecting maps a family carries.
enum class FamilyKind {
  interval,  ///< T_{I,J} over K_{s,t}
  global,    ///< X_{I,J} over K
};

/// The partition-indexed family {Ω_I} with a connecting morphism Ω_J → Ω_I
/// for every comparable pair I ⊆ J of its poset.
class ConnectingFamily {
 public:
  static ConnectingFamily interval(ConnectingMaps& maps, std::size_t s, std::size_t t);
  static ConnectingFamily interval(const SystemPtr& sys, std::size_t s, std::size_t t);
  static ConnectingFamily global(ConnectingMaps& maps);
  static ConnectingFamily global(const SystemPtr& sys);

  FamilyKind kind() const { return kind_; }
  const SystemPtr& system() const { return sys_; }
  /// (s, t) for an interval family; (first, last) of the TimeSet otherwise.
  PairWindow window() const { return window_; }

  std::size_t size() const { return poset_.elements.size(); }
  const std::vector<Partition>& partitions() const { return poset_.elements; }
  const Partition& partition(std::size_t i) const { return poset_.elements[i]; }
  std::size_t top() const { return poset_.maximum; }
  std::optional<std::size_t> find(const Partition& p) const;
  std::size_t index_of(const Partition& p) const;

  const SpacePtr& space(std::size_t i) const { return spaces_[i]; }
  bool comparable(std::size_t i, std::size_t j) const { return morphisms_[i * size() + j].has_value(); }
  /// Indices j with I_i ⊆ I_j, in poset order.
  const std::vector<std::size_t>& above(std::size_t i) const { return above_[i]; }
  /// Connecting map Ω_{I_j} → Ω_{I_i}; throws unless I_i ⊆ I_j.
  const ProbMorphism& morphism(std::size_t i, std::size_t j) const;
  const ProbMorphism& morphism(const Partition& coarse, const Partition& fine) const;

  ConnectingFamily with_morphism(std::size_t i, std::size_t j, ProbMorphism m) const;

  std::string describe() const;

 private:
  ConnectingFamily() = default;
  static ConnectingFamily assemble(ConnectingMaps& maps, FamilyKind kind, PairWindow window,
                                   PartitionPoset poset);

  FamilyKind kind_ = FamilyKind::interval;
  SystemPtr sys_;
  PairWindow window_;
  PartitionPoset poset_;
  std::map<Partition, std::size_t> index_;
  std::vector<SpacePtr> spaces_;
  std::vector<std::optional<ProbMorphism>> morphisms_;
  std::vector<std::vector<std::size_t>> above_;
};

/// Identity on the diagonal, measure preservation of every stored map, and
/// compatibility morphism(I,K) = morphism(I,J) ∘ morphism(J,K) a.e. over all
/// chains I ⊆ J ⊆ K (fanned out over I, merged in index order).
Report verify_projective(const ConnectingFamily& family);

/// For every chain I ⊆ J ⊆ K in K with I ∈ K_{q,r}, J ∈ K_{s,t}:
/// π_{Ĩ,J} ∘ T_{J,J̃} = T_{Ĩ,Ĩ'} ∘ π_{Ĩ',J̃}, where J̃ = K ∩ [s,t],
/// Ĩ = J ∩ [q,r] and Ĩ' = K ∩ [q,r].
Report verify_window_commutation(ConnectingMaps& maps);

/// The limit of a finite projective family, realized on its maximum element.
struct FiniteProjectiveLimit {
  Partition top;
  SpacePtr space;
  std::vector<ProbMorphism> projections;  ///< indexed like the family's partitions
};

/// Throws std::invalid_argument if verify_projective fails.
FiniteProjectiveLimit finite_projective_limit(const ConnectingFamily& family);

/// projection(I) = morphism(I,J) ∘ projection(J) for all I ⊆ J, and every
/// projection is surjective onto the support of its codomain.
Report verify_limit(const ConnectingFamily& family, const FiniteProjectiveLimit& limit);

/// Every projection from the limit is onto the support of its codomain.
bool check_simply_maximal(const ConnectingFamily& family);

/// Materializes the set-level inverse limit over the listed levels (which
/// must include the family's top) as threads in the cartesian product, then
/// checks the threads are in bijection with the top space and that the
/// thread measure satisfies μ(T_i^{-1}(A)) = μ_i(A) for every event A.
/// Intended for tiny instances; throws std::invalid_argument when the
/// cartesian product exceeds `max_tuples`.
Report thread_limit_crosscheck(const ConnectingFamily& family, const std::vector<std::size_t>& levels,
                               std::size_t max_tuples = 1u << 20);

/// A cylinder event {X_{from,to} ∈ outcomes}.
struct CylinderEvent {
  std::string from;
  std::string to;
  std::vector<std::string> outcomes;

  bool operator==(const CylinderEvent&) const = default;
};

/// An increasing chain of TimeSets, each carrying the system generated by a
/// common rule, with a list of cylinder events over the coarsest level.
struct CylinderTower {
  std::vector<SystemPtr> levels;
  std::vector<CylinderEvent> events;
};

/// Builds every level with `rule`. Throws std::invalid_argument on a
/// malformed tower: levels not increasing with a consistent order, or events
/// that do not live on the first level.
CylinderTower make_tower(const std::vector<std::vector<std::string>>& level_labels,
                         const std::function<SystemPtr(const TimeSetPtr&)>& rule,
                         std::vector<CylinderEvent> events);

/// For each event and each level, the mass of the event under the level's
/// full-grid limit; for each adjacent pair of levels, the mass pulled back
/// through the connecting map from the finer level. Both sides of
/// μ(T_i^{-1}(A)) = μ_i(A) are compared exactly.
Report tower_consistency(const CylinderTower& tower);

}  // namespace convlim
