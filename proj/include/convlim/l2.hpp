#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "convlim/convsys.hpp"
#include "convlim/cpps.hpp"
#include "convlim/finprob.hpp"
#include "convlim/projective.hpp"
#include "convlim/rational.hpp"
#include "convlim/report.hpp"

namespace convlim {

/// Sparse matrix over the rationals; rows keep their entries sorted by column
/// and never store zeros.
class Matrix {
 public:
  struct Entry {
    std::size_t col;
    Rational value;
  };

  Matrix(std::size_t rows, std::size_t cols);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Entry>& row(std::size_t r) const { return data_[r]; }
  Rational get(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, Rational value);
  std::size_t nonzeros() const;

  Matrix transpose() const;

  bool operator==(const Matrix& other) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Entry>> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
/// Kronecker product; row (i, k) of a ⊗ b is i * b.rows() + k.
Matrix kron(const Matrix& a, const Matrix& b);

/// L²(μ) of a finite probability space, in the indicator basis, with
/// ⟨f, g⟩ = Σ μ(ω) f(ω) g(ω). Null outcomes give null basis vectors.
class HilbertRep {
 public:
  explicit HilbertRep(SpacePtr base);

  const SpacePtr& base() const { return base_; }
  std::size_t dim() const { return base_->size(); }
  const Rational& weight(std::size_t i) const { return base_->weight(i); }
  bool positive(std::size_t i) const { return base_->positive(i); }
  Rational inner(const std::vector<Rational>& f, const std::vector<Rational>& g) const;
  /// Gram matrix of the indicator basis.
  Matrix gram() const;

  /// Same dimension and weights.
  bool same(const HilbertRep& other) const { return same_space(*base_, *other.base_); }

 private:
  SpacePtr base_;
};

HilbertRep tensor(const HilbertRep& a, const HilbertRep& b);

/// A linear map between two L² spaces; the matrix is codomain.dim() × domain.dim().
struct Operator {
  HilbertRep domain;
  HilbertRep codomain;
  Matrix matrix;
};

Operator identity_operator(const HilbertRep& h);
/// outer ∘ inner. Throws unless inner's codomain is outer's domain.
Operator compose(const Operator& outer, const Operator& inner);
Operator tensor(const Operator& a, const Operator& b);
/// Adjoint for the weighted inner products, defined on the supports:
/// A*[y, x] = μ(x) A[x, y] / μ'(y) for μ'(y) > 0, zero rows elsewhere.
Operator adjoint(const Operator& a);

/// The composition operator U_T f = f ∘ T from L²(μ') to L²(μ) for
/// T: (Ω, μ) → (Ω', μ'). Throws std::invalid_argument unless T preserves
/// the measure.
Operator koopman(const ProbMorphism& T);

/// First (row, col) with both basis vectors non-null where the matrices
/// differ. Throws when the operators act between different spaces.
std::optional<std::pair<std::size_t, std::size_t>> first_difference(const Operator& a, const Operator& b);
bool equal_on_support(const Operator& a, const Operator& b);

/// ⟨U e_i, U e_j⟩ = ⟨e_i, e_j⟩ for all non-null basis vectors.
bool is_isometry(const Operator& u);
/// An isometry with U U* = 1 on the non-null part of the codomain.
bool is_unitary(const Operator& u);

/// Index correspondence L²(μ × ν) ↔ L²(μ) ⊗ L²(ν): entry k is the pair (x, y)
/// whose indicator tensor matches the indicator of outcome k.
std::vector<std::array<std::size_t, 2>> tensor_identify(const FinProbSpace& mu, const FinProbSpace& nu);

/// H_{s,t} with isometries U_{r,s,t}: H_{r,t} → H_{r,s} ⊗ H_{s,t}.
class SubproductSystem {
 public:
  SubproductSystem(TimeSetPtr times, std::vector<HilbertRep> spaces);

  const TimeSetPtr& times() const { return times_; }
  std::size_t points() const { return times_->size(); }
  const HilbertRep& space(std::size_t s, std::size_t t) const;
  const Operator& U(std::size_t r, std::size_t s, std::size_t t) const;
  void set_U(std::size_t r, std::size_t s, std::size_t t, Operator u);

 private:
  TimeSetPtr times_;
  std::vector<HilbertRep> spaces_;
  std::map<std::array<std::size_t, 3>, Operator> u_;
};

/// L²(𝒮): H_{s,t} = L²(μ_{s,t}), U_{r,s,t} the Koopman operator of T_{r,s,t}
/// read through tensor_identify.
SubproductSystem l2_of_system(const ConvolutionSystem& sys);

/// Isometry of each U and co-associativity
/// (1 ⊗ U_{s,t,u}) U_{r,s,u} = (U_{r,s,t} ⊗ 1) U_{r,t,u}.
Report verify_subproduct(const SubproductSystem& h);
/// One case per U_{r,s,t}: is it unitary.
Check unitarity(const SubproductSystem& h);
bool is_product_system(const SubproductSystem& h);

/// H_{s,t} = limind L²(μ_I), realized on the top partition of K_{s,t}, with
/// V_I the Koopman operator of T_{I,top}.
struct InductiveLimitSpace {
  PairWindow window;
  Partition top;
  HilbertRep space;
  std::vector<Partition> partitions;
  std::vector<Operator> embeddings;  ///< V_I, indexed like `partitions`
};

InductiveLimitSpace inductive_limit(ConnectingMaps& maps, std::size_t s, std::size_t t);
/// V_J U_{T_{I,J}} = V_I for all I ⊆ J, and each V_I an isometry.
Report verify_inductive_limit(ConnectingMaps& maps, const InductiveLimitSpace& lim);

/// The system ℋ of inductive limits, with U_{r,s,t} solved from the top
/// partition of K_{r,t} as (V_{I_s} ⊗ V_{sI}) V_I^*.
struct ProductSystemH {
  std::vector<InductiveLimitSpace> limits;  ///< dense by interval_slot
  SubproductSystem system;
};

ProductSystemH product_system_H(ConnectingMaps& maps);
/// U_{r,s,t} V_I = V_{I_s} ⊗ V_{sI} for all I ∈ K_{r,s,t}, unitarity and
/// co-associativity.
Report verify_product_system_H(const ProductSystemH& h);

/// θ_{s,t}: H_{s,t} → L²(μ♭_{s,t}) with θ V_I = U_{T♭_I}.
struct PsIsomorphism {
  ProductSystemH h;
  SubproductSystem flat_l2;
  std::vector<Operator> theta;  ///< dense by interval_slot
};

PsIsomorphism build_ps_isomorphism(const ProjectiveCpps& c);
/// θ V_I = U_{T♭_I} for every window and I, each θ unitary, and
/// (θ_{r,s} ⊗ θ_{s,t}) U_{r,s,t} = U_{T♭_{r,s,t}} θ_{r,t}.
Report verify_ps(const ProjectiveCpps& c, const PsIsomorphism& ps);

}  // namespace convlim
