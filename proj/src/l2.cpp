#include "convlim/l2.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace convlim {

namespace {

std::string triple_label(const TimeSet& ts, std::size_t r, std::size_t s, std::size_t t) {
  return "(" + ts.label(r) + "," + ts.label(s) + "," + ts.label(t) + ")";
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i].push_back({i, Rational(1)});
  return m;
}

Rational Matrix::get(std::size_t r, std::size_t c) const {
  const auto& row = data_.at(r);
  auto it = std::lower_bound(row.begin(), row.end(), c, [](const Entry& e, std::size_t col) { return e.col < col; });
  return it != row.end() && it->col == c ? it->value : Rational(0);
}

void Matrix::set(std::size_t r, std::size_t c, Rational value) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("Matrix::set out of range");
  auto& row = data_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c, [](const Entry& e, std::size_t col) { return e.col < col; });
  if (it != row.end() && it->col == c) {
    if (value == 0) {
      row.erase(it);
    } else {
      it->value = std::move(value);
    }
  } else if (value != 0) {
    row.insert(it, Entry{c, std::move(value)});
  }
}

std::size_t Matrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : data_[r]) t.data_[e.col].push_back({r, e.value});
  return t;
}

bool Matrix::operator==(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto& a = data_[r];
    const auto& b = other.data_[r];
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k].col != b[k].col || a[k].value != b[k].value) return false;
    }
  }
  return true;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  std::map<std::size_t, Rational> acc;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    acc.clear();
    for (const auto& x : a.row(r))
      for (const auto& y : b.row(x.col)) acc[y.col] += x.value * y.value;
    for (auto& [c, v] : acc) {
      if (v != 0) out.set(r, c, std::move(v));
    }
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < b.rows(); ++k)
      for (const auto& x : a.row(i))
        for (const auto& y : b.row(k)) out.set(i * b.rows() + k, x.col * b.cols() + y.col, x.value * y.value);
  return out;
}

HilbertRep::HilbertRep(SpacePtr base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("HilbertRep: null space");
}

Rational HilbertRep::inner(const std::vector<Rational>& f, const std::vector<Rational>& g) const {
  if (f.size() != dim() || g.size() != dim()) throw std::invalid_argument("inner: wrong dimension");
  Rational sum = 0;
  for (std::size_t i = 0; i < dim(); ++i) sum += weight(i) * f[i] * g[i];
  return sum;
}

Matrix HilbertRep::gram() const {
  Matrix g(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) g.set(i, i, weight(i));
  return g;
}

HilbertRep tensor(const HilbertRep& a, const HilbertRep& b) { return HilbertRep(product({a.base(), b.base()})); }

Operator identity_operator(const HilbertRep& h) { return Operator{h, h, Matrix::identity(h.dim())}; }

Operator compose(const Operator& outer, const Operator& inner) {
  if (!outer.domain.same(inner.codomain)) throw std::invalid_argument("compose: operators do not chain");
  return Operator{inner.domain, outer.codomain, outer.matrix * inner.matrix};
}

Operator tensor(const Operator& a, const Operator& b) {
  return Operator{tensor(a.domain, b.domain), tensor(a.codomain, b.codomain), kron(a.matrix, b.matrix)};
}

Operator adjoint(const Operator& a) {
  Matrix m(a.domain.dim(), a.codomain.dim());
  for (std::size_t x = 0; x < a.matrix.rows(); ++x)
    for (const auto& e : a.matrix.row(x)) {
      if (!a.domain.positive(e.col)) continue;
      m.set(e.col, x, a.codomain.weight(x) * e.value / a.domain.weight(e.col));
    }
  return Operator{a.codomain, a.domain, std::move(m)};
}

Operator koopman(const ProbMorphism& T) {
  if (!is_measure_preserving(T)) throw std::invalid_argument("koopman: map does not preserve the measure");
  Matrix m(T.domain().size(), T.codomain().size());
  for (std::size_t x = 0; x < T.domain().size(); ++x) m.set(x, T(x), Rational(1));
  return Operator{HilbertRep(T.codomain_ptr()), HilbertRep(T.domain_ptr()), std::move(m)};
}

std::optional<std::pair<std::size_t, std::size_t>> first_difference(const Operator& a, const Operator& b) {
  if (!a.domain.same(b.domain) || !a.codomain.same(b.codomain)) {
    throw std::invalid_argument("first_difference: operators act between different spaces");
  }
  for (std::size_t r = 0; r < a.matrix.rows(); ++r) {
    if (!a.codomain.positive(r)) continue;
    const auto& x = a.matrix.row(r);
    const auto& y = b.matrix.row(r);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() || j < y.size()) {
      const std::size_t cx = i < x.size() ? x[i].col : a.matrix.cols();
      const std::size_t cy = j < y.size() ? y[j].col : a.matrix.cols();
      const std::size_t c = std::min(cx, cy);
      const Rational vx = cx == c ? x[i++].value : Rational(0);
      const Rational vy = cy == c ? y[j++].value : Rational(0);
      if (a.domain.positive(c) && vx != vy) return std::make_pair(r, c);
    }
  }
  return std::nullopt;
}

bool equal_on_support(const Operator& a, const Operator& b) { return !first_difference(a, b); }

bool is_isometry(const Operator& u) {
  std::map<std::pair<std::size_t, std::size_t>, Rational> gram;
  for (std::size_t r = 0; r < u.matrix.rows(); ++r) {
    if (!u.codomain.positive(r)) continue;
    const auto& row = u.matrix.row(r);
    for (const auto& x : row)
      for (const auto& y : row) gram[{x.col, y.col}] += u.codomain.weight(r) * x.value * y.value;
  }
  for (const auto& [ij, v] : gram) {
    const auto [i, j] = ij;
    if (!u.domain.positive(i) || !u.domain.positive(j)) continue;
    if (v != (i == j ? u.domain.weight(i) : Rational(0))) return false;
  }
  for (std::size_t i = 0; i < u.domain.dim(); ++i) {
    if (u.domain.positive(i) && !gram.count({i, i})) return false;
  }
  return true;
}

bool is_unitary(const Operator& u) {
  return is_isometry(u) && equal_on_support(compose(u, adjoint(u)), identity_operator(u.codomain));
}

std::vector<std::array<std::size_t, 2>> tensor_identify(const FinProbSpace& mu, const FinProbSpace& nu) {
  std::vector<std::array<std::size_t, 2>> out(mu.size() * nu.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {k / nu.size(), k % nu.size()};
  return out;
}

SubproductSystem::SubproductSystem(TimeSetPtr times, std::vector<HilbertRep> spaces)
    : times_(std::move(times)), spaces_(std::move(spaces)) {
  if (spaces_.size() != interval_count(times_->size())) {
    throw std::invalid_argument("SubproductSystem: one space per interval expected");
  }
}

const HilbertRep& SubproductSystem::space(std::size_t s, std::size_t t) const {
  return spaces_.at(interval_slot(points(), s, t));
}

const Operator& SubproductSystem::U(std::size_t r, std::size_t s, std::size_t t) const {
  auto it = u_.find({r, s, t});
  if (it == u_.end()) throw std::invalid_argument("SubproductSystem: no U" + triple_label(*times_, r, s, t));
  return it->second;
}

void SubproductSystem::set_U(std::size_t r, std::size_t s, std::size_t t, Operator u) {
  if (!(r < s && s < t && t < points())) throw std::invalid_argument("set_U: not an ordered triple");
  if (!u.domain.same(space(r, t)) || u.codomain.dim() != space(r, s).dim() * space(s, t).dim()) {
    throw std::invalid_argument("set_U: operator has the wrong spaces");
  }
  u_.insert_or_assign({r, s, t}, std::move(u));
}

SubproductSystem l2_of_system(const ConvolutionSystem& sys) {
  const std::size_t n = sys.points();
  std::vector<HilbertRep> spaces;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) spaces.emplace_back(sys.space(s, t));
  SubproductSystem h(sys.times(), std::move(spaces));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto k = koopman(sys.mult(r, s, t));
        const auto& A = *sys.space(r, s);
        const auto& B = *sys.space(s, t);
        const auto idx = tensor_identify(A, B);
        const auto target = tensor(h.space(r, s), h.space(s, t));
        Matrix m(target.dim(), k.domain.dim());
        for (std::size_t p = 0; p < idx.size(); ++p)
          for (const auto& e : k.matrix.row(p)) m.set(idx[p][0] * B.size() + idx[p][1], e.col, e.value);
        h.set_U(r, s, t, Operator{k.domain, target, std::move(m)});
      }
  return h;
}

Report verify_subproduct(const SubproductSystem& h) {
  Report report("subproduct");
  const auto& ts = *h.times();
  const std::size_t n = h.points();
  auto& iso = report.add("isometry");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        iso.expect(is_isometry(h.U(r, s, t)), [&] { return "U" + triple_label(ts, r, s, t) + " is not an isometry"; });
      }
  auto& coassoc = report.add("co-associativity");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t)
        for (std::size_t u = t + 1; u < n; ++u) {
          const auto lhs = compose(tensor(identity_operator(h.space(r, s)), h.U(s, t, u)), h.U(r, s, u));
          const auto rhs = compose(tensor(h.U(r, s, t), identity_operator(h.space(t, u))), h.U(r, t, u));
          const auto diff = first_difference(lhs, rhs);
          coassoc.expect(!diff, [&] {
            return "quadruple (" + ts.label(r) + "," + ts.label(s) + "," + ts.label(t) + "," + ts.label(u) +
                   ") differs at row '" + lhs.codomain.base()->outcome(diff->first) + "', column '" +
                   lhs.domain.base()->outcome(diff->second) + "'";
          });
        }
  return report;
}

Check unitarity(const SubproductSystem& h) {
  Check c("unitary");
  const auto& ts = *h.times();
  const std::size_t n = h.points();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        c.expect(is_unitary(h.U(r, s, t)), [&] { return "U" + triple_label(ts, r, s, t) + " is not unitary"; });
      }
  return c;
}

bool is_product_system(const SubproductSystem& h) { return unitarity(h).passed(); }

InductiveLimitSpace inductive_limit(ConnectingMaps& maps, std::size_t s, std::size_t t) {
  const auto& times = maps.system()->times();
  const auto top = Partition::full_grid(times, s, t);
  InductiveLimitSpace lim{{s, t}, top, HilbertRep(maps.space(top)), enumerate_window(times, s, t).elements, {}};
  lim.embeddings.reserve(lim.partitions.size());
  for (const auto& I : lim.partitions) lim.embeddings.push_back(koopman(maps.T(I, top)));
  return lim;
}

Report verify_inductive_limit(ConnectingMaps& maps, const InductiveLimitSpace& lim) {
  const auto& ts = *maps.system()->times();
  Report report("inductive-limit (" + ts.label(lim.window.s) + "," + ts.label(lim.window.t) + ")");
  auto& iso = report.add("embeddings-isometric");
  for (std::size_t i = 0; i < lim.partitions.size(); ++i) {
    iso.expect(is_isometry(lim.embeddings[i]),
               [&] { return "V" + lim.partitions[i].to_string() + " is not an isometry"; });
  }
  auto& compat = report.add("compatibility");
  for (std::size_t i = 0; i < lim.partitions.size(); ++i)
    for (std::size_t j = 0; j < lim.partitions.size(); ++j) {
      const auto& I = lim.partitions[i];
      const auto& J = lim.partitions[j];
      if (!refines(I, J)) continue;
      const auto diff = first_difference(compose(lim.embeddings[j], koopman(maps.T(I, J))), lim.embeddings[i]);
      compat.expect(!diff, [&] {
        return "V" + J.to_string() + " U(T" + I.to_string() + "," + J.to_string() + ") differs from V" +
               I.to_string();
      });
    }
  return report;
}

namespace {

const Operator& embedding_of(const InductiveLimitSpace& lim, const Partition& I) {
  auto it = std::find(lim.partitions.begin(), lim.partitions.end(), I);
  if (it == lim.partitions.end()) throw std::invalid_argument(I.to_string() + " is not in the window");
  return lim.embeddings[static_cast<std::size_t>(it - lim.partitions.begin())];
}

}  // namespace

ProductSystemH product_system_H(ConnectingMaps& maps) {
  const auto& times = maps.system()->times();
  const std::size_t n = times->size();
  std::vector<InductiveLimitSpace> limits;
  std::vector<HilbertRep> spaces;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      limits.push_back(inductive_limit(maps, s, t));
      spaces.push_back(limits.back().space);
    }
  ProductSystemH h{std::move(limits), SubproductSystem(times, std::move(spaces))};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& whole = h.limits[interval_slot(n, r, t)];
        const auto& I = whole.top;
        const auto& VI = embedding_of(whole, I);
        const auto& VL = embedding_of(h.limits[interval_slot(n, r, s)], I.restrict(r, s));
        const auto& VR = embedding_of(h.limits[interval_slot(n, s, t)], I.restrict(s, t));
        h.system.set_U(r, s, t, compose(tensor(VL, VR), adjoint(VI)));
      }
  return h;
}

Report verify_product_system_H(const ProductSystemH& h) {
  Report report("product-system");
  const auto& ts = *h.system.times();
  const std::size_t n = h.system.points();
  auto& def = report.add("defining-identity");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& whole = h.limits[interval_slot(n, r, t)];
        const auto& U = h.system.U(r, s, t);
        for (std::size_t i = 0; i < whole.partitions.size(); ++i) {
          const auto& I = whole.partitions[i];
          if (!I.contains(s)) continue;
          const auto lhs = compose(U, whole.embeddings[i]);
          const auto rhs = tensor(embedding_of(h.limits[interval_slot(n, r, s)], I.restrict(r, s)),
                                  embedding_of(h.limits[interval_slot(n, s, t)], I.restrict(s, t)));
          const auto diff = first_difference(lhs, rhs);
          def.expect(!diff, [&] {
            return "U" + triple_label(ts, r, s, t) + " V" + I.to_string() + " differs at (" +
                   std::to_string(diff->first) + "," + std::to_string(diff->second) + ")";
          });
        }
      }
  report.absorb(verify_subproduct(h.system));
  report.add(unitarity(h.system));
  return report;
}

PsIsomorphism build_ps_isomorphism(const ProjectiveCpps& c) {
  auto h = product_system_H(c.maps());
  auto flat_l2 = l2_of_system(*c.flat());
  const std::size_t n = c.base()->points();
  std::vector<Operator> theta;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto& lim = h.limits[interval_slot(n, s, t)];
      theta.push_back(compose(koopman(c.canonical(lim.top)), adjoint(embedding_of(lim, lim.top))));
    }
  return PsIsomorphism{std::move(h), std::move(flat_l2), std::move(theta)};
}

Report verify_ps(const ProjectiveCpps& c, const PsIsomorphism& ps) {
  Report report("ps");
  const auto& ts = *c.times();
  const std::size_t n = ts.size();
  auto& emb = report.add("theta-embeddings");
  auto& uni = report.add("theta-unitary");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto slot = interval_slot(n, s, t);
      const auto& th = ps.theta[slot];
      const auto& lim = ps.h.limits[slot];
      for (std::size_t i = 0; i < lim.partitions.size(); ++i) {
        const auto diff = first_difference(compose(th, lim.embeddings[i]), koopman(c.canonical(lim.partitions[i])));
        emb.expect(!diff, [&] {
          return "theta(" + ts.label(s) + "," + ts.label(t) + ") V" + lim.partitions[i].to_string() +
                 " differs at (" + std::to_string(diff->first) + "," + std::to_string(diff->second) + ")";
        });
      }
      uni.expect(is_unitary(th), [&] { return "theta(" + ts.label(s) + "," + ts.label(t) + ") is not unitary"; });
    }
  auto& inter = report.add("intertwining");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto lhs =
            compose(tensor(ps.theta[interval_slot(n, r, s)], ps.theta[interval_slot(n, s, t)]), ps.h.system.U(r, s, t));
        const auto rhs = compose(ps.flat_l2.U(r, s, t), ps.theta[interval_slot(n, r, t)]);
        const auto diff = first_difference(lhs, rhs);
        inter.expect(!diff, [&] {
          return "triple " + triple_label(ts, r, s, t) + " differs at (" + std::to_string(diff->first) + "," +
                 std::to_string(diff->second) + ")";
        });
      }
  return report;
}

}  // namespace convlim
