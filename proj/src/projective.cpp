#include "convlim/projective.hpp"

#include <algorithm>
#include <stdexcept>

#include "convlim/parallel.hpp"

namespace convlim {

namespace {

Partition without_last(const Partition& p) {
  std::vector<std::size_t> pts(p.points().begin(), p.points().end() - 1);
  return Partition(p.times(), std::move(pts));
}

std::size_t position_of(const Partition& p, std::size_t point) {
  const auto pts = p.points();
  const auto it = std::lower_bound(pts.begin(), pts.end(), point);
  if (it == pts.end() || *it != point) {
    throw std::invalid_argument(p.times()->label(point) + " is not a point of " + p.to_string());
  }
  return static_cast<std::size_t>(it - pts.begin());
}

std::string arrow(const Partition& coarse, const Partition& fine) {
  return coarse.to_string() + " <- " + fine.to_string();
}

}  // namespace

ConnectingMaps::ConnectingMaps(SystemPtr sys) : sys_(std::move(sys)) {
  if (!sys_) throw std::invalid_argument("ConnectingMaps: null system");
}

const SpacePtr& ConnectingMaps::space(const Partition& p) {
  if (auto it = spaces_.find(p); it != spaces_.end()) return it->second;
  SpacePtr sp;
  if (p.cells() == 1) {
    sp = sys_->space(p.first(), p.last());
  } else {
    std::vector<SpacePtr> cells;
    cells.reserve(p.cells());
    for (std::size_t k = 0; k < p.cells(); ++k) cells.push_back(sys_->space(p[k], p[k + 1]));
    sp = product(std::span<const SpacePtr>(cells));
  }
  return spaces_.emplace(p, std::move(sp)).first->second;
}

const ProbMorphism& ConnectingMaps::T(const Partition& coarse, const Partition& fine) {
  auto key = std::make_pair(coarse, fine);
  if (auto it = t_cache_.find(key); it != t_cache_.end()) return it->second;
  if (!refines(coarse, fine)) {
    throw std::invalid_argument("T: " + fine.to_string() + " does not refine " + coarse.to_string());
  }

  const auto omega_i = space(coarse);
  const auto omega_j = space(fine);
  std::optional<ProbMorphism> out;
  if (coarse == fine) {
    out = ProbMorphism::identity(omega_j);
  } else if (coarse.is_trivial()) {
    const std::size_t n = fine.cells() - 1;
    const std::size_t j0 = fine.first();
    const std::size_t jn = fine[n];
    const std::size_t jn1 = fine.last();
    const auto& m = sys_->mult(j0, jn, jn1);
    if (n == 1) {
      out = m.rebind(omega_j, omega_i);
    } else {
      const Partition head = without_last(fine);
      const Partition peeled(fine.times(), {j0, jn, jn1});
      const auto omega_p = space(peeled);
      const ProbMorphism factors[] = {T(Partition::trivial(fine.times(), j0, jn), head),
                                      ProbMorphism::identity(sys_->space(jn, jn1))};
      const auto inner = product(factors, omega_j, omega_p);
      out = compose(m.rebind(omega_p, omega_i), inner);
    }
  } else {
    const auto blocks = decompose_blocks(coarse, fine);
    std::vector<ProbMorphism> factors;
    factors.reserve(blocks.size());
    for (const auto& b : blocks) {
      factors.push_back(T(Partition::trivial(fine.times(), b.first(), b.last()), b));
    }
    out = product(factors, omega_j, omega_i);
  }
  return t_cache_.emplace(std::move(key), std::move(*out)).first->second;
}

const ProbMorphism& ConnectingMaps::window_projection(const Partition& fine, std::size_t lo,
                                                      std::size_t hi) {
  auto key = std::make_tuple(fine, lo, hi);
  if (auto it = pi_cache_.find(key); it != pi_cache_.end()) return it->second;
  const std::size_t begin = position_of(fine, lo);
  const std::size_t end = position_of(fine, hi);
  if (begin >= end) throw std::invalid_argument("window_projection: empty window");
  std::vector<std::size_t> radices;
  radices.reserve(fine.cells());
  for (std::size_t k = 0; k < fine.cells(); ++k) {
    radices.push_back(sys_->space(fine[k], fine[k + 1])->size());
  }
  auto pi = coordinate_projection(space(fine), MixedRadix(std::move(radices)), begin, end,
                                  space(fine.restrict(lo, hi)));
  return pi_cache_.emplace(std::move(key), std::move(pi)).first->second;
}

ProbMorphism ConnectingMaps::X(const Partition& coarse, const Partition& fine) {
  const auto lcr = decompose_lcr(coarse, fine);
  if (lcr.middle == fine) return T(coarse, fine);
  return compose(T(coarse, lcr.middle), window_projection(fine, coarse.first(), coarse.last()));
}

ProbMorphism build_T(const Partition& coarse, const Partition& fine, const SystemPtr& sys) {
  ConnectingMaps maps(sys);
  return maps.T(coarse, fine);
}

ProbMorphism build_X(const Partition& coarse, const Partition& fine, const SystemPtr& sys) {
  ConnectingMaps maps(sys);
  return maps.X(coarse, fine);
}

ConnectingFamily ConnectingFamily::assemble(ConnectingMaps& maps, FamilyKind kind, PairWindow window,
                                            PartitionPoset poset) {
  ConnectingFamily f;
  f.kind_ = kind;
  f.sys_ = maps.system();
  f.window_ = window;
  f.poset_ = std::move(poset);
  const std::size_t n = f.size();
  f.spaces_.reserve(n);
  f.morphisms_.resize(n * n);
  f.above_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.index_.emplace(f.poset_.elements[i], i);
    f.spaces_.push_back(maps.space(f.poset_.elements[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& I = f.poset_.elements[i];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& J = f.poset_.elements[j];
      if (!is_subset(I, J)) continue;
      f.morphisms_[i * n + j] = kind == FamilyKind::interval ? maps.T(I, J) : maps.X(I, J);
      f.above_[i].push_back(j);
    }
  }
  return f;
}

ConnectingFamily ConnectingFamily::interval(ConnectingMaps& maps, std::size_t s, std::size_t t) {
  return assemble(maps, FamilyKind::interval, {s, t}, enumerate_window(maps.system()->times(), s, t));
}

ConnectingFamily ConnectingFamily::interval(const SystemPtr& sys, std::size_t s, std::size_t t) {
  ConnectingMaps maps(sys);
  return interval(maps, s, t);
}

ConnectingFamily ConnectingFamily::global(ConnectingMaps& maps) {
  const auto& times = maps.system()->times();
  return assemble(maps, FamilyKind::global, {0, times->size() - 1}, enumerate_all(times));
}

ConnectingFamily ConnectingFamily::global(const SystemPtr& sys) {
  ConnectingMaps maps(sys);
  return global(maps);
}

std::optional<std::size_t> ConnectingFamily::find(const Partition& p) const {
  if (auto it = index_.find(p); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t ConnectingFamily::index_of(const Partition& p) const {
  if (auto i = find(p)) return *i;
  throw std::out_of_range(p.to_string() + " is not in " + describe());
}

const ProbMorphism& ConnectingFamily::morphism(std::size_t i, std::size_t j) const {
  const auto& m = morphisms_.at(i * size() + j);
  if (!m) throw std::invalid_argument("no connecting map " + arrow(partition(i), partition(j)));
  return *m;
}

const ProbMorphism& ConnectingFamily::morphism(const Partition& coarse, const Partition& fine) const {
  return morphism(index_of(coarse), index_of(fine));
}

ConnectingFamily ConnectingFamily::with_morphism(std::size_t i, std::size_t j, ProbMorphism m) const {
  const auto& old = morphism(i, j);
  if (m.domain().size() != old.domain().size() || m.codomain().size() != old.codomain().size()) {
    throw std::invalid_argument("with_morphism: replacement has the wrong shape");
  }
  ConnectingFamily copy = *this;
  copy.morphisms_[i * size() + j] = std::move(m);
  return copy;
}

std::string ConnectingFamily::describe() const {
  const auto& ts = *sys_->times();
  if (kind_ == FamilyKind::global) return "K";
  return "K_{" + ts.label(window_.s) + "," + ts.label(window_.t) + "}";
}

Report verify_projective(const ConnectingFamily& family) {
  Report report("projective " + family.describe());
  const std::size_t n = family.size();

  auto& id = report.add("identity");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = family.morphism(i, i);
    const auto diff = first_ae_difference(m, ProbMorphism::identity(family.space(i)));
    id.expect(!diff, [&] {
      return "map " + arrow(family.partition(i), family.partition(i)) + " moves '" +
             m.domain().outcome(*diff) + "'";
    });
  }

  auto& mp = report.add("measure-preserving");
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : family.above(i)) {
      mp.expect(is_measure_preserving(family.morphism(i, j)), [&] {
        return "map " + arrow(family.partition(i), family.partition(j)) + " does not preserve measure";
      });
    }

  auto per_source = detail::parallel_map<Check>(n, [&](std::size_t i) {
    Check c{"compatibility"};
    const auto& I = family.partition(i);
    for (auto j : family.above(i)) {
      const auto& ij = family.morphism(i, j);
      for (auto k : family.above(j)) {
        const auto& jk = family.morphism(j, k);
        const auto& ik = family.morphism(i, k);
        const auto& dom = ik.domain();
        std::optional<std::size_t> bad;
        for (std::size_t w = 0; w < dom.size() && !bad; ++w) {
          if (dom.positive(w) && ik(w) != ij(jk(w))) bad = w;
        }
        c.expect(!bad, [&] {
          return "chain " + I.to_string() + " <- " + family.partition(j).to_string() + " <- " +
                 family.partition(k).to_string() + " disagrees at '" + dom.outcome(*bad) + "'";
        });
      }
    }
    return c;
  });
  auto& compat = report.add("compatibility");
  for (const auto& c : per_source) compat.merge(c);
  return report;
}

Report verify_window_commutation(ConnectingMaps& maps) {
  Report report("window-commutation");
  auto& check = report.add("window-commutation");
  const auto& times = maps.system()->times();
  const auto all = enumerate_all(times);
  for (const auto& K : all.elements) {
    for (const auto& J : all.elements) {
      if (!is_subset(J, K)) continue;
      const std::size_t s = J.first();
      const std::size_t t = J.last();
      const Partition Jt = K.restrict(s, t);
      const auto& TJ = maps.T(J, Jt);
      for (std::size_t a = 0; a < J.size(); ++a)
        for (std::size_t b = a + 1; b < J.size(); ++b) {
          const std::size_t q = J[a];
          const std::size_t r = J[b];
          const Partition It = J.restrict(q, r);
          const Partition Itp = K.restrict(q, r);
          const auto& piJ = maps.window_projection(J, q, r);
          const auto& piK = maps.window_projection(Jt, q, r);
          const auto& TI = maps.T(It, Itp);
          const auto& dom = TJ.domain();
          std::optional<std::size_t> bad;
          for (std::size_t w = 0; w < dom.size() && !bad; ++w) {
            if (dom.positive(w) && piJ(TJ(w)) != TI(piK(w))) bad = w;
          }
          check.expect(!bad, [&] {
            return "K=" + K.to_string() + " J=" + J.to_string() + " window [" + times->label(q) + "," +
                   times->label(r) + "] disagrees at '" + dom.outcome(*bad) + "'";
          });
        }
    }
  }
  return report;
}

FiniteProjectiveLimit finite_projective_limit(const ConnectingFamily& family) {
  const auto report = verify_projective(family);
  if (const auto* bad = report.first_failure()) {
    throw std::invalid_argument("not a projective system: " + bad->name + ": " + bad->witness);
  }
  FiniteProjectiveLimit lim{family.partition(family.top()), family.space(family.top()), {}};
  lim.projections.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    lim.projections.push_back(family.morphism(i, family.top()));
  }
  return lim;
}

Report verify_limit(const ConnectingFamily& family, const FiniteProjectiveLimit& limit) {
  Report report("limit " + family.describe());
  if (limit.projections.size() != family.size()) {
    throw std::invalid_argument("verify_limit: projection count does not match the family");
  }
  auto& compat = report.add("projections-compatible");
  for (std::size_t i = 0; i < family.size(); ++i)
    for (auto j : family.above(i)) {
      const auto diff =
          first_ae_difference(limit.projections[i], compose(family.morphism(i, j), limit.projections[j]));
      compat.expect(!diff, [&] {
        return "projection to " + family.partition(i).to_string() + " differs from the route through " +
               family.partition(j).to_string() + " at '" + limit.space->outcome(*diff) + "'";
      });
    }
  auto& onto = report.add("projections-onto");
  for (std::size_t i = 0; i < family.size(); ++i) {
    onto.expect(is_surjective_on_support(limit.projections[i]), [&] {
      return "projection to " + family.partition(i).to_string() + " misses part of the support";
    });
  }
  return report;
}

bool check_simply_maximal(const ConnectingFamily& family) {
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!is_surjective_on_support(family.morphism(i, family.top()))) return false;
  }
  return true;
}

Report thread_limit_crosscheck(const ConnectingFamily& family, const std::vector<std::size_t>& levels,
                               std::size_t max_tuples) {
  if (std::find(levels.begin(), levels.end(), family.top()) == levels.end()) {
    throw std::invalid_argument("thread_limit_crosscheck: levels must include the top");
  }
  std::vector<std::size_t> radices;
  std::size_t total = 1;
  for (auto i : levels) {
    radices.push_back(family.space(i)->size());
    total *= radices.back();
    if (total > max_tuples) throw std::invalid_argument("thread_limit_crosscheck: product too large");
  }
  const MixedRadix layout(std::move(radices));
  const std::size_t top_pos =
      static_cast<std::size_t>(std::find(levels.begin(), levels.end(), family.top()) - levels.begin());
  const auto& top = *family.space(family.top());

  // A thread is a tuple with ω_i = T_{i,j}(ω_j) whenever I_i ⊆ I_j.
  std::vector<std::size_t> threads;
  std::vector<std::size_t> digits(levels.size());
  for (std::size_t x = 0; x < total; ++x) {
    layout.decode(x, digits);
    bool ok = true;
    for (std::size_t a = 0; a < levels.size() && ok; ++a)
      for (std::size_t b = 0; b < levels.size() && ok; ++b) {
        if (a == b || !family.comparable(levels[a], levels[b])) continue;
        ok = family.morphism(levels[a], levels[b])(digits[b]) == digits[a];
      }
    if (ok) threads.push_back(x);
  }

  Report report("thread-limit " + family.describe());
  auto& bij = report.add("threads-match-top");
  std::vector<std::size_t> hits(top.size(), 0);
  for (auto x : threads) ++hits[layout.digit(x, top_pos)];
  for (std::size_t w = 0; w < top.size(); ++w) {
    if (!top.positive(w)) continue;
    bij.expect(hits[w] == 1, [&] {
      return std::to_string(hits[w]) + " threads end at '" + top.outcome(w) + "'";
    });
  }

  auto& crr = report.add("thread-measure");
  for (std::size_t a = 0; a < levels.size(); ++a) {
    const auto& sp = *family.space(levels[a]);
    std::vector<Rational> mass(sp.size());
    for (auto x : threads) mass[layout.digit(x, a)] += top.weight(layout.digit(x, top_pos));
    // Every event when small enough, otherwise singletons (additivity covers the rest).
    if (sp.size() <= 10) {
      for (std::size_t A = 0; A < (std::size_t{1} << sp.size()); ++A) {
        Rational lhs = 0;
        Rational rhs = 0;
        for (std::size_t k = 0; k < sp.size(); ++k) {
          if (!(A >> k & 1)) continue;
          lhs += mass[k];
          rhs += sp.weight(k);
        }
        crr.expect(lhs == rhs, [&] {
          return "event mask " + std::to_string(A) + " on " + family.partition(levels[a]).to_string() +
                 ": " + to_string(lhs) + " vs " + to_string(rhs);
        });
      }
    } else {
      for (std::size_t k = 0; k < sp.size(); ++k) {
        crr.expect(mass[k] == sp.weight(k), [&] {
          return "outcome '" + sp.outcome(k) + "' on " + family.partition(levels[a]).to_string() + ": " +
                 to_string(mass[k]) + " vs " + to_string(sp.weight(k));
        });
      }
    }
  }
  return report;
}

CylinderTower make_tower(const std::vector<std::vector<std::string>>& level_labels,
                         const std::function<SystemPtr(const TimeSetPtr&)>& rule,
                         std::vector<CylinderEvent> events) {
  if (level_labels.empty()) throw std::invalid_argument("tower has no levels");
  for (std::size_t k = 0; k + 1 < level_labels.size(); ++k) {
    const auto& coarse = level_labels[k];
    const auto& fine = level_labels[k + 1];
    std::size_t pos = 0;
    for (const auto& l : coarse) {
      while (pos < fine.size() && fine[pos] != l) ++pos;
      if (pos == fine.size()) {
        throw std::invalid_argument("tower level " + std::to_string(k + 1) + " does not extend level " +
                                    std::to_string(k) + " in order at '" + l + "'");
      }
      ++pos;
    }
  }
  CylinderTower tower;
  for (const auto& labels : level_labels) {
    auto sys = rule(make_time_set(labels));
    if (!sys) throw std::invalid_argument("tower rule returned no system");
    tower.levels.push_back(std::move(sys));
  }
  const auto& base = *tower.levels.front();
  for (const auto& e : events) {
    const auto& ts = *base.times();
    if (!ts.contains(e.from) || !ts.contains(e.to) || ts.index_of(e.from) >= ts.index_of(e.to)) {
      throw std::invalid_argument("tower event (" + e.from + "," + e.to + ") is not an interval of level 0");
    }
    const auto& sp = *base.space(ts.index_of(e.from), ts.index_of(e.to));
    for (const auto& o : e.outcomes) {
      try {
        sp.index_of(o);
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("tower event (" + e.from + "," + e.to + ") has unknown outcome '" + o +
                                    "'");
      }
    }
  }
  tower.events = std::move(events);
  return tower;
}

namespace {

struct LevelEvent {
  std::vector<char> preimage;  // over Ω of the level's full grid
  Rational limit_mass = 0;
  Rational direct_mass = 0;
};

LevelEvent level_event(ConnectingMaps& maps, const Partition& grid, const CylinderEvent& e) {
  const auto& sys = *maps.system();
  const auto& ts = *sys.times();
  const std::size_t s = ts.index_of(e.from);
  const std::size_t t = ts.index_of(e.to);
  const auto& target = *sys.space(s, t);
  std::vector<char> in_a(target.size(), 0);
  LevelEvent out;
  for (const auto& o : e.outcomes) {
    const auto k = target.index_of(o);
    if (!in_a[k]) out.direct_mass += target.weight(k);
    in_a[k] = 1;
  }
  const auto x = maps.X(Partition::trivial(sys.times(), s, t), grid);
  const auto& dom = x.domain();
  out.preimage.resize(dom.size());
  for (std::size_t w = 0; w < dom.size(); ++w) {
    out.preimage[w] = in_a[x(w)];
    if (out.preimage[w]) out.limit_mass += dom.weight(w);
  }
  return out;
}

}  // namespace

Report tower_consistency(const CylinderTower& tower) {
  Report report("tower");
  const std::size_t L = tower.levels.size();

  auto& axioms = report.add("level-axioms");
  for (std::size_t k = 0; k < L; ++k) {
    const auto r = check_system(*tower.levels[k]);
    const auto* bad = r.first_failure();
    axioms.expect(!bad, [&] { return "level " + std::to_string(k) + ": " + bad->name + ": " + bad->witness; });
  }
  if (!axioms.passed()) return report;

  std::vector<ConnectingMaps> maps;
  std::vector<Partition> grids;
  for (const auto& sys : tower.levels) {
    maps.emplace_back(sys);
    grids.push_back(Partition::full_grid(sys->times(), 0, sys->points() - 1));
  }

  auto& mass = report.add("event-mass");
  auto& pull = report.add("connecting-pullback");
  for (const auto& e : tower.events) {
    const std::string name = "{X(" + e.from + "," + e.to + ") in A}";
    std::vector<LevelEvent> per_level;
    for (std::size_t k = 0; k < L; ++k) {
      per_level.push_back(level_event(maps[k], grids[k], e));
      const auto& le = per_level.back();
      mass.expect(le.limit_mass == le.direct_mass, [&] {
        return name + " at level " + std::to_string(k) + ": limit mass " + to_string(le.limit_mass) +
               " vs marginal " + to_string(le.direct_mass);
      });
    }
    for (std::size_t k = 0; k + 1 < L; ++k) {
      const auto& fine_sys = tower.levels[k + 1];
      const auto embedded = Partition::from_labels(fine_sys->times(), tower.levels[k]->times()->labels());
      const auto conn = maps[k + 1].X(embedded, grids[k + 1]);
      const auto& coarse_space = *maps[k].space(grids[k]);
      if (!conn.codomain().same_measure(coarse_space)) {
        pull.fail(name + ": level " + std::to_string(k) + " spaces differ inside level " +
                  std::to_string(k + 1));
        continue;
      }
      Rational pulled = 0;
      const auto& dom = conn.domain();
      for (std::size_t w = 0; w < dom.size(); ++w) {
        if (per_level[k].preimage[conn(w)]) pulled += dom.weight(w);
      }
      pull.expect(pulled == per_level[k].limit_mass, [&] {
        return name + " between levels " + std::to_string(k) + " and " + std::to_string(k + 1) + ": " +
               to_string(pulled) + " vs " + to_string(per_level[k].limit_mass);
      });
    }
  }
  return report;
}

}  // namespace convlim
