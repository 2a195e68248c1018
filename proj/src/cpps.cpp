#include "convlim/cpps.hpp"

#include <stdexcept>
#include <string>

namespace convlim {

namespace {

std::string pair_name(const TimeSet& ts, std::size_t s, std::size_t t) {
  return "(" + ts.label(s) + "," + ts.label(t) + ")";
}

std::string window_name(const TimeSet& ts, PairWindow w) { return pair_name(ts, w.s, w.t); }

std::vector<Partition> partitions_through(const TimeSetPtr& times, std::size_t lo, std::size_t hi,
                                          std::initializer_list<std::size_t> through) {
  std::vector<Partition> out;
  for (auto& p : enumerate_window(times, lo, hi).elements) {
    bool ok = true;
    for (auto x : through) ok = ok && p.contains(x);
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

std::vector<Partition> subsets_in_window(const Partition& fine, std::size_t s, std::size_t t) {
  std::vector<Partition> out;
  for (auto& p : enumerate_window(fine.times(), s, t).elements) {
    if (is_subset(p, fine)) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Partition ProjectiveCpps::grid(std::size_t s, std::size_t t) const {
  return Partition::full_grid(times(), s, t);
}

const ProbMorphism& ProjectiveCpps::canonical(const Partition& I) const {
  return maps_->T(I, grid(I.first(), I.last()));
}

const ProbMorphism& ProjectiveCpps::canonical(std::size_t s, std::size_t t) const {
  return canonical(Partition::trivial(times(), s, t));
}

SystemMorphism ProjectiveCpps::tau() const {
  const std::size_t n = base_->points();
  std::vector<ProbMorphism> comps;
  comps.reserve(interval_count(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) comps.push_back(canonical(s, t));
  return SystemMorphism(flat_, base_, std::move(comps));
}

ProjectiveCpps ProjectiveCpps::with_flat_mult(std::size_t r, std::size_t s, std::size_t t,
                                              std::vector<ProbMorphism::Index> table) const {
  ProjectiveCpps copy = *this;
  copy.flat_ = std::make_shared<const ConvolutionSystem>(flat_->with_mult(r, s, t, std::move(table)));
  return copy;
}

ProjectiveCpps assemble_cpps(const SystemPtr& sys) {
  ProjectiveCpps c;
  c.base_ = sys;
  c.maps_ = std::make_shared<ConnectingMaps>(sys);
  const std::size_t n = sys->points();
  SystemBuilder b(sys->times());
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) b.space(s, t, c.maps_->space(c.grid(s, t)));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        // Concatenation: the flat index of ((a),(b)) is already the index in Ω♭_{r,t}.
        std::vector<ProbMorphism::Index> table(c.maps_->space(c.grid(r, t))->size());
        for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<ProbMorphism::Index>(i);
        b.mult(r, s, t, std::move(table));
      }
  c.flat_ = b.build();
  return c;
}

ProjectiveCpps build_cpps(const SystemPtr& sys) {
  const auto axioms = check_system(*sys);
  if (const auto* bad = axioms.first_failure()) {
    throw std::invalid_argument("build_cpps: invalid system: " + bad->name + ": " + bad->witness);
  }
  auto c = assemble_cpps(sys);
  const auto report = verify_cpps(c);
  if (const auto* bad = report.first_failure()) {
    throw std::logic_error("build_cpps: flat system failed " + bad->name + ": " + bad->witness);
  }
  return c;
}

Report verify_cpps(const ProjectiveCpps& c) {
  Report report("cpps");
  const auto& flat = *c.flat();
  const auto& ts = *c.times();
  const std::size_t n = flat.points();

  auto& iso = report.add("flat-mult-isomorphism");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        iso.expect(is_isomorphism(flat.mult(r, s, t)), [&] {
          return "flat multiplication at " + ts.label(r) + "," + ts.label(s) + "," + ts.label(t) +
                 " is not an isomorphism";
        });
      }

  auto& th = report.add("thursday");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& m = flat.mult(r, s, t);
        const auto& pair = *flat.pair_space(r, s, t);
        const std::size_t B = flat.space(s, t)->size();
        for (const auto& I : partitions_through(c.times(), r, t, {s})) {
          const auto& TI = c.canonical(I);
          const auto& L = c.canonical(I.restrict(r, s));
          const auto& R = c.canonical(I.restrict(s, t));
          const std::size_t nR = R.codomain().size();
          std::optional<std::size_t> bad;
          for (std::size_t w = 0; w < pair.size() && !bad; ++w) {
            if (pair.positive(w) && TI(m(w)) != L(w / B) * nR + R(w % B)) bad = w;
          }
          th.expect(!bad, [&] {
            return "I=" + I.to_string() + " at split " + ts.label(s) + " differs at '" + pair.outcome(*bad) +
                   "'";
          });
        }
      }

  report.absorb(check_system(flat), "flat-");

  auto& sf = report.add("sf");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t)
        for (std::size_t u = t + 1; u < n; ++u) {
          const auto& A = *flat.space(r, s);
          const auto& B = *flat.space(s, t);
          const auto& C = *flat.space(t, u);
          const std::size_t nSU = flat.space(s, u)->size();
          const auto& m_stu = flat.mult(s, t, u);
          const auto& m_rsu = flat.mult(r, s, u);
          const auto& m_rst = flat.mult(r, s, t);
          const auto& m_rtu = flat.mult(r, t, u);
          for (const auto& I : partitions_through(c.times(), r, u, {s, t})) {
            const auto& TI = c.canonical(I);
            const auto& P1 = c.canonical(I.restrict(r, s));
            const auto& P2 = c.canonical(I.restrict(s, t));
            const auto& P3 = c.canonical(I.restrict(t, u));
            const std::size_t n2 = P2.codomain().size();
            const std::size_t n3 = P3.codomain().size();
            std::optional<std::array<std::size_t, 3>> bad;
            for (std::size_t a = 0; a < A.size() && !bad; ++a) {
              if (!A.positive(a)) continue;
              for (std::size_t b = 0; b < B.size() && !bad; ++b) {
                if (!B.positive(b)) continue;
                for (std::size_t x = 0; x < C.size() && !bad; ++x) {
                  if (!C.positive(x)) continue;
                  const std::size_t rhs = (P1(a) * n2 + P2(b)) * n3 + P3(x);
                  const std::size_t right = TI(m_rsu(a * nSU + m_stu(b * C.size() + x)));
                  const std::size_t left = TI(m_rtu(m_rst(a * B.size() + b) * C.size() + x));
                  if (right != rhs || left != rhs) bad = std::array{a, b, x};
                }
              }
            }
            sf.expect(!bad, [&] {
              return "I=" + I.to_string() + " differs at ('" + A.outcome((*bad)[0]) + "','" +
                     B.outcome((*bad)[1]) + "','" + C.outcome((*bad)[2]) + "')";
            });
          }
        }
  return report;
}

Report check_tau(const SystemMorphism& tau) {
  Report report("tau");
  report.absorb(check_system_morphism(tau));
  auto& onto = report.add("components-onto");
  const auto& ts = *tau.source()->times();
  const std::size_t n = ts.size();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      onto.expect(is_surjective_on_support(tau.component(s, t)),
                  [&] { return "component " + pair_name(ts, s, t) + " misses part of the support"; });
    }
  return report;
}

SystemMorphism lift_isomorphism(const SystemMorphism& theta, const ProjectiveCpps& source,
                                const ProjectiveCpps& target) {
  const auto& ts = *theta.source()->times();
  const std::size_t n = ts.size();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      if (!is_isomorphism(theta.component(s, t))) {
        throw std::invalid_argument("lift_isomorphism: component " + pair_name(ts, s, t) +
                                    " is not an isomorphism");
      }
    }
  std::vector<ProbMorphism> comps;
  comps.reserve(interval_count(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      std::vector<ProbMorphism> cells;
      for (std::size_t k = s; k < t; ++k) cells.push_back(theta.component(k, k + 1));
      comps.push_back(product(cells, source.flat_space(s, t), target.flat_space(s, t)));
    }
  return SystemMorphism(source.flat(), target.flat(), std::move(comps));
}

Report verify_lift(const SystemMorphism& theta, const SystemMorphism& lifted, const ProjectiveCpps& source,
                   const ProjectiveCpps& target) {
  Report report("lift");
  const auto& ts = *theta.source()->times();
  const std::size_t n = ts.size();
  auto& sq = report.add("tau-square");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto lhs = compose(theta.component(s, t), source.canonical(s, t));
      const auto rhs = compose(target.canonical(s, t), lifted.component(s, t));
      const auto diff = first_ae_difference(lhs, rhs);
      sq.expect(!diff, [&] {
        return "window " + pair_name(ts, s, t) + " differs at '" + lhs.domain().outcome(*diff) + "'";
      });
    }
  report.absorb(check_system_morphism(lifted), "flat-");
  auto& iso = report.add("components-isomorphism");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      iso.expect(is_isomorphism(lifted.component(s, t)),
                 [&] { return "lifted component " + pair_name(ts, s, t) + " is not an isomorphism"; });
    }
  return report;
}

FlowSystem build_flow(const SystemPtr& sys) {
  const auto axioms = check_system(*sys);
  if (const auto* bad = axioms.first_failure()) {
    throw std::invalid_argument("build_flow: invalid system: " + bad->name + ": " + bad->witness);
  }
  ConnectingMaps maps(sys);
  const std::size_t n = sys->points();
  const auto G = Partition::full_grid(sys->times(), 0, n - 1);
  FlowSystem flow{maps.space(G), {}, sys};
  flow.increments.reserve(interval_count(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      flow.increments.push_back(maps.X(Partition::trivial(sys->times(), s, t), G));
    }
  return flow;
}

std::size_t RestrictionMaps::index_of(PairWindow w) const {
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    if (windows_[i] == w) return i;
  }
  throw std::out_of_range("unknown window");
}

const ProbMorphism& RestrictionMaps::map(std::size_t inner, std::size_t outer) const {
  auto it = maps_.find({inner, outer});
  if (it == maps_.end()) {
    throw std::invalid_argument("no restriction " + window_name(*times_, windows_.at(inner)) + " <- " +
                                window_name(*times_, windows_.at(outer)));
  }
  return it->second;
}

const ProbMorphism& RestrictionMaps::map(PairWindow inner, PairWindow outer) const {
  return map(index_of(inner), index_of(outer));
}

RestrictionMaps RestrictionMaps::with_map(PairWindow inner, PairWindow outer, ProbMorphism m) const {
  const auto key = std::make_pair(index_of(inner), index_of(outer));
  const auto& old = map(key.first, key.second);
  if (m.domain().size() != old.domain().size() || m.codomain().size() != old.codomain().size()) {
    throw std::invalid_argument("with_map: replacement has the wrong shape");
  }
  RestrictionMaps copy = *this;
  copy.maps_.insert_or_assign(key, std::move(m));
  return copy;
}

RestrictionMaps build_restrictions(const ProjectiveCpps& c) {
  RestrictionMaps r;
  r.times_ = c.times();
  const auto& flat = *c.flat();
  const std::size_t n = flat.points();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s; t < n; ++t) {
      r.windows_.push_back({s, t});
      r.spaces_.push_back(s == t ? point_space() : flat.space(s, t));
    }

  for (std::size_t o = 0; o < r.windows_.size(); ++o)
    for (std::size_t i = 0; i < r.windows_.size(); ++i) {
      const auto in = r.windows_[i];
      const auto out = r.windows_[o];
      if (!in.within(out)) continue;
      const auto& dom = r.spaces_[o];
      const auto& cod = r.spaces_[i];
      std::optional<ProbMorphism> m;
      if (i == o) {
        m = ProbMorphism::identity(dom);
      } else if (in.degenerate()) {
        m = ProbMorphism::constant(dom, cod, 0);
      } else {
        const std::size_t u = out.s;
        const std::size_t s = in.s;
        const std::size_t t = in.t;
        const std::size_t v = out.t;
        if (u < s && t < v) {
          const auto& us = flat.space(u, s);
          const auto& st = flat.space(s, t);
          const auto& tv = flat.space(t, v);
          const auto triple = product({us, st, tv});
          const ProbMorphism factors[] = {ProbMorphism::identity(us), flat.mult(s, t, v)};
          const auto inner = product(factors, triple, flat.pair_space(u, s, v));
          const auto pi =
              coordinate_projection(triple, MixedRadix({us->size(), st->size(), tv->size()}), 1, 2, st);
          m = compose(pi, compose(inverse_on_support(inner), inverse_on_support(flat.mult(u, s, v))));
        } else if (u == s) {
          const auto& pair = flat.pair_space(s, t, v);
          const auto pi =
              coordinate_projection(pair, MixedRadix({flat.space(s, t)->size(), flat.space(t, v)->size()}), 0,
                                    1, cod);
          m = compose(pi, inverse_on_support(flat.mult(s, t, v)));
        } else {
          const auto& pair = flat.pair_space(u, s, t);
          const auto pi =
              coordinate_projection(pair, MixedRadix({flat.space(u, s)->size(), flat.space(s, t)->size()}), 1,
                                    2, cod);
          m = compose(pi, inverse_on_support(flat.mult(u, s, t)));
        }
      }
      r.maps_.emplace(std::make_pair(i, o), std::move(*m));
    }
  return r;
}

Report verify_ll1(const ProjectiveCpps& c, const RestrictionMaps& r) {
  Report report("ll1");
  auto& check = report.add("ll1");
  const auto& ts = *c.times();
  auto& maps = c.maps();
  const auto& W = r.windows();
  for (std::size_t o = 0; o < W.size(); ++o) {
    if (W[o].degenerate()) continue;
    const auto& dom = *r.space(o);
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (W[i].degenerate() || !r.nested(i, o)) continue;
      const auto& R = r.map(i, o);
      for (const auto& J : enumerate_window(c.times(), W[o].s, W[o].t).elements) {
        const auto& TJ = c.canonical(J);
        for (const auto& I : subsets_in_window(J, W[i].s, W[i].t)) {
          const auto& TI = c.canonical(I);
          const auto XIJ = maps.X(I, J);
          std::optional<std::size_t> bad;
          for (std::size_t w = 0; w < dom.size() && !bad; ++w) {
            if (dom.positive(w) && TI(R(w)) != XIJ(TJ(w))) bad = w;
          }
          check.expect(!bad, [&] {
            return "windows " + window_name(ts, W[i]) + " in " + window_name(ts, W[o]) + ", I=" +
                   I.to_string() + ", J=" + J.to_string() + " differ at '" + dom.outcome(*bad) + "'";
          });
        }
      }
    }
  }
  return report;
}

Report verify_projint(const RestrictionMaps& r) {
  Report report("projint");
  const auto& ts = *r.times();
  const auto& W = r.windows();
  auto& compat = report.add("compatibility");
  for (std::size_t a = 0; a < W.size(); ++a)
    for (std::size_t b = 0; b < W.size(); ++b) {
      if (!r.nested(a, b)) continue;
      for (std::size_t o = 0; o < W.size(); ++o) {
        if (!r.nested(b, o)) continue;
        const auto& direct = r.map(a, o);
        const auto diff = first_ae_difference(direct, compose(r.map(a, b), r.map(b, o)));
        compat.expect(!diff, [&] {
          return window_name(ts, W[a]) + " <- " + window_name(ts, W[b]) + " <- " + window_name(ts, W[o]) +
                 " differs at '" + direct.domain().outcome(*diff) + "'";
        });
      }
    }
  auto& marg = report.add("marginals");
  auto& epi = report.add("epimorphism");
  for (std::size_t i = 0; i < W.size(); ++i)
    for (std::size_t o = 0; o < W.size(); ++o) {
      if (!r.nested(i, o)) continue;
      const auto& m = r.map(i, o);
      marg.expect(pushforward(m) == m.codomain().weights(), [&] {
        return "pushforward to " + window_name(ts, W[i]) + " from " + window_name(ts, W[o]) +
               " differs from the marginal";
      });
      epi.expect(is_surjective_on_support(m), [&] {
        return "restriction to " + window_name(ts, W[i]) + " from " + window_name(ts, W[o]) +
               " misses part of the support";
      });
    }
  return report;
}

Report check_restriction_windows(const ProjectiveCpps& c, const RestrictionMaps& r) {
  Report report("restriction-windows");
  auto& check = report.add("matches-window-projection");
  const auto& ts = *c.times();
  const auto& W = r.windows();
  for (std::size_t o = 0; o < W.size(); ++o)
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (W[i].degenerate() || !r.nested(i, o)) continue;
      const auto& direct = c.maps().window_projection(c.grid(W[o].s, W[o].t), W[i].s, W[i].t);
      const auto& m = r.map(i, o);
      const auto diff = first_ae_difference(m, direct);
      check.expect(!diff, [&] {
        return window_name(ts, W[i]) + " <- " + window_name(ts, W[o]) + " differs at '" +
               m.domain().outcome(*diff) + "'";
      });
    }
  return report;
}

KimpaConstruction build_kimpa(const ProjectiveCpps& c, const RestrictionMaps& r) {
  const std::size_t n = c.base()->points();
  const auto G = c.grid(0, n - 1);
  auto& maps = c.maps();
  const auto whole = r.index_of({0, n - 1});
  KimpaConstruction k{G, maps.space(G), {}, r.space(whole), {}, ProbMorphism::identity(maps.space(G))};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      k.x_flat.push_back(maps.window_projection(G, s, t));
      k.t_prime.push_back(r.map(r.index_of({s, t}), whole));
    }
  // β(ω) is the grid point whose cells are the T'-images of ω on each cell.
  std::vector<std::size_t> radices;
  for (std::size_t j = 0; j + 1 < n; ++j) radices.push_back(c.base()->space(j, j + 1)->size());
  const MixedRadix layout(std::move(radices));
  std::vector<ProbMorphism::Index> table(k.window_limit->size());
  std::vector<std::size_t> digits(layout.digits());
  for (std::size_t w = 0; w < table.size(); ++w) {
    for (std::size_t j = 0; j + 1 < n; ++j) digits[j] = k.t_prime[interval_slot(n, j, j + 1)](w);
    table[w] = static_cast<ProbMorphism::Index>(layout.encode(digits));
  }
  k.beta = ProbMorphism(k.window_limit, k.global_limit, std::move(table));
  return k;
}

Report verify_kimpa(const ProjectiveCpps& c, const RestrictionMaps& r, const KimpaConstruction& k) {
  Report report("kimpa");
  const auto& ts = *c.times();
  const std::size_t n = ts.size();
  auto& maps = c.maps();
  const auto& omega = *k.global_limit;
  const auto& W = r.windows();

  auto& fact = report.add("global-factorization");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto& xf = k.x_flat[interval_slot(n, s, t)];
      for (const auto& I : enumerate_window(c.times(), s, t).elements) {
        const auto& TI = c.canonical(I);
        const auto XI = maps.X(I, k.grid);
        std::optional<std::size_t> bad;
        for (std::size_t w = 0; w < omega.size() && !bad; ++w) {
          if (omega.positive(w) && TI(xf(w)) != XI(w)) bad = w;
        }
        fact.expect(!bad, [&] { return "I=" + I.to_string() + " differs at '" + omega.outcome(*bad) + "'"; });
      }
    }

  auto& upper1 = report.add("restriction-upper-bound");
  for (std::size_t o = 0; o < W.size(); ++o)
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (W[i].degenerate() || W[o].degenerate() || !r.nested(i, o)) continue;
      const auto& R = r.map(i, o);
      const auto& xo = k.x_flat[interval_slot(n, W[o].s, W[o].t)];
      const auto& xi = k.x_flat[interval_slot(n, W[i].s, W[i].t)];
      std::optional<std::size_t> bad;
      for (std::size_t w = 0; w < omega.size() && !bad; ++w) {
        if (omega.positive(w) && R(xo(w)) != xi(w)) bad = w;
      }
      upper1.expect(!bad, [&] {
        return window_name(ts, W[i]) + " <- " + window_name(ts, W[o]) + " differs at '" + omega.outcome(*bad) +
               "'";
      });
    }

  auto& upper2 = report.add("window-upper-bound");
  const auto& lim = *k.window_limit;
  for (std::size_t o = 0; o < W.size(); ++o) {
    if (W[o].degenerate()) continue;
    const auto& to = k.t_prime[interval_slot(n, W[o].s, W[o].t)];
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (W[i].degenerate() || !r.nested(i, o)) continue;
      const auto& ti = k.t_prime[interval_slot(n, W[i].s, W[i].t)];
      for (const auto& J : enumerate_window(c.times(), W[o].s, W[o].t).elements) {
        const auto& TJ = c.canonical(J);
        for (const auto& I : subsets_in_window(J, W[i].s, W[i].t)) {
          const auto& TI = c.canonical(I);
          const auto XIJ = maps.X(I, J);
          std::optional<std::size_t> bad;
          for (std::size_t w = 0; w < lim.size() && !bad; ++w) {
            if (lim.positive(w) && TI(ti(w)) != XIJ(TJ(to(w)))) bad = w;
          }
          upper2.expect(!bad, [&] {
            return "I=" + I.to_string() + ", J=" + J.to_string() + " differ at '" + lim.outcome(*bad) + "'";
          });
        }
      }
    }
  }

  auto& bij = report.add("bijection");
  bij.expect(is_isomorphism(k.beta), [] { return std::string("beta is not a measure-preserving bijection"); });
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto slot = interval_slot(n, s, t);
      const auto diff = first_ae_difference(compose(k.x_flat[slot], k.beta), k.t_prime[slot]);
      bij.expect(!diff, [&] {
        return "X-flat" + pair_name(ts, s, t) + " after beta differs from T'" + pair_name(ts, s, t) + " at '" +
               lim.outcome(*diff) + "'";
      });
    }

  auto& simple = report.add("simply-maximal");
  for (const auto& I : enumerate_all(c.times()).elements) {
    simple.expect(is_surjective_on_support(maps.X(I, k.grid)),
                  [&] { return "projection onto " + I.to_string() + " misses part of the support"; });
  }
  return report;
}

Report verify_kimpa(const SystemPtr& sys) {
  const auto c = build_cpps(sys);
  const auto r = build_restrictions(c);
  const auto k = build_kimpa(c, r);
  return verify_kimpa(c, r, k);
}

}  // namespace convlim
