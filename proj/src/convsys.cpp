#include "convlim/convsys.hpp"

#include <sstream>
#include <stdexcept>

namespace convlim {

namespace {

std::string triple_name(const TimeSet& ts, std::initializer_list<std::size_t> idx) {
  std::string out = "(";
  bool first = true;
  for (auto i : idx) {
    if (!first) out += ",";
    out += ts.label(i);
    first = false;
  }
  return out + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvolutionSystem

ConvolutionSystem::ConvolutionSystem(TimeSetPtr times) : times_(std::move(times)) {
  const std::size_t n = times_->size();
  spaces_.resize(n * n);
  pair_spaces_.resize(n * n * n);
  mults_.resize(n * n * n);
}

std::size_t ConvolutionSystem::pair_index(std::size_t s, std::size_t t) const {
  const std::size_t n = points();
  if (!(s < t) || t >= n) throw std::out_of_range("interval index out of range");
  return s * n + t;
}

std::size_t ConvolutionSystem::triple_index(std::size_t r, std::size_t s, std::size_t t) const {
  const std::size_t n = points();
  if (!(r < s && s < t) || t >= n) throw std::out_of_range("triple index out of range");
  return (r * n + s) * n + t;
}

const SpacePtr& ConvolutionSystem::space(std::size_t s, std::size_t t) const {
  return spaces_[pair_index(s, t)];
}

const SpacePtr& ConvolutionSystem::pair_space(std::size_t r, std::size_t s, std::size_t t) const {
  return pair_spaces_[triple_index(r, s, t)];
}

const ProbMorphism& ConvolutionSystem::mult(std::size_t r, std::size_t s, std::size_t t) const {
  return *mults_[triple_index(r, s, t)];
}

ConvolutionSystem ConvolutionSystem::with_mult(std::size_t r, std::size_t s, std::size_t t,
                                               std::vector<ProbMorphism::Index> table) const {
  ConvolutionSystem copy = *this;
  const auto k = triple_index(r, s, t);
  copy.mults_[k] = ProbMorphism(pair_spaces_[k], space(r, t), std::move(table));
  return copy;
}

bool ConvolutionSystem::is_cpps() const {
  const std::size_t n = points();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t)
        if (!is_isomorphism(mult(r, s, t))) return false;
  return true;
}

SystemBuilder::SystemBuilder(TimeSetPtr times) : sys_(std::move(times)) {}

SystemBuilder& SystemBuilder::space(std::size_t s, std::size_t t, SpacePtr space) {
  sys_.spaces_[sys_.pair_index(s, t)] = std::move(space);
  return *this;
}

SystemBuilder& SystemBuilder::mult(std::size_t r, std::size_t s, std::size_t t,
                                   std::vector<ProbMorphism::Index> table) {
  const auto& a = sys_.spaces_[sys_.pair_index(r, s)];
  const auto& b = sys_.spaces_[sys_.pair_index(s, t)];
  const auto& c = sys_.spaces_[sys_.pair_index(r, t)];
  if (!a || !b || !c) {
    throw std::invalid_argument("mult" + triple_name(*sys_.times_, {r, s, t}) +
                                " set before its spaces");
  }
  const auto k = sys_.triple_index(r, s, t);
  sys_.pair_spaces_[k] = product({a, b});
  sys_.mults_[k] = ProbMorphism(sys_.pair_spaces_[k], c, std::move(table));
  return *this;
}

SystemPtr SystemBuilder::build() const {
  const std::size_t n = sys_.points();
  const auto& ts = *sys_.times_;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t)
      if (!sys_.spaces_[sys_.pair_index(s, t)]) {
        throw std::invalid_argument("missing space for interval " + triple_name(ts, {s, t}));
      }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto k = sys_.triple_index(r, s, t);
        if (!sys_.mults_[k]) {
          throw std::invalid_argument("missing multiplication for " + triple_name(ts, {r, s, t}));
        }
        // A space may have been replaced after the table was set.
        if (sys_.mults_[k]->domain_ptr()->size() !=
                sys_.spaces_[sys_.pair_index(r, s)]->size() *
                    sys_.spaces_[sys_.pair_index(s, t)]->size() ||
            sys_.mults_[k]->codomain_ptr() != sys_.spaces_[sys_.pair_index(r, t)]) {
          throw std::invalid_argument("stale multiplication for " + triple_name(ts, {r, s, t}));
        }
      }
  return std::make_shared<const ConvolutionSystem>(sys_);
}

Report check_system(const ConvolutionSystem& sys) {
  Report report("axioms");
  const auto& ts = *sys.times();
  const std::size_t n = sys.points();

  auto& mp = report.add("multiplication-measure-preserving");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& m = sys.mult(r, s, t);
        mp.expect(is_measure_preserving(m), [&] {
          const auto pushed = pushforward(m);
          for (std::size_t y = 0; y < pushed.size(); ++y) {
            if (pushed[y] != m.codomain().weight(y)) {
              return "T" + triple_name(ts, {r, s, t}) + " pushes mass " + to_string(pushed[y]) +
                     " onto '" + m.codomain().outcome(y) + "' which has weight " +
                     to_string(m.codomain().weight(y));
            }
          }
          return "T" + triple_name(ts, {r, s, t}) + " is not measure-preserving";
        });
      }

  auto& assoc = report.add("associativity");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t)
        for (std::size_t u = t + 1; u < n; ++u) {
          const auto& a = *sys.space(r, s);
          const auto& b = *sys.space(s, t);
          const auto& c = *sys.space(t, u);
          const auto& rst = sys.mult(r, s, t);
          const auto& rtu = sys.mult(r, t, u);
          const auto& stu = sys.mult(s, t, u);
          const auto& rsu = sys.mult(r, s, u);
          const std::size_t tu_size = sys.space(t, u)->size();
          const std::size_t su_size = sys.space(s, u)->size();
          std::optional<std::string> bad;
          for (std::size_t x = 0; x < a.size() && !bad; ++x) {
            if (!a.positive(x)) continue;
            for (std::size_t y = 0; y < b.size() && !bad; ++y) {
              if (!b.positive(y)) continue;
              for (std::size_t z = 0; z < c.size() && !bad; ++z) {
                if (!c.positive(z)) continue;
                const auto left = rtu(rst(x * b.size() + y) * tu_size + z);
                const auto right = rsu(x * su_size + stu(y * c.size() + z));
                if (left != right) {
                  bad = "quadruple " + triple_name(ts, {r, s, t, u}) + " at (" + a.outcome(x) +
                        "," + b.outcome(y) + "," + c.outcome(z) + "): T(T(x,y),z)='" +
                        rtu.codomain().outcome(left) + "' but T(x,T(y,z))='" +
                        rsu.codomain().outcome(right) + "'";
                }
              }
            }
          }
          assoc.expect(!bad, [&] { return *bad; });
        }
  return report;
}

// ---------------------------------------------------------------------------
// Semigroups

FiniteSemigroup::FiniteSemigroup(std::vector<std::string> elements,
                                 std::vector<std::vector<std::size_t>> table)
    : elements_(std::move(elements)), table_(std::move(table)) {
  const std::size_t n = elements_.size();
  if (n == 0) throw std::invalid_argument("semigroup without elements");
  if (table_.size() != n) throw std::invalid_argument("semigroup table has wrong row count");
  for (const auto& row : table_) {
    if (row.size() != n) throw std::invalid_argument("semigroup table has wrong column count");
    for (auto v : row) {
      if (v >= n) throw std::invalid_argument("semigroup table entry out of range");
    }
  }
  if (auto bad = associativity_violation(table_)) {
    const auto [a, b, c] = *bad;
    throw std::invalid_argument("semigroup table is not associative at (" + elements_[a] + "," +
                                elements_[b] + "," + elements_[c] + ")");
  }
}

std::optional<std::array<std::size_t, 3>> FiniteSemigroup::associativity_violation(
    const std::vector<std::vector<std::size_t>>& table) {
  const std::size_t n = table.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]]) return std::array{a, b, c};
  return std::nullopt;
}

std::vector<Rational> convolve(const FiniteSemigroup& sg, const std::vector<Rational>& mu,
                               const std::vector<Rational>& nu) {
  if (mu.size() != sg.size() || nu.size() != sg.size()) {
    throw std::invalid_argument("convolve: weight vector size does not match the semigroup");
  }
  std::vector<Rational> out(sg.size());
  for (std::size_t a = 0; a < sg.size(); ++a) {
    if (sgn(mu[a]) == 0) continue;
    for (std::size_t b = 0; b < sg.size(); ++b) out[sg.op(a, b)] += mu[a] * nu[b];
  }
  return out;
}

std::vector<Rational> convolution_power(const FiniteSemigroup& sg, const std::vector<Rational>& nu,
                                        std::size_t k) {
  if (k == 0) throw std::invalid_argument("convolution_power: exponent must be positive");
  std::vector<Rational> out = nu;
  for (std::size_t i = 1; i < k; ++i) out = convolve(sg, out, nu);
  return out;
}

SpacePtr semigroup_space(const FiniteSemigroup& sg, std::vector<Rational> weights) {
  return make_space(sg.elements(), std::move(weights));
}

SystemPtr from_semigroup_measures(const FiniteSemigroup& sg, const TimeSetPtr& times,
                                  const std::vector<std::vector<Rational>>& measure_of_interval) {
  const std::size_t n = times->size();
  if (measure_of_interval.size() != interval_count(n)) {
    throw std::invalid_argument("one measure per interval is required");
  }
  SystemBuilder b(times);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t)
      b.space(s, t, semigroup_space(sg, measure_of_interval[interval_slot(n, s, t)]));
  const std::size_t m = sg.size();
  std::vector<ProbMorphism::Index> table(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t c = 0; c < m; ++c) table[a * m + c] = static_cast<ProbMorphism::Index>(sg.op(a, c));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) b.mult(r, s, t, table);
  return b.build();
}

SystemPtr from_idempotent(const FiniteSemigroup& sg, const std::vector<Rational>& mu,
                          const TimeSetPtr& times) {
  const auto square = convolve(sg, mu, mu);
  for (std::size_t a = 0; a < sg.size(); ++a) {
    if (square[a] != mu[a]) {
      throw std::invalid_argument("measure is not idempotent: (mu*mu)(" + sg.element(a) +
                                  ") = " + to_string(square[a]) + " but mu(" + sg.element(a) +
                                  ") = " + to_string(mu[a]));
    }
  }
  const std::size_t n = times->size();
  return from_semigroup_measures(sg, times, std::vector<std::vector<Rational>>(interval_count(n), mu));
}

SystemPtr from_semigroup_generator(const FiniteSemigroup& sg, const std::vector<Rational>& nu,
                                   const TimeSetPtr& times, const std::vector<long long>& positions) {
  const std::size_t n = times->size();
  if (positions.size() != n) throw std::invalid_argument("one position per time label is required");
  for (std::size_t k = 1; k < n; ++k) {
    if (positions[k - 1] >= positions[k]) {
      throw std::invalid_argument("time positions must be strictly increasing");
    }
  }
  // Powers are shared across intervals of equal length.
  const auto span = static_cast<std::size_t>(positions.back() - positions.front());
  std::vector<std::vector<Rational>> powers{nu};
  for (std::size_t k = 2; k <= span; ++k) powers.push_back(convolve(sg, powers.back(), nu));
  std::vector<std::vector<Rational>> measures(interval_count(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t)
      measures[interval_slot(n, s, t)] =
          powers[static_cast<std::size_t>(positions[t] - positions[s]) - 1];
  return from_semigroup_measures(sg, times, measures);
}

// ---------------------------------------------------------------------------
// System morphisms

std::size_t interval_count(std::size_t points) { return points * (points - 1) / 2; }

std::size_t interval_slot(std::size_t points, std::size_t s, std::size_t t) {
  if (!(s < t) || t >= points) throw std::out_of_range("interval out of range");
  return s * points - s * (s + 1) / 2 + (t - s - 1);
}

SystemMorphism::SystemMorphism(SystemPtr source, SystemPtr target,
                               std::vector<ProbMorphism> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (!(*source_->times() == *target_->times())) {
    throw std::invalid_argument("system morphism between different time sets");
  }
  const std::size_t n = source_->points();
  if (components_.size() != interval_count(n)) {
    throw std::invalid_argument("system morphism needs one component per interval");
  }
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto& c = components_[interval_slot(n, s, t)];
      if (c.domain().size() != source_->space(s, t)->size() ||
          c.codomain().size() != target_->space(s, t)->size()) {
        throw std::invalid_argument("system morphism component has the wrong spaces");
      }
    }
}

SystemMorphism SystemMorphism::identity(const SystemPtr& sys) {
  const std::size_t n = sys->points();
  std::vector<ProbMorphism> comps;
  comps.reserve(interval_count(n));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) comps.push_back(ProbMorphism::identity(sys->space(s, t)));
  return SystemMorphism(sys, sys, std::move(comps));
}

std::size_t SystemMorphism::slot(std::size_t s, std::size_t t) const {
  return interval_slot(source_->points(), s, t);
}

const ProbMorphism& SystemMorphism::component(std::size_t s, std::size_t t) const {
  return components_[slot(s, t)];
}

SystemMorphism SystemMorphism::with_component(std::size_t s, std::size_t t,
                                              ProbMorphism theta) const {
  auto comps = components_;
  comps[slot(s, t)] = std::move(theta);
  return SystemMorphism(source_, target_, std::move(comps));
}

SystemMorphism compose(const SystemMorphism& outer, const SystemMorphism& inner) {
  std::vector<ProbMorphism> comps;
  comps.reserve(inner.components().size());
  for (std::size_t k = 0; k < inner.components().size(); ++k) {
    comps.push_back(compose(outer.components()[k], inner.components()[k]));
  }
  return SystemMorphism(inner.source(), outer.target(), std::move(comps));
}

Report check_system_morphism(const SystemMorphism& m) {
  Report report("system-morphism");
  const auto& src = *m.source();
  const auto& dst = *m.target();
  const auto& ts = *src.times();
  const std::size_t n = src.points();

  auto& mp = report.add("components-measure-preserving");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      mp.expect(is_measure_preserving(m.component(s, t)),
                [&] { return "theta" + triple_name(ts, {s, t}) + " is not measure-preserving"; });
    }

  auto& sq = report.add("multiplicative-square");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& theta_rt = m.component(r, t);
        const auto& theta_rs = m.component(r, s);
        const auto& theta_st = m.component(s, t);
        const auto& T = src.mult(r, s, t);
        const auto& Tp = dst.mult(r, s, t);
        const auto& dom = T.domain();
        const std::size_t b = src.space(s, t)->size();
        const std::size_t bp = dst.space(s, t)->size();
        std::optional<std::string> bad;
        for (std::size_t xy = 0; xy < dom.size() && !bad; ++xy) {
          if (!dom.positive(xy)) continue;
          const auto left = theta_rt(T(xy));
          const auto right = Tp(theta_rs(xy / b) * bp + theta_st(xy % b));
          if (left != right) {
            bad = "triple " + triple_name(ts, {r, s, t}) + " at " + dom.outcome(xy) +
                  ": theta(T(x,y))='" + dst.space(r, t)->outcome(left) +
                  "' but T'(theta x, theta y)='" + dst.space(r, t)->outcome(right) + "'";
          }
        }
        sq.expect(!bad, [&] { return *bad; });
      }
  return report;
}

// ---------------------------------------------------------------------------
// Flow systems

const ProbMorphism& FlowSystem::X(std::size_t s, std::size_t t) const {
  return increments.at(interval_slot(system->points(), s, t));
}

Report check_flow(const FlowSystem& flow) {
  Report report("flow");
  const auto& sys = *flow.system;
  const auto& ts = *sys.times();
  const std::size_t n = sys.points();
  const auto& base = *flow.base;

  auto& laws = report.add("increment-laws");
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      const auto& x = flow.X(s, t);
      const bool ok = same_space(x.domain(), base) && x.codomain().size() == sys.space(s, t)->size() &&
                      is_measure_preserving(x.table(), base, *sys.space(s, t));
      laws.expect(ok, [&] {
        return "law of X" + triple_name(ts, {s, t}) + " differs from mu" + triple_name(ts, {s, t});
      });
    }

  auto& gen = report.add("generates-sigma-field");
  {
    const auto part = atoms(base, flow.increments);
    gen.expect(separates_support(base, part), [&] {
      for (const auto& block : part.blocks) {
        std::vector<std::size_t> pos;
        for (auto x : block)
          if (base.positive(x)) pos.push_back(x);
        if (pos.size() > 1) {
          return "atom containing '" + base.outcome(pos[0]) + "' and '" + base.outcome(pos[1]) +
                 "' is not separated by any X";
        }
      }
      return std::string("atoms are not singletons on the support");
    });
  }

  auto& indep = report.add("independent-increments");
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> chain;
    for (std::size_t k = 0; k < n; ++k)
      if (mask >> k & 1) chain.push_back(k);
    if (chain.size() < 3) continue;
    std::vector<ProbMorphism> incs;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) incs.push_back(flow.X(chain[k], chain[k + 1]));
    const auto violation = independence_violation(incs);
    indep.expect(!violation, [&] {
      std::string out = "chain {";
      for (std::size_t k = 0; k < chain.size(); ++k) out += (k ? "," : "") + ts.label(chain[k]);
      out += "}: joint law differs from the product of marginals at (";
      for (std::size_t k = 0; k < violation->size(); ++k) {
        out += (k ? "," : "") + incs[k].codomain().outcome((*violation)[k]);
      }
      return out + ")";
    });
  }

  auto& comp = report.add("composition");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r + 1; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) {
        const auto& xrt = flow.X(r, t);
        const auto& xrs = flow.X(r, s);
        const auto& xst = flow.X(s, t);
        const auto& T = sys.mult(r, s, t);
        const std::size_t b = sys.space(s, t)->size();
        std::optional<std::size_t> bad;
        for (std::size_t w = 0; w < base.size() && !bad; ++w) {
          if (base.positive(w) && xrt(w) != T(xrs(w) * b + xst(w))) bad = w;
        }
        comp.expect(!bad, [&] {
          return "triple " + triple_name(ts, {r, s, t}) + " at omega='" + base.outcome(*bad) +
                 "': X_rt='" + sys.space(r, t)->outcome(xrt(*bad)) + "' but T(X_rs,X_st)='" +
                 sys.space(r, t)->outcome(T(xrs(*bad) * b + xst(*bad))) + "'";
        });
      }
  return report;
}

}  // namespace convlim
