#pragma once

// Shared fixtures, a catalog of small semigroups, random system draws and
// brute-force oracles that do not go through the library's recursions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "convlim/convsys.hpp"
#include "convlim/description.hpp"
#include "convlim/finprob.hpp"
#include "convlim/order.hpp"

namespace testing_support {

using namespace convlim;

inline std::string data_path(const std::string& name) { return std::string(CONVLIM_TEST_DATA) + "/" + name; }

inline std::vector<std::string> labels_0_to(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

inline FiniteSemigroup cyclic(std::size_t n) {
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteSemigroup(labels_0_to(n), t);
}

inline Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

/// Z/2 with the uniform idempotent measure on {0,1,2,3}.
inline SystemPtr fixture_a() {
  return from_idempotent(cyclic(2), {q(1, 2), q(1, 2)}, make_time_set(labels_0_to(4)));
}

/// Z/3 with generator {0: 1/2, 1: 1/2} on {0,1,2}.
inline SystemPtr fixture_b() {
  return from_semigroup_generator(cyclic(3), {q(1, 2), q(1, 2), q(0)}, make_time_set(labels_0_to(3)), {0, 1, 2});
}

struct NamedSemigroup {
  std::string name;
  FiniteSemigroup sg;
};

/// Small semigroups with at most four elements.
inline std::vector<NamedSemigroup> semigroup_catalog() {
  std::vector<NamedSemigroup> out;
  auto table = [](std::size_t n, auto op) {
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a][b] = op(a, b);
    return t;
  };
  for (std::size_t n = 1; n <= 4; ++n) {
    out.push_back({"Z/" + std::to_string(n), cyclic(n)});
    out.push_back({"max" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [](auto a, auto b) { return std::max(a, b); }))});
    out.push_back({"min" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [](auto a, auto b) { return std::min(a, b); }))});
    out.push_back({"left-zero" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [](auto a, auto) { return a; }))});
    out.push_back({"right-zero" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [](auto, auto b) { return b; }))});
    out.push_back({"null" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [](auto, auto) { return std::size_t{0}; }))});
    out.push_back({"mul-mod" + std::to_string(n), FiniteSemigroup(labels_0_to(n), table(n, [n](auto a, auto b) { return a * b % n; }))});
    out.push_back({"trunc-add" + std::to_string(n),
                   FiniteSemigroup(labels_0_to(n), table(n, [n](auto a, auto b) { return std::min(a + b, n - 1); }))});
  }
  out.push_back({"klein", FiniteSemigroup(labels_0_to(4), table(4, [](auto a, auto b) { return a ^ b; }))});
  return out;
}

/// The same semigroup with its elements renamed by a random permutation.
inline FiniteSemigroup relabel(const FiniteSemigroup& sg, std::mt19937_64& rng) {
  const std::size_t n = sg.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  std::vector<std::string> names(n);
  for (std::size_t a = 0; a < n; ++a) {
    names[perm[a]] = "e" + sg.element(a);
    for (std::size_t b = 0; b < n; ++b) t[perm[a]][perm[b]] = perm[sg.op(a, b)];
  }
  return FiniteSemigroup(names, t);
}

inline std::vector<Rational> random_measure(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> w(0, 3);
  std::vector<long> raw(n);
  long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : raw) total += (x = w(rng));
  }
  std::vector<Rational> out;
  for (auto x : raw) out.push_back(q(x, total));
  return out;
}

struct Draw {
  std::string name;
  FiniteSemigroup sg;
  std::vector<Rational> nu;
  std::vector<long long> positions;
  SystemPtr sys;
};

/// A semigroup-generated system over at most `max_points` times.
inline Draw random_draw(std::mt19937_64& rng, std::size_t max_points = 6) {
  static const auto catalog = semigroup_catalog();
  const auto& pick = catalog[std::uniform_int_distribution<std::size_t>(0, catalog.size() - 1)(rng)];
  auto sg = relabel(pick.sg, rng);
  auto nu = random_measure(sg.size(), rng);
  const std::size_t points = std::uniform_int_distribution<std::size_t>(2, max_points)(rng);
  std::vector<long long> pos{0};
  std::vector<std::string> labels{"t0"};
  for (std::size_t i = 1; i < points; ++i) {
    pos.push_back(pos.back() + std::uniform_int_distribution<long long>(1, 2)(rng));
    labels.push_back("t" + std::to_string(i));
  }
  auto sys = from_semigroup_generator(sg, nu, make_time_set(labels), pos);
  return {pick.name, std::move(sg), std::move(nu), std::move(pos), std::move(sys)};
}

/// Measures on a semigroup keyed by element label, computed by enumerating pairs.
inline std::map<std::string, Rational> convolve_oracle(const FiniteSemigroup& sg, const std::vector<Rational>& a,
                                                       const std::vector<Rational>& b) {
  std::map<std::string, Rational> out;
  for (std::size_t x = 0; x < sg.size(); ++x) out[sg.element(x)] = 0;
  for (std::size_t x = 0; x < sg.size(); ++x)
    for (std::size_t y = 0; y < sg.size(); ++y) out[sg.element(sg.op(x, y))] += a[x] * b[y];
  return out;
}

/// Radices of the cells of a partition.
inline std::vector<std::size_t> cell_sizes(const ConvolutionSystem& sys, const Partition& p) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < p.cells(); ++k) out.push_back(sys.space(p[k], p[k + 1])->size());
  return out;
}

/// Folds cells [lo, hi) of a tuple over J from the left with the system's multiplications.
inline std::size_t left_fold(const ConvolutionSystem& sys, const Partition& J, const std::vector<std::size_t>& digits,
                             std::size_t lo, std::size_t hi) {
  std::size_t acc = digits[lo];
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const std::size_t width = sys.space(J[k], J[k + 1])->size();
    acc = sys.mult(J[lo], J[k], J[k + 1])(acc * width + digits[k]);
  }
  return acc;
}

/// Folds from the right; agrees with left_fold a.e. iff associativity holds.
inline std::size_t right_fold(const ConvolutionSystem& sys, const Partition& J, const std::vector<std::size_t>& digits,
                              std::size_t lo, std::size_t hi) {
  std::size_t acc = digits[hi - 1];
  for (std::size_t k = hi - 1; k-- > lo;) {
    const std::size_t width = sys.space(J[k + 1], J[hi])->size();
    acc = sys.mult(J[k], J[k + 1], J[hi])(digits[k] * width + acc);
  }
  return acc;
}

/// X_{I,J}(ω) evaluated cell by cell: each cell of I is the left fold of the
/// J-cells it covers. Works for I ⊆ J in K (including T_{I,J}).
inline std::vector<std::size_t> x_oracle(const ConvolutionSystem& sys, const Partition& I, const Partition& J,
                                         bool right = false) {
  const MixedRadix in(cell_sizes(sys, J));
  const MixedRadix out(cell_sizes(sys, I));
  std::vector<std::size_t> table(in.total());
  std::vector<std::size_t> digits(in.digits());
  std::vector<std::size_t> image(out.digits());
  auto pos = [&](std::size_t point) {
    return static_cast<std::size_t>(std::find(J.points().begin(), J.points().end(), point) - J.points().begin());
  };
  for (std::size_t w = 0; w < in.total(); ++w) {
    in.decode(w, digits);
    for (std::size_t k = 0; k < I.cells(); ++k) {
      const auto lo = pos(I[k]);
      const auto hi = pos(I[k + 1]);
      image[k] = right ? right_fold(sys, J, digits, lo, hi) : left_fold(sys, J, digits, lo, hi);
    }
    table[w] = out.encode(image);
  }
  return table;
}

/// Weights of Ω_J computed factor by factor for every tuple.
inline std::vector<Rational> product_weights_oracle(const ConvolutionSystem& sys, const Partition& J) {
  const MixedRadix in(cell_sizes(sys, J));
  std::vector<Rational> out(in.total());
  for (std::size_t w = 0; w < in.total(); ++w) {
    Rational p = 1;
    for (std::size_t k = 0; k < J.cells(); ++k) p *= sys.space(J[k], J[k + 1])->weight(in.digit(w, k));
    out[w] = p;
  }
  return out;
}

/// First positive-weight index where a morphism table and an oracle table disagree.
inline std::optional<std::size_t> ae_mismatch(const ProbMorphism& m, const std::vector<std::size_t>& oracle) {
  if (oracle.size() != m.domain().size()) return 0;
  for (std::size_t w = 0; w < oracle.size(); ++w) {
    if (m.domain().positive(w) && m(w) != oracle[w]) return w;
  }
  return std::nullopt;
}

/// A first positive-weight x and a different codomain value, so that a
/// one-entry corruption changes the map on the support.
inline std::pair<std::size_t, ProbMorphism::Index> corrupt_entry(const ProbMorphism& m) {
  for (std::size_t x = 0; x < m.domain().size(); ++x) {
    if (!m.domain().positive(x)) continue;
    if (m.codomain().size() < 2) continue;
    return {x, static_cast<ProbMorphism::Index>((m(x) + 1) % m.codomain().size())};
  }
  throw std::logic_error("no corruptible entry");
}

inline ProbMorphism corrupted(const ProbMorphism& m) {
  const auto [x, y] = corrupt_entry(m);
  return m.with_entry(x, y);
}

}  // namespace testing_support

namespace testing_support {

inline const convlim::Check* find_check(const convlim::Report& r, const std::string& name) {
  for (const auto& c : r.checks())
    if (c.name == name) return &c;
  return nullptr;
}

/// Whether the named check exists and failed with a witness.
inline bool failed_with_witness(const convlim::Report& r, const std::string& name) {
  const auto* c = find_check(r, name);
  return c != nullptr && !c->passed() && !c->witness.empty();
}

}  // namespace testing_support
