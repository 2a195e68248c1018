#include "convlim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "convlim/cpps.hpp"
#include "convlim/l2.hpp"
#include "convlim/parallel.hpp"
#include "convlim/projective.hpp"

namespace convlim {

using nlohmann::json;

namespace {

Report suite_axioms(const SystemDescription&, const SystemPtr& sys) {
  Report r("axioms");
  r.absorb(check_system(*sys));
  return r;
}

Report suite_partitions(const SystemDescription&, const SystemPtr& sys) {
  Report r("partitions");
  ConnectingMaps maps(sys);
  const auto& ts = *sys->times();
  for (std::size_t s = 0; s < ts.size(); ++s)
    for (std::size_t t = s + 1; t < ts.size(); ++t) {
      r.absorb(verify_projective(ConnectingFamily::interval(maps, s, t)),
               "(" + ts.label(s) + "," + ts.label(t) + ") ");
    }
  return r;
}

Report suite_global(const SystemDescription&, const SystemPtr& sys) {
  Report r("global");
  ConnectingMaps maps(sys);
  r.absorb(verify_projective(ConnectingFamily::global(maps)));
  r.absorb(verify_window_commutation(maps));
  return r;
}

Report suite_cpps(const SystemDescription&, const SystemPtr& sys) {
  Report r("cpps");
  r.absorb(verify_cpps(assemble_cpps(sys)));
  return r;
}

Report suite_tau(const SystemDescription&, const SystemPtr& sys) {
  Report r("tau");
  r.absorb(check_tau(assemble_cpps(sys).tau()));
  return r;
}

std::vector<SystemMorphism> semigroup_automorphisms(const SystemDescription& d, const SystemPtr& sys,
                                                    std::size_t limit) {
  std::vector<SystemMorphism> out;
  if (d.mode != DescriptionMode::semigroup || d.elements.size() > 7) return out;
  const std::size_t m = d.elements.size();
  std::vector<std::size_t> idx(m);
  std::vector<std::vector<std::size_t>> op(m, std::vector<std::size_t>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      op[a][b] = static_cast<std::size_t>(std::find(d.elements.begin(), d.elements.end(), d.table[a][b]) -
                                          d.elements.begin());
  std::vector<std::size_t> phi(m);
  std::iota(phi.begin(), phi.end(), 0);
  const std::size_t n = sys->points();
  while (std::next_permutation(phi.begin(), phi.end()) && out.size() < limit) {
    bool ok = true;
    for (std::size_t a = 0; a < m && ok; ++a)
      for (std::size_t b = 0; b < m && ok; ++b) ok = phi[op[a][b]] == op[phi[a]][phi[b]];
    for (std::size_t s = 0; s < n && ok; ++s)
      for (std::size_t t = s + 1; t < n && ok; ++t) {
        const auto& sp = *sys->space(s, t);
        for (std::size_t x = 0; x < m && ok; ++x) ok = sp.weight(phi[x]) == sp.weight(x);
      }
    if (!ok) continue;
    std::vector<ProbMorphism::Index> table(phi.begin(), phi.end());
    std::vector<ProbMorphism> comps;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = s + 1; t < n; ++t) comps.emplace_back(sys->space(s, t), sys->space(s, t), table);
    out.emplace_back(sys, sys, std::move(comps));
  }
  return out;
}

Report suite_lift(const SystemDescription& d, const SystemPtr& sys) {
  Report r("lift");
  const auto c = build_cpps(sys);
  const auto id = SystemMorphism::identity(sys);
  r.absorb(verify_lift(id, lift_isomorphism(id, c, c), c, c), "identity ");
  const auto autos = semigroup_automorphisms(d, sys, 6);
  for (std::size_t k = 0; k < autos.size(); ++k) {
    std::string name = "automorphism[";
    for (std::size_t x = 0; x < d.elements.size(); ++x) {
      name += (x ? "," : "") + d.elements[x] + "->" + d.elements[autos[k].component(0, 1)(x)];
    }
    r.absorb(verify_lift(autos[k], lift_isomorphism(autos[k], c, c), c, c), name + "] ");
  }
  return r;
}

Report suite_flow(const SystemDescription&, const SystemPtr& sys) {
  Report r("flow");
  r.absorb(check_flow(build_flow(sys)));
  return r;
}

Report suite_ll1(const SystemDescription&, const SystemPtr& sys) {
  Report r("ll1");
  const auto c = assemble_cpps(sys);
  r.absorb(verify_ll1(c, build_restrictions(c)));
  return r;
}

Report suite_projint(const SystemDescription&, const SystemPtr& sys) {
  Report r("projint");
  const auto c = assemble_cpps(sys);
  const auto maps = build_restrictions(c);
  r.absorb(verify_projint(maps));
  r.absorb(check_restriction_windows(c, maps));
  return r;
}

Report suite_kimpa(const SystemDescription&, const SystemPtr& sys) {
  Report r("kimpa");
  r.absorb(verify_kimpa(sys));
  return r;
}

Report suite_l2(const SystemDescription&, const SystemPtr& sys) {
  Report r("l2");
  const auto h = l2_of_system(*sys);
  r.absorb(verify_subproduct(h));
  auto& iff = r.add("unitary-iff-isomorphism");
  const auto& ts = *sys->times();
  const std::size_t n = sys->points();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const bool u = is_unitary(h.U(a, b, c));
        const bool iso = is_isomorphism(sys->mult(a, b, c));
        iff.expect(u == iso, [&] {
          return "U(" + ts.label(a) + "," + ts.label(b) + "," + ts.label(c) + ") unitary=" + (u ? "yes" : "no") +
                 " but multiplication isomorphism=" + (iso ? "yes" : "no");
        });
      }
  const auto flat = l2_of_system(*assemble_cpps(sys).flat());
  r.absorb(verify_subproduct(flat), "flat ");
  auto unit = unitarity(flat);
  unit.name = "flat unitary";
  r.add(std::move(unit));
  return r;
}

Report suite_ps(const SystemDescription&, const SystemPtr& sys) {
  Report r("ps");
  const auto c = assemble_cpps(sys);
  const auto ps = build_ps_isomorphism(c);
  r.absorb(verify_product_system_H(ps.h));
  r.absorb(verify_ps(c, ps));
  return r;
}

Report suite_tower(const SystemDescription& d, const SystemPtr&) {
  Report r("tower");
  r.absorb(tower_consistency(build_tower(d)));
  return r;
}

using SuiteFn = Report (*)(const SystemDescription&, const SystemPtr&);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> all = {
      {"axioms", suite_axioms}, {"partitions", suite_partitions}, {"global", suite_global}, {"cpps", suite_cpps},
      {"tau", suite_tau},       {"lift", suite_lift},             {"flow", suite_flow},     {"ll1", suite_ll1},
      {"projint", suite_projint}, {"kimpa", suite_kimpa},         {"l2", suite_l2},         {"ps", suite_ps},
      {"tower", suite_tower}};
  return all;
}

Report run_one(const SystemDescription& d, const SystemPtr& sys, const std::string& name, SuiteFn fn) {
  const auto start = std::chrono::steady_clock::now();
  Report r(name);
  try {
    r = fn(d, sys);
  } catch (const std::exception& e) {
    r = Report(name);
    r.add("error").fail(e.what());
  }
  r.set_elapsed_ms(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  return r;
}

json matrix_json(const Operator& op) {
  json rows = json::array();
  for (std::size_t i = 0; i < op.matrix.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < op.matrix.cols(); ++j) row.push_back(to_string(op.matrix.get(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", op.matrix.rows()},
          {"cols", op.matrix.cols()},
          {"row_labels", op.codomain.base()->outcomes()},
          {"col_labels", op.domain.base()->outcomes()},
          {"matrix", std::move(rows)}};
}

json space_json(const FinProbSpace& sp) {
  json w = json::array();
  for (const auto& x : sp.weights()) w.push_back(to_string(x));
  return {{"outcomes", sp.outcomes()}, {"weights", w}};
}

std::size_t time_index(const SystemPtr& sys, const std::string& label) {
  if (!sys->times()->contains(label)) throw std::invalid_argument("unknown time label '" + label + "'");
  return sys->times()->index_of(label);
}

std::uint64_t threshold(const Rational& cdf) {
  if (cdf >= 1) return UINT64_MAX;
  mpz_class scaled = cdf.get_num();
  scaled <<= 64;
  scaled /= cdf.get_den();
  return static_cast<std::uint64_t>(scaled.get_ui());
}

struct CellSampler {
  std::vector<std::uint64_t> thresholds;
  std::size_t fallback = 0;  // last positive outcome

  explicit CellSampler(const FinProbSpace& sp) {
    Rational cdf = 0;
    for (std::size_t k = 0; k < sp.size(); ++k) {
      cdf += sp.weight(k);
      thresholds.push_back(threshold(cdf));
      if (sp.positive(k)) fallback = k;
    }
  }

  std::size_t draw(std::uint64_t u) const {
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (u < thresholds[k]) return k;
    }
    return fallback;
  }
};

SystemPtr load_system(const std::filesystem::path& file, SystemDescription* desc = nullptr) {
  auto d = load_description(file);
  auto sys = build_system(d);
  if (desc) *desc = std::move(d);
  return sys;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : suites()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<Report> run_suite(const SystemDescription& desc, const std::string& suite) {
  std::vector<std::pair<std::string, SuiteFn>> chosen;
  for (const auto& entry : suites()) {
    if (suite == entry.first || (suite == "all" && (entry.first != "tower" || desc.tower))) chosen.push_back(entry);
  }
  if (chosen.empty()) throw std::invalid_argument("unknown suite '" + suite + "'");
  const auto sys = build_system(desc);
  return detail::parallel_map<Report>(chosen.size(), [&](std::size_t i) {
    return run_one(desc, sys, chosen[i].first, chosen[i].second);
  });
}

json reports_json(const std::vector<Report>& reports) {
  json suites_out = json::array();
  bool all = true;
  for (const auto& r : reports) {
    // Keyed by name so the document does not depend on check assembly order.
    std::vector<const Check*> sorted;
    for (const auto& c : r.checks()) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Check* a, const Check* b) { return a->name < b->name; });
    json checks = json::array();
    for (const auto* c : sorted) {
      json jc = {{"name", c->name}, {"cases", c->cases}, {"failures", c->failures}, {"passed", c->passed()}};
      if (!c->passed()) jc["witness"] = c->witness;
      checks.push_back(std::move(jc));
    }
    suites_out.push_back({{"suite", r.suite()}, {"passed", r.passed()}, {"checks", std::move(checks)}});
    all = all && r.passed();
  }
  return {{"passed", all}, {"suites", std::move(suites_out)}};
}

int cmd_verify(const std::filesystem::path& file, const std::string& suite,
               const std::optional<std::filesystem::path>& json_out, std::ostream& out, std::ostream& err) {
  std::vector<Report> reports;
  try {
    reports = run_suite(load_description(file), suite);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  bool ok = true;
  for (const auto& r : reports) {
    out << r.summary() << "  time " << std::fixed << std::setprecision(1) << r.elapsed_ms() << " ms\n"
        << std::defaultfloat;
    ok = ok && r.passed();
  }
  out << (ok ? "all suites passed" : "FAILED") << "\n";
  if (json_out) {
    std::ofstream f(*json_out);
    if (!f) {
      err << "error: cannot write " << json_out->string() << "\n";
      return 2;
    }
    f << reports_json(reports).dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

json export_koopman(const SystemPtr& sys, std::size_t r, std::size_t s, std::size_t t) {
  if (!(r < s && s < t && t < sys->points())) throw std::invalid_argument("koopman: r < s < t is required");
  const auto h = l2_of_system(*sys);
  const auto& ts = *sys->times();
  auto j = matrix_json(h.U(r, s, t));
  j["what"] = "koopman";
  j["triple"] = {ts.label(r), ts.label(s), ts.label(t)};
  return j;
}

json export_theta(const SystemPtr& sys, std::size_t s, std::size_t t) {
  if (!(s < t && t < sys->points())) throw std::invalid_argument("theta: s < t is required");
  const auto c = build_cpps(sys);
  const auto ps = build_ps_isomorphism(c);
  const auto& ts = *sys->times();
  auto j = matrix_json(ps.theta[interval_slot(sys->points(), s, t)]);
  j["what"] = "theta";
  j["window"] = {ts.label(s), ts.label(t)};
  return j;
}

json export_cpps_spaces(const SystemPtr& sys) {
  const auto c = build_cpps(sys);
  const auto& ts = *sys->times();
  json spaces = json::array();
  for (std::size_t s = 0; s < ts.size(); ++s)
    for (std::size_t t = s + 1; t < ts.size(); ++t) {
      auto j = space_json(*c.flat_space(s, t));
      j["from"] = ts.label(s);
      j["to"] = ts.label(t);
      spaces.push_back(std::move(j));
    }
  return {{"what", "cpps-spaces"}, {"spaces", std::move(spaces)}};
}

json export_flow_laws(const SystemPtr& sys) {
  const auto flow = build_flow(sys);
  const auto& ts = *sys->times();
  json laws = json::array();
  for (std::size_t s = 0; s < ts.size(); ++s)
    for (std::size_t t = s + 1; t < ts.size(); ++t) {
      const auto& x = flow.X(s, t);
      const auto law = pushforward(x);
      json table = json::array();
      for (std::size_t k = 0; k < law.size(); ++k) table.push_back({x.codomain().outcome(k), to_string(law[k])});
      laws.push_back({{"from", ts.label(s)}, {"to", ts.label(t)}, {"law", std::move(table)}});
    }
  return {{"what", "flow-laws"}, {"laws", std::move(laws)}};
}

int cmd_export(const std::filesystem::path& file, const ExportRequest& req, std::ostream& out, std::ostream& err) {
  json doc;
  try {
    const auto sys = load_system(file);
    auto idx = [&](std::size_t k) { return time_index(sys, req.labels.at(k)); };
    if (req.what == "koopman") {
      if (req.labels.size() != 3) throw std::invalid_argument("koopman needs --triple r,s,t");
      doc = export_koopman(sys, idx(0), idx(1), idx(2));
    } else if (req.what == "theta") {
      if (req.labels.size() != 2) throw std::invalid_argument("theta needs --window s,t");
      doc = export_theta(sys, idx(0), idx(1));
    } else if (req.what == "cpps-spaces") {
      doc = export_cpps_spaces(sys);
    } else if (req.what == "flow-laws") {
      doc = export_flow_laws(sys);
    } else {
      throw std::invalid_argument("unknown export '" + req.what + "'");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  std::ofstream f(req.out);
  if (!f) {
    err << "error: cannot write " << req.out.string() << "\n";
    return 2;
  }
  f << doc.dump(2) << "\n";
  out << "wrote " << req.what << " to " << req.out.string() << "\n";
  return 0;
}

SampleResult sample_flow(const SystemPtr& sys, std::size_t s, std::size_t t, std::size_t n, std::uint64_t seed,
                         std::ostream* csv) {
  if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
  if (!(s < t && t < sys->points())) throw std::invalid_argument("sample: from < to is required");
  const auto flow = build_flow(sys);
  const auto& ts = *sys->times();
  const std::size_t cells = sys->points() - 1;
  std::vector<CellSampler> samplers;
  std::vector<std::size_t> radices;
  for (std::size_t k = 0; k < cells; ++k) {
    samplers.emplace_back(*sys->space(k, k + 1));
    radices.push_back(sys->space(k, k + 1)->size());
  }
  const MixedRadix layout(std::move(radices));

  const auto& target = flow.X(s, t);
  SampleResult res;
  res.outcomes = target.codomain().outcomes();
  res.exact = pushforward(target);
  res.counts.assign(res.outcomes.size(), 0);
  res.n = n;

  if (csv) {
    *csv << "# sampler=" << kSamplerId << " seed=" << seed << " n=" << n << "\n";
    *csv << "thread_index";
    for (std::size_t k = 0; k < cells; ++k) *csv << ",w(" << ts.label(k) << "," << ts.label(k + 1) << ")";
    for (std::size_t a = 0; a < ts.size(); ++a)
      for (std::size_t b = a + 1; b < ts.size(); ++b) *csv << ",X(" << ts.label(a) << "," << ts.label(b) << ")";
    *csv << "\n";
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> digits(cells);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cells; ++k) digits[k] = samplers[k].draw(rng());
    const std::size_t omega = layout.encode(digits);
    ++res.counts[target(omega)];
    if (!csv) continue;
    *csv << i;
    for (std::size_t k = 0; k < cells; ++k) *csv << "," << sys->space(k, k + 1)->outcome(digits[k]);
    for (std::size_t a = 0; a < ts.size(); ++a)
      for (std::size_t b = a + 1; b < ts.size(); ++b) {
        const auto& x = flow.X(a, b);
        *csv << "," << x.codomain().outcome(x(omega));
      }
    *csv << "\n";
  }
  return res;
}

std::string sample_summary(const SystemPtr& sys, std::size_t s, std::size_t t, std::uint64_t seed,
                           const SampleResult& result) {
  const auto& ts = *sys->times();
  std::ostringstream os;
  os << "sampler " << kSamplerId << ", seed " << seed << ", n " << result.n << "\n";
  os << "law of X(" << ts.label(s) << "," << ts.label(t) << "): outcome, exact, empirical\n";
  for (std::size_t k = 0; k < result.outcomes.size(); ++k) {
    const double emp = static_cast<double>(result.counts[k]) / static_cast<double>(result.n);
    os << "  " << result.outcomes[k] << ", " << to_string(result.exact[k]) << ", " << std::setprecision(6) << emp
       << " (" << result.counts[k] << "/" << result.n << ")\n";
  }
  return os.str();
}

int cmd_sample(const std::filesystem::path& file, const std::string& from, const std::string& to, std::size_t n,
               std::uint64_t seed, const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err) {
  try {
    const auto sys = load_system(file);
    const auto s = time_index(sys, from);
    const auto t = time_index(sys, to);
    std::ofstream f(out_csv);
    if (!f) throw std::runtime_error("cannot write " + out_csv.string());
    const auto res = sample_flow(sys, s, t, n, seed, &f);
    out << sample_summary(sys, s, t, seed, res);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_tower(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
  Report report("tower");
  try {
    SystemDescription d;
    load_system(file, &d);
    const auto tower = build_tower(d);
    for (std::size_t k = 0; k < tower.levels.size(); ++k) {
      out << "level " << k << ": " << tower.levels[k]->points() << " times\n";
    }
    report = tower_consistency(tower);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << report.summary();
  return report.passed() ? 0 : 1;
}

}  // namespace convlim
