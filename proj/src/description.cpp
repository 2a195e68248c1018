#include "convlim/description.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace convlim {

using nlohmann::json;

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) throw ParseError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at(path, key), "missing");
  return *it;
}

const json* optional_key(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string label(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(path, "expected a label (string or integer)");
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

std::vector<std::string> label_list(const json& j, const std::string& path, bool distinct = true) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto& arr = array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(label(arr[i], at(path, i)));
    if (distinct && !seen.insert(out.back()).second) throw ParseError(at(path, i), "duplicate label '" + out.back() + "'");
  }
  return out;
}

Rational rational(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
  throw ParseError(path, "expected a rational as \"p/q\" or an integer");
}

std::size_t index_in(const std::vector<std::string>& labels, const std::string& l, const std::string& path,
                     const std::string& what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == l) return i;
  }
  throw ParseError(path, "unknown " + what + " '" + l + "'");
}

void require_normalized(const std::vector<Rational>& w, const std::string& path, const std::string& what) {
  Rational sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0) throw ParseError(path, what + " has a negative weight");
    sum += w[i];
  }
  if (sum != 1) throw ParseError(path, what + " has weights summing to " + to_string(sum) + ", not 1");
}

std::vector<Rational> element_weights(const json& j, const std::string& path, const std::vector<std::string>& elements,
                                      const std::string& what) {
  if (!j.is_object()) throw ParseError(path, "expected an object of element weights");
  std::vector<Rational> w(elements.size(), Rational(0));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto k = index_in(elements, it.key(), at(path, it.key()), "element");
    w[k] = rational(it.value(), at(path, it.key()));
  }
  require_normalized(w, path, what);
  return w;
}

std::string interval_name(const std::string& s, const std::string& t) { return "(" + s + "," + t + ")"; }

std::pair<std::size_t, std::size_t> interval_of(const std::vector<std::string>& times, const std::string& s,
                                                const std::string& t, const std::string& path) {
  const auto a = index_in(times, s, path, "time");
  const auto b = index_in(times, t, path, "time");
  if (a >= b) throw ParseError(path, "interval " + interval_name(s, t) + " is not increasing");
  return {a, b};
}

bool all_integers(const std::vector<std::string>& labels, std::vector<long long>* out) {
  for (const auto& l : labels) {
    long long v = 0;
    const auto* end = l.data() + l.size();
    auto [p, ec] = std::from_chars(l.data(), end, v);
    if (ec != std::errc() || p != end) return false;
    if (out) out->push_back(v);
  }
  return true;
}

void parse_semigroup(const json& doc, SystemDescription& d) {
  const auto& sg = require(doc, "", "semigroup");
  d.elements = label_list(require(sg, "semigroup", "elements"), "semigroup.elements");
  if (d.elements.empty()) throw ParseError("semigroup.elements", "no elements");
  const auto& tab = array(require(sg, "semigroup", "table"), "semigroup.table");
  if (tab.size() != d.elements.size()) throw ParseError("semigroup.table", "expected one row per element");
  std::vector<std::vector<std::size_t>> idx;
  for (std::size_t a = 0; a < tab.size(); ++a) {
    const std::string rp = at("semigroup.table", a);
    auto row = label_list(tab[a], rp, false);
    if (row.size() != d.elements.size()) throw ParseError(rp, "expected one entry per element");
    idx.emplace_back();
    for (std::size_t b = 0; b < row.size(); ++b) idx.back().push_back(index_in(d.elements, row[b], at(rp, b), "element"));
    d.table.push_back(std::move(row));
  }
  if (auto v = FiniteSemigroup::associativity_violation(idx)) {
    const auto [a, b, c] = *v;
    const auto& e = d.elements;
    throw ParseError("semigroup.table", "not associative at (" + e[a] + "," + e[b] + "," + e[c] + "): (" + e[a] + e[b] +
                                            ")" + e[c] + " = " + e[idx[idx[a][b]][c]] + " but " + e[a] + "(" + e[b] +
                                            e[c] + ") = " + e[idx[a][idx[b][c]]]);
  }

  const auto& m = require(doc, "", "measures");
  if (!m.is_object() || m.size() != 1) {
    throw ParseError("measures", "expected exactly one of idempotent, generator, per_interval");
  }
  if (const auto* j = optional_key(m, "idempotent")) {
    d.measure_kind = MeasureKind::idempotent;
    d.measure = element_weights(*j, "measures.idempotent", d.elements, "idempotent measure");
  } else if (const auto* g = optional_key(m, "generator")) {
    d.measure_kind = MeasureKind::generator;
    d.measure = element_weights(*g, "measures.generator", d.elements, "generator measure");
  } else if (const auto* p = optional_key(m, "per_interval")) {
    d.measure_kind = MeasureKind::per_interval;
    const auto& arr = array(*p, "measures.per_interval");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = at("measures.per_interval", i);
      IntervalMeasure im;
      im.from = label(require(arr[i], ip, "from"), at(ip, "from"));
      im.to = label(require(arr[i], ip, "to"), at(ip, "to"));
      const auto key = interval_of(d.times, im.from, im.to, ip);
      if (!seen.insert(key).second) throw ParseError(ip, "interval " + interval_name(im.from, im.to) + " given twice");
      im.weights = element_weights(require(arr[i], ip, "weights"), at(ip, "weights"), d.elements,
                                   "interval " + interval_name(im.from, im.to));
      d.per_interval.push_back(std::move(im));
    }
    if (seen.size() != interval_count(d.times.size())) {
      throw ParseError("measures.per_interval", "every interval s < t needs a measure");
    }
  } else {
    throw ParseError("measures", "expected one of idempotent, generator, per_interval");
  }
}

void parse_explicit(const json& doc, SystemDescription& d) {
  const auto& sp = array(require(doc, "", "spaces"), "spaces");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const std::string ip = at("spaces", i);
    ExplicitSpace s;
    s.from = label(require(sp[i], ip, "from"), at(ip, "from"));
    s.to = label(require(sp[i], ip, "to"), at(ip, "to"));
    const auto key = interval_of(d.times, s.from, s.to, ip);
    if (!where.emplace(key, i).second) throw ParseError(ip, "interval " + interval_name(s.from, s.to) + " given twice");
    s.outcomes = label_list(require(sp[i], ip, "outcomes"), at(ip, "outcomes"));
    if (s.outcomes.empty()) throw ParseError(at(ip, "outcomes"), "no outcomes");
    const auto& w = array(require(sp[i], ip, "weights"), at(ip, "weights"));
    if (w.size() != s.outcomes.size()) throw ParseError(at(ip, "weights"), "expected one weight per outcome");
    for (std::size_t k = 0; k < w.size(); ++k) s.weights.push_back(rational(w[k], at(at(ip, "weights"), k)));
    require_normalized(s.weights, at(ip, "weights"), "interval " + interval_name(s.from, s.to));
    d.spaces.push_back(std::move(s));
  }
  if (where.size() != interval_count(d.times.size())) throw ParseError("spaces", "every interval s < t needs a space");

  const auto& mu = array(require(doc, "", "mult"), "mult");
  std::set<std::array<std::size_t, 3>> seen;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const std::string ip = at("mult", i);
    ExplicitMult m;
    m.r = label(require(mu[i], ip, "r"), at(ip, "r"));
    m.s = label(require(mu[i], ip, "s"), at(ip, "s"));
    m.t = label(require(mu[i], ip, "t"), at(ip, "t"));
    const auto [r, s] = interval_of(d.times, m.r, m.s, ip);
    const auto t = interval_of(d.times, m.s, m.t, ip).second;
    if (!seen.insert({r, s, t}).second) throw ParseError(ip, "triple given twice");
    const auto& A = d.spaces[where.at({r, s})];
    const auto& B = d.spaces[where.at({s, t})];
    const auto& C = d.spaces[where.at({r, t})];
    const auto& tab = array(require(mu[i], ip, "table"), at(ip, "table"));
    if (tab.size() != A.outcomes.size()) throw ParseError(at(ip, "table"), "expected one row per outcome of " + interval_name(m.r, m.s));
    for (std::size_t x = 0; x < tab.size(); ++x) {
      const std::string rp = at(at(ip, "table"), x);
      auto row = label_list(tab[x], rp, false);
      if (row.size() != B.outcomes.size()) throw ParseError(rp, "expected one entry per outcome of " + interval_name(m.s, m.t));
      for (std::size_t y = 0; y < row.size(); ++y) index_in(C.outcomes, row[y], at(rp, y), "outcome");
      m.table.push_back(std::move(row));
    }
    d.mults.push_back(std::move(m));
  }
  const std::size_t n = d.times.size();
  if (seen.size() != n * (n - 1) * (n - 2) / 6) throw ParseError("mult", "every triple r < s < t needs a table");
}

void parse_tower(const json& j, SystemDescription& d) {
  TowerSpec tw;
  const auto& lv = array(require(j, "tower", "levels"), "tower.levels");
  for (std::size_t i = 0; i < lv.size(); ++i) tw.levels.push_back(label_list(lv[i], at("tower.levels", i)));
  if (tw.levels.empty()) throw ParseError("tower.levels", "no levels");
  if (const auto* ev = optional_key(j, "events")) {
    const auto& arr = array(*ev, "tower.events");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ip = at("tower.events", i);
      CylinderEvent e;
      e.from = label(require(arr[i], ip, "from"), at(ip, "from"));
      e.to = label(require(arr[i], ip, "to"), at(ip, "to"));
      e.outcomes = label_list(require(arr[i], ip, "outcomes"), at(ip, "outcomes"));
      tw.events.push_back(std::move(e));
    }
  }
  d.tower = std::move(tw);
}

json weights_object(const std::vector<std::string>& elements, const std::vector<Rational>& w) {
  json o = json::object();
  for (std::size_t i = 0; i < elements.size(); ++i) o[elements[i]] = to_string(w[i]);
  return o;
}

}  // namespace

SystemDescription parse_description(const json& doc) {
  SystemDescription d;
  const auto& fmt = require(doc, "", "format");
  if (!fmt.is_number_integer() || fmt.get<int>() != 1) throw ParseError("format", "only format 1 is supported");
  d.times = label_list(require(doc, "", "times"), "times");
  if (d.times.size() < 2) throw ParseError("times", "at least two time labels are required");
  if (const auto* p = optional_key(doc, "positions")) {
    const auto& arr = array(*p, "positions");
    if (arr.size() != d.times.size()) throw ParseError("positions", "expected one position per time label");
    std::vector<long long> pos;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_integer()) throw ParseError(at("positions", i), "expected an integer");
      pos.push_back(arr[i].get<long long>());
      if (i && pos[i] <= pos[i - 1]) throw ParseError(at("positions", i), "positions must increase strictly");
    }
    d.positions = std::move(pos);
  }
  const auto& mode = require(doc, "", "mode");
  if (mode == "semigroup") {
    d.mode = DescriptionMode::semigroup;
    parse_semigroup(doc, d);
  } else if (mode == "explicit") {
    d.mode = DescriptionMode::explicit_tables;
    parse_explicit(doc, d);
  } else {
    throw ParseError("mode", "expected \"semigroup\" or \"explicit\"");
  }
  if (const auto* t = optional_key(doc, "tower")) parse_tower(*t, d);
  return d;
}

SystemDescription parse_description_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_description(doc);
}

SystemDescription load_description(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("<file>", "cannot open " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_description_text(buf.str());
}

json serialize(const SystemDescription& d) {
  json doc;
  doc["format"] = d.format;
  doc["times"] = d.times;
  if (d.positions) doc["positions"] = *d.positions;
  if (d.mode == DescriptionMode::semigroup) {
    doc["mode"] = "semigroup";
    doc["semigroup"] = {{"elements", d.elements}, {"table", d.table}};
    switch (d.measure_kind) {
      case MeasureKind::idempotent:
        doc["measures"] = {{"idempotent", weights_object(d.elements, d.measure)}};
        break;
      case MeasureKind::generator:
        doc["measures"] = {{"generator", weights_object(d.elements, d.measure)}};
        break;
      case MeasureKind::per_interval: {
        json arr = json::array();
        for (const auto& im : d.per_interval) {
          arr.push_back({{"from", im.from}, {"to", im.to}, {"weights", weights_object(d.elements, im.weights)}});
        }
        doc["measures"] = {{"per_interval", arr}};
        break;
      }
    }
  } else {
    doc["mode"] = "explicit";
    json spaces = json::array();
    for (const auto& s : d.spaces) {
      json w = json::array();
      for (const auto& x : s.weights) w.push_back(to_string(x));
      spaces.push_back({{"from", s.from}, {"to", s.to}, {"outcomes", s.outcomes}, {"weights", w}});
    }
    doc["spaces"] = spaces;
    json mults = json::array();
    for (const auto& m : d.mults) mults.push_back({{"r", m.r}, {"s", m.s}, {"t", m.t}, {"table", m.table}});
    doc["mult"] = mults;
  }
  if (d.tower) {
    json events = json::array();
    for (const auto& e : d.tower->events) events.push_back({{"from", e.from}, {"to", e.to}, {"outcomes", e.outcomes}});
    doc["tower"] = {{"levels", d.tower->levels}, {"events", events}};
  }
  return doc;
}

std::vector<long long> effective_positions(const std::vector<std::string>& labels,
                                           const std::optional<std::vector<long long>>& given) {
  if (given) return *given;
  std::vector<long long> pos;
  if (all_integers(labels, &pos) && std::is_sorted(pos.begin(), pos.end()) &&
      std::adjacent_find(pos.begin(), pos.end()) == pos.end()) {
    return pos;
  }
  pos.clear();
  for (std::size_t i = 0; i < labels.size(); ++i) pos.push_back(static_cast<long long>(i));
  return pos;
}

namespace {

FiniteSemigroup semigroup_of(const SystemDescription& d) {
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& row : d.table) {
    idx.emplace_back();
    for (const auto& l : row) idx.back().push_back(index_in(d.elements, l, "semigroup.table", "element"));
  }
  return FiniteSemigroup(d.elements, std::move(idx));
}

SystemPtr semigroup_system(const SystemDescription& d, const FiniteSemigroup& sg, const TimeSetPtr& times,
                           const std::optional<std::vector<long long>>& positions) {
  switch (d.measure_kind) {
    case MeasureKind::idempotent:
      try {
        return from_idempotent(sg, d.measure, times);
      } catch (const std::invalid_argument& e) {
        throw ParseError("measures.idempotent", e.what());
      }
    case MeasureKind::generator:
      return from_semigroup_generator(sg, d.measure, times, effective_positions(times->labels(), positions));
    case MeasureKind::per_interval: {
      const std::size_t n = times->size();
      std::vector<std::vector<Rational>> per(interval_count(n));
      for (const auto& im : d.per_interval) {
        per[interval_slot(n, times->index_of(im.from), times->index_of(im.to))] = im.weights;
      }
      return from_semigroup_measures(sg, times, per);
    }
  }
  throw ParseError("measures", "unknown measure kind");
}

}  // namespace

SystemPtr build_system(const SystemDescription& d) {
  const auto times = make_time_set(d.times);
  if (d.mode == DescriptionMode::semigroup) return semigroup_system(d, semigroup_of(d), times, d.positions);

  SystemBuilder b(times);
  std::map<std::pair<std::size_t, std::size_t>, SpacePtr> spaces;
  for (std::size_t i = 0; i < d.spaces.size(); ++i) {
    const auto& s = d.spaces[i];
    const auto key = std::make_pair(times->index_of(s.from), times->index_of(s.to));
    try {
      spaces[key] = make_space(s.outcomes, s.weights);
    } catch (const std::invalid_argument& e) {
      throw ParseError(at("spaces", i), e.what());
    }
    b.space(key.first, key.second, spaces[key]);
  }
  for (const auto& m : d.mults) {
    const auto r = times->index_of(m.r);
    const auto s = times->index_of(m.s);
    const auto t = times->index_of(m.t);
    const auto& C = *spaces.at({r, t});
    std::vector<ProbMorphism::Index> table;
    for (const auto& row : m.table)
      for (const auto& l : row) table.push_back(static_cast<ProbMorphism::Index>(C.index_of(l)));
    b.mult(r, s, t, std::move(table));
  }
  return b.build();
}

CylinderTower build_tower(const SystemDescription& d) {
  if (!d.tower) throw ParseError("tower", "the description has no tower block");
  if (d.mode != DescriptionMode::semigroup || d.measure_kind == MeasureKind::per_interval) {
    throw ParseError("tower", "towers need a semigroup description with an idempotent or generator measure");
  }
  const auto sg = semigroup_of(d);
  // Explicit positions belong to the declared TimeSet; levels use the default rule.
  auto rule = [&](const TimeSetPtr& times) { return semigroup_system(d, sg, times, std::nullopt); };
  try {
    return make_tower(d.tower->levels, rule, d.tower->events);
  } catch (const std::invalid_argument& e) {
    throw ParseError("tower", e.what());
  }
}

}  // namespace convlim
