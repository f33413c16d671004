#pragma once

// JSON serialization for the documented file formats.
//
//   JsjGraph   {"core":{"kind":"solid","p":1},"pages":[{"genus":1,"orientable":true},...],
//               "order":[1,2,3,4],"flips":[]}
//   Tree       {"vertices":[{"id":0,"labels":[1,3]},...],
//               "edges":[{"u":0,"v":1,"len":"5/2"}],"cone":[edge ids]}
//   ArcSystem  {"base":"disc","n":4,"order":[1,3,2,4],"cone_order":1,
//               "arcs":[{"from":{"gap":0,"rank":0},"to":{"gap":2,"rank":0},"weight":"1/2"},
//                       {"from":{"gap":1,"rank":0},"to":"cone","weight":"1"}]}
//   Scripts    [{"twist":{"page":1,"dir":1}}, {"relabel":{"perm":[2,1,3,4]}}]
//   Pants      {"pants":[{"cuffs":[0,1,-1]},...],"curves":3,
//               "data":[{"curve":0,"lengths":[...],"twists":[...]},
//                       {"curve":1,"declared":{"length":"zero","twist":"converges"}}]}

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

#include "jsj.hpp"
#include "rtree.hpp"
#include "teich.hpp"
#include "verifier.hpp"

namespace ibundle {

using nlohmann::json;

// --- JsjGraph -----------------------------------------------------------------

inline json to_json(const JsjGraph& g) {
  json j;
  j["core"] = {{"kind", g.core == CoreKind::solid ? "solid" : "thickened"}, {"p", g.p}};
  j["pages"] = json::array();
  for (const auto& a : g.pieces) {
    if (a.opaque)
      j["pages"].push_back({{"opaque", true}});
    else
      j["pages"].push_back({{"genus", a.page.genus}, {"orientable", a.page.orientable}});
  }
  j["order"] = g.order;
  j["flips"] = json::array();
  for (int f : g.flips) j["flips"].push_back(f);
  return j;
}

inline JsjGraph jsj_from_json(const json& j) {
  JsjGraph g;
  std::string kind = j.at("core").at("kind").get<std::string>();
  if (kind == "solid")
    g.core = CoreKind::solid;
  else if (kind == "thickened")
    g.core = CoreKind::thickened;
  else
    throw std::invalid_argument("core kind must be 'solid' or 'thickened'");
  g.p = j.at("core").at("p").get<int>();
  for (const auto& pj : j.at("pages")) {
    Attachment a;
    if (pj.value("opaque", false)) {
      a.opaque = true;
    } else {
      a.page.genus = pj.at("genus").get<int>();
      a.page.orientable = pj.value("orientable", true);
    }
    g.pieces.push_back(a);
  }
  g.order = j.at("order").get<std::vector<int>>();
  if (j.contains("flips"))
    for (const auto& f : j.at("flips")) g.flips.insert(f.get<int>());
  g.validate();
  return g;
}

// --- trees ---------------------------------------------------------------------

inline json to_json(const MetricLabeledTree& t) {
  json j;
  j["vertices"] = json::array();
  for (size_t v = 0; v < t.verts.size(); ++v) {
    json vj;
    vj["id"] = int(v);
    vj["labels"] = json::array();
    for (int l : t.verts[v].labels) vj["labels"].push_back(l);
    if (t.verts[v].vP) vj["vP"] = true;
    if (t.verts[v].cone) vj["cone"] = true;
    j["vertices"].push_back(vj);
  }
  j["edges"] = json::array();
  json cone = json::array();
  for (size_t e = 0; e < t.edges.size(); ++e) {
    j["edges"].push_back(
        {{"u", t.edges[e].u}, {"v", t.edges[e].v}, {"len", rat_to_string(t.edges[e].len)}});
    if (t.edges[e].in_cone) cone.push_back(int(e));
  }
  j["cone"] = cone;
  return j;
}

inline MetricLabeledTree tree_from_json(const json& j) {
  MetricLabeledTree t;
  std::map<int, int> idmap;
  for (const auto& vj : j.at("vertices")) {
    TreeVertex v;
    if (vj.contains("labels"))
      for (const auto& l : vj.at("labels")) v.labels.insert(l.get<int>());
    v.vP = vj.value("vP", false);
    v.cone = vj.value("cone", false);
    idmap[vj.at("id").get<int>()] = t.add_vertex(v);
  }
  for (const auto& ej : j.at("edges")) {
    Rat len = ej.at("len").is_string() ? rat_from_string(ej.at("len").get<std::string>())
                                       : Rat(ej.at("len").get<long long>());
    t.add_edge(idmap.at(ej.at("u").get<int>()), idmap.at(ej.at("v").get<int>()), len);
  }
  if (j.contains("cone"))
    for (const auto& e : j.at("cone")) {
      int idx = e.get<int>();
      if (idx < 0 || idx >= int(t.edges.size()))
        throw std::invalid_argument("cone edge index out of range");
      t.edges[size_t(idx)].in_cone = true;
    }
  t.validate();
  return t;
}

// --- arc systems -----------------------------------------------------------------

inline json to_json(const ArcSystem& s) {
  json j;
  j["base"] = s.base == BaseKind::disc ? "disc" : "annulus";
  j["n"] = s.n;
  j["order"] = s.order;
  j["cone_order"] = s.cone_order;
  j["arcs"] = json::array();
  for (const auto& a : s.arcs) {
    json aj;
    aj["from"] = {{"gap", a.a.gap}, {"rank", a.a.rank}};
    if (a.b)
      aj["to"] = {{"gap", a.b->gap}, {"rank", a.b->rank}};
    else
      aj["to"] = "cone";
    aj["weight"] = rat_to_string(a.weight);
    j["arcs"].push_back(aj);
  }
  if (s.hole) j["hole"] = {{"gap", s.hole->gap}, {"rank", s.hole->rank}};
  return j;
}

inline ArcSystem arcs_from_json(const json& j) {
  ArcSystem s;
  std::string base = j.at("base").get<std::string>();
  if (base == "disc")
    s.base = BaseKind::disc;
  else if (base == "annulus")
    s.base = BaseKind::annulus;
  else
    throw std::invalid_argument("base must be 'disc' or 'annulus'");
  s.n = j.at("n").get<int>();
  if (j.contains("order"))
    s.order = j.at("order").get<std::vector<int>>();
  else {
    s.order.resize(size_t(s.n));
    std::iota(s.order.begin(), s.order.end(), 1);
  }
  s.cone_order = j.value("cone_order", 1);
  for (const auto& aj : j.at("arcs")) {
    Arc a;
    a.a = {aj.at("from").at("gap").get<int>(), aj.at("from").value("rank", 0)};
    if (aj.at("to").is_string()) {
      if (aj.at("to").get<std::string>() != "cone")
        throw std::invalid_argument("arc 'to' must be an endpoint or \"cone\"");
      a.b = std::nullopt;
    } else {
      a.b = ArcEnd{aj.at("to").at("gap").get<int>(), aj.at("to").value("rank", 0)};
    }
    a.weight = aj.at("weight").is_string() ? rat_from_string(aj.at("weight").get<std::string>())
                                           : Rat(aj.at("weight").get<long long>());
    s.arcs.push_back(a);
  }
  if (j.contains("hole"))
    s.hole = ArcEnd{j.at("hole").at("gap").get<int>(), j.at("hole").value("rank", 0)};
  return s;
}

// --- automorphism scripts ----------------------------------------------------------

inline BookAutomorphism automorphism_from_script(const BookGroup& G, const json& j) {
  BookAutomorphism f = BookAutomorphism::identity(G);
  for (const auto& step : j) {
    if (step.contains("twist")) {
      int page = step.at("twist").at("page").get<int>();
      int dir = step.at("twist").at("dir").get<int>();
      f = BookAutomorphism::twist(G, page, dir).compose_with(G, f);
    } else if (step.contains("relabel")) {
      f = BookAutomorphism::relabel(G, step.at("relabel").at("perm").get<std::vector<int>>())
              .compose_with(G, f);
    } else {
      throw std::invalid_argument("unknown automorphism step");
    }
  }
  return f;
}

inline json script_to_json(const BookAutomorphism& f) {
  json j = json::array();
  for (const auto& st : f.script()) {
    if (st.kind == AutStep::Kind::twist)
      j.push_back({{"twist", {{"page", st.twist.page}, {"dir", st.twist.dir}}}});
    else
      j.push_back({{"relabel", {{"perm", st.relabel.perm}}}});
  }
  return j;
}

// --- pants documents ------------------------------------------------------------------

struct PantsDocument {
  PantsDecomposition decomposition;
  std::vector<FnEntry> entries;  // one per curve
  FnThresholds thresholds;
};

inline PantsDocument pants_from_json(const json& j) {
  PantsDocument doc;
  for (const auto& pj : j.at("pants")) {
    PantsDecomposition::Pants p;
    auto cuffs = pj.at("cuffs").get<std::vector<int>>();
    if (cuffs.size() != 3) throw std::invalid_argument("each pants needs exactly 3 cuffs");
    for (int s = 0; s < 3; ++s) p.cuffs[s] = cuffs[size_t(s)];
    doc.decomposition.pants.push_back(p);
  }
  doc.decomposition.num_curves = j.at("curves").get<int>();
  doc.decomposition.validate();
  doc.entries.resize(size_t(doc.decomposition.num_curves));
  std::vector<bool> have(size_t(doc.decomposition.num_curves), false);
  for (const auto& dj : j.at("data")) {
    int c = dj.at("curve").get<int>();
    if (c < 0 || c >= doc.decomposition.num_curves)
      throw std::invalid_argument("data refers to unknown curve");
    FnEntry e;
    if (dj.contains("declared")) {
      e.declared = true;
      std::string len = dj.at("declared").at("length").get<std::string>();
      std::string tw = dj.at("declared").at("twist").get<std::string>();
      if (len == "zero")
        e.declared_length_to_zero = true;
      else if (len != "positive")
        throw std::invalid_argument("declared length must be 'zero' or 'positive'");
      if (tw == "diverges")
        e.declared_twist_diverges = true;
      else if (tw != "converges")
        throw std::invalid_argument("declared twist must be 'converges' or 'diverges'");
    } else {
      e.lengths = dj.at("lengths").get<std::vector<double>>();
      e.twists = dj.at("twists").get<std::vector<double>>();
    }
    doc.entries[size_t(c)] = e;
    have[size_t(c)] = true;
  }
  for (int c = 0; c < doc.decomposition.num_curves; ++c)
    if (!have[size_t(c)])
      throw std::invalid_argument("missing data for curve " + std::to_string(c));
  if (j.contains("thresholds")) {
    doc.thresholds.pinch = j.at("thresholds").value("pinch", doc.thresholds.pinch);
    doc.thresholds.twist_span = j.at("thresholds").value("twist_span", doc.thresholds.twist_span);
  }
  return doc;
}

inline json to_json(const Subsurface& s, const PantsDecomposition& p) {
  json j;
  j["kept_pants"] = json::array();
  for (int x : s.pants) j["kept_pants"].push_back(x);
  j["kept_curves"] = json::array();
  for (int x : s.interior_curves) j["kept_curves"].push_back(x);
  j["frontier_curves"] = json::array();
  for (int x : s.frontier_curves) j["frontier_curves"].push_back(x);
  j["components"] = json::array();
  for (const auto& comp : subsurface_components(p, s)) {
    json cj = json::array();
    for (int x : comp) cj.push_back(x);
    j["components"].push_back(cj);
  }
  return j;
}

// --- verdicts and reports ----------------------------------------------------------

inline json to_json(const Verdict& v) {
  json j;
  j["subgroup"] = v.subgroup.name;
  j["status"] = to_string(v.status);
  j["i_max"] = v.i_max;
  if (v.status == VerdictStatus::converges) {
    j["pattern"] = {{"conjugator", "t"}, {"coefficient", v.pattern_coeff}};
  } else if (v.status == VerdictStatus::diverges) {
    j["certificate"] = {{"word", v.certificate.word},
                        {"lengths", v.certificate.lengths},
                        {"growth_run", v.certificate.growth_run},
                        {"trace_certificate", v.certificate.has_trace_certificate},
                        {"max_abs_trace", v.certificate.max_abs_trace}};
  }
  j["budget"] = {{"core_exponent", v.budget.core_exponent}, {"word_length", v.budget.word_length}};
  return j;
}

inline json to_json(const Rectification& r) {
  json j;
  j["sigma"] = r.sigma;
  j["order"] = r.new_order;
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    json bj = json::array();
    for (int l : b) bj.push_back(l);
    blocks.push_back(bj);
  }
  j["blocks"] = blocks;
  j["block_coefficients"] = r.block_coeff;
  j["arcs"] = to_json(r.arcs);
  j["x"] = r.x;
  j["biconditional_verified"] = r.biconditional_verified;
  return j;
}

// --- file helpers -------------------------------------------------------------------

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  json j;
  in >> j;
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace ibundle
