#pragma once

// Command-line front end.  Kept in a header so the test suite can drive the
// exact code path the binary uses.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json_io.hpp"

namespace ibundle::cli {

struct CounterexampleResult {
  json report;
  bool verified = false;
};

inline BookGroup group_of(const JsjGraph& g) {
  if (!g.is_book()) throw std::invalid_argument("graph must be a book");
  if (g.p != 1) throw std::invalid_argument("group arithmetic supports primitive books (p = 1)");
  std::vector<int> genera;
  for (const auto& a : g.pieces) genera.push_back(a.page.genus);
  return BookGroup(genera);
}

// The full pipeline: verdicts for the standard subgroup family under
// phi = twist(1,+1) o twist(3,+1), the window biconditional over all 2^n
// annulus unions, the planarity check of the induced block constraints in
// the original order, and the rectification.
inline CounterexampleResult run_counterexample(int n, int genus, long long iters,
                                               std::uint64_t seed, SearchBudget budget,
                                               VerifierThresholds th = {}) {
  std::vector<PageSpec> pages(size_t(n), PageSpec{genus, true});
  JsjGraph g = build_book(n, pages, 1);
  BookGroup G = group_of(g);
  BookAutomorphism phi =
      compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));
  Representation rep = build_rep(G, seed);

  std::vector<Verdict> verdicts;
  for (const SubgroupSpec& H : standard_subgroup_family(n))
    verdicts.push_back(classify_restriction(G, phi, H, iters, &rep, budget, th));

  BiconditionalReport bic = window_biconditional_test(g, verdicts);

  BlockConstraints cons;
  cons.n = n;
  for (const auto& v : verdicts) {
    if (v.subgroup.kind != SubgroupSpec::Kind::surface) continue;
    auto p = std::minmax(v.subgroup.i, v.subgroup.j);
    if (v.status == VerdictStatus::converges) cons.same.insert({p.first, p.second});
    if (v.status == VerdictStatus::diverges) cons.distinct.insert({p.first, p.second});
  }
  auto witness = noncrossing_feasibility(cons, g.order);

  Rectification rect = rectify(g, verdicts);

  // expected counter-example pattern
  auto status_of = [&](const std::string& name) {
    for (const auto& v : verdicts)
      if (v.subgroup.name == name) return v.status;
    return VerdictStatus::undetermined;
  };
  bool pages_ok = true;
  for (int j = 1; j <= n; ++j)
    if (status_of("page(" + std::to_string(j) + ")") != VerdictStatus::converges) pages_ok = false;
  bool conv13 = status_of("surface(1,3)") == VerdictStatus::converges;
  bool div12 = status_of("surface(1,2)") == VerdictStatus::diverges;
  bool conv24 = n < 4 || status_of("surface(2,4)") == VerdictStatus::converges;
  bool refuted = bic.satisfying.empty();
  bool planarity_obstructed = !witness.has_value();
  bool verified = pages_ok && conv13 && conv24 && div12 && refuted && planarity_obstructed &&
                  rect.biconditional_verified;

  json rj;
  rj["command"] = "verify-counterexample";
  rj["params"] = {{"pages", n},
                  {"genus", genus},
                  {"iters", iters},
                  {"seed", seed},
                  {"budget",
                   {{"core_exponent", budget.core_exponent}, {"word_length", budget.word_length}}},
                  {"thresholds",
                   {{"growth_run", th.growth_run},
                    {"trace_mag", th.trace_mag},
                    {"commutator_residual", 1e-9},
                    {"trace_tol", 1e-6}}}};
  rj["automorphism"] = {{"label", phi.label()}, {"script", script_to_json(phi)}};
  rj["graph"] = to_json(g);
  rj["representation"] = {{"seed", seed},
                          {"abs_trace_T", rep.trT_abs},
                          {"trlength_T", rep.trlength_T},
                          {"commutator_residual", rep.commutator_residual}};
  rj["verdicts"] = json::array();
  for (const auto& v : verdicts) rj["verdicts"].push_back(to_json(v));
  rj["satisfying_x"] = json::array();
  for (const auto& x : bic.satisfying) rj["satisfying_x"].push_back(x);
  json same = json::array(), distinct = json::array();
  for (auto& [a, b] : cons.same) same.push_back({a, b});
  for (auto& [a, b] : cons.distinct) distinct.push_back({a, b});
  rj["noncrossing"] = {{"same", same},
                       {"distinct", distinct},
                       {"original_order_feasible", witness.has_value()}};
  if (witness) {
    json w = json::array();
    for (const auto& blk : *witness) {
      json bj = json::array();
      for (int l : blk) bj.push_back(l);
      w.push_back(bj);
    }
    rj["noncrossing"]["witness"] = w;
  }
  rj["rectification"] = to_json(rect);
  rj["checks"] = {{"pages_converge", pages_ok},
                  {"surface_1_3_converges", conv13},
                  {"surface_2_4_converges", conv24},
                  {"surface_1_2_diverges", div12},
                  {"satisfying_x_empty", refuted},
                  {"original_order_infeasible", planarity_obstructed},
                  {"rectified_biconditional", rect.biconditional_verified}};
  rj["verified"] = verified;
  return {rj, verified};
}

inline std::vector<Verdict> verdicts_from_report(const json& report) {
  std::vector<Verdict> out;
  for (const auto& vj : report.at("verdicts")) {
    Verdict v;
    std::string name = vj.at("subgroup").get<std::string>();
    int i = 0, j = 0;
    if (std::sscanf(name.c_str(), "page(%d)", &i) == 1)
      v.subgroup = SubgroupSpec::page(i);
    else if (std::sscanf(name.c_str(), "surface(%d,%d)", &i, &j) == 2)
      v.subgroup = SubgroupSpec::surface(i, j);
    else
      throw std::invalid_argument("unknown subgroup name '" + name + "'");
    std::string st = vj.at("status").get<std::string>();
    v.status = st == "converges" ? VerdictStatus::converges
               : st == "diverges" ? VerdictStatus::diverges
                                  : VerdictStatus::undetermined;
    if (vj.contains("pattern")) v.pattern_coeff = vj.at("pattern").at("coefficient").get<long long>();
    if (vj.contains("i_max")) v.i_max = vj.at("i_max").get<long long>();
    out.push_back(v);
  }
  return out;
}

inline std::string growth_csv(const GrowthScan& scan) {
  std::ostringstream out;
  out << "i,trace_re,trace_im,trlength,mu_i,normalized\n";
  char buf[256];
  for (const auto& r : scan.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.i, r.trace.real(),
                  r.trace.imag(), r.trlength, r.mu, r.normalized);
    out << buf;
  }
  return out.str();
}

inline int run(int argc, const char* const* argv, std::ostream& os = std::cout,
               std::ostream& es = std::cerr) {
  CLI::App app{"books of I-bundles: windows, shuffles, twist automorphisms, and convergence certificates"};
  app.require_subcommand(1);

  // book new
  auto* book = app.add_subcommand("book", "create book graphs");
  auto* book_new = book->add_subcommand("new", "build a primitive book of I-bundles");
  int bn_pages = 4, bn_genus = 1, bn_p = 1;
  std::string bn_out = "book.json";
  book_new->add_option("--pages", bn_pages, "number of pages (>= 3)")->required();
  book_new->add_option("--genus", bn_genus, "genus of every page");
  book_new->add_option("--p", bn_p, "multiplicity of the gluing curve");
  book_new->add_option("--out", bn_out, "output file");

  // window
  auto* win = app.add_subcommand("window", "compute the window of a graph");
  std::string win_in;
  win->add_option("graph", win_in, "JsjGraph JSON file")->required();

  // shuffle
  auto* shf = app.add_subcommand("shuffle", "reorder the attachment annuli");
  std::string shf_in, shf_perm, shf_out;
  shf->add_option("graph", shf_in)->required();
  shf->add_option("--perm", shf_perm, "comma-separated permutation, e.g. 1,3,2,4")->required();
  shf->add_option("--out", shf_out, "output file");

  // flip
  auto* flp = app.add_subcommand("flip", "toggle the flip mark of a page");
  std::string flp_in, flp_out;
  int flp_page = 0;
  flp->add_option("graph", flp_in)->required();
  flp->add_option("--page", flp_page)->required();
  flp->add_option("--out", flp_out, "output file");

  // classify-pair
  auto* cls = app.add_subcommand("classify-pair", "compare two books");
  std::string cls_a, cls_b;
  cls->add_option("a", cls_a)->required();
  cls->add_option("b", cls_b)->required();

  // verify-counterexample
  auto* vce = app.add_subcommand("verify-counterexample",
                                 "run the divergence/convergence pipeline on a twisted book");
  int vce_pages = 4, vce_genus = 1;
  long long vce_iters = 16, vce_budget = 64;
  std::uint64_t vce_seed = 0;
  bool vce_seed_set = false;
  std::string vce_out = "report.json";
  vce->add_option("--pages", vce_pages);
  vce->add_option("--genus", vce_genus);
  vce->add_option("--iters", vce_iters);
  vce->add_option("--seed", vce_seed)->required()->each([&](const std::string&) { vce_seed_set = true; });
  vce->add_option("--budget", vce_budget, "core exponent search budget");
  vce->add_option("--out", vce_out);

  // rectify
  auto* rct = app.add_subcommand("rectify", "shuffle until the diverging pairs separate");
  std::string rct_in, rct_out;
  rct->add_option("report", rct_in, "report.json from verify-counterexample")->required();
  rct->add_option("--out", rct_out, "output file");

  // dual-tree
  auto* dtr = app.add_subcommand("dual-tree", "dual tree of an arc system");
  std::string dtr_in, dtr_out;
  dtr->add_option("arcs", dtr_in)->required();
  dtr->add_option("--out", dtr_out);

  // realize-tree
  auto* rlz = app.add_subcommand("realize-tree", "realize a labeled tree as an arc system");
  std::string rlz_in, rlz_out;
  rlz->add_option("tree", rlz_in)->required();
  rlz->add_option("--out", rlz_out);

  // surviving-subsurface
  auto* srv = app.add_subcommand("surviving-subsurface",
                                 "classify curves and cut the pants decomposition");
  std::string srv_in, srv_out;
  srv->add_option("pants", srv_in)->required();
  srv->add_option("--out", srv_out);

  // trace-orbit
  auto* tro = app.add_subcommand("trace-orbit", "translation length growth along twist powers");
  int tro_pages = 4, tro_genus = 1;
  long long tro_iters = 32;
  std::uint64_t tro_seed = 0;
  std::string tro_word = "a1a2", tro_out;
  tro->add_option("--pages", tro_pages);
  tro->add_option("--genus", tro_genus);
  tro->add_option("--iters", tro_iters);
  tro->add_option("--seed", tro_seed)->required();
  tro->add_option("--word", tro_word);
  tro->add_option("--out", tro_out, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      os << app.help();
      return 0;
    }
    es << "input error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (book_new->parsed()) {
      std::vector<PageSpec> pages(size_t(bn_pages), PageSpec{bn_genus, true});
      JsjGraph g = build_book(bn_pages, pages, bn_p);
      save_json(bn_out, to_json(g));
      os << "wrote " << bn_out << "\n";
      return 0;
    }
    if (win->parsed()) {
      JsjGraph g = jsj_from_json(load_json(win_in));
      Window w = window(g);
      os << w.components.size() << " window components\n";
      for (const auto& c : w.components) {
        if (c.kind == WindowComponent::Kind::i_pair)
          os << "  i-pair over page " << c.page << "\n";
        else
          os << "  annulus neighbourhood at frontier position " << c.position << "\n";
      }
      return 0;
    }
    if (shf->parsed()) {
      JsjGraph g = jsj_from_json(load_json(shf_in));
      std::vector<int> perm;
      std::stringstream ss(shf_perm);
      std::string tok;
      while (std::getline(ss, tok, ',')) perm.push_back(std::stoi(tok));
      JsjGraph out = shuffle(g, perm);
      json j = to_json(out);
      if (!shf_out.empty()) save_json(shf_out, j);
      os << j.dump(2) << "\n";
      return 0;
    }
    if (flp->parsed()) {
      JsjGraph out = flip(jsj_from_json(load_json(flp_in)), flp_page);
      json j = to_json(out);
      if (!flp_out.empty()) save_json(flp_out, j);
      os << j.dump(2) << "\n";
      return 0;
    }
    if (cls->parsed()) {
      PairClass c = classify_pair(jsj_from_json(load_json(cls_a)), jsj_from_json(load_json(cls_b)));
      os << to_string(c) << "\n";
      return 0;
    }
    if (vce->parsed()) {
      SearchBudget budget;
      budget.core_exponent = vce_budget;
      CounterexampleResult res = run_counterexample(vce_pages, vce_genus, vce_iters, vce_seed, budget);
      save_json(vce_out, res.report);
      for (const auto& v : res.report["verdicts"])
        os << v["subgroup"].get<std::string>() << ": " << v["status"].get<std::string>() << "\n";
      os << "satisfying window subsurfaces: " << res.report["satisfying_x"].size() << "\n";
      os << "report written to " << vce_out << "\n";
      if (!res.verified) {
        es << "verification failure: the expected pattern did not hold (see report)\n";
        return 2;
      }
      return 0;
    }
    if (rct->parsed()) {
      json report = load_json(rct_in);
      JsjGraph g = jsj_from_json(report.at("graph"));
      Rectification rect = rectify(g, verdicts_from_report(report));
      json j = to_json(rect);
      if (!rct_out.empty()) save_json(rct_out, j);
      os << j.dump(2) << "\n";
      return rect.biconditional_verified ? 0 : 2;
    }
    if (dtr->parsed()) {
      MetricLabeledTree t = dual_tree(arcs_from_json(load_json(dtr_in)));
      json j = to_json(t);
      if (!dtr_out.empty()) save_json(dtr_out, j);
      os << j.dump(2) << "\n";
      return 0;
    }
    if (rlz->parsed()) {
      MetricLabeledTree t = tree_from_json(load_json(rlz_in));
      int n = 0;
      for (const auto& v : t.verts)
        for (int l : v.labels) n = std::max(n, l);
      Realization r = realize(t, n);
      os << "cyclic order:";
      for (int l : r.cyclic_order) os << " " << l;
      os << "\nshuffle sigma:";
      for (int s : r.sigma) os << " " << s;
      os << "\n";
      if (!rlz_out.empty()) save_json(rlz_out, to_json(r.arcs));
      return 0;
    }
    if (srv->parsed()) {
      PantsDocument doc = pants_from_json(load_json(srv_in));
      std::vector<CurveClass> classes;
      for (const auto& e : doc.entries) classes.push_back(classify_curve(e, doc.thresholds));
      Subsurface s = surviving_subsurface(doc.decomposition, classes);
      json j = to_json(s, doc.decomposition);
      j["classes"] = json::array();
      for (const auto& c : classes) j["classes"].push_back(to_string(c));
      if (!srv_out.empty()) save_json(srv_out, j);
      os << j.dump(2) << "\n";
      return 0;
    }
    if (tro->parsed()) {
      std::vector<PageSpec> pages(size_t(tro_pages), PageSpec{tro_genus, true});
      JsjGraph g = build_book(tro_pages, pages, 1);
      BookGroup G = group_of(g);
      BookAutomorphism phi =
          compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));
      Representation rep = build_rep(G, tro_seed);
      GrowthScan scan = growth_scan(rep, G, phi, word_from_string(G, tro_word), tro_iters);
      std::string csv = growth_csv(scan);
      if (!tro_out.empty()) {
        std::ofstream f(tro_out);
        if (!f) throw std::invalid_argument("cannot write '" + tro_out + "'");
        f << csv;
        os << "wrote " << tro_out << "\n";
      } else {
        os << csv;
      }
      char buf[128];
      std::snprintf(buf, sizeof buf, "slope %.6g (2*trlength(T) = %.6g)\n", scan.slope,
                    2 * scan.trlength_T);
      os << buf;
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    es << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    if (msg.find("budget") != std::string::npos || msg.find("attempts") != std::string::npos ||
        msg.find("not found") != std::string::npos)
      es << "budget exhausted: " << msg << "\n";
    else
      es << "error: " << msg << "\n";
    return 1;
  }
  es << "input error: no subcommand\n";
  return 1;
}

}  // namespace ibundle::cli
