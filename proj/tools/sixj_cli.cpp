#include "sixj/identities.hpp"
#include "sixj/repcat.hpp"
#include "sixj/statesum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace sixj;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_ints(const std::string& s, std::size_t count) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw UsageError("bad integer " + item);
    } catch (const std::logic_error&) {
      throw UsageError("bad integer " + item);
    }
  }
  if (out.size() != count) throw UsageError("expected " + std::to_string(count) + " comma-separated integers: " + s);
  return out;
}

json poly_json(const LPoly& f) {
  json terms = json::array();
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    json t{{"coeff", it->second.to_string()}};
    for (int v = 1; v <= 3; ++v) t[var_name(v)] = it->first.e[v];
    terms.push_back(t);
  }
  return terms;
}

std::string ball_text(const ComplexBall& z) {
  std::ostringstream out;
  out << std::setprecision(17) << z.re().convert_to<double>() << " + " << z.im().convert_to<double>() << "*i +/- "
      << std::setprecision(3) << z.radius().convert_to<double>();
  return out.str();
}

std::string rfunc_text(const RFunc& x) {
  if (auto c = constant_value(x)) return c->to_string();
  if (auto q = x.as_lpoly()) return q->to_string();
  return x.to_string();
}

// --- jpoly ---

int cmd_jpoly(int rp, int i, int j, int k, const std::string& format) {
  const Params p(rp);
  const IndexTriple t{i, j, k};
  const LPoly& f = j_symbol(p, t)->poly;
  if (format == "json")
    std::cout << json{{"triple", {i, j, k}}, {"rp", rp}, {"text", f.to_string()}, {"terms", poly_json(f)}}.dump(1)
              << "\n";
  else
    std::cout << f.to_string() << "\n";
  return kPass;
}

// --- verify ---

int cmd_verify(int rp, const std::string& suites, bool exhaustive, int samples, std::uint64_t seed, int jobs,
               bool allow_large, const std::string& format) {
  SuiteOptions opt;
  opt.exhaustive = exhaustive || samples <= 0;
  opt.samples = samples;
  opt.seed = seed;
  opt.jobs = jobs;
  opt.allow_large = allow_large;
  const std::vector<std::string> names = suites == "all" ? suite_names() : split(suites, ',');
  Report rep;
  try {
    rep = run_suite(Params(rp), names, opt);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (format == "json")
    std::cout << rep.to_json().dump(1) << "\n";
  else
    std::cout << rep.to_text();
  return rep.all_pass() ? kPass : kFail;
}

// --- oracle ---

int cmd_oracle(int rp, const std::string& triple, bool all) {
  const Params p(rp);
  std::vector<IndexTriple> todo;
  if (all) {
    todo = hset_enumerate(p);
  } else {
    const auto v = parse_ints(triple, 3);
    const IndexTriple t{v[0], v[1], v[2]};
    if (!in_h(t, rp)) throw UsageError("triple " + t.to_string() + " is outside H at r' = " + std::to_string(rp));
    todo.push_back(t);
  }
  int equal = 0;
  for (const auto& t : todo) {
    const LPoly a = tetrahedron_oracle(p, t);
    const LPoly& b = j_symbol(p, t)->poly;
    if (a == b) {
      ++equal;
      std::cout << t.to_string() << " equal\n";
    } else {
      std::cout << t.to_string() << " DIFFER\n  oracle: " << a.to_string() << "\n  closed: " << b.to_string() << "\n";
    }
  }
  std::cout << equal << "/" << todo.size() << " equal\n";
  return equal == static_cast<int>(todo.size()) ? kPass : kFail;
}

// --- triangulation commands ---

LoadedTriangulation load_valid(const std::string& path, const Params& p) {
  LoadedTriangulation l = load_triangulation(path, field_for(p.rp));
  const ValidationReport rep = validate(l.tri);
  if (!rep.ok()) throw UsageError(rep.to_text());
  return l;
}

struct TauText {
  std::string homology;
  std::vector<std::pair<std::string, std::string>> classes;
  std::string total;
  long long visited = 0, contributing = 0;
};

TauText tau_text(const Params& p, const Triangulation& tri, Mode mode, int jobs) {
  const Skeleton sk = analyze(tri);
  std::vector<Root> roots = class_roots(tri, sk);
  if (mode == Mode::Perturbed) roots = perturb(sk, roots, p);
  TauOptions opt;
  opt.mode = mode;
  opt.jobs = jobs;
  const TauReport rep = compute_tau(p, tri, roots, opt);
  TauText out{rep.homology, {}, {}, rep.visited, rep.contributing};
  switch (mode) {
    case Mode::Exact:
      for (const auto& [cls, v] : rep.exact) out.classes.emplace_back(cls, v.to_string());
      out.total = rep.exact_total->to_string();
      break;
    case Mode::Numeric:
      for (const auto& [cls, v] : rep.numeric) out.classes.emplace_back(cls, ball_text(v));
      out.total = ball_text(*rep.numeric_total);
      break;
    case Mode::Perturbed:
      for (const auto& [cls, v] : rep.perturbed) out.classes.emplace_back(cls, rfunc_text(v));
      out.total = rfunc_text(*rep.perturbed_total);
      break;
  }
  return out;
}

Mode pick_mode(const LoadedTriangulation& l, const std::string& flag) {
  if (!l.has_coloring) throw UsageError("triangulation carries no coloring");
  return parse_mode(flag.empty() ? l.mode : flag);
}

int cmd_statesum(const std::string& input, int rp, bool total_only, const std::string& mode_flag, int jobs,
                 const std::string& format) {
  const Params p(rp);
  const LoadedTriangulation l = load_valid(input, p);
  const TauText t = tau_text(p, l.tri, pick_mode(l, mode_flag), jobs);
  if (format == "json") {
    json j{{"homology", t.homology}, {"total", t.total}, {"visited", t.visited}, {"contributing", t.contributing}};
    if (!total_only) {
      json classes = json::object();
      for (const auto& [cls, v] : t.classes) classes[cls] = v;
      j["classes"] = classes;
    }
    std::cout << j.dump(1) << "\n";
    return kPass;
  }
  if (!total_only) {
    std::cout << t.homology << "\n";
    for (const auto& [cls, v] : t.classes) std::cout << "class " << cls << ": " << v << "\n";
  }
  std::cout << "total: " << t.total << "\n";
  return kPass;
}

int cmd_homology(const std::string& input, const std::string& format) {
  std::ifstream in(input);
  if (!in) throw UsageError("cannot open " + input);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed file: ") + e.what());
  }
  auto compute = [&]() -> FirstHomology {
    if (j.contains("d1")) return homology_from_json(j);
    const LoadedTriangulation l = triangulation_from_json(j, field_for(1));
    const ValidationReport rep = validate(l.tri);
    if (!rep.ok()) throw UsageError(rep.to_text());
    return dual_homology(l.tri, geometry(l.tri));
  };
  FirstHomology h = [&] {
    try {
      return compute();
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed file: ") + e.what());
    }
  }();
  if (format == "json") {
    json torsion = json::array();
    for (const auto& t : h.torsion()) torsion.push_back(t.str());
    std::cout << json{{"h1", h.to_string()},
                      {"free_rank", h.free_rank()},
                      {"torsion", torsion},
                      {"boundaries_compose_to_zero", h.boundaries_compose_to_zero()}}
                     .dump(1)
              << "\n";
  } else {
    std::cout << h.to_string() << "\n";
  }
  return h.boundaries_compose_to_zero() ? kPass : kFail;
}

Triangulation apply_move(const Triangulation& tri, const std::string& move) {
  const auto colon = move.find(':');
  if (colon == std::string::npos) throw UsageError("move must look like kind:args");
  const std::string kind = move.substr(0, colon), args = move.substr(colon + 1);
  if (kind == "pachner23") return pachner_23(tri, parse_ints(args, 1)[0]);
  if (kind == "pachner32") return pachner_32(tri, parse_ints(args, 1)[0]);
  if (kind == "lune") {
    const auto v = parse_ints(args, 2);
    return lune_remove(tri, v[0], v[1]);
  }
  if (kind == "lune-insert") {
    const auto v = parse_ints(args, 3);
    return lune_insert(tri, v[0], v[1], v[2]);
  }
  throw UsageError("unknown move " + kind);
}

int cmd_moves(const std::string& input, int rp, const std::string& move, bool check_only, const std::string& mode_flag,
              int jobs) {
  const Params p(rp);
  const LoadedTriangulation l = load_valid(input, p);
  const Mode mode = pick_mode(l, mode_flag);
  if (mode == Mode::Numeric) throw UsageError("moves compares exact values; use --mode exact or perturbed");
  Triangulation moved;
  try {
    moved = apply_move(l.tri, move);
  } catch (const DomainError& e) {
    throw UsageError(std::string("move rejected: ") + e.what());
  }
  const ValidationReport rep = validate(moved);
  if (!rep.ok()) throw UsageError("move produced an invalid triangulation\n" + rep.to_text());
  const TauText before = tau_text(p, l.tri, mode, jobs), after = tau_text(p, moved, mode, jobs);
  // class labels are coordinates in each triangulation's own presentation, so compare the multiset of values
  auto values = [](const TauText& t) {
    std::vector<std::string> v;
    for (const auto& c : t.classes) v.push_back(c.second);
    std::sort(v.begin(), v.end());
    return v;
  };
  const bool same = before.total == after.total && values(before) == values(after);
  if (!check_only || !same) {
    std::cout << "move: " << move << " (" << l.tri.size() << " -> " << moved.size() << " tetrahedra)\n";
    std::cout << "before: " << before.total << "\nafter:  " << after.total << "\n";
  }
  std::cout << (same ? "UNCHANGED" : "CHANGED") << "\n";
  return same ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial 6j-symbols, identity checks and the state sum"};
  app.require_subcommand(1);
  std::function<int()> run;

  int rp = 1, i = 0, j = 0, k = 0, samples = 0, jobs = 1;
  std::uint64_t seed = 42;
  bool exhaustive = false, all = false, allow_large = false, graded = false, total = false, check = false;
  std::string format = "text", suites = "all", triple, input, mode, move;
  auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto rp_opt = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--rp", rp, "r' with r = 2r'+1")->check(CLI::Range(1, 12));
    if (required) o->required();
  };
  auto jobs_opt = [&](CLI::App* sub) { sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 256)); };

  auto* jp = app.add_subcommand("jpoly", "Print J_{i,j,k} in canonical form");
  rp_opt(jp, true);
  jp->add_option("--i", i)->required();
  jp->add_option("--j", j)->required();
  jp->add_option("--k", k)->required();
  format_opt(jp);
  jp->callback([&] { run = [&] { return cmd_jpoly(rp, i, j, k, format); }; });

  auto* ve = app.add_subcommand("verify", "Run identity suites");
  rp_opt(ve, true);
  ve->add_option("--suite", suites, "Comma-separated suites or 'all'");
  auto* ex = ve->add_flag("--exhaustive", exhaustive, "Every instance");
  ve->add_option("--samples", samples, "Seeded sample count")->check(CLI::PositiveNumber)->excludes(ex);
  ve->add_option("--seed", seed, "Sampling seed");
  ve->add_flag("--allow-large", allow_large, "Permit r' >= 3");
  jobs_opt(ve);
  format_opt(ve);
  ve->callback([&] {
    run = [&] { return cmd_verify(rp, suites, exhaustive, samples, seed, jobs, allow_large, format); };
  });

  auto* orc = app.add_subcommand("oracle", "Compare closed forms with the module-calculus evaluation");
  rp_opt(orc, true);
  auto* tr = orc->add_option("--triple", triple, "I,J,K");
  auto* al = orc->add_flag("--all", all, "Every triple in H");
  tr->excludes(al);
  orc->callback([&] {
    if (triple.empty() && !all) throw CLI::ValidationError("oracle needs --triple or --all");
    run = [&] { return cmd_oracle(rp, triple, all); };
  });

  auto* ss = app.add_subcommand("statesum", "Evaluate tau on a triangulation file");
  ss->add_option("--input", input)->required();
  rp_opt(ss, false);
  auto* gr = ss->add_flag("--graded", graded, "Per h1-class values (default)");
  ss->add_flag("--total", total, "Total only")->excludes(gr);
  ss->add_option("--mode", mode)->check(CLI::IsMember({"exact", "numeric", "perturbed"}));
  jobs_opt(ss);
  format_opt(ss);
  ss->callback([&] { run = [&] { return cmd_statesum(input, rp, total, mode, jobs, format); }; });

  auto* ho = app.add_subcommand("homology", "First homology of a triangulation or chain complex");
  ho->add_option("--input", input)->required();
  format_opt(ho);
  ho->callback([&] { run = [&] { return cmd_homology(input, format); }; });

  auto* mv = app.add_subcommand("moves", "Apply a move and compare tau before and after");
  mv->add_option("--input", input)->required();
  rp_opt(mv, false);
  mv->add_option("--move", move, "pachner23:F | pachner32:E | lune:A,B | lune-insert:T,F,G")->required();
  mv->add_flag("--check-invariance", check, "Print only the verdict");
  mv->add_option("--mode", mode)->check(CLI::IsMember({"exact", "perturbed"}));
  jobs_opt(mv);
  mv->callback([&] { run = [&] { return cmd_moves(input, rp, move, check, mode, jobs); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
