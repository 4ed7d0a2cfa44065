// fwx: typecheck, infer, run, and probe FW-Elixir programs.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "fwx/check.hpp"
#include "fwx/compile.hpp"
#include "fwx/fuzz.hpp"
#include "fwx/guards.hpp"
#include "fwx/interp.hpp"
#include "fwx/json_out.hpp"
#include "fwx/parser.hpp"
#include "fwx/type_parse.hpp"

using json = nlohmann::json;
using namespace fwx;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int emit_syntax_error(const std::string& msg, int line, int col, bool as_json) {
  if (as_json) {
    json out{{"error", "syntax"}, {"message", msg}, {"line", line}, {"col", col}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cerr << "syntax error at " << line << ":" << col << ": " << msg << "\n";
  }
  return 2;
}

int cmd_check(const std::string& path, const std::string& mode, bool as_json) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  }
  Module m = lower_module(fm);
  ModuleReport r = check_module(m, mode != "static");
  if (as_json) {
    std::cout << report_json(r).dump(2) << "\n";
  } else {
    for (const auto& d : r.defs)
      std::cout << d.name << " : "
                << (d.judgment ? print_type(d.judgment->type) : std::string("<error>"))
                << "\n";
    if (r.main) std::cout << "main : " << print_type(r.main->type) << "\n";
    for (const auto& d : r.diags)
      std::cout << (d.severity == Diagnostic::Severity::Error ? "error" : "warning")
                << "[" << d.code << "] " << d.span.line << ":" << d.span.col << " "
                << d.message << "\n";
  }
  return r.ok ? 0 : 1;
}

int cmd_run(const std::string& path, int64_t fuel, bool as_json) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  }
  Module m = lower_module(fm);
  json out = run_json(m, fuel);
  if (out.is_null()) {
    std::cout << json{{"error", "no expression to run"}}.dump(2) << "\n";
    return 1;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_infer(const std::string& path, bool as_json) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  }
  Module m = lower_module(fm);
  ModuleReport r = check_module(m, true);
  json defs = json::array();
  for (const auto& d : r.defs)
    defs.push_back(json{{"name", d.name},
                        {"type", d.judgment ? json(print_type(d.judgment->type)) : json()}});
  json out{{"defs", defs}};
  if (r.main) out["type"] = print_type(r.main->type);
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& d : r.defs)
      std::cout << d.name << " : "
                << (d.judgment ? print_type(d.judgment->type) : std::string("<error>"))
                << "\n";
  }
  return r.ok ? 0 : 1;
}

int cmd_sub(const std::string& query) {
  struct Rel {
    const char* op;
    const char* name;
  };
  // longer operators first so "~<=" is not split at "<="
  Rel rels[] = {{"~<=", "precision"}, {"<~", "consistent"}, {"<=", "subtype"}};
  for (const auto& rel : rels) {
    auto pos = query.find(rel.op);
    if (pos == std::string::npos) continue;
    std::string lhs = query.substr(0, pos);
    std::string rhs = query.substr(pos + std::string(rel.op).size());
    Type a = parse_type(lhs);
    Type b = parse_type(rhs);
    bool holds = false;
    if (std::string(rel.name) == "subtype") holds = subtype(a, b);
    if (std::string(rel.name) == "precision") holds = precision(a, b);
    if (std::string(rel.name) == "consistent") holds = consistent_subtype(a, b);
    json out{{"relation", rel.name},
             {"lhs", print_type(a)},
             {"rhs", print_type(b)},
             {"holds", holds}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cerr << "query must contain one of: <= (subtype), ~<= (precision), <~ (consistent)\n";
  return 2;
}

json ast_json_pattern(const PatternPtr& p) {
  switch (p->k) {
    case Pattern::K::Int: return json{{"kind", "int"}, {"value", p->ival}};
    case Pattern::K::Atom: return json{{"kind", "atom"}, {"value", atom_name(p->aval)}};
    case Pattern::K::Var: return json{{"kind", "var"}, {"name", p->var}};
    case Pattern::K::Tuple: {
      json kids = json::array();
      for (const auto& e : p->elems) kids.push_back(ast_json_pattern(e));
      return json{{"kind", "tuple"}, {"children", kids}};
    }
    case Pattern::K::And:
      return json{{"kind", "and"},
                  {"children", json::array({ast_json_pattern(p->left),
                                            ast_json_pattern(p->right)})}};
  }
  return nullptr;
}

json ast_json_expr(const FwExprPtr& e) {
  json out{{"span", json::array({e->span.line, e->span.col})}};
  json kids = json::array();
  switch (e->k) {
    case FwExpr::K::Int:
      out["kind"] = "int";
      out["value"] = e->ival;
      break;
    case FwExpr::K::Atom:
      out["kind"] = "atom";
      out["value"] = atom_name(e->aval);
      break;
    case FwExpr::K::Var:
      out["kind"] = "var";
      out["name"] = e->var;
      break;
    case FwExpr::K::Tuple:
      out["kind"] = "tuple";
      for (const auto& x : e->elems) kids.push_back(ast_json_expr(x));
      break;
    case FwExpr::K::Elem:
      out["kind"] = "elem";
      kids.push_back(ast_json_expr(e->a));
      kids.push_back(ast_json_expr(e->b));
      break;
    case FwExpr::K::Size:
      out["kind"] = "tuple_size";
      kids.push_back(ast_json_expr(e->a));
      break;
    case FwExpr::K::Plus:
      out["kind"] = "plus";
      kids.push_back(ast_json_expr(e->a));
      kids.push_back(ast_json_expr(e->b));
      break;
    case FwExpr::K::App:
      out["kind"] = "app";
      kids.push_back(ast_json_expr(e->fn));
      for (const auto& x : e->elems) kids.push_back(ast_json_expr(x));
      break;
    case FwExpr::K::Fn:
    case FwExpr::K::Case: {
      out["kind"] = e->k == FwExpr::K::Fn ? "fn" : "case";
      if (e->k == FwExpr::K::Case) kids.push_back(ast_json_expr(e->a));
      json clauses = json::array();
      for (const auto& c : e->clauses) {
        json pats = json::array();
        for (const auto& p : c.pats) pats.push_back(ast_json_pattern(p));
        json cl{{"patterns", pats}, {"body", ast_json_expr(c.body)}};
        cl["guard"] = c.guard ? json(fw_guard_pretty(c.guard)) : json();
        clauses.push_back(std::move(cl));
      }
      out["clauses"] = clauses;
      break;
    }
  }
  if (!kids.empty()) out["children"] = kids;
  return out;
}

int cmd_ast(const std::string& path) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, true);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, true);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, true);
  }
  json defs = json::array();
  for (const auto& d : fm.defs) {
    json clauses = json::array();
    for (const auto& c : d.clauses) {
      json pats = json::array();
      for (const auto& p : c.pats) pats.push_back(ast_json_pattern(p));
      json cl{{"patterns", pats}, {"body", ast_json_expr(c.body)}};
      cl["guard"] = c.guard ? json(fw_guard_pretty(c.guard)) : json();
      clauses.push_back(std::move(cl));
    }
    json jd{{"kind", "def"},
            {"name", d.name},
            {"span", json::array({d.span.line, d.span.col})},
            {"clauses", clauses}};
    if (d.iface) jd["annotation"] = fw_iface_pretty(*d.iface);
    defs.push_back(std::move(jd));
  }
  json out{{"defs", defs}};
  if (fm.main) out["main"] = ast_json_expr(fm.main);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_fmt(const std::string& path) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, false);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, false);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, false);
  }
  std::cout << fw_module_pretty(fm);
  return 0;
}

int cmd_guard(const std::string& path, bool as_json) {
  FwModule fm;
  try {
    fm = parse_fw_module(read_file(path));
  } catch (const ParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const LexError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  } catch (const TypeParseError& e) {
    return emit_syntax_error(e.what(), e.span.line, e.span.col, as_json);
  }
  Module m = lower_module(fm);
  auto unwrap = [](ExprPtr t) {
    while (t && t->k == Expr::K::Lam) t = t->body;
    return t;
  };
  ExprPtr target = unwrap(m.main);
  if ((!target || (target->k != Expr::K::PatLam && target->k != Expr::K::PatCase)) &&
      !m.defs.empty())
    target = unwrap(m.defs.back().expr);
  if (!target || (target->k != Expr::K::PatLam && target->k != Expr::K::PatCase)) {
    std::cerr << "guard: the file must define a function or case expression\n";
    return 1;
  }
  std::vector<std::pair<PatternPtr, GuardPtr>> branches;
  size_t arity = 1;
  if (target->k == Expr::K::PatLam) {
    arity = target->clauses.front().pats.size();
    for (const auto& cl : target->clauses) {
      PatternPtr p = arity == 1 ? cl.pats[0] : Pattern::mk_tuple(cl.pats);
      branches.emplace_back(p, cl.guard);
    }
  } else {
    for (const auto& cl : target->clauses) branches.emplace_back(cl.pats[0], cl.guard);
  }
  StaticType scrut = arity == 1
                         ? st_any()
                         : st_tuple_of(std::vector<StaticType>(arity, st_any()), false);
  auto analysis = analyze_branches(TEnv{}, scrut, branches, nullptr);
  json out_branches = json::array();
  for (const auto& b : analysis) {
    json cases = json::array();
    for (const auto& a : b.accepted)
      cases.push_back(json{{"type", print_static(simplified(a.type))}, {"exact", a.exact}});
    auto s = accepted_summaries(b.accepted);
    out_branches.push_back(json{{"cases", cases},
                                {"input", print_static(simplified(b.input))},
                                {"possibly", print_static(simplified(s.possibly))},
                                {"surely", print_static(simplified(s.surely))}});
  }
  std::cout << json{{"branches", out_branches}}.dump(2) << "\n";
  return 0;
}

json fuzz_json(const FuzzReport& r) {
  json vs = json::array();
  for (const auto& v : r.violations)
    vs.push_back(json{{"program", v.program}, {"expected", v.expected}, {"observed", v.observed}});
  return json{{"seed", r.seed},
              {"generated", r.generated},
              {"discarded", r.discarded},
              {"tiers",
               {{"static", r.checked_static},
                {"omega", r.checked_omega},
                {"gradual", r.checked_gradual}}},
              {"timeouts", r.timeouts},
              {"violations", vs},
              {"wall_ms", r.wall_ms}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fwx: a type checker and interpreter for FW-Elixir"};
  app.require_subcommand(1);

  std::string path, mode = "gradual", query;
  bool as_json = false;
  int64_t fuel = 10000;
  uint64_t seed = 0;
  int count = 1000;

  auto* check = app.add_subcommand("check", "typecheck a .fwx file");
  check->add_option("file", path)->required();
  check->add_option("--mode", mode)->check(CLI::IsMember({"static", "gradual"}));
  check->add_flag("--json", as_json);

  auto* run = app.add_subcommand("run", "evaluate a .fwx file");
  run->add_option("file", path)->required();
  run->add_option("--fuel", fuel);

  auto* infer = app.add_subcommand("infer", "print inferred definition types");
  infer->add_option("file", path)->required();
  infer->add_flag("--json", as_json);

  auto* sub = app.add_subcommand("sub", "decide a type relation: \"T1 <= T2\", \"T1 ~<= T2\", \"T1 <~ T2\"");
  sub->add_option("query", query)->required();

  auto* guard = app.add_subcommand("guard", "dump guard analysis for the file's function");
  guard->add_option("file", path)->required();

  auto* ast = app.add_subcommand("ast", "dump the surface syntax tree as JSON");
  ast->add_option("file", path)->required();

  auto* fmt = app.add_subcommand("fmt", "pretty-print the file in canonical form");
  fmt->add_option("file", path)->required();

  auto* fuzz = app.add_subcommand("fuzz", "soundness fuzzing against the evaluator");
  fuzz->add_option("--seed", seed);
  fuzz->add_option("--count", count);
  fuzz->add_option("--fuel", fuel);

  auto* oracle = app.add_subcommand("oracle-phi", "cross-check the arrow decision procedure");
  oracle->add_option("--seed", seed);
  oracle->add_option("--count", count);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(path, mode, as_json);
    if (*run) return cmd_run(path, fuel, true);
    if (*infer) return cmd_infer(path, as_json);
    if (*sub) return cmd_sub(query);
    if (*guard) return cmd_guard(path, true);
    if (*ast) return cmd_ast(path);
    if (*fmt) return cmd_fmt(path);
    if (*fuzz) {
      FuzzReport r = fuzz_soundness(seed, count, fuel);
      std::cout << fuzz_json(r).dump(2) << "\n";
      return r.pass() ? 0 : 1;
    }
    if (*oracle) {
      FuzzReport r = oracle_phi(seed, count);
      std::cout << fuzz_json(r).dump(2) << "\n";
      return r.pass() ? 0 : 1;
    }
  } catch (const TypeParseError& e) {
    std::cerr << "type syntax error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
