#pragma once

// Canonical JSON rendering of checker reports and run outcomes, shared by
// the CLI and the golden-corpus tests (keys sorted, integers only).

#include <json.hpp>

#include "fwx/check.hpp"
#include "fwx/compile.hpp"
#include "fwx/interp.hpp"

namespace fwx {

inline nlohmann::json diag_json(const Diagnostic& d) {
  return nlohmann::json{
      {"severity", d.severity == Diagnostic::Severity::Error ? "error" : "warning"},
      {"rule_class", tier_name(d.rule_class)},
      {"code", d.code},
      {"message", d.message},
      {"line", d.span.line},
      {"col", d.span.col}};
}

inline nlohmann::json report_json(const ModuleReport& r) {
  nlohmann::json defs = nlohmann::json::array();
  for (const auto& d : r.defs) {
    nlohmann::json jd{{"name", d.name}};
    if (d.judgment) {
      jd["type"] = print_type(d.judgment->type);
      jd["tier"] = tier_name(d.judgment->tier);
    } else {
      jd["type"] = nullptr;
      jd["tier"] = nullptr;
    }
    defs.push_back(std::move(jd));
  }
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : r.diags) diags.push_back(diag_json(d));
  nlohmann::json out{{"defs", defs}, {"diagnostics", diags}, {"tier", tier_name(r.tier())}};
  if (r.main)
    out["type"] = print_type(r.main->type);
  else if (!r.defs.empty() && r.defs.back().judgment)
    out["type"] = print_type(r.defs.back().judgment->type);
  else
    out["type"] = nullptr;
  return out;
}

inline nlohmann::json run_json(const Module& m, int64_t fuel) {
  EnvPtr env;
  detail::Fuel f{fuel};
  for (const auto& def : m.defs) {
    Outcome o = detail::eval(def.expr, env, f);
    if (!o.is_value()) {
      if (o.k == Outcome::K::Failure)
        return nlohmann::json{{"failure", failure_name(o.label)}};
      return nlohmann::json{{"timeout", fuel}};
    }
    env = env_bind(env, def.name, o.v);
  }
  if (!m.main) return nullptr;
  Outcome o = detail::eval(m.main, env, f);
  switch (o.k) {
    case Outcome::K::Value: return nlohmann::json{{"value", print_value(o.v)}};
    case Outcome::K::Failure:
      return nlohmann::json{{"failure", failure_name(o.label)}};
    case Outcome::K::Timeout: return nlohmann::json{{"timeout", fuel}};
  }
  return nullptr;
}

}  // namespace fwx
