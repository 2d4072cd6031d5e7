#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "digitprime/bitconstraint.hpp"
#include "digitprime/characters.hpp"
#include "digitprime/circle.hpp"
#include "digitprime/spectra.hpp"

namespace digitprime {

using nlohmann::json;

inline void to_json(json& j, const DigitConstraint& c) {
  j = json{{"text", format_constraint(c)},
           {"n", c.n},
           {"positions", c.positions},
           {"assignments", c.assignments},
           {"r", c.r()},
           {"rho", c.rho()}};
}

inline void to_json(json& j, const LemmaReport& r) {
  j = json{{"lemma", r.lemma},
           {"n", r.n},
           {"rho", r.rho},
           {"computed", r.computed},
           {"bound", r.bound},
           {"C", r.C},
           {"min_constant", r.min_constant},
           {"pass", r.pass},
           {"flags", r.flags}};
  json params = json::object();
  if (r.Q) params["Q"] = r.Q;
  if (r.q) params["q"] = r.q;
  if (r.lemma == 4) params["a"] = r.a;
  if (r.gridsize) params["gridsize"] = r.gridsize;
  j["params"] = params;
}

inline void to_json(json& j, const DirichletCharacter& chi) {
  j = json{{"q", chi.modulus()},
           {"conductor", chi.conductor()},
           {"exponent_vector", chi.exponents()},
           {"primitive", chi.primitive()}};
}

inline void to_json(json& j, const TwistReport& r) {
  j = json{{"identity", r.identity}, {"q", r.q},
           {"q1", r.q1},             {"q2", r.q2},
           {"k", r.k},               {"vanishing_case", r.vanishing_case},
           {"max_discrepancy", r.max_discrepancy}};
}

inline void to_json(json& j, const VinogradovSample& s) {
  j = json{{"alpha", s.alpha}, {"a", s.a},         {"q", s.q},
           {"S_abs", s.s_abs}, {"bound", s.bound}, {"ratio", s.ratio}};
}

inline void to_json(json& j, const VinogradovReport& r) {
  j = json{{"N", r.N},
           {"B", r.B},
           {"seed", r.seed},
           {"samples", r.samples},
           {"max_ratio", r.max_ratio},
           {"median_ratio", r.median_ratio}};
}

inline void to_json(json& j, const AssumptionAReport& r) {
  j = json{{"q0", r.q0},         {"count", r.count}, {"expected", r.expected},
           {"actual", r.actual}, {"kappa", r.kappa}, {"bound", r.bound},
           {"pass", r.pass}};
}

inline void to_json(json& j, const PipelineReport& r) {
  j = json{{"n", r.n},
           {"r", r.r},
           {"constraint", r.constraint},
           {"B", r.B},
           {"direct", r.direct},
           {"main_term", r.main_term},
           {"residual", r.residual},
           {"rel_residual", r.rel_residual},
           {"kappa_sum", r.kappa_sum},
           {"major_arc_measure", r.major_arc_measure},
           {"arcs_disjoint", r.arcs_disjoint},
           {"b_window_empty", r.b_window_empty},
           {"b_clamped", r.b_clamped}};
}

inline void to_json(json& j, const TheoremReport& r) {
  j = json{{"n", r.n},
           {"r", r.r},
           {"constraint", r.constraint},
           {"exact_count", r.exact_count},
           {"asymptotic", r.asymptotic},
           {"ratio", r.ratio}};
}

// Fixed CSV column order shared by single runs and sweeps. Fields that a
// given run did not produce are left empty.
inline std::string csv_header() {
  return "n,r,A,B,direct,main,residual,rel_residual,kappa_sum,"
         "exact_count,asymptotic,ratio";
}

struct CsvRow {
  const PipelineReport* pipeline = nullptr;
  const TheoremReport* theorem = nullptr;
};

inline std::string csv_row(const CsvRow& row) {
  std::ostringstream os;
  os.precision(12);
  const PipelineReport* p = row.pipeline;
  const TheoremReport* t = row.theorem;
  int n = p ? p->n : t->n;
  int r = p ? p->r : t->r;
  const std::string& a = p ? p->constraint : t->constraint;
  os << n << ',' << r << ',' << '"' << a << '"' << ',';
  if (p)
    os << p->B << ',' << p->direct << ',' << p->main_term << ',' << p->residual << ','
       << p->rel_residual << ',' << p->kappa_sum << ',';
  else
    os << ",,,,,,";
  if (t)
    os << t->exact_count << ',' << t->asymptotic << ',' << t->ratio;
  else
    os << ",,";
  return os.str();
}

}  // namespace digitprime
