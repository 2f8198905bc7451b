#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace moran::cli {

namespace {

std::string number(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

Json points(const std::vector<TracePoint>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) {
    out.push_back({{"label", p.label},
                   {"abscissa", static_cast<double>(p.abscissa)},
                   {"value", static_cast<double>(p.value)},
                   {"exact", exact_or_null(p.exact)}});
  }
  return out;
}

Json phi_json(const PhiValue& v) {
  if (v.exact) return rational_to_string(*v.exact);
  return static_cast<double>(v.value);
}

}  // namespace

Json exact_or_null(const std::optional<mpq_class>& v) {
  return v ? Json(rational_to_string(*v)) : Json(nullptr);
}

Json to_json(const Window& w) { return {{"k", index_to_json(w.k)}, {"n", index_to_json(w.n)}}; }

Json to_json(const DimensionReport& r) {
  Json j;
  j["kind"] = moran::to_string(r.kind);
  j["estimate"] = static_cast<double>(r.estimate);
  j["exact"] = exact_or_null(r.exact);
  j["finite_value"] = r.finite_value ? Json(static_cast<double>(*r.finite_value)) : Json(nullptr);
  j["finite_exact"] = exact_or_null(r.finite_exact);
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  j["witness_index"] = r.witness_index ? index_to_json(*r.witness_index) : Json(nullptr);
  j["caveats"] = r.caveats;
  j["trace_axis"] = r.trace_axis;
  j["direction"] = moran::to_string(r.direction);
  j["trace"] = points(r.trace);
  if (!r.series.empty()) j["series"] = points(r.series);
  return j;
}

Json stage_log(const SynthesisResult& s) {
  Json out = Json::array();
  for (const WordPair& w : s.stages) {
    out.push_back({{"k", w.k},
                   {"n_k", w.n_k ? index_to_json(*w.n_k) : Json("inf")},
                   {"N_k", index_to_json(w.u.length())},
                   {"phi_u", phi_json(phi(w.u, s.params))},
                   {"phi_v", phi_json(phi(w.v, s.params))},
                   {"equality_branch", w.equality_branch}});
  }
  return out;
}

Json to_json(const LemmaReport& r) {
  return {{"k", r.k},
          {"sandwich", r.sandwich},
          {"n_at_least_two", r.n_at_least_two},
          {"prefix_property", r.prefix_property},
          {"rate_literal", r.rate_literal},
          {"rate_corrected", r.rate_corrected}};
}

Json to_json(const Schedule& s) {
  Json rows = Json::array();
  for (const ScheduleBlock& b : s.blocks) {
    rows.push_back({{"star", moran::to_string(b.star)},
                    {"k", b.k},
                    {"M", index_to_json(b.length())},
                    {"first", index_to_json(b.first)},
                    {"last", index_to_json(b.last)}});
  }
  return {{"super_blocks", s.super_blocks}, {"total", index_to_json(s.total())}, {"blocks", rows}};
}

Json to_json(const DensityReport& d) {
  Json ratios = Json::array();
  for (const auto& r : d.ratios) {
    ratios.push_back({{"star", moran::to_string(r.star)},
                      {"k", r.k},
                      {"value", static_cast<double>(r.value)},
                      {"exact", exact_or_null(r.exact)}});
  }
  Json cov = Json::array();
  for (const auto& c : d.coverage) {
    cov.push_back({{"first", index_to_json(c.first)},
                   {"last", index_to_json(c.last)},
                   {"fraction", static_cast<double>(c.fraction)}});
  }
  return {{"ratios", ratios}, {"condition_1prime", d.condition_1prime}, {"coverage", cov}};
}

Json to_json(const Component& c) {
  return {{"star", moran::to_string(c.star)},
          {"target", rational_to_string(c.target)},
          {"zero_branch", c.zero_branch},
          {"period", c.period ? Json(*c.period) : Json(nullptr)}};
}

Json to_json(const EmpiricalExponents& e) {
  auto witness = [](const ExponentWitness& w) {
    return Json{{"path", w.path},
                {"R", rational_to_string(w.big)},
                {"r", rational_to_string(w.small)},
                {"value", static_cast<double>(w.value)}};
  };
  return {{"lower_emp", static_cast<double>(e.lower_emp)},
          {"assouad_emp", static_cast<double>(e.assouad_emp)},
          {"lower_witness", witness(e.lower_witness)},
          {"assouad_witness", witness(e.assouad_witness)}};
}

Json to_json(const AnHeReport& r) {
  return {{"holds", r.holds},
          {"certified_all_n", r.certified_all_n},
          {"checked_through", index_to_json(r.checked_through)},
          {"first_violation", r.first_violation ? index_to_json(*r.first_violation) : Json(nullptr)}};
}

Json to_json(const OrthonormalityCertificate& c) {
  return {{"max_offdiag", static_cast<double>(c.max_offdiag)},
          {"max_diag_deviation", static_cast<double>(c.max_diag_deviation)},
          {"orthonormal", c.orthonormal},
          {"complete", c.complete},
          {"basis", c.basis}};
}

std::string trace_csv(const DimensionReport& r) {
  const bool threshold = r.trace_axis == "N";
  std::string out = threshold ? "N,value\n" : "index,value\n";
  for (const auto& p : r.trace) {
    out += threshold ? number(std::exp2(p.abscissa)) : p.label;
    out += ',' + number(p.value) + '\n';
  }
  return out;
}

}  // namespace moran::cli
