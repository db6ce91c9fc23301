#pragma once

#include <tmf/solver.hpp>

#include <json.hpp>

namespace tmf {

using Json = nlohmann::json;

// Polytope spec files: {"dim": n, "facets": [{"normal": [...], "offset": "p/q"}]}.
PolytopeSpec polytope_from_json(const Json& j);
Json polytope_to_json(const PolytopeSpec& spec);

Json series_to_json(const NovikovSeries& s);
NovikovSeries series_from_json(const Json& j, int32_t denom, int64_t cutoff_num = kNoCutoff);

Json laurent_to_json(const LaurentElement& x);
Json endmorphism_to_json(const EndMorphism& m);
Json invariants_to_json(const std::vector<Invariant>& table);

std::string basis_label(uint32_t mask);

// Chain files reference the model generators by name:
// factor = "id" | "h0" | "D" | {"terms": [{"coeff": "<series text>",
//           "z": [m_1..m_n], "e": [facet indices]}]}  (left multiplication).
Chain chain_from_json(const Json& j, const DiracPtr& mod);
Json chain_to_json(const Chain& c);

Json polytope_report(const ValidatedPolytope& vp);

}  // namespace tmf
