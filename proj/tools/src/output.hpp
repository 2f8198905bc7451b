#pragma once

#include <string>

#include "moran/ball_oracle.hpp"
#include "moran/dimension.hpp"
#include "moran/interleaver.hpp"
#include "moran/spec_json.hpp"
#include "moran/spectral.hpp"
#include "moran/synthesizer.hpp"

namespace moran::cli {

Json to_json(const Window& w);
Json to_json(const DimensionReport& report);
Json stage_log(const SynthesisResult& synthesis);
Json to_json(const LemmaReport& r);
Json to_json(const Schedule& schedule);
Json to_json(const DensityReport& report);
Json to_json(const Component& c);
Json to_json(const EmpiricalExponents& e);
Json to_json(const AnHeReport& r);
Json to_json(const OrthonormalityCertificate& c);

/// Rows "abscissa,value" under the header `N,value` (threshold traces) or
/// `index,value` (prefix and window-length traces).
std::string trace_csv(const DimensionReport& report);

/// Numbers that may overflow a double stay exact: rationals as "p/q".
Json exact_or_null(const std::optional<mpq_class>& v);

}  // namespace moran::cli
