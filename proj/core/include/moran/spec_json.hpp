#pragma once

#include <string>

#include <gmpxx.h>
#include <json.hpp>

#include "moran/int128.hpp"
#include "moran/sequence.hpp"

namespace moran {

using Json = nlohmann::ordered_json;

/// Integers travel as decimal strings; plain JSON numbers are accepted on input.
Json index_to_json(Index value);
Index index_from_json(const Json& value, const char* field);
std::uint64_t u64_from_json(const Json& value, const char* field);

/// "p/q" (or "p" when the denominator is 1).
std::string rational_to_string(const mpq_class& value);
/// Accepts "p/q", "p", or a decimal such as "0.25" (converted exactly).
mpq_class parse_rational(const std::string& text);

Json to_json(const Segment& segment);
Segment segment_from_json(const Json& json);
Json to_json(const SequenceSpec& spec);
SequenceSpec sequence_from_json(const Json& json);
Json to_json(const MoranSpec& spec);
/// Parses and validates.
MoranSpec moran_from_json(const Json& json);

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string spec_hash(const MoranSpec& spec);

}  // namespace moran
