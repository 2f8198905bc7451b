#include "moran/spec_json.hpp"

#include <cctype>
#include <cstdio>

#include "moran/error.hpp"

namespace moran {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const Json& field(const Json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) bad(std::string("missing field '") + name + "'");
  return obj.at(name);
}

Json runs_to_json(const std::vector<Run>& runs) {
  Json arr = Json::array();
  for (const Run& r : runs) arr.push_back({{"value", std::to_string(r.value)}, {"count", index_to_json(r.count)}});
  return arr;
}

std::vector<Run> runs_from_json(const Json& arr) {
  if (!arr.is_array()) bad("runs must be an array");
  std::vector<Run> out;
  for (const Json& r : arr) {
    if (r.is_array() && r.size() == 2) {
      out.push_back({u64_from_json(r[0], "value"), index_from_json(r[1], "count")});
    } else {
      out.push_back({u64_from_json(field(r, "value"), "value"), index_from_json(field(r, "count"), "count")});
    }
  }
  return out;
}

}  // namespace

Json index_to_json(Index value) { return to_string(value); }

Index index_from_json(const Json& value, const char* name) {
  try {
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_number_unsigned()) return static_cast<Index>(value.get<std::uint64_t>());
    if (value.is_string()) return parse_int128(value.get<std::string>());
  } catch (const Error&) {
  }
  bad(std::string("field '") + name + "' must be an integer");
}

std::uint64_t u64_from_json(const Json& value, const char* name) {
  const Index v = index_from_json(value, name);
  if (v < 0 || v > static_cast<Index>(UINT64_MAX)) bad(std::string("field '") + name + "' out of range");
  return static_cast<std::uint64_t>(v);
}

std::string rational_to_string(const mpq_class& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

mpq_class parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  if (text.empty()) bad("empty rational");
  auto digits = [](const std::string& s, std::size_t from) {
    if (from >= s.size()) return false;
    for (std::size_t i = from; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  const std::size_t sign = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  const bool negative = text[0] == '-';
  const std::string body = text.substr(sign);
  mpq_class out;
  if (const auto slash = body.find('/'); slash != std::string::npos) {
    const std::string p = body.substr(0, slash), q = body.substr(slash + 1);
    if (!digits(p, 0) || !digits(q, 0)) bad("malformed rational '" + raw + "'");
    out = mpq_class(mpz_class(p), mpz_class(q));
    if (out.get_den() == 0) bad("zero denominator in '" + raw + "'");
  } else if (const auto dot = body.find('.'); dot != std::string::npos) {
    const std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((!ip.empty() && !digits(ip, 0)) || !digits(fp, 0)) bad("malformed decimal '" + raw + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    out = mpq_class(mpz_class(ip.empty() ? "0" : ip) * den + mpz_class(fp), den);
  } else {
    if (!digits(body, 0)) bad("malformed rational '" + raw + "'");
    out = mpq_class(mpz_class(body));
  }
  out.canonicalize();
  return negative ? mpq_class(-out) : out;
}

Json to_json(const Segment& s) {
  if (s.type() == Segment::Type::power) {
    return {{"type", "power"},
            {"base", std::to_string(s.base())},
            {"first_exponent", index_to_json(s.first_exponent())},
            {"length", index_to_json(s.length())}};
  }
  return {{"type", "pattern"}, {"runs", runs_to_json(s.runs())}, {"length", index_to_json(s.length())}};
}

Segment segment_from_json(const Json& j) {
  const std::string type = field(j, "type").get<std::string>();
  const Index length = j.contains("length") && !j.at("length").is_null() ? index_from_json(j.at("length"), "length") : 0;
  if (type == "power") {
    return Segment::power(u64_from_json(field(j, "base"), "base"),
                          j.contains("first_exponent") ? index_from_json(j.at("first_exponent"), "first_exponent") : 1,
                          length);
  }
  if (type == "pattern") return Segment::pattern(runs_from_json(field(j, "runs")), length);
  bad("unknown segment type '" + type + "'");
}

Json to_json(const SequenceSpec& s) {
  Json out;
  out["kind"] = to_string(s.kind());
  switch (s.kind()) {
    case SequenceKind::constant:
      out["value"] = std::to_string(s.tail()->runs().front().value);
      break;
    case SequenceKind::explicit_list: {
      Json values = Json::array();
      for (const Run& r : s.segments().front().runs()) {
        for (Index i = 0; i < r.count; ++i) values.push_back(std::to_string(r.value));
      }
      out["values"] = values;
      break;
    }
    case SequenceKind::geometric:
      out["base"] = std::to_string(s.tail()->base());
      break;
    case SequenceKind::blocks:
    case SequenceKind::synthesized:
      out["runs"] = s.segments().empty() ? Json::array() : runs_to_json(s.segments().front().runs());
      if (s.tail()) out["cycle"] = runs_to_json(s.tail()->runs());
      if (s.kind() == SequenceKind::synthesized) {
        out["provenance"] = s.provenance().empty() ? Json::object() : Json::parse(s.provenance());
      }
      break;
    case SequenceKind::segments: {
      Json segs = Json::array();
      for (const Segment& seg : s.segments()) segs.push_back(to_json(seg));
      out["segments"] = segs;
      out["tail"] = s.tail() ? to_json(*s.tail()) : Json(nullptr);
      break;
    }
  }
  return out;
}

SequenceSpec sequence_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "constant") return SequenceSpec::constant(u64_from_json(field(j, "value"), "value"));
  if (kind == "geometric") return SequenceSpec::geometric(u64_from_json(field(j, "base"), "base"));
  if (kind == "explicit") {
    std::vector<std::uint64_t> values;
    for (const Json& v : field(j, "values")) values.push_back(u64_from_json(v, "values"));
    return SequenceSpec::explicit_list(values);
  }
  if (kind == "blocks" || kind == "synthesized") {
    std::vector<Run> runs = j.contains("runs") ? runs_from_json(j.at("runs")) : std::vector<Run>{};
    std::vector<Run> cycle = j.contains("cycle") && !j.at("cycle").is_null() ? runs_from_json(j.at("cycle")) : std::vector<Run>{};
    if (kind == "blocks") return SequenceSpec::blocks(std::move(runs), std::move(cycle));
    const std::string prov = j.contains("provenance") ? j.at("provenance").dump() : std::string{};
    return SequenceSpec::synthesized(std::move(runs), std::move(cycle), prov);
  }
  if (kind == "segments") {
    std::vector<Segment> segs;
    for (const Json& s : field(j, "segments")) segs.push_back(segment_from_json(s));
    std::optional<Segment> tail;
    if (j.contains("tail") && !j.at("tail").is_null()) tail = segment_from_json(j.at("tail"));
    return SequenceSpec::from_segments(std::move(segs), std::move(tail));
  }
  bad("unknown sequence kind '" + kind + "'");
}

Json to_json(const MoranSpec& m) {
  Json out;
  out["b"] = to_json(m.b);
  out["q"] = to_json(m.q);
  out["label"] = m.label;
  return out;
}

MoranSpec moran_from_json(const Json& j) {
  if (!j.is_object()) bad("Moran spec must be a JSON object");
  MoranSpec m{sequence_from_json(field(j, "b")), sequence_from_json(field(j, "q")),
              j.contains("label") ? j.at("label").get<std::string>() : std::string{}};
  m.validate();
  return m;
}

std::string spec_hash(const MoranSpec& spec) {
  const std::string text = to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace moran
