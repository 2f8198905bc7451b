#include "moran/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "moran/error.hpp"
#include "moran/joint_view.hpp"
#include "moran/window_search.hpp"
#include "output.hpp"

#ifndef MORAN_VERSION
#define MORAN_VERSION "0.0.0"
#endif

namespace moran::cli {

const char* version() { return MORAN_VERSION; }

namespace {

struct Config {
  std::string command;
  std::string spec_path;
  std::string inline_json;
  std::optional<std::string> depth;
  std::optional<std::string> threshold;
  int level = 2;
  std::string targets;
  std::string gamma;
  std::uint64_t beta_cap = 64;
  int super_blocks = 4;
  std::uint64_t seed = 20240611;
  std::string out_path;
  std::string format = "json";
  std::string report = "assouad";
  std::optional<std::string> tail_begin;
  std::size_t samples = 50;
  std::string min_gap = "4";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json envelope(const Config& c) {
  Json j;
  j["tool"] = "moran";
  j["tool_version"] = version();
  j["command"] = c.command;
  j["seed"] = c.seed;
  return j;
}

MoranSpec load_spec(const Config& c) {
  if (c.spec_path.empty() == c.inline_json.empty()) throw UsageError("give exactly one of --spec and --inline");
  std::string text = c.inline_json;
  if (!c.spec_path.empty()) {
    std::ifstream in(c.spec_path);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read " + c.spec_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  // Accept our own output envelopes so that design | dims round-trips.
  if (j.is_object() && j.contains("result") && j["result"].is_object() && j["result"].contains("spec")) {
    j = j["result"]["spec"];
  }
  return moran_from_json(j);
}

Index parse_index(const std::string& s, const char* what) {
  try {
    return parse_int128(s);
  } catch (const Error&) {
    throw UsageError(std::string("bad ") + what + ": " + s);
  }
}

Index depth_or(const Config& c, const MoranSpec& spec, Index fallback) {
  if (c.depth) return parse_index(*c.depth, "--depth");
  if (const auto h = spec.horizon()) return std::min(*h, fallback < 0 ? *h : fallback);
  return fallback < 0 ? Index{1024} : fallback;
}

// "N" or "a^e"
Threshold parse_threshold(const std::string& s) {
  const auto caret = s.find('^');
  try {
    if (caret == std::string::npos) return Threshold::integer(std::stoull(s));
    return Threshold::power_of(std::stoull(s.substr(0, caret)), parse_int128(s.substr(caret + 1)));
  } catch (const std::exception&) {
    throw UsageError("bad --threshold: " + s);
  }
}

// 2^16, or sqrt(lambda([1, depth])) when that is smaller.
Threshold default_threshold(const MoranSpec& spec, Index depth) {
  const Threshold n = Threshold::power_of(2, 16);
  const Threshold root{spec.b.prefix_log(depth), 2};
  return compare(root, n) < 0 ? root : n;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

struct Emitted {
  std::string text;
  int code = 0;
};

Emitted as_json(Json j, int code = 0) { return {j.dump(2) + "\n", code}; }

struct Dims {
  DimensionReport assouad, lower;
  std::optional<DimensionReport> hausdorff, packing;
  std::optional<std::string> hp_error;
  Threshold threshold;
};

Dims all_dims(const MoranSpec& spec, Index depth, const Threshold& n, std::optional<Index> tail) {
  Dims d{assouad_estimate(spec, depth, n), lower_estimate(spec, depth, n), {}, {}, {}, n};
  try {
    auto [h, p] = hausdorff_packing_estimate(spec, depth, tail);
    d.hausdorff = std::move(h);
    d.packing = std::move(p);
  } catch (const Error& e) {
    d.hp_error = e.what();
  }
  return d;
}

Emitted cmd_dims(const Config& c) {
  const MoranSpec spec = load_spec(c);
  const Index depth = depth_or(c, spec, -1);
  const Threshold n = c.threshold ? parse_threshold(*c.threshold) : default_threshold(spec, depth);
  std::optional<Index> tail;
  if (c.tail_begin) tail = parse_index(*c.tail_begin, "--tail-begin");
  const Dims d = all_dims(spec, depth, n, tail);
  if (c.format == "csv") {
    const DimensionReport* r = c.report == "assouad" ? &d.assouad
                               : c.report == "lower" ? &d.lower
                               : c.report == "hausdorff" && d.hausdorff ? &*d.hausdorff
                               : c.report == "packing" && d.packing ? &*d.packing
                                                                    : nullptr;
    if (!r) throw UsageError("no " + c.report + " report for this spec");
    return {trace_csv(*r), 0};
  }
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(spec);
  Json res;
  res["depth"] = index_to_json(depth);
  res["threshold"] = n.to_string();
  res["assouad"] = to_json(d.assouad);
  res["lower"] = to_json(d.lower);
  res["hausdorff"] = d.hausdorff ? to_json(*d.hausdorff) : Json(nullptr);
  res["packing"] = d.packing ? to_json(*d.packing) : Json(nullptr);
  if (d.hp_error) res["hausdorff_packing_error"] = *d.hp_error;
  j["result"] = res;
  return as_json(j);
}

Emitted cmd_design(const Config& c) {
  if (c.gamma.empty()) throw UsageError("--gamma is required");
  const mpq_class gamma = parse_rational(c.gamma);
  const Index length = c.depth ? parse_index(*c.depth, "--depth") : Index{10000};
  Json res;
  std::optional<MoranSpec> spec;
  std::optional<SynthesisResult> syn;
  if (gamma == 0) {
    spec = zero_dimension_spec();
    res["branch"] = "zero";
  } else {
    const SynthParams p = pick_params(gamma, c.beta_cap);
    syn = limit_sequence(p, gamma, length);
    spec = moran_from_sequence(*syn);
    res["params"] = {{"alpha0", p.alpha0}, {"alpha1", p.alpha1}, {"beta", p.beta}};
    res["stages"] = stage_log(*syn);
    Json lemmas = Json::array();
    for (const auto& l : check_lemmas(*syn)) lemmas.push_back(to_json(l));
    res["lemmas"] = lemmas;
    res["period"] = syn->period ? Json(syn->period->to_string(syn->period->length())) : Json(nullptr);
    res["prefix"] = syn->prefix.to_string(64);
  }
  if (c.format == "csv") {
    if (!syn) throw UsageError("the zero branch has no symbolic sequence to export");
    std::string out = "index,value\n";
    Index i = 1;
    for (const Run& r : syn->prefix.runs(std::min<Index>(length, 100000))) {
      for (Index t = 0; t < r.count; ++t, ++i) out += to_string(i) + ',' + std::to_string(r.value) + '\n';
    }
    return {out, 0};
  }
  res["gamma"] = rational_to_string(gamma);
  res["spec"] = to_json(*spec);
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(*spec);
  j["result"] = res;
  return as_json(j);
}

Targets parse_targets(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw UsageError("--targets needs four values tL,tH,tP,tA");
  Targets t{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2]), parse_rational(parts[3])};
  t.validate();
  return t;
}

Emitted cmd_interleave(const Config& c) {
  if (c.targets.empty()) throw UsageError("--targets is required");
  const Targets t = parse_targets(c.targets);
  const SynthParams p = shared_params(t, c.beta_cap);
  const InterleaveResult r = interleave(t, p, c.super_blocks);
  Json res;
  res["targets"] = {rational_to_string(t.lower), rational_to_string(t.hausdorff), rational_to_string(t.packing),
                    rational_to_string(t.assouad)};
  res["params"] = {{"alpha0", p.alpha0}, {"alpha1", p.alpha1}, {"beta", p.beta}};
  Json comps = Json::array();
  for (const auto& comp : r.components) comps.push_back(to_json(comp));
  res["components"] = comps;
  res["schedule"] = to_json(r.schedule);
  res["schedule_invariants"] = schedule_invariants_hold(r.schedule);
  res["tail_begin"] = index_to_json(r.tail_begin);
  res["diagnostics"] = to_json(density_diagnostics(r));
  res["spec"] = to_json(r.spec);
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(r.spec);
  j["result"] = res;
  return as_json(j);
}

Emitted cmd_oracle(const Config& c) {
  const MoranSpec spec = load_spec(c);
  const Index rank = depth_or(c, spec, 12);
  const Index gap = parse_index(c.min_gap, "--min-gap");
  const auto scales = prefix_scale_grid(spec, rank, gap);
  const auto paths = random_paths(spec, rank, c.samples, c.seed);
  const EmpiricalExponents e = empirical_exponents(spec, rank, scales, paths);
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(spec);
  Json res = to_json(e);
  res["rank"] = index_to_json(rank);
  res["samples"] = c.samples;
  res["min_gap"] = index_to_json(gap);
  res["scale_pairs"] = scales.size();
  j["result"] = res;
  return as_json(j);
}

Emitted cmd_spectral(const Config& c) {
  const MoranSpec spec = load_spec(c);
  const Index depth = c.depth ? parse_index(*c.depth, "--depth") : Index{64};
  const AnHeReport cond = anhe_condition(spec, depth);
  Json res;
  res["condition"] = to_json(cond);
  res["level"] = c.level;
  if (cond.first_violation && *cond.first_violation <= c.level) {
    res["max_offdiag"] = nullptr;
    res["basis"] = false;
    res["reason"] = "q_n does not divide b_n at n = " + to_string(*cond.first_violation);
  } else {
    const CandidateSpectrum lambda = candidate_spectrum(spec, c.level);
    const LevelMeasure nu = level_measure(spec, c.level);
    const OrthonormalityCertificate cert = orthonormality_check(lambda.elements, nu);
    res["max_offdiag"] = static_cast<double>(cert.max_offdiag);
    res["basis"] = cert.basis;
    res["certificate"] = to_json(cert);
    res["atoms"] = nu.atoms.size();
    res["spectrum_size"] = lambda.elements.size();
    Json mult = Json::array();
    for (const auto& m : lambda.multipliers) mult.push_back(m.get_str());
    res["multipliers"] = mult;
    if (lambda.elements.size() <= 64) {
      Json el = Json::array();
      for (const auto& e : lambda.elements) el.push_back(rational_to_string(e));
      res["spectrum"] = el;
    }
  }
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(spec);
  j["result"] = res;
  return as_json(j);
}

bool nonincreasing(const std::vector<TracePoint>& t) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i].exact && t[i - 1].exact ? *t[i].exact > *t[i - 1].exact : t[i].value > t[i - 1].value) return false;
  }
  return true;
}

bool nondecreasing(const std::vector<TracePoint>& t) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i].exact && t[i - 1].exact ? *t[i].exact < *t[i - 1].exact : t[i].value < t[i - 1].value) return false;
  }
  return true;
}

Emitted cmd_validate(const Config& c) {
  const MoranSpec spec = load_spec(c);
  const Index depth = depth_or(c, spec, 200);
  const Threshold n = c.threshold ? parse_threshold(*c.threshold) : default_threshold(spec, depth);
  Json checks = Json::array();
  bool ok = true;
  auto check = [&](const std::string& name, const std::function<std::optional<bool>(Json&)>& body) {
    Json detail = Json::object();
    std::optional<bool> pass;
    try {
      pass = body(detail);
    } catch (const Error& e) {
      detail["error"] = e.what();
      pass = false;
    }
    if (pass) ok = ok && *pass;
    checks.push_back({{"name", name}, {"status", pass ? (*pass ? "pass" : "fail") : "skipped"}, {"detail", detail}});
  };
  check("json_round_trip", [&](Json&) -> std::optional<bool> {
    return spec_hash(moran_from_json(moran::to_json(spec))) == spec_hash(spec);
  });
  const Dims d = all_dims(spec, depth, n, std::nullopt);
  check("assouad_trace_nonincreasing", [&](Json&) -> std::optional<bool> { return nonincreasing(d.assouad.trace); });
  check("lower_trace_nondecreasing", [&](Json&) -> std::optional<bool> { return nondecreasing(d.lower.trace); });
  check("dimension_sandwich", [&](Json& det) -> std::optional<bool> {
    if (!d.hausdorff) return std::nullopt;
    det["lower"] = static_cast<double>(d.lower.estimate);
    det["hausdorff"] = static_cast<double>(d.hausdorff->estimate);
    det["packing"] = static_cast<double>(d.packing->estimate);
    det["assouad"] = static_cast<double>(d.assouad.estimate);
    return d.lower.estimate <= d.hausdorff->estimate + 0.05L && d.packing->estimate <= d.assouad.estimate + 0.05L;
  });
  check("compressed_matches_exhaustive", [&](Json& det) -> std::optional<bool> {
    if (depth > 400) return std::nullopt;
    const JointView view(spec, depth);
    const auto ladder = threshold_ladder(n, 16);
    SearchOptions compressed;
    compressed.exhaustive_limit = 0;
    for (WindowFamily f : {WindowFamily::assouad, WindowFamily::lower}) {
      const auto a = search_windows(view, f, ladder);
      const auto b = search_windows(view, f, ladder, compressed);
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& x = a.per_threshold[i];
        const auto& y = b.per_threshold[i];
        if (x.feasible != y.feasible) return false;
        if (x.feasible && (!(x.witness == y.witness) || compare_ratios(x.num, x.den, y.num, y.den) != 0)) {
          det["threshold"] = ladder[i].to_string();
          return false;
        }
      }
    }
    return true;
  });
  check("oracle_bracket", [&](Json& det) -> std::optional<bool> {
    if (!spec.q_bounded() || !spec.b_bounded()) return std::nullopt;
    const Index rank = 12;
    if (const auto h = spec.horizon(); h && *h < rank) return std::nullopt;
    const Index gap = parse_index(c.min_gap, "--min-gap");
    det["min_gap"] = index_to_json(gap);
    const auto e = empirical_exponents(spec, rank, prefix_scale_grid(spec, rank, gap),
                                       random_paths(spec, rank, c.samples, c.seed));
    const Threshold small = Threshold::power_of(2, 6);
    const auto lo = lower_estimate(spec, rank, small), as = assouad_estimate(spec, rank, small);
    det["lower_emp"] = static_cast<double>(e.lower_emp);
    det["assouad_emp"] = static_cast<double>(e.assouad_emp);
    det["lower_estimate"] = static_cast<double>(lo.estimate);
    det["assouad_estimate"] = static_cast<double>(as.estimate);
    // formulas bracket the sampled exponents: lower_est <= lower_emp, assouad_emp <= assouad_est
    return lo.estimate - 0.05L <= e.lower_emp && e.assouad_emp <= as.estimate + 0.05L;
  });
  Json j = envelope(c);
  j["spec_hash"] = spec_hash(spec);
  j["result"] = {{"depth", index_to_json(depth)},
                 {"threshold", n.to_string()},
                 {"anhe", to_json(anhe_condition(spec, depth))},
                 {"checks", checks},
                 {"passed", ok}};
  return as_json(j, ok ? 0 : 3);
}

void write(const Config& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + c.out_path);
  f << text;
}

Json error_json(const Config& c, const std::string& code, const std::string& message) {
  Json j = envelope(c);
  j["error"] = {{"code", code}, {"message", message}};
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out) {
  Config c;
  CLI::App app{"Moran measure dimension toolkit", "moran"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--spec", c.spec_path, "MoranSpec JSON file")->envname("MORAN_SPEC");
  app.add_option("--inline", c.inline_json, "MoranSpec JSON text")->envname("MORAN_INLINE");
  app.add_option("--depth", c.depth, "depth, rank or prefix length")->envname("MORAN_DEPTH");
  app.add_option("--threshold", c.threshold, "window threshold N (integer or a^e)")->envname("MORAN_THRESHOLD");
  app.add_option("--level", c.level, "spectral level")->envname("MORAN_LEVEL")->check(CLI::PositiveNumber);
  app.add_option("--targets", c.targets, "tL,tH,tP,tA")->envname("MORAN_TARGETS");
  app.add_option("--gamma", c.gamma, "target dimension p/q")->envname("MORAN_GAMMA");
  app.add_option("--beta-cap", c.beta_cap, "largest beta searched")->envname("MORAN_BETA_CAP");
  app.add_option("--super-blocks", c.super_blocks, "interleaver super-blocks K")
      ->envname("MORAN_SUPER_BLOCKS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "random seed")->envname("MORAN_SEED");
  app.add_option("--out", c.out_path, "output file")->envname("MORAN_OUT");
  app.add_option("--format", c.format, "json or csv")
      ->envname("MORAN_FORMAT")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--report", c.report, "trace exported by dims --format csv")
      ->envname("MORAN_REPORT")
      ->check(CLI::IsMember({"assouad", "lower", "hausdorff", "packing"}));
  app.add_option("--tail-begin", c.tail_begin, "first index of the prefix-ratio window")->envname("MORAN_TAIL_BEGIN");
  app.add_option("--samples", c.samples, "oracle digit paths")->envname("MORAN_SAMPLES");
  app.add_option("--min-gap", c.min_gap, "oracle, validate: least number of b-levels between R and r")
      ->envname("MORAN_MIN_GAP");

  const std::vector<std::pair<const char*, std::function<Emitted(const Config&)>>> commands{
      {"design", cmd_design},   {"interleave", cmd_interleave}, {"dims", cmd_dims},
      {"oracle", cmd_oracle},   {"spectral", cmd_spectral},     {"validate", cmd_validate}};
  const std::vector<std::string> help{
      "synthesize a spec with all four dimensions equal to --gamma",
      "interleave four components to realize --targets",
      "Assouad, lower, Hausdorff and packing estimates with traces",
      "empirical ball-measure exponents",
      "An-He condition and level-n spectrum certificate",
      "cross-module invariant suite"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    app.add_subcommand(commands[i].first, help[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    out << error_json(c, "usage", e.what()).dump(2) << "\n";
    return 1;
  }
  c.command = app.get_subcommands().front()->get_name();
  try {
    if (c.format == "csv" && c.command != "dims" && c.command != "design") {
      throw UsageError("csv output is available for dims and design only");
    }
    for (const auto& [name, fn] : commands) {
      if (c.command != name) continue;
      const Emitted e = fn(c);
      write(c, e.text, out);
      return e.code;
    }
    return 1;
  } catch (const UsageError& e) {
    out << error_json(c, "usage", e.what()).dump(2) << "\n";
    return 1;
  } catch (const Error& e) {
    out << error_json(c, moran::to_string(e.code()), e.what()).dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << error_json(c, "internal", e.what()).dump(2) << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out) {
  std::vector<const char*> argv{"moran"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out);
}

}  // namespace moran::cli
