#include <kmslcm/report.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace kmslcm {

namespace {

using nlohmann::json;

const std::set<std::string> kConfigKeys = {
    "family",        "rank",       "axb_max_prime", "weights",
    "beta",          "class_cutoff", "depth",       "pair_depth",
    "ladder_height", "subset_budget", "node_budget", "tolerance",
    "traces",        "output",     "seed"};

Family family_from_string(const std::string& name) {
  if (name == "free_monoid") return Family::free_monoid;
  if (name == "free_abelian") return Family::free_abelian;
  if (name == "axb") return Family::axb;
  if (name == "c3") return Family::c3;
  if (name == "lamplighter") return Family::lamplighter;
  throw ConfigError("unknown family \"" + name +
                    "\"; run the families subcommand for the built-in list");
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::free_monoid: return "free_monoid";
    case Family::free_abelian: return "free_abelian";
    case Family::axb: return "axb";
    case Family::c3: return "c3";
    case Family::lamplighter: return "lamplighter";
  }
  return "?";
}

Rational rational_from_json(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": expected an integer or a \"p/q\" string");
}

int int_from_json(const json& v, const std::string& where, int lo, int hi) {
  if (!v.is_number_integer())
    throw ConfigError(where + ": expected an integer");
  long x = v.get<long>();
  if (x < lo || x > hi)
    throw ConfigError(where + ": value " + std::to_string(x) +
                      " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return static_cast<int>(x);
}

TraceSpec trace_from_json(const json& t, const std::string& where) {
  if (!t.is_object()) throw ConfigError(where + ": expected an object");
  TraceSpec spec;
  std::set<std::string> allowed = {"type"};
  if (!t.contains("type") || !t["type"].is_string())
    throw ConfigError(where + ": missing string field \"type\"");
  spec.type = t["type"].get<std::string>();
  if (spec.type == "character") {
    allowed.insert("z");
    if (!t.contains("z") || !t["z"].is_array())
      throw ConfigError(where + ": character traces need a \"z\" array");
    const json& z = t["z"];
    auto read_pair = [&](const json& p) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
          !p[1].is_number())
        throw ConfigError(where + ": \"z\" entries must be [re, im] pairs");
      spec.z.emplace_back(p[0].get<double>(), p[1].get<double>());
    };
    if (z.size() == 2 && z[0].is_number() && z[1].is_number())
      spec.z.emplace_back(z[0].get<double>(), z[1].get<double>());
    else
      for (const json& p : z) read_pair(p);
  } else if (spec.type == "fourier") {
    allowed.insert("coeffs");
    if (!t.contains("coeffs") || !t["coeffs"].is_array())
      throw ConfigError(where + ": fourier traces need a \"coeffs\" array");
    for (const json& c : t["coeffs"]) {
      if (!c.is_number())
        throw ConfigError(where + ": \"coeffs\" entries must be numbers");
      spec.coeffs.push_back(c.get<double>());
    }
  } else if (spec.type == "lamp_character") {
    allowed.insert("signs");
    if (!t.contains("signs") || !t["signs"].is_array())
      throw ConfigError(where + ": lamp_character traces need a \"signs\" array");
    for (const json& s : t["signs"]) {
      if (!s.is_number_integer())
        throw ConfigError(where + ": \"signs\" entries must be integers");
      spec.signs.push_back(s.get<int>());
    }
  } else {
    throw ConfigError(where + ": unknown trace type \"" + spec.type + "\"");
  }
  for (const auto& [key, value] : t.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
  return spec;
}

json rational_json(const Rational& r) { return rational_to_string(r); }

json measure_json(const MeasureValue& m) {
  json j;
  j["value"] = format_float(m.value);
  j["exact_path"] = m.exact.has_value();
  if (m.exact) j["exact"] = rational_json(*m.exact);
  return j;
}

json verdict_json(const Monoid& monoid, const CertificateVerdict& v) {
  json j;
  j["pass"] = v.pass;
  j["depth"] = v.depth;
  if (v.counterexample) {
    json c;
    c["s"] = monoid.render(v.counterexample->s);
    c["t"] = monoid.render(v.counterexample->t);
    j["counterexample"] = c;
  }
  return j;
}

json trace_echo(const TraceSpec& spec) {
  json j;
  j["type"] = spec.type;
  if (spec.type == "character") {
    json z = json::array();
    for (const auto& c : spec.z)
      z.push_back({format_float(c.real()), format_float(c.imag())});
    j["z"] = z;
  } else if (spec.type == "fourier") {
    json c = json::array();
    for (double v : spec.coeffs) c.push_back(format_float(v));
    j["coeffs"] = c;
  } else {
    j["signs"] = spec.signs;
  }
  return j;
}

json config_echo(const Config& cfg) {
  json j;
  j["family"] = family_to_string(cfg.descriptor.family);
  if (cfg.descriptor.family == Family::free_monoid ||
      cfg.descriptor.family == Family::free_abelian)
    j["rank"] = cfg.descriptor.rank;
  if (cfg.descriptor.family == Family::axb)
    j["axb_max_prime"] = cfg.descriptor.axb_max_prime;
  json w = json::object();
  for (const auto& [name, value] : cfg.weights) w[name] = rational_json(value);
  j["weights"] = w;
  json betas = json::array();
  for (double b : cfg.beta) betas.push_back(format_float(b));
  j["beta"] = betas;
  j["class_cutoff"] = rational_json(cfg.class_cutoff);
  j["depth"] = cfg.depth;
  j["pair_depth"] = cfg.pair_depth;
  j["ladder_height"] = cfg.ladder_height;
  j["subset_budget"] = cfg.subset_budget;
  j["node_budget"] = cfg.node_budget;
  j["tolerance"] = cfg.tolerance ? json(format_float(*cfg.tolerance)) : json();
  json traces = json::array();
  for (const auto& t : cfg.traces) traces.push_back(trace_echo(t));
  j["traces"] = traces;
  j["output"] = cfg.output ? json(*cfg.output) : json();
  j["seed"] = cfg.seed;
  return j;
}

json base_report(const char* subcommand, const Config& cfg) {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = kLibraryVersion;
  j["subcommand"] = subcommand;
  j["config"] = config_echo(cfg);
  return j;
}

std::uint64_t series_cutoff(const Config& cfg) {
  double c = to_double(cfg.class_cutoff);
  if (c < 1.0) return 1;
  if (c > 1e12) return static_cast<std::uint64_t>(1e12);
  return static_cast<std::uint64_t>(c);
}

json existence_rows(const Scale& scale, const Config& cfg) {
  json rows = json::array();
  for (double beta : cfg.beta) {
    ExistenceResult res =
        existence_check(scale, beta, cfg.class_cutoff, cfg.subset_budget,
                        cfg.node_budget);
    json row;
    row["beta"] = format_float(beta);
    row["cutoff"] = rational_json(cfg.class_cutoff);
    row["max_antichain"] = cfg.subset_budget;
    row["node_budget"] = cfg.node_budget;
    row["nonnegative"] = res.nonnegative;
    row["certificate_partial"] = res.partial;
    row["nodes_visited"] = res.nodes_visited;
    if (res.witness) {
      json w;
      w["base"] = scale.monoid().render(res.witness->base);
      json removed = json::array();
      for (const Element& r : res.witness->removed)
        removed.push_back(scale.monoid().render(r));
      w["removed"] = removed;
      w["value"] = format_float(res.witness_value);
      row["witness"] = w;
    }
    if (beta < 0.0)
      row["note"] =
          "no state exists at a negative inverse temperature: any class "
          "cylinder at scale value n >= 2 would carry mass n^(-beta) > 1, "
          "more than the whole boundary";
    rows.push_back(row);
  }
  return rows;
}

json zeta_rows(const Scale& scale, const Config& cfg) {
  json rows = json::array();
  for (double beta : cfg.beta) {
    ZetaResult res = zeta_partial(scale, beta, cfg.class_cutoff);
    json row;
    row["beta"] = format_float(beta);
    row["cutoff"] = rational_json(cfg.class_cutoff);
    row["class_count"] = res.class_count;
    row["value"] = format_float(res.value);
    row["exact_path"] = res.exact.has_value();
    if (res.exact) row["exact"] = rational_json(*res.exact);
    if (res.closed_form) {
      row["closed_form"] = format_float(*res.closed_form);
      row["closed_form_gap"] = format_float(*res.closed_form - res.value);
    }
    rows.push_back(row);
  }
  return rows;
}

json boundary_rows(const Scale& scale, const Config& cfg) {
  json rows = json::array();
  for (double beta : cfg.beta) {
    MeasureValue res = boundary_residual(scale, beta, cfg.class_cutoff);
    json row;
    row["beta"] = format_float(beta);
    row["level"] = rational_json(cfg.class_cutoff);
    row["residual"] = measure_json(res);
    rows.push_back(row);
  }
  return rows;
}

const char* pair_verdict_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::equal_at_tolerance: return "equal_at_tolerance";
    case PairVerdict::separated: return "separated";
    case PairVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* global_verdict_string(GlobalVerdict v) {
  switch (v) {
    case GlobalVerdict::unique_at_tolerance: return "unique_at_tolerance";
    case GlobalVerdict::not_unique: return "not_unique";
    case GlobalVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

json uniqueness_blocks(const Scale& scale, const Config& cfg) {
  json blocks = json::array();
  for (double beta : cfg.beta) {
    UniquenessReport rep = uniqueness_verdict(
        scale, beta, cfg.pair_depth, cfg.ladder_height, cfg.tolerance);
    json b;
    b["beta"] = format_float(beta);
    b["tolerance"] = format_float(rep.tolerance);
    b["exact_path"] = rep.exact_path;
    b["verdict"] = global_verdict_string(rep.verdict);
    b["certificate_only"] = rep.certificate_only;
    b["note"] = rep.note;
    b["existence_nonnegative"] = rep.existence.nonnegative;
    json pairs = json::array();
    for (const PairReport& pr : rep.pairs) {
      json p;
      p["a"] = scale.monoid().render(pr.a);
      p["b"] = scale.monoid().render(pr.b);
      p["gap"] = format_float(pr.gap);
      p["stabilized"] = pr.stabilized;
      p["verdict"] = pair_verdict_string(pr.verdict);
      json rungs = json::array();
      for (const RungValue& rv : pr.rungs) {
        json r;
        r["param"] = rv.param;
        r["F_size"] = rv.f_size;
        r["T_size"] = rv.t_size;
        r["mu_triv"] = measure_json(rv.mu_triv);
        r["mu_fix"] = measure_json(rv.mu_fix);
        r["mu_triv_atomic"] = measure_json(rv.mu_triv_atomic);
        r["mu_fix_atomic"] = measure_json(rv.mu_fix_atomic);
        rungs.push_back(r);
      }
      p["rungs"] = rungs;
      pairs.push_back(p);
    }
    b["pairs"] = pairs;
    // Seeded structural spot check of the first pair's ladder: sampled join
    // closure and kernel-action invariance of the top rung.
    if (!rep.pairs.empty()) {
      try {
        TruncationLadder ladder =
            default_ladder(scale, rep.pairs.front().a, rep.pairs.front().b,
                           cfg.ladder_height);
        b["ladder_spot_check"] = verify_ladder_rung(
            scale, ladder, cfg.ladder_height - 1, rep.pairs.front().a,
            cfg.seed, 64);
      } catch (const std::invalid_argument&) {
        // no ladder for this family/pair; nothing to check
      }
    }
    blocks.push_back(b);
  }
  return blocks;
}

json gs_json(const Scale& scale, const Config& cfg) {
  GsCheckResult gs = gs_check(scale, cfg.depth,
                              static_cast<std::uint64_t>(series_cutoff(cfg) < 16
                                                             ? series_cutoff(cfg)
                                                             : 16));
  json j;
  j["pass"] = gs.pass;
  j["axioms"] = {gs.axiom[0], gs.axiom[1], gs.axiom[2], gs.axiom[3]};
  if (!gs.detail.empty()) j["detail"] = gs.detail;
  return j;
}

void flatten(const json& v, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [key, value] : v.items())
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (v.is_string()) {
    out.emplace_back(prefix, v.get<std::string>());
  } else {
    out.emplace_back(prefix, v.dump());
  }
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Config parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object())
    throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!kConfigKeys.count(key))
      throw ConfigError("unknown configuration key \"" + key + "\"");
  }
  Config cfg;
  if (!doc.contains("family"))
    throw ConfigError("missing required key \"family\"");
  if (!doc["family"].is_string())
    throw ConfigError("\"family\": expected a string");
  cfg.descriptor.family = family_from_string(doc["family"].get<std::string>());

  const bool ranked = cfg.descriptor.family == Family::free_monoid ||
                      cfg.descriptor.family == Family::free_abelian;
  if (doc.contains("rank")) {
    if (!ranked)
      throw ConfigError("\"rank\" only applies to free_monoid/free_abelian");
    cfg.descriptor.rank = int_from_json(doc["rank"], "\"rank\"", 1, 8);
  }
  if (doc.contains("axb_max_prime")) {
    if (cfg.descriptor.family != Family::axb)
      throw ConfigError("\"axb_max_prime\" only applies to the axb family");
    cfg.descriptor.axb_max_prime =
        int_from_json(doc["axb_max_prime"], "\"axb_max_prime\"", 2, 97);
  }
  if (doc.contains("weights")) {
    if (!doc["weights"].is_object())
      throw ConfigError("\"weights\": expected an object");
    for (const auto& [name, value] : doc["weights"].items())
      cfg.weights[name] =
          rational_from_json(value, "\"weights." + name + "\"");
  }
  if (doc.contains("beta")) {
    if (!doc["beta"].is_array())
      throw ConfigError("\"beta\": expected an array of numbers");
    for (const json& b : doc["beta"]) {
      if (!b.is_number()) throw ConfigError("\"beta\": entries must be numbers");
      cfg.beta.push_back(b.get<double>());
    }
  }
  if (doc.contains("class_cutoff"))
    cfg.class_cutoff = rational_from_json(doc["class_cutoff"], "\"class_cutoff\"");
  if (cfg.class_cutoff < 1)
    throw ConfigError("\"class_cutoff\": must be at least 1");
  if (doc.contains("depth"))
    cfg.depth = int_from_json(doc["depth"], "\"depth\"", 0, 12);
  if (doc.contains("pair_depth"))
    cfg.pair_depth = int_from_json(doc["pair_depth"], "\"pair_depth\"", 0, 16);
  if (doc.contains("ladder_height"))
    cfg.ladder_height =
        int_from_json(doc["ladder_height"], "\"ladder_height\"", 1, 12);
  if (doc.contains("subset_budget"))
    cfg.subset_budget =
        int_from_json(doc["subset_budget"], "\"subset_budget\"", 1, 26);
  if (doc.contains("node_budget")) {
    if (!doc["node_budget"].is_number_unsigned() &&
        !doc["node_budget"].is_number_integer())
      throw ConfigError("\"node_budget\": expected a positive integer");
    long long nb = doc["node_budget"].get<long long>();
    if (nb < 1) throw ConfigError("\"node_budget\": must be positive");
    cfg.node_budget = static_cast<std::uint64_t>(nb);
  }
  if (doc.contains("tolerance")) {
    if (!doc["tolerance"].is_null()) {
      if (!doc["tolerance"].is_number())
        throw ConfigError("\"tolerance\": expected a number or null");
      double t = doc["tolerance"].get<double>();
      if (!(t > 0.0)) throw ConfigError("\"tolerance\": must be positive");
      cfg.tolerance = t;
    }
  }
  if (doc.contains("traces")) {
    if (!doc["traces"].is_array())
      throw ConfigError("\"traces\": expected an array");
    for (std::size_t i = 0; i < doc["traces"].size(); ++i)
      cfg.traces.push_back(trace_from_json(
          doc["traces"][i], "\"traces[" + std::to_string(i) + "]\""));
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string())
      throw ConfigError("\"output\": expected a string path");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
      throw ConfigError("\"seed\": expected an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Scale build_scale(const Config& config) {
  try {
    return Scale(Monoid(config.descriptor), config.weights);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid scale configuration: ") + e.what());
  }
}

Trace build_trace(const TraceSpec& spec) {
  try {
    if (spec.type == "character") return Trace::character(spec.z);
    if (spec.type == "fourier") return Trace::fourier(spec.coeffs);
    if (spec.type == "lamp_character") return Trace::lamp_character(spec.signs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid trace: ") + e.what());
  }
  throw ConfigError("unknown trace type \"" + spec.type + "\"");
}

json report_families() {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = kLibraryVersion;
  j["subcommand"] = "families";
  json fams = json::array();
  struct Entry {
    Family family;
    const char* element_form;
    const char* kernel;
  };
  const Entry entries[] = {
      {Family::free_monoid, "word over letters a..",
       "trivial unless some letters have weight 1"},
      {Family::free_abelian, "[e1,..,ek] exponent vector",
       "coordinates with weight 1"},
      {Family::axb, "(c,n): translation c, multiplier n",
       "translations (c,1)"},
      {Family::c3, "(a,b,k): exponents a,b and twist count k",
       "twists (0,0,k)"},
      {Family::lamplighter, "(poly-hex,x,y): lamp polynomial and two shifts",
       "lamp polynomials (g,0,0)"},
  };
  for (const Entry& e : entries) {
    MonoidDescriptor d;
    d.family = e.family;
    Monoid m(d);
    json f;
    f["name"] = family_to_string(e.family);
    f["element_form"] = e.element_form;
    f["kernel"] = e.kernel;
    json gens = json::array();
    for (const auto& g : m.generator_names()) gens.push_back(g);
    f["generators"] = gens;
    Scale natural(Monoid(d), {});
    json w = json::object();
    for (const auto& [name, value] : natural.weights())
      w[name] = rational_json(value);
    f["natural_weights"] = w;
    fams.push_back(f);
  }
  j["families"] = fams;
  return j;
}

json report_existence(const Config& config) {
  Scale scale = build_scale(config);
  json j = base_report("existence", config);
  j["existence"] = existence_rows(scale, config);
  return j;
}

json report_zeta(const Config& config) {
  Scale scale = build_scale(config);
  json j = base_report("zeta", config);
  j["zeta"] = zeta_rows(scale, config);
  return j;
}

json report_boundary(const Config& config) {
  Scale scale = build_scale(config);
  json j = base_report("boundary", config);
  j["boundary"] = boundary_rows(scale, config);
  return j;
}

json report_uniqueness(const Config& config) {
  Scale scale = build_scale(config);
  json j = base_report("uniqueness", config);
  j["uniqueness"] = uniqueness_blocks(scale, config);
  return j;
}

json report_kms_eval(const Config& config, const std::string& s_text,
                     const std::string& t_text) {
  Scale scale = build_scale(config);
  Element s, t;
  try {
    s = scale.monoid().parse(s_text);
    t = scale.monoid().parse(t_text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid element: ") + e.what());
  }
  if (config.traces.empty())
    throw ConfigError("kms-eval needs at least one trace in \"traces\"");
  json j = base_report("kms-eval", config);
  j["s"] = scale.monoid().render(s);
  j["t"] = scale.monoid().render(t);
  std::uint64_t cutoff = series_cutoff(config);
  json rows = json::array();
  for (std::size_t i = 0; i < config.traces.size(); ++i) {
    Trace trace = build_trace(config.traces[i]);
    for (double beta : config.beta) {
      PhiResult res = phi_finite_type(scale, beta, trace, s, t, cutoff);
      json row;
      row["trace"] = trace.describe();
      row["beta"] = format_float(beta);
      row["cutoff"] = cutoff;
      row["value_re"] = format_float(res.value.real());
      row["value_im"] = format_float(res.value.imag());
      row["tail_bound"] = format_float(res.tail_bound);
      row["tail_heuristic"] = res.tail_heuristic;
      row["contributing_classes"] = res.contributing;
      row["truncated"] = res.truncated;
      rows.push_back(row);
    }
    std::complex<double> inf = phi_kms_infty(scale, trace, s, t);
    json row;
    row["trace"] = trace.describe();
    row["beta"] = "infinity";
    row["value_re"] = format_float(inf.real());
    row["value_im"] = format_float(inf.imag());
    rows.push_back(row);
  }
  j["values"] = rows;
  return j;
}

json report_analyze(const Config& config) {
  Scale scale = build_scale(config);
  json j = base_report("analyze", config);
  json structure;
  structure["kernel_directed"] =
      verdict_json(scale.monoid(), scale.check_kernel_directed(config.depth));
  structure["admissible"] =
      verdict_json(scale.monoid(), scale.check_admissibility(config.depth));
  structure["scale_axioms"] = gs_json(scale, config);
  structure["quotient_supported"] = scale.quotient_supported();
  j["structure"] = structure;
  j["existence"] = existence_rows(scale, config);
  j["zeta"] = zeta_rows(scale, config);
  j["boundary"] = boundary_rows(scale, config);
  j["uniqueness"] = uniqueness_blocks(scale, config);
  return j;
}

std::string render_report(const nlohmann::json& report, bool csv) {
  if (!csv) return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::string out = "path,value\n";
  for (const auto& [path, value] : rows)
    out += csv_escape(path) + "," + csv_escape(value) + "\n";
  return out;
}

}  // namespace kmslcm
