#include "abel/cli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "abel/derived.hpp"

namespace abel::cli {

namespace {

// ---------------------------------------------------------------------------------------------
// Config reading

/// Typed access to one JSON object that remembers which keys were consumed, so that
/// misspelled keys are reported instead of silently ignored.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key, double def) {
    if (!take(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long def) {
    if (!take(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    return v.get<long>();
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!take(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  /// Accepts "p/q", integers and decimal numbers; decimals are read as written.
  Rational rational(const std::string& key) {
    if (!take(key)) throw ConfigError(where(key) + " is required");
    const auto& v = obj_.at(key);
    try {
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number()) return parse_rational(v.dump());
    } catch (const std::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
    throw ConfigError(where(key) + " must be a number or a string \"p/q\"");
  }

  Rational rational(const std::string& key, const Rational& def) { return has(key) ? rational(key) : def; }

  std::optional<Section> child(const std::string& key) {
    if (!take(key)) return std::nullopt;
    return Section(obj_.at(key), where(key));
  }

  const json& raw(const std::string& key) {
    if (!take(key)) throw ConfigError(where(key) + " is required");
    return obj_.at(key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  bool take(const std::string& key) {
    if (!obj_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

double number_from(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

std::array<double, 3> triple(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + " must be an array of three numbers");
  return {number_from(v[0], where), number_from(v[1], where), number_from(v[2], where)};
}

FamilySpec read_family(Section s) {
  FamilySpec f;
  const auto kind = s.text("kind", "");
  if (kind == "quad_poly") {
    f.kind = FamilyKind::QuadPoly;
    f.t_A = s.rational("t_A");
    f.t_B = s.rational("t_B");
  } else if (kind == "lin_trig") {
    f.kind = FamilyKind::LinTrig;
    f.a0 = s.number("a0", 0.0);
    f.b0 = s.number("b0", 0.0);
    f.b1 = s.number("b1", 0.0);
    f.b2 = s.number("b2", 1.0);
  } else if (kind == "general_trig") {
    f.kind = FamilyKind::LinTrig;
    const auto a = triple(s.raw("A"), s.where("A"));
    const auto b = triple(s.raw("B"), s.where("B"));
    f.general = GeneralTrig{a[0], a[1], a[2], b[0], b[1], b[2]};
  } else {
    throw ConfigError("family.kind must be one of quad_poly, lin_trig, general_trig");
  }
  s.finish();
  return f;
}

SweepParameter parse_parameter(const std::string& name) {
  if (name == "t_A") return SweepParameter::TA;
  if (name == "t_B") return SweepParameter::TB;
  if (name == "a0") return SweepParameter::A0;
  if (name == "b0") return SweepParameter::B0;
  throw ConfigError("sweep.parameter must be one of t_A, t_B, a0, b0");
}

const char* parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::TA: return "t_A";
    case SweepParameter::TB: return "t_B";
    case SweepParameter::A0: return "a0";
    case SweepParameter::B0: return "b0";
  }
  return "?";
}

// ---------------------------------------------------------------------------------------------
// Formatting

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) return num(*v);
  else if constexpr (std::is_same_v<T, Rational>) return to_string(*v);
  else return json(*v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string verdict_text(Verdict v) {
  std::string s = to_string(v);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
}

// ---------------------------------------------------------------------------------------------
// Evaluation of one family

struct Evaluation {
  AtlasRow row;
  std::optional<ZeroStructure> zeros;
  std::optional<UniquenessPrecheck> uniqueness;
  std::optional<CriteriaReport> criteria;
  std::optional<ExactHopfCoefficients> exact_hopf;
  std::vector<std::string> warnings;
  bool short_circuit = false;
};

CycleSearchOptions search_options(const AnalysisConfig& cfg) {
  auto o = cfg.cycles;
  o.integrator = cfg.integrator;
  o.integrator.keep_trajectory = false;
  return o;
}

Evaluation evaluate(const AnalysisConfig& cfg, const FamilySpec& spec, int index, double value) {
  Evaluation e;
  e.row.index = index;
  e.row.value = value;
  e.row.family = spec;

  std::optional<CoefficientFamily> fam;
  try {
    fam = spec.build();
  } catch (const PreconditionError& err) {
    e.row.status = std::string("precondition: ") + err.what();
    return e;
  }

  try {
    e.zeros = check_C1(*fam);
    e.row.c1 = e.zeros->interleaved ? "true" : "false";
    e.uniqueness = uniqueness_precheck(*fam);
    e.row.uniqueness = to_string(e.uniqueness->verdict);
    e.short_circuit = e.uniqueness->verdict != Uniqueness::Inconclusive;
    if (e.short_circuit) {
      e.row.c2 = e.row.c3 = "skipped";
    } else {
      e.criteria = criteria_report(*fam);
      e.row.c2 = verdict_text(e.criteria->c2.verdict);
      e.row.c3 = verdict_text(e.criteria->c3.verdict);
    }
  } catch (const std::exception& err) {
    e.row.status = std::string("criteria: ") + err.what();
  }

  try {
    e.row.hopf = hopf_coefficients(*fam);
    if (const auto* q = fam->quad()) e.exact_hopf = hopf_coefficients_exact(*q);
    e.row.hopf_origin = std::abs(e.row.hopf->c2) < cfg.flags.hopf_tol && std::abs(e.row.hopf->c3) < cfg.flags.hopf_tol;
  } catch (const std::exception& err) {
    e.warnings.push_back(std::string("Hopf coefficients: ") + err.what());
  }

  try {
    const auto search = find_closed_solutions(*fam, search_options(cfg));
    e.row.cycles = search.cycles;
    e.row.x_max = search.x_max;
    e.warnings.insert(e.warnings.end(), search.warnings.begin(), search.warnings.end());
    if (!search.cycles.empty()) {
      if (search.cycles.front().x_star < cfg.flags.origin_ratio * search.x_max) e.row.hopf_origin = true;
      if (search.cycles.back().x_star > cfg.flags.infinity_ratio * search.x_max) e.row.hopf_infinity = true;
    }
  } catch (const PreconditionError& err) {
    e.row.status = std::string("precondition: ") + err.what();
  } catch (const std::exception& err) {
    e.row.status = std::string("numerical: ") + err.what();
  }

  e.row.bound_violation = fam->kind() == FamilyKind::QuadPoly && e.row.N() > 2;
  return e;
}

FamilySpec family_at(const AnalysisConfig& cfg, int i) {
  const auto& s = *cfg.sweep;
  FamilySpec f = cfg.family;
  const Rational v = s.exact_value(i);
  switch (s.parameter) {
    case SweepParameter::TA: f.t_A = v; break;
    case SweepParameter::TB: f.t_B = v; break;
    case SweepParameter::A0: f.a0 = to_double(v); break;
    case SweepParameter::B0: f.b0 = to_double(v); break;
  }
  return f;
}

InfinityReport infinity_report(const AnalysisConfig& cfg, const LinTrig& fam) {
  return infinity_analysis(fam, cfg.infinity);
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Config

CoefficientFamily FamilySpec::build() const {
  if (kind == FamilyKind::QuadPoly) return QuadPoly(t_A, t_B);
  if (general) {
    const auto n = normalize(*general);
    if (!n.family) throw PreconditionError("trigonometric pair has no canonical form: " + n.note);
    return *n.family;
  }
  return LinTrig(a0, b0, b1, b2);
}

json FamilySpec::to_json() const {
  json j;
  if (kind == FamilyKind::QuadPoly) {
    j["kind"] = "quad_poly";
    j["t_A"] = to_string(t_A);
    j["t_B"] = to_string(t_B);
  } else if (general) {
    j["kind"] = "general_trig";
    j["A"] = {general->a1, general->a2, general->a3};
    j["B"] = {general->b1, general->b2, general->b3};
  } else {
    j["kind"] = "lin_trig";
    j["a0"] = a0;
    j["b0"] = b0;
    j["b1"] = b1;
    j["b2"] = b2;
  }
  return j;
}

Rational SweepRange::exact_value(int i) const {
  if (steps == 1) return lo;
  return lo + (hi - lo) * make_rational(i, steps - 1);
}

MonotoneParameter SweepRange::monotone() const {
  switch (parameter) {
    case SweepParameter::TA: return MonotoneParameter::NegTA;
    case SweepParameter::TB: return MonotoneParameter::NegTB;
    case SweepParameter::A0: return MonotoneParameter::A0;
    case SweepParameter::B0: return MonotoneParameter::B0;
  }
  return MonotoneParameter::NegTA;
}

double SweepRange::lambda_of(double v) const {
  return parameter == SweepParameter::TA || parameter == SweepParameter::TB ? -v : v;
}

AnalysisConfig AnalysisConfig::from_json(const json& doc) {
  AnalysisConfig c;
  Section root(doc, "");
  if (root.has("schema_version") && root.integer("schema_version", kSchemaVersion) != kSchemaVersion)
    throw ConfigError("unsupported schema_version");
  {
    auto fam = root.child("family");
    if (!fam) throw ConfigError("family is required");
    c.family = read_family(*fam);
  }
  if (auto s = root.child("integrator")) {
    c.integrator.rel_tol = s->number("rel_tol", c.integrator.rel_tol);
    c.integrator.abs_tol = s->number("abs_tol", c.integrator.abs_tol);
    c.integrator.x_blowup = s->number("x_blowup", c.integrator.x_blowup);
    c.integrator.max_steps = s->integer("max_steps", c.integrator.max_steps);
    s->finish();
  }
  if (auto s = root.child("cycles")) {
    c.cycles.n_grid = static_cast<int>(s->integer("n_grid", c.cycles.n_grid));
    c.cycles.x_min_ratio = s->number("x_min_ratio", c.cycles.x_min_ratio);
    c.cycles.semistable_band = s->number("semistable_band", c.cycles.semistable_band);
    c.cycles.uxx_confirm = s->number("uxx_confirm", c.cycles.uxx_confirm);
    c.cycles.tangency_tol = s->number("tangency_tol", c.cycles.tangency_tol);
    c.cycles.bisect_width = s->number("bisect_width", c.cycles.bisect_width);
    c.cycles.noise_factor = s->number("noise_factor", c.cycles.noise_factor);
    s->finish();
  }
  if (auto s = root.child("sweep")) {
    SweepRange r;
    r.parameter = parse_parameter(s->text("parameter", ""));
    r.lo = s->rational("lo");
    r.hi = s->rational("hi", r.lo);
    r.steps = static_cast<int>(s->integer("steps", 1));
    s->finish();
    c.sweep = r;
  }
  if (auto s = root.child("curves")) {
    c.curves.samples = static_cast<int>(s->integer("samples", c.curves.samples));
    c.curves.x_lo = s->number("x_lo", c.curves.x_lo);
    c.curves.x_hi = s->number("x_hi", c.curves.x_hi);
    c.curves.x_count = static_cast<int>(s->integer("x_count", c.curves.x_count));
    if (s->has("fold_x")) {
      const auto& v = s->raw("fold_x");
      if (!v.is_array() || v.size() != 2) throw ConfigError("curves.fold_x must be [lo, hi]");
      c.curves.fold_x = std::pair{number_from(v[0], "curves.fold_x"), number_from(v[1], "curves.fold_x")};
    }
    s->finish();
  }
  if (auto s = root.child("infinity")) {
    auto& o = c.infinity;
    o.launch_offset = s->number("launch_offset", o.launch_offset);
    o.match_tol = s->number("match_tol", o.match_tol);
    o.y_escape = s->number("y_escape", o.y_escape);
    o.decay_target = s->number("decay_target", o.decay_target);
    o.decay_switch = s->number("decay_switch", o.decay_switch);
    o.decay_direct_max = s->integer("decay_direct_max", o.decay_direct_max);
    if (auto scan = s->child("connection_scan")) {
      ScanOptions so;
      so.b0_lo = scan->number("b0_lo", so.b0_lo);
      so.b0_hi = scan->number("b0_hi", so.b0_hi);
      so.steps = static_cast<int>(scan->integer("steps", so.steps));
      scan->finish();
      c.connection_scan = so;
    }
    s->finish();
  }
  if (auto s = root.child("flags")) {
    c.flags.hopf_tol = s->number("hopf_tol", c.flags.hopf_tol);
    c.flags.origin_ratio = s->number("origin_ratio", c.flags.origin_ratio);
    c.flags.infinity_ratio = s->number("infinity_ratio", c.flags.infinity_ratio);
    s->finish();
  }
  if (auto s = root.child("outputs")) {
    auto& o = c.outputs;
    o.report = s->text("report", o.report);
    o.atlas_csv = s->text("atlas_csv", o.atlas_csv);
    o.atlas_json = s->text("atlas_json", o.atlas_json);
    o.infinity = s->text("infinity", o.infinity);
    o.manifolds = s->text("manifolds", o.manifolds);
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

AnalysisConfig AnalysisConfig::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

void AnalysisConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  try {
    integrator.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("integrator: ") + e.what());
  }
  positive(cycles.x_min_ratio, "cycles.x_min_ratio");
  positive(cycles.semistable_band, "cycles.semistable_band");
  positive(cycles.uxx_confirm, "cycles.uxx_confirm");
  positive(cycles.tangency_tol, "cycles.tangency_tol");
  positive(cycles.bisect_width, "cycles.bisect_width");
  positive(cycles.noise_factor, "cycles.noise_factor");
  if (cycles.n_grid < 16) throw ConfigError("cycles.n_grid must be at least 16");
  if (sweep) {
    if (sweep->steps < 1) throw ConfigError("sweep.steps must be at least 1");
    if (sweep->hi < sweep->lo) throw ConfigError("sweep range is empty (hi < lo)");
    if (sweep->steps > 1 && sweep->hi == sweep->lo) throw ConfigError("sweep range is empty (hi = lo with steps > 1)");
    const bool quad_param = sweep->parameter == SweepParameter::TA || sweep->parameter == SweepParameter::TB;
    if (quad_param != (family.kind == FamilyKind::QuadPoly))
      throw ConfigError(std::string("sweep.parameter ") + parameter_name(sweep->parameter) +
                        " does not belong to the configured family");
    if (!quad_param && family.general) throw ConfigError("sweeps in a0 or b0 need a lin_trig family");
  }
  if (curves.samples < 3) throw ConfigError("curves.samples must be at least 3");
  if (curves.x_count < 2) throw ConfigError("curves.x_count must be at least 2");
  positive(curves.x_lo, "curves.x_lo");
  if (!(curves.x_hi > curves.x_lo)) throw ConfigError("curves x range is empty");
  if (curves.fold_x && !(curves.fold_x->first > 0 && curves.fold_x->second > curves.fold_x->first))
    throw ConfigError("curves.fold_x range is empty");
  positive(infinity.launch_offset, "infinity.launch_offset");
  positive(infinity.match_tol, "infinity.match_tol");
  positive(infinity.y_escape, "infinity.y_escape");
  positive(infinity.decay_target, "infinity.decay_target");
  positive(infinity.decay_switch, "infinity.decay_switch");
  if (infinity.decay_direct_max < 1) throw ConfigError("infinity.decay_direct_max must be at least 1");
  if (connection_scan) {
    if (connection_scan->steps < 2) throw ConfigError("infinity.connection_scan.steps must be at least 2");
    if (!(connection_scan->b0_hi > connection_scan->b0_lo)) throw ConfigError("connection scan range is empty");
  }
  positive(flags.hopf_tol, "flags.hopf_tol");
  positive(flags.origin_ratio, "flags.origin_ratio");
  positive(flags.infinity_ratio, "flags.infinity_ratio");
}

json AnalysisConfig::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["family"] = family.to_json();
  j["integrator"] = {{"rel_tol", integrator.rel_tol},
                     {"abs_tol", integrator.abs_tol},
                     {"x_blowup", integrator.x_blowup},
                     {"max_steps", integrator.max_steps}};
  j["cycles"] = {{"n_grid", cycles.n_grid},
                 {"x_min_ratio", cycles.x_min_ratio},
                 {"semistable_band", cycles.semistable_band},
                 {"uxx_confirm", cycles.uxx_confirm},
                 {"tangency_tol", cycles.tangency_tol},
                 {"bisect_width", cycles.bisect_width},
                 {"noise_factor", cycles.noise_factor}};
  if (sweep)
    j["sweep"] = {{"parameter", parameter_name(sweep->parameter)},
                  {"lo", to_string(sweep->lo)},
                  {"hi", to_string(sweep->hi)},
                  {"steps", sweep->steps}};
  j["curves"] = {{"samples", curves.samples},
                 {"x_lo", curves.x_lo},
                 {"x_hi", curves.x_hi},
                 {"x_count", curves.x_count}};
  if (curves.fold_x) j["curves"]["fold_x"] = {curves.fold_x->first, curves.fold_x->second};
  j["infinity"] = {{"launch_offset", infinity.launch_offset},
                   {"match_tol", infinity.match_tol},
                   {"y_escape", infinity.y_escape},
                   {"decay_target", infinity.decay_target},
                   {"decay_switch", infinity.decay_switch},
                   {"decay_direct_max", infinity.decay_direct_max}};
  if (connection_scan)
    j["infinity"]["connection_scan"] = {
        {"b0_lo", connection_scan->b0_lo}, {"b0_hi", connection_scan->b0_hi}, {"steps", connection_scan->steps}};
  j["flags"] = {{"hopf_tol", flags.hopf_tol},
                {"origin_ratio", flags.origin_ratio},
                {"infinity_ratio", flags.infinity_ratio}};
  j["outputs"] = {{"report", outputs.report},
                  {"atlas_csv", outputs.atlas_csv},
                  {"atlas_json", outputs.atlas_json},
                  {"infinity", outputs.infinity},
                  {"manifolds", outputs.manifolds}};
  return j;
}

// ---------------------------------------------------------------------------------------------
// Serialization

json to_json(const CycleRecord& c) {
  return {{"x_star", num(c.x_star)},
          {"multiplier", num(c.multiplier)},
          {"uxx", num(c.uxx)},
          {"classification", to_string(c.classification)},
          {"refinement_width", num(c.refinement_width)},
          {"residual", num(c.residual)},
          {"double_confirmed", c.double_confirmed}};
}

json to_json(const ZeroStructure& z) {
  auto zeros = [](const std::vector<ZeroInfo>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"location", num(e.location)}, {"simple", e.simple}});
    return a;
  };
  return {{"zeros_A", zeros(z.zeros_A)},
          {"zeros_B", zeros(z.zeros_B)},
          {"interleaved", z.interleaved},
          {"t_A", opt(z.t_A)},
          {"t_B1", opt(z.t_B1)},
          {"t_B2", opt(z.t_B2)},
          {"exact_t_A", opt(z.exact_t_A)},
          {"exact_t_B1", opt(z.exact_t_B1)},
          {"exact_t_B2", opt(z.exact_t_B2)},
          {"orientation", z.orientation},
          {"diagnostic", z.diagnostic}};
}

json to_json(const UniquenessPrecheck& u) {
  return {{"verdict", to_string(u.verdict)},
          {"combination_discriminant", opt(u.combination_discriminant)},
          {"exact_combination_discriminant", opt(u.exact_combination_discriminant)},
          {"reason", u.reason}};
}

json to_json(const CriteriaReport& r) {
  json roots = json::array();
  for (const auto& q : r.c3.Q_roots)
    roots.push_back({{"t", num(q.t)},
                     {"width", num(q.width)},
                     {"sign_A", q.sign_A},
                     {"sign_B", q.sign_B},
                     {"sign_cross", q.sign_cross},
                     {"sign_P", q.sign_P},
                     {"positive_v_root", q.positive_v_root},
                     {"x_root", opt(q.x_root)}});
  return {{"c1", to_json(r.c1)},
          {"c2",
           {{"verdict", verdict_text(r.c2.verdict)},
            {"method", to_string(r.c2.method)},
            {"P_zero_count_J1", opt(r.c2.P_zero_count_J1)},
            {"P_zero_count_J2", opt(r.c2.P_zero_count_J2)},
            {"notes", r.c2.notes}}},
          {"c3",
           {{"verdict", verdict_text(r.c3.verdict)},
            {"method", to_string(r.c3.method)},
            {"v_t0_negative", r.c3.v_t0_negative},
            {"v_0x_negative", r.c3.v_0x_negative},
            {"v_Tx_negative", r.c3.v_Tx_negative},
            {"Q_roots", roots},
            {"notes", r.c3.notes}}},
          {"notes", r.notes}};
}

json to_json(const SemistabilityVerdict& v) {
  return {{"cycle", to_json(v.cycle)},
          {"t1", num(v.t1)},
          {"t0", num(v.t0)},
          {"t2", num(v.t2)},
          {"construction_case", v.construction_case},
          {"alpha", num(v.alpha)},
          {"beta", num(v.beta)},
          {"integral", num(v.integral)},
          {"integral_error", num(v.integral_error)},
          {"integral_sign", v.integral_sign},
          {"uxx_sign", v.uxx_sign},
          {"orientation", v.orientation},
          {"c2_direct", v.c2_direct},
          {"c3_direct", v.c3_direct},
          {"fg_positive_part", num(v.fg_positive_part)},
          {"consistent", v.consistent}};
}

json to_json(const HopfCoefficients& h) { return {{"c2", num(h.c2)}, {"c3", num(h.c3)}, {"c4", num(h.c4)}}; }

json to_json(const InfinityReport& r) {
  json eq = json::array();
  for (const auto& e : r.equilibria)
    eq.push_back({{"t", num(e.t)}, {"type", to_string(e.type)}, {"trace", num(e.trace)}, {"det", num(e.det)}});
  auto branch = [](const ManifoldBranch& b) {
    return json{{"y_at_section", opt(b.y_at_section)},
                {"unbounded", b.unbounded},
                {"samples", b.samples.size()},
                {"note", b.note}};
  };
  json decay = nullptr;
  if (r.decay)
    decay = {{"x_start", num(r.decay->x_start)},
             {"periods_direct", r.decay->periods_direct},
             {"periods_accelerated", num(r.decay->periods_accelerated)},
             {"total_periods", num(r.decay->total_periods())},
             {"x_switch", num(r.decay->x_switch)},
             {"target", num(r.decay->target)},
             {"reached", r.decay->reached}};
  json rm = json::array();
  for (const auto& [x, u] : r.return_map) rm.push_back({num(x), num(u)});
  return {{"equilibria", eq},
          {"lambda_minus", num(r.lambda_minus)},
          {"lambda_plus", num(r.lambda_plus)},
          {"lambda_minus_check", num(r.lambda_minus_check)},
          {"lambda_plus_check", num(r.lambda_plus_check)},
          {"unstable", branch(r.unstable)},
          {"stable", branch(r.stable)},
          {"connection", r.connection},
          {"mismatch", opt(r.mismatch)},
          {"homoclinic_stability_sign", opt(r.homoclinic_stability_sign)},
          {"decay", decay},
          {"return_map", rm},
          {"notes", r.notes}};
}

json AtlasRow::to_json() const {
  json cyc = json::array();
  for (const auto& c : cycles)
    cyc.push_back({{"x_star", num(c.x_star)},
                   {"multiplier", num(c.multiplier)},
                   {"classification", to_string(c.classification)}});
  return {{"index", index},
          {"value", num(value)},
          {"family", family.to_json()},
          {"status", status},
          {"N", N()},
          {"cycles", cyc},
          {"x_max", num(x_max)},
          {"c1", c1},
          {"c2", c2},
          {"c3", c3},
          {"uniqueness", uniqueness},
          {"hopf", hopf ? cli::to_json(*hopf) : json(nullptr)},
          {"hopf_origin", hopf_origin},
          {"hopf_infinity", hopf_infinity},
          {"bound_violation", bound_violation}};
}

// ---------------------------------------------------------------------------------------------
// Commands

AtlasRow evaluate_row(const AnalysisConfig& cfg, const FamilySpec& family, int index, double value) {
  try {
    return evaluate(cfg, family, index, value).row;
  } catch (const std::exception& err) {
    AtlasRow r;
    r.index = index;
    r.value = value;
    r.family = family;
    r.status = std::string("error: ") + err.what();
    return r;
  }
}

json run_analyze(const AnalysisConfig& cfg) {
  const auto fam = cfg.family.build();
  const auto e = evaluate(cfg, cfg.family, 0, 0.0);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "analyze";
  report["config"] = cfg.to_json();
  report["family"] = cfg.family.to_json();
  report["family"]["description"] = fam.describe();
  report["status"] = e.row.status;
  report["zero_structure"] = e.zeros ? to_json(*e.zeros) : json(nullptr);
  report["uniqueness"] = e.uniqueness ? to_json(*e.uniqueness) : json(nullptr);
  report["short_circuit"] = e.short_circuit;
  if (e.criteria)
    report["criteria"] = to_json(*e.criteria);
  else if (e.short_circuit)
    report["criteria"] = {{"skipped", "at most one closed solution: " + e.uniqueness->reason}};
  else
    report["criteria"] = nullptr;

  json records = json::array();
  for (const auto& c : e.row.cycles) records.push_back(to_json(c));
  report["cycles"] = {{"x_max", num(e.row.x_max)}, {"count", e.row.N()}, {"records", records}, {"warnings", e.warnings}};

  json hopf = e.row.hopf ? to_json(*e.row.hopf) : json(nullptr);
  if (e.exact_hopf)
    hopf["exact"] = {{"c2", to_string(e.exact_hopf->c2)},
                     {"c3", to_string(e.exact_hopf->c3)},
                     {"c4", to_string(e.exact_hopf->c4)}};
  report["hopf"] = hopf;

  json semi = json::array();
  for (const auto& c : e.row.cycles) {
    if (c.classification != CycleClass::SemistableCandidate) continue;
    try {
      semi.push_back(to_json(semistability_verdict(fam, c)));
    } catch (const std::exception& err) {
      semi.push_back({{"cycle", to_json(c)}, {"error", err.what()}});
    }
  }
  report["semistability"] = semi;
  report["row"] = e.row.to_json();
  return report;
}

std::string atlas_csv_header() {
  return "index,value,kind,t_A,t_B,a0,b0,b1,b2,status,N,x_max,x_star,multiplier,classification,"
         "c1,c2,c3,uniqueness,hopf_c2,hopf_c3,hopf_c4,hopf_origin,hopf_infinity,bound_violation";
}

std::string atlas_csv_line(const AtlasRow& r) {
  auto join = [&](auto field) {
    std::string s;
    for (std::size_t i = 0; i < r.cycles.size(); ++i) s += (i ? ";" : "") + field(r.cycles[i]);
    return s;
  };
  const auto& f = r.family;
  const bool quad = f.kind == FamilyKind::QuadPoly;
  std::ostringstream os;
  os << r.index << ',' << fmt(r.value) << ',' << csv_field(f.to_json()["kind"].get<std::string>()) << ','
     << (quad ? to_string(f.t_A) : "") << ',' << (quad ? to_string(f.t_B) : "") << ','
     << (quad || f.general ? "" : fmt(f.a0)) << ',' << (quad || f.general ? "" : fmt(f.b0)) << ','
     << (quad || f.general ? "" : fmt(f.b1)) << ',' << (quad || f.general ? "" : fmt(f.b2)) << ','
     << csv_field(r.status) << ',' << r.N() << ',' << fmt(r.x_max) << ','
     << join([](const CycleRecord& c) { return fmt(c.x_star); }) << ','
     << join([](const CycleRecord& c) { return fmt(c.multiplier); }) << ','
     << join([](const CycleRecord& c) { return std::string(to_string(c.classification)); }) << ',' << r.c1
     << ',' << r.c2 << ',' << r.c3 << ',' << r.uniqueness << ',' << (r.hopf ? fmt(r.hopf->c2) : "") << ','
     << (r.hopf ? fmt(r.hopf->c3) : "") << ',' << (r.hopf ? fmt(r.hopf->c4) : "") << ',' << r.hopf_origin << ','
     << r.hopf_infinity << ',' << r.bound_violation;
  return os.str();
}

SweepSummary run_sweep(const AnalysisConfig& cfg, int jobs, std::ostream* csv) {
  if (!cfg.sweep) throw ConfigError("the sweep command needs a sweep section");
  const int n = cfg.sweep->steps;
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, n);

  std::vector<std::optional<AtlasRow>> slots(n);
  std::mutex m;
  std::condition_variable ready;
  std::atomic<int> next{0};

  if (csv) {
    *csv << "# abel atlas schema_version=" << kSchemaVersion << '\n' << atlas_csv_header() << '\n';
    csv->flush();
  }

  SweepSummary s;
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          auto row = evaluate_row(cfg, family_at(cfg, i), i, cfg.sweep->value(i));
          std::lock_guard lock(m);
          slots[i] = std::move(row);
          ready.notify_all();
        }
      });

    for (int i = 0; i < n; ++i) {
      std::unique_lock lock(m);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      AtlasRow row = std::move(*slots[i]);
      slots[i].reset();
      lock.unlock();
      if (csv) {
        *csv << atlas_csv_line(row) << '\n';
        csv->flush();
      }
      s.max_N = std::max(s.max_N, row.N());
      if (row.bound_violation) s.violations.push_back(row.index);
      s.rows.push_back(std::move(row));
    }
  }
  return s;
}

json atlas_json(const AnalysisConfig& cfg, const SweepSummary& s) {
  json rows = json::array();
  std::map<int, int> histogram;
  for (const auto& r : s.rows) {
    rows.push_back(r.to_json());
    ++histogram[r.N()];
  }
  json hist = json::object();
  for (const auto& [k, v] : histogram) hist[std::to_string(k)] = v;
  return {{"schema_version", kSchemaVersion},
          {"command", "sweep"},
          {"config", cfg.to_json()},
          {"summary", {{"rows", s.rows.size()}, {"max_N", s.max_N}, {"N_histogram", hist}, {"violations", s.violations}}},
          {"rows", rows}};
}

std::vector<std::string> run_curves(const AnalysisConfig& cfg, const std::filesystem::path& out_dir) {
  const auto fam = cfg.family.build();
  const double T = fam.period();
  std::vector<std::string> files;
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["command"] = "curves";
  manifest["config"] = cfg.to_json();
  json notes = json::array();

  auto emit = [&](const std::string& name, const std::string& body) {
    write_file(out_dir / name, body);
    files.push_back(name);
  };

  {
    std::ostringstream os;
    os << "t,A,B,phi\n";
    const int n = cfg.curves.samples;
    for (int i = 0; i < n; ++i) {
      const double t = T * i / (n - 1);
      const auto j = fam.jet(t);
      os << fmt(t) << ',' << fmt(j.A) << ',' << fmt(j.B) << ',' << fmt(phi_value(j)) << '\n';
    }
    emit("phi.csv", os.str());
  }

  std::vector<double> xs;
  const int nx = cfg.curves.x_count;
  for (int i = 0; i < nx; ++i)
    xs.push_back(cfg.curves.x_lo * std::pow(cfg.curves.x_hi / cfg.curves.x_lo, double(i) / (nx - 1)));

  {
    std::ostringstream os;
    os << "x,u_T,displacement,u_x,status\n";
    for (double x : xs) {
      const auto r = integrate_with_variations(fam, x, cfg.integrator);
      if (r.completed())
        os << fmt(x) << ',' << fmt(r.u_T) << ',' << fmt(r.displacement()) << ',' << fmt(r.ux_T) << ",completed\n";
      else
        os << fmt(x) << ",,,," << to_string(r.status) << '\n';
    }
    emit("displacement.csv", os.str());
  }

  if (cfg.sweep) {
    const FamilyTemplate tmpl(fam, cfg.sweep->monotone());
    const double l1 = cfg.sweep->lambda_of(cfg.sweep->value(0));
    const double l2 = cfg.sweep->lambda_of(cfg.sweep->value(cfg.sweep->steps - 1));
    const double lam_lo = std::min(l1, l2), lam_hi = std::max(l1, l2);
    LambdaOptions lo;
    lo.integrator = cfg.integrator;
    if (lam_hi > lam_lo) {
      std::ostringstream os;
      os << "x,lambda,parameter,multiplier,status\n";
      for (double x : xs) {
        try {
          const auto s = lambda_at(tmpl, lam_lo, lam_hi, x, lo);
          os << fmt(x) << ',' << fmt(s.lambda) << ','
             << (s.lambda ? fmt(cfg.sweep->lambda_of(*s.lambda)) : std::string()) << ',' << fmt(s.multiplier) << ','
             << (s.lambda ? "ok" : "no level in range") << '\n';
        } catch (const std::exception& err) {
          os << fmt(x) << ",,,," << csv_field(err.what()) << '\n';
        }
      }
      emit("lambda.csv", os.str());
    } else {
      notes.push_back("Lambda curve skipped: the sweep range is a single point");
    }

    if (cfg.curves.fold_x && lam_hi > lam_lo) {
      AlphaBetaOptions ab;
      ab.samples = cfg.curves.samples;
      const auto fold = locate_fold(tmpl, lam_lo, lam_hi, cfg.curves.fold_x->first, cfg.curves.fold_x->second, lo);
      const auto ffam = tmpl.at(fold.lambda);
      CycleRecord c;
      c.x_star = fold.x;
      c.multiplier = fold.multiplier;
      c.uxx = fold.uxx;
      c.classification = CycleClass::SemistableCandidate;
      c.double_confirmed = std::abs(fold.uxx) > cfg.cycles.uxx_confirm;
      const auto d = alpha_beta_diagnostics(ffam, c, ab);
      std::ostringstream os;
      os << "t,u,u_x,g,alpha,beta,v\n";
      for (const auto& s : d.samples)
        os << fmt(s.t) << ',' << fmt(s.u) << ',' << fmt(s.ux) << ',' << fmt(s.g) << ',' << fmt(s.alpha) << ','
           << fmt(s.beta) << ',' << fmt(s.v) << '\n';
      emit("alpha_beta.csv", os.str());
      json fj = {{"lambda", fold.lambda},
                 {"parameter", cfg.sweep->lambda_of(fold.lambda)},
                 {"x", fold.x},
                 {"multiplier", fold.multiplier},
                 {"uxx", fold.uxx},
                 {"t1", opt(d.t1)},
                 {"t2", opt(d.t2)},
                 {"beta0", d.beta0},
                 {"ordering_ok", d.ordering_ok},
                 {"alpha_decreasing", d.alpha_decreasing},
                 {"beta_extrema_ok", d.beta_extrema_ok},
                 {"c2_direct", d.c2_direct},
                 {"c3_direct", d.c3_direct},
                 {"notes", d.notes}};
      try {
        fj["semistability"] = to_json(semistability_verdict(ffam, c));
      } catch (const std::exception& err) {
        fj["semistability"] = {{"error", err.what()}};
      }
      manifest["fold"] = fj;
    }
  }
  if (!cfg.curves.fold_x) notes.push_back("alpha/beta curves need curves.fold_x and a sweep range");

  manifest["files"] = files;
  manifest["notes"] = notes;
  emit("curves.json", manifest.dump(2) + "\n");
  return files;
}

void write_manifold_csv(const InfinityReport& r, std::ostream& os) {
  os << "branch,t,y\n";
  for (const auto* b : {&r.unstable, &r.stable})
    for (const auto& s : b->samples) os << (b == &r.unstable ? "unstable" : "stable") << ',' << fmt(s.t) << ',' << fmt(s.y) << '\n';
}

json run_trig_infinity(const AnalysisConfig& cfg, std::ostream* manifolds) {
  if (cfg.family.kind != FamilyKind::LinTrig) throw ConfigError("trig-infinity needs a lin_trig or general_trig family");
  const auto fam = cfg.family.build();
  const auto& lt = *fam.trig();
  const auto rep = infinity_report(cfg, lt);
  if (manifolds) write_manifold_csv(rep, *manifolds);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "trig-infinity";
  out["config"] = cfg.to_json();
  out["family"] = {{"a0", lt.a0()}, {"b0", lt.b0()}, {"b1", lt.b1()}, {"b2", lt.b2()}};
  if (cfg.family.general) {
    const auto n = normalize(*cfg.family.general);
    out["normalization"] = {{"shift", n.shift}, {"time_reversed", n.time_reversed}, {"scale", n.scale}, {"note", n.note}};
  }
  out["infinity"] = to_json(rep);
  if (cfg.connection_scan) {
    const auto& s = *cfg.connection_scan;
    const auto scan = scan_connection_b0(lt.a0(), lt.b1(), lt.b2(), s.b0_lo, s.b0_hi, s.steps, cfg.infinity);
    json mm = json::array();
    for (const auto& [b0, m] : scan.mismatches) mm.push_back({num(b0), opt(m)});
    out["connection_scan"] = {{"b0", opt(scan.b0)},
                              {"homoclinic_stability_sign", opt(scan.homoclinic_stability_sign)},
                              {"expected_sign", scan.expected_sign},
                              {"mismatches", mm}};
  }
  return out;
}

int dispatch(const std::string& command, const std::filesystem::path& config_path,
             const std::filesystem::path& out_dir, int jobs, std::ostream& log) {
  static const std::set<std::string> commands{"analyze", "sweep", "curves", "trig-infinity"};
  if (!commands.count(command)) {
    log << "error: unknown command '" << command << "'\n";
    return 1;
  }
  try {
    const auto cfg = AnalysisConfig::from_file(config_path);
    std::filesystem::create_directories(out_dir);

    if (command == "analyze") {
      const auto report = run_analyze(cfg);
      write_file(out_dir / cfg.outputs.report, report.dump(2) + "\n");
      const auto status = report["status"].get<std::string>();
      log << "analyze: " << report["cycles"]["count"] << " closed solution(s), status " << status << '\n';
      return status == "ok" ? 0 : 2;
    }
    if (command == "sweep") {
      std::ofstream csv(out_dir / cfg.outputs.atlas_csv);
      if (!csv) throw std::runtime_error("cannot open atlas output");
      const auto s = run_sweep(cfg, jobs, &csv);
      write_file(out_dir / cfg.outputs.atlas_json, atlas_json(cfg, s).dump(2) + "\n");
      log << "sweep: " << s.rows.size() << " rows, max N = " << s.max_N << '\n';
      if (!s.violations.empty()) {
        log << "\n**********************************************************************\n"
            << "*** BOUND VIOLATION: more than two closed solutions in " << s.violations.size() << " row(s): ";
        for (int i : s.violations) log << i << ' ';
        log << "\n**********************************************************************\n\n";
      }
      return 0;
    }
    if (command == "curves") {
      const auto files = run_curves(cfg, out_dir);
      log << "curves:";
      for (const auto& f : files) log << ' ' << f;
      log << '\n';
      return 0;
    }
    std::ofstream csv(out_dir / cfg.outputs.manifolds);
    const auto out = run_trig_infinity(cfg, &csv);
    write_file(out_dir / cfg.outputs.infinity, out.dump(2) + "\n");
    log << "trig-infinity: connection " << out["infinity"]["connection"] << '\n';
    return 0;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    log << "precondition failure: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace abel::cli
