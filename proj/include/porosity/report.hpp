#pragma once

// JSON encoding of set specs and analysis reports. Rationals are strings "p" or "p/q";
// big integers never travel as JSON numbers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "porosity/error.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/rational.hpp"
#include "porosity/set_model.hpp"

namespace porosity {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

inline json to_json_value(const Rational& r) { return r.str(); }
inline json to_json_value(const Extended& e) { return e.str(); }

inline Rational rational_from(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorCode::invalid_spec, where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  fail(ErrorCode::invalid_spec, where + ": expected a rational string \"p/q\"");
}

inline Extended extended_from(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return Extended::infinity();
  return rational_from(j, where);
}

namespace detail {

inline const json& member(const json& obj, const char* key, const std::string& where) {
  require(obj.is_object() && obj.contains(key), ErrorCode::invalid_spec, where + ": missing \"" + key + "\"");
  return obj.at(key);
}

inline Rational rational_or(const json& obj, const char* key, Rational fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return rational_from(obj.at(key), where + "." + key);
}

inline std::uint64_t uint_from(const json& j, const std::string& where) {
  require(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0), ErrorCode::invalid_spec,
          where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline Polynomial polynomial_from(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Polynomial::monomial(uint_from(j, where));
  require(j.is_array(), ErrorCode::invalid_spec, where + ": expected coefficient list or degree");
  std::vector<std::uint64_t> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(uint_from(j[i], where + "[" + std::to_string(i) + "]"));
  return Polynomial(std::move(c));
}

inline json polynomial_json(const Polynomial& p) {
  json a = json::array();
  for (auto c : p.coefficients()) a.push_back(c);
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SetSpec
// ---------------------------------------------------------------------------

inline std::string_view member_name(Prop28Member m) {
  switch (m) {
    case Prop28Member::tau: return "tau";
    case Prop28Member::star: return "star";
    case Prop28Member::both: return "union";
  }
  return "union";
}

inline Prop28Member member_from(const std::string& s) {
  if (s == "tau") return Prop28Member::tau;
  if (s == "star") return Prop28Member::star;
  if (s == "union") return Prop28Member::both;
  fail(ErrorCode::invalid_spec, "prop28 member must be tau, star or union, got '" + s + "'");
}

inline json spec_to_json(const SetSpec& s) {
  json params = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          json pts = json::array();
          for (const auto& x : p.points) pts.push_back(x.str());
          params["points"] = std::move(pts);
          if (p.tail) params["tail"] = spec_to_json(*p.tail);
        } else if constexpr (std::is_same_v<T, spec::PowerDecay>) {
          params["exponent"] = p.exponent;
          params["scale"] = p.scale.str();
        } else if constexpr (std::is_same_v<T, spec::Geometric>) {
          params["ratio"] = p.ratio.str();
          params["scale"] = p.scale.str();
        } else if constexpr (std::is_same_v<T, spec::SuperGeometric>) {
          params["base"] = p.base.str();
          params["exponent"] = detail::polynomial_json(p.exponent);
          params["scale"] = p.scale.str();
        } else if constexpr (std::is_same_v<T, spec::FactorialDecay>) {
          params["scale"] = p.scale.str();
        } else if constexpr (std::is_same_v<T, spec::Doubled>) {
          params["base"] = spec_to_json(*p.base);
          params["factor"] = p.factor.str();
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          json m = json::array();
          for (const auto& x : p.members) m.push_back(spec_to_json(*x));
          params["members"] = std::move(m);
        } else if constexpr (std::is_same_v<T, spec::Rescaled>) {
          params["base"] = spec_to_json(*p.base);
          params["factor"] = p.factor.str();
        } else {
          params["member"] = std::string(member_name(p.member));
          params["tau_exponent"] = detail::polynomial_json(p.tau_exponent);
          params["partition_base"] = p.partition_base;
        }
      },
      s.params);
  return json{{"kind", std::string(to_string(s.kind()))}, {"params", std::move(params)}};
}

inline SpecPtr spec_from_json(const json& j, const std::string& where = "set") {
  require(j.is_object(), ErrorCode::invalid_spec, where + ": expected an object");
  const std::string kind = detail::member(j, "kind", where).get<std::string>();
  const json empty = json::object();
  const json& p = j.contains("params") ? j.at("params") : empty;
  require(p.is_object(), ErrorCode::invalid_spec, where + ".params: expected an object");
  const std::string at = where + ".params";
  if (kind == "geometric") {
    return make_spec(spec::Geometric{rational_from(detail::member(p, "ratio", at), at + ".ratio"),
                                     detail::rational_or(p, "scale", 1, at)});
  }
  if (kind == "super-geometric") {
    spec::SuperGeometric s;
    s.base = detail::rational_or(p, "base", Rational(1, 2), at);
    if (p.contains("exponent")) s.exponent = detail::polynomial_from(p.at("exponent"), at + ".exponent");
    s.scale = detail::rational_or(p, "scale", 1, at);
    return make_spec(std::move(s));
  }
  if (kind == "factorial-decay") return make_spec(spec::FactorialDecay{detail::rational_or(p, "scale", 1, at)});
  if (kind == "power-decay") {
    spec::PowerDecay s;
    if (p.contains("exponent")) s.exponent = static_cast<unsigned>(detail::uint_from(p.at("exponent"), at + ".exponent"));
    s.scale = detail::rational_or(p, "scale", 1, at);
    return make_spec(std::move(s));
  }
  if (kind == "explicit") {
    const json& pts = detail::member(p, "points", at);
    require(pts.is_array(), ErrorCode::invalid_spec, at + ".points: expected an array");
    spec::Explicit s;
    for (std::size_t i = 0; i < pts.size(); ++i)
      s.points.push_back(rational_from(pts[i], at + ".points[" + std::to_string(i) + "]"));
    if (p.contains("tail")) s.tail = spec_from_json(p.at("tail"), at + ".tail");
    return make_spec(std::move(s));
  }
  if (kind == "doubled") {
    return make_spec(spec::Doubled{spec_from_json(detail::member(p, "base", at), at + ".base"),
                                   detail::rational_or(p, "factor", 2, at)});
  }
  if (kind == "union") {
    const json& m = detail::member(p, "members", at);
    require(m.is_array(), ErrorCode::invalid_spec, at + ".members: expected an array");
    spec::Union s;
    for (std::size_t i = 0; i < m.size(); ++i)
      s.members.push_back(spec_from_json(m[i], at + ".members[" + std::to_string(i) + "]"));
    return make_spec(std::move(s));
  }
  if (kind == "rescaled") {
    return make_spec(spec::Rescaled{spec_from_json(detail::member(p, "base", at), at + ".base"),
                                    rational_from(detail::member(p, "factor", at), at + ".factor")});
  }
  if (kind == "prop28" || kind == "prop28-family-member") {
    spec::Prop28 s;
    if (p.contains("member")) s.member = member_from(p.at("member").get<std::string>());
    if (p.contains("tau_exponent")) s.tau_exponent = detail::polynomial_from(p.at("tau_exponent"), at + ".tau_exponent");
    if (p.contains("partition_base"))
      s.partition_base = static_cast<unsigned>(detail::uint_from(p.at("partition_base"), at + ".partition_base"));
    return make_spec(std::move(s));
  }
  fail(ErrorCode::invalid_spec, where + ": unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ReportParameters {
  std::size_t depth = 32;
  Rational epsilon{1, 4};
  Rational tol = Rational::pow2(-16);
  std::size_t bit_budget = std::size_t{1} << 20;
  friend bool operator==(const ReportParameters&, const ReportParameters&) = default;
};

/// A computed quantity with its provenance. `error` replaces the value when the
/// quantity is undefined for the set (e.g. ZeroIsolated).
struct Quantity {
  std::optional<Extended> value;
  bool converged = false;
  bool lower_bound = false;
  std::string provenance;
  std::optional<std::string> error;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

struct PorositySection {
  Rational p_plus;
  bool converged = false;
  bool partial = false;
  Rational half_depth_estimate;
  Rational argmax_h;
  friend bool operator==(const PorositySection&, const PorositySection&) = default;
};

struct ViolationRecord {
  std::size_t n = 0;
  Rational point;
  Rational k;
  Rational K;
  friend bool operator==(const ViolationRecord&, const ViolationRecord&) = default;
};

struct WitnessRecord {
  std::vector<Rational> tau;
  std::string tau_family;
  Rational k;
  std::vector<ViolationRecord> violations;
  std::size_t frontier = 0;
  std::size_t half_depth_frontier = 0;
  friend bool operator==(const WitnessRecord&, const WitnessRecord&) = default;
};

struct CertificateRecord {
  std::string verdict;
  bool trivial_branch = false;
  std::optional<std::vector<Gap>> universal_chain;
  std::optional<Rational> M;
  bool M_converged = false;
  std::optional<Extended> C_E;
  bool identity_holds = false;
  std::optional<WitnessRecord> witness;
  std::string reason;
  friend bool operator==(const CertificateRecord&, const CertificateRecord&) = default;
};

struct SpaceRecord {
  std::string scaling_family;
  bool proof_witness = false;
  std::vector<Rational> distances_from_marked;
  Rational rho_star;
  Extended rho_low;
  std::size_t pool_size = 0;
  std::size_t rejected = 0;
  std::size_t extraction_rounds = 0;
  std::size_t triangle_violations = 0;
  bool has_unit_sphere = false;
  friend bool operator==(const SpaceRecord&, const SpaceRecord&) = default;
};

struct CheckRecord {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

struct AnalysisReport {
  std::string command;
  std::optional<SpecPtr> set_spec;
  ReportParameters parameters;
  std::optional<PorositySection> porosity;
  std::optional<std::string> porosity_error;
  std::optional<CertificateRecord> csp;
  std::map<std::string, Quantity> quantities;
  std::optional<std::vector<SpaceRecord>> spaces;
  std::optional<std::vector<CheckRecord>> checks;
  std::optional<std::map<std::string, double>> timings;

  friend bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
    auto same_spec = [](const std::optional<SpecPtr>& x, const std::optional<SpecPtr>& y) {
      if (!x || !y) return !x && !y;
      return detail::same(*x, *y);
    };
    return a.command == b.command && same_spec(a.set_spec, b.set_spec) && a.parameters == b.parameters &&
           a.porosity == b.porosity && a.porosity_error == b.porosity_error && a.csp == b.csp &&
           a.quantities == b.quantities && a.spaces == b.spaces && a.checks == b.checks && a.timings == b.timings;
  }
};

// Builders from library results.

inline PorositySection porosity_section(const PorosityEstimate& e) {
  return {e.estimate, e.converged, e.partial, e.half_depth_estimate, e.argmax_h};
}

inline CertificateRecord certificate_record(const PorosityCertificate& c) {
  CertificateRecord r;
  r.verdict = std::string(to_string(c.verdict));
  r.trivial_branch = c.trivial_branch;
  if (c.universal_chain) r.universal_chain = c.universal_chain->gaps;
  r.M = c.M_value;
  r.M_converged = c.M_converged;
  r.C_E = c.C_E;
  r.identity_holds = c.identity_holds;
  if (c.witness) {
    WitnessRecord w{c.witness->tau.values, c.witness->tau_family, c.witness->k, {}, c.witness->frontier,
                    c.witness->half_depth_frontier};
    for (const auto& v : c.witness->violations) w.violations.push_back({v.n, v.point, v.k, v.K});
    r.witness = std::move(w);
  }
  r.reason = c.reason;
  return r;
}

inline SpaceRecord space_record(const SampledSpace& s) {
  return {s.scaling_family,
          s.proof_witness,
          s.approx.distance_set(),
          s.extremes.rho_star,
          s.extremes.rho_low,
          s.approx.pool_size,
          s.approx.rejected.size(),
          s.approx.extraction_rounds,
          s.approx.triangle_violations,
          s.approx.has_unit_sphere};
}

namespace detail {

inline json rationals_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}
inline std::vector<Rational> rationals_from(const json& j, const std::string& where) {
  require(j.is_array(), ErrorCode::invalid_spec, where + ": expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from(j[i], where));
  return out;
}
template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline json report_to_json(const AnalysisReport& r) {
  json j;
  j["command"] = r.command;
  if (r.set_spec) j["set_spec"] = spec_to_json(**r.set_spec);
  j["parameters"] = {{"depth", r.parameters.depth},
                     {"epsilon", r.parameters.epsilon.str()},
                     {"tol", r.parameters.tol.str()},
                     {"bit_budget", r.parameters.bit_budget}};
  if (r.porosity) {
    const auto& p = *r.porosity;
    j["porosity"] = {{"p_plus", p.p_plus.str()},
                     {"converged", p.converged},
                     {"partial", p.partial},
                     {"half_depth_estimate", p.half_depth_estimate.str()},
                     {"argmax_h", p.argmax_h.str()}};
  } else if (r.porosity_error) {
    j["porosity"] = {{"error", *r.porosity_error}};
  }
  if (r.csp) {
    const auto& c = *r.csp;
    json cj;
    cj["verdict"] = c.verdict;
    cj["trivial_branch"] = c.trivial_branch;
    if (c.universal_chain) {
      json gaps = json::array();
      for (const auto& g : *c.universal_chain) gaps.push_back(json::array({g.left.str(), g.right.str()}));
      cj["universal_chain"] = std::move(gaps);
    }
    if (c.M) cj["M"] = c.M->str();
    cj["M_converged"] = c.M_converged;
    if (c.C_E) cj["C_E"] = c.C_E->str();
    cj["identity_holds"] = c.identity_holds;
    if (c.witness) {
      const auto& w = *c.witness;
      json vs = json::array();
      for (const auto& v : w.violations)
        vs.push_back({{"n", v.n}, {"point", v.point.str()}, {"k", v.k.str()}, {"K", v.K.str()}});
      cj["witness"] = {{"tau", detail::rationals_json(w.tau)},
                       {"tau_family", w.tau_family},
                       {"k", w.k.str()},
                       {"violations", std::move(vs)},
                       {"frontier", w.frontier},
                       {"half_depth_frontier", w.half_depth_frontier}};
    }
    cj["reason"] = c.reason;
    j["csp"] = std::move(cj);
  }
  if (!r.quantities.empty()) {
    json q = json::object();
    for (const auto& [name, v] : r.quantities) {
      json e;
      if (v.value) e["value"] = v.value->str();
      e["converged"] = v.converged;
      e["lower_bound"] = v.lower_bound;
      e["provenance"] = v.provenance;
      if (v.error) e["error"] = *v.error;
      q[name] = std::move(e);
    }
    j["quantities"] = std::move(q);
  }
  if (r.spaces) {
    json a = json::array();
    for (const auto& s : *r.spaces)
      a.push_back({{"scaling_family", s.scaling_family},
                   {"proof_witness", s.proof_witness},
                   {"distances_from_marked", detail::rationals_json(s.distances_from_marked)},
                   {"rho_star", s.rho_star.str()},
                   {"rho_low", s.rho_low.str()},
                   {"pool_size", s.pool_size},
                   {"rejected", s.rejected},
                   {"extraction_rounds", s.extraction_rounds},
                   {"triangle_violations", s.triangle_violations},
                   {"has_unit_sphere", s.has_unit_sphere}});
    j["spaces"] = std::move(a);
  }
  if (r.checks) {
    json a = json::array();
    for (const auto& c : *r.checks)
      a.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["checks"] = std::move(a);
  }
  if (r.timings) {
    json t = json::object();
    for (const auto& [k, v] : *r.timings) t[k] = v;
    j["timings"] = std::move(t);
  }
  return j;
}

inline AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.command = detail::member(j, "command", "report").get<std::string>();
  if (j.contains("set_spec")) r.set_spec = spec_from_json(j.at("set_spec"), "report.set_spec");
  const json& p = detail::member(j, "parameters", "report");
  r.parameters.depth = p.at("depth").get<std::size_t>();
  r.parameters.epsilon = rational_from(p.at("epsilon"), "epsilon");
  r.parameters.tol = rational_from(p.at("tol"), "tol");
  r.parameters.bit_budget = p.at("bit_budget").get<std::size_t>();
  if (j.contains("porosity")) {
    const json& pj = j.at("porosity");
    if (pj.contains("error")) {
      r.porosity_error = pj.at("error").get<std::string>();
    } else {
      r.porosity = PorositySection{rational_from(pj.at("p_plus"), "p_plus"), pj.at("converged").get<bool>(),
                                   pj.at("partial").get<bool>(),
                                   rational_from(pj.at("half_depth_estimate"), "half_depth_estimate"),
                                   rational_from(pj.at("argmax_h"), "argmax_h")};
    }
  }
  if (j.contains("csp")) {
    const json& cj = j.at("csp");
    CertificateRecord c;
    c.verdict = cj.at("verdict").get<std::string>();
    c.trivial_branch = cj.at("trivial_branch").get<bool>();
    if (cj.contains("universal_chain")) {
      std::vector<Gap> gaps;
      for (const auto& g : cj.at("universal_chain")) gaps.push_back({rational_from(g[0], "gap"), rational_from(g[1], "gap")});
      c.universal_chain = std::move(gaps);
    }
    if (cj.contains("M")) c.M = rational_from(cj.at("M"), "M");
    c.M_converged = cj.at("M_converged").get<bool>();
    if (cj.contains("C_E")) c.C_E = extended_from(cj.at("C_E"), "C_E");
    c.identity_holds = cj.at("identity_holds").get<bool>();
    if (cj.contains("witness")) {
      const json& wj = cj.at("witness");
      WitnessRecord w;
      w.tau = detail::rationals_from(wj.at("tau"), "witness.tau");
      w.tau_family = wj.at("tau_family").get<std::string>();
      w.k = rational_from(wj.at("k"), "witness.k");
      for (const auto& v : wj.at("violations"))
        w.violations.push_back({v.at("n").get<std::size_t>(), rational_from(v.at("point"), "point"),
                                rational_from(v.at("k"), "k"), rational_from(v.at("K"), "K")});
      w.frontier = wj.at("frontier").get<std::size_t>();
      w.half_depth_frontier = wj.at("half_depth_frontier").get<std::size_t>();
      c.witness = std::move(w);
    }
    c.reason = cj.at("reason").get<std::string>();
    r.csp = std::move(c);
  }
  if (j.contains("quantities")) {
    for (const auto& [name, e] : j.at("quantities").items()) {
      Quantity q;
      if (e.contains("value")) q.value = extended_from(e.at("value"), name);
      q.converged = e.at("converged").get<bool>();
      q.lower_bound = e.at("lower_bound").get<bool>();
      q.provenance = e.at("provenance").get<std::string>();
      q.error = detail::opt_get<std::string>(e, "error");
      r.quantities[name] = std::move(q);
    }
  }
  if (j.contains("spaces")) {
    std::vector<SpaceRecord> spaces;
    for (const auto& s : j.at("spaces"))
      spaces.push_back({s.at("scaling_family").get<std::string>(), s.at("proof_witness").get<bool>(),
                        detail::rationals_from(s.at("distances_from_marked"), "distances"),
                        rational_from(s.at("rho_star"), "rho_star"), extended_from(s.at("rho_low"), "rho_low"),
                        s.at("pool_size").get<std::size_t>(), s.at("rejected").get<std::size_t>(),
                        s.at("extraction_rounds").get<std::size_t>(), s.at("triangle_violations").get<std::size_t>(),
                        s.at("has_unit_sphere").get<bool>()});
    r.spaces = std::move(spaces);
  }
  if (j.contains("checks")) {
    std::vector<CheckRecord> checks;
    for (const auto& c : j.at("checks"))
      checks.push_back({c.at("id").get<std::string>(), c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                        c.at("detail").get<std::string>()});
    r.checks = std::move(checks);
  }
  if (j.contains("timings")) {
    std::map<std::string, double> t;
    for (const auto& [k, v] : j.at("timings").items()) t[k] = v.get<double>();
    r.timings = std::move(t);
  }
  return r;
}

/// Rows "h<TAB>lambda/h<TAB>decimal h<TAB>decimal ratio<TAB>deep" for external plotting.
inline std::string plot_tsv(const std::vector<ProfileRow>& rows) {
  std::ostringstream os;
  os << "h\tlambda_over_h\th_approx\tlambda_over_h_approx\tdeep\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.h.str() << '\t' << r.ratio.str() << '\t';
    std::snprintf(buf, sizeof buf, "%.17g", r.h.to_double());
    os << buf << '\t';
    std::snprintf(buf, sizeof buf, "%.17g", r.ratio.to_double());
    os << buf << '\t' << (r.deep ? 1 : 0) << '\n';
  }
  return os.str();
}

/// Writes `content` to `path` via a sibling temporary file and a rename.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::invalid_argument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::invalid_argument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorCode::invalid_argument, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace porosity
