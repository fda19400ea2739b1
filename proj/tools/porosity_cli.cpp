// porosity: command-line driver for set analysis, classification, constructions,
// pretangent sampling and the bundled identity suites.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "porosity/constructions.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/identity_suites.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/report.hpp"
#include "porosity/set_model.hpp"

namespace {

using namespace porosity;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_budget = 3;
constexpr int exit_suite = 4;

struct Options {
  std::string set_path;
  std::size_t depth = 32;
  bool depth_given = false;
  std::string epsilon = "1/4";
  std::string tol = "1/65536";
  std::size_t bits = std::size_t{1} << 20;
  std::string out;
  std::string plot;
  std::string suite = "all";
  std::string construction;
  std::string factor = "2";
  std::string ratio = "1/2";
  std::string member = "union";
  std::string rule = "super-geometric";
  std::size_t trials = 3;
  bool timings = false;
};

class Stopwatch {
 public:
  void lap(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    laps_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const std::map<std::string, double>& laps() const { return laps_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  std::map<std::string, double> laps_;
};

SpecPtr load_spec(const std::string& path) {
  require(!path.empty(), ErrorCode::invalid_argument, "--set is required");
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::invalid_argument, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::invalid_spec, path + ": " + e.what());
  }
  return spec_from_json(j);
}

ReportParameters parameters_of(const Options& o) {
  ReportParameters p;
  p.depth = o.depth;
  p.epsilon = Rational::parse(o.epsilon);
  p.tol = Rational::parse(o.tol);
  p.bit_budget = o.bits;
  require(p.epsilon.sign() > 0 && p.epsilon < Rational(1), ErrorCode::invalid_argument, "--epsilon must lie in (0,1)");
  require(p.tol.sign() > 0, ErrorCode::invalid_argument, "--tol must be positive");
  require(p.depth >= 8, ErrorCode::invalid_argument, "--depth must be at least 8");
  return p;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_atomically(path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Quantity wrapper that records errors such as ZeroIsolated instead of failing the run.
template <class F>
Quantity quantity(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::bit_budget_exceeded) throw;
    Quantity q;
    q.error = std::string(to_string(e.code()));
    q.provenance = e.what();
    return q;
  }
}

int cmd_analyze(const Options& o, bool full) {
  Stopwatch sw;
  AnalysisReport r;
  r.command = full ? "analyze" : "classify";
  r.parameters = parameters_of(o);
  auto spec = load_spec(o.set_path);
  r.set_spec = spec;
  SetOptions so;
  so.bit_budget = r.parameters.bit_budget;
  auto set = make_set(spec, so);
  const std::size_t d = r.parameters.depth;
  const Rational& eps = r.parameters.epsilon;
  const Rational& tol = r.parameters.tol;

  if (full) {
    try {
      r.porosity = porosity_section(porosity_plus(set, d, tol));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::bit_budget_exceeded) throw;
      r.porosity_error = std::string(to_string(e.code()));
    }
    sw.lap("porosity");
  }
  ClassifyOptions co;
  co.tol = tol;
  auto cert = classify_csp(set, d, eps, co);
  r.csp = certificate_record(cert);
  sw.lap("classify");

  if (full) {
    r.quantities["M"] = quantity([&] {
      auto m = M_of(universal_chain(set, d, eps), tol);
      return Quantity{m.value, m.converged, false, "universal chain of " + eps.str() + "-admissible gaps", {}};
    });
    r.quantities["C_E"] = quantity([&] {
      auto ce = C_E_estimate(set, d, eps);
      const bool pinned = cert.verdict == Verdict::csp && cert.identity_holds;
      return Quantity{ce.value, pinned, !pinned,
                      "max C(tau) over sampled tau, attained by " + ce.achieving_family +
                          (pinned ? "; equals M" : ""),
                      {}};
    });
    sw.lap("quantities");
    auto rs = [&]() -> std::optional<RStarSample> {
      try {
        return sample_R_star(set, d, o.trials, tol, eps);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::bit_budget_exceeded) throw;
        Quantity q;
        q.error = std::string(to_string(e.code()));
        q.provenance = e.what();
        r.quantities["R_star"] = q;
        r.quantities["R_low"] = q;
        return std::nullopt;
      }
    }();
    if (rs) {
      const bool witness = rs->C_E.is_finite() && Extended(rs->R_star) == rs->C_E;
      r.quantities["R_star"] = Quantity{rs->R_star, witness, !witness,
                                        "max rho* over " + std::to_string(rs->spaces.size()) + " sampled spaces", {}};
      r.quantities["R_low"] = Quantity{rs->R_low, witness, false,
                                       "min rho+ over " + std::to_string(rs->spaces.size()) + " sampled spaces", {}};
    }
    sw.lap("pretangent");
  }
  if (o.timings) r.timings = sw.laps();
  emit(dump(report_to_json(r)), o.out);

  if (full && !o.plot.empty()) {
    auto e = enumerate(set, d);
    require(e.points.size() >= 2, ErrorCode::depth_exceeds_finite_set, "plot needs at least two points");
    write_atomically(o.plot, plot_tsv(lambda_profile(e.points)));
  }
  return exit_ok;
}

int cmd_construct(const Options& o) {
  SpecPtr base;
  if (o.rule == "super-geometric") {
    base = super_geometric_spec();
  } else if (o.rule == "factorial") {
    base = factorial_spec();
  } else if (o.rule == "geometric") {
    base = geometric_spec(Rational(1, 2));
  } else {
    fail(ErrorCode::invalid_argument, "unknown --rule '" + o.rule + "' (super-geometric, factorial, geometric)");
  }
  SpecPtr out;
  if (o.construction == "ratio-vanishing") {
    out = example_ratio_vanishing(base).set.spec_ptr();
  } else if (o.construction == "doubled") {
    out = doubled_gap_set(base, Rational::parse(o.factor)).set.spec_ptr();
  } else if (o.construction == "prop28") {
    auto fam = prop28_family();
    if (o.member == "tau") {
      out = fam.E1.spec_ptr();
    } else if (o.member == "star") {
      out = fam.E1_star.spec_ptr();
    } else if (o.member == "union") {
      out = fam.E_union.spec_ptr();
    } else {
      fail(ErrorCode::invalid_argument, "--member must be tau, star or union");
    }
  } else if (o.construction == "geometric") {
    out = make_set(geometric_spec(Rational::parse(o.ratio))).spec_ptr();
  } else {
    fail(ErrorCode::invalid_argument,
         "unknown construction '" + o.construction + "' (ratio-vanishing, doubled, prop28, geometric)");
  }
  emit(dump(spec_to_json(*out)), o.out);
  return exit_ok;
}

int cmd_simulate(const Options& o) {
  Stopwatch sw;
  AnalysisReport r;
  r.command = "simulate";
  r.parameters = parameters_of(o);
  auto spec = load_spec(o.set_path);
  r.set_spec = spec;
  SetOptions so;
  so.bit_budget = r.parameters.bit_budget;
  auto set = make_set(spec, so);
  auto rs = sample_R_star(set, r.parameters.depth, o.trials, r.parameters.tol, r.parameters.epsilon);
  const bool witness = rs.C_E.is_finite() && Extended(rs.R_star) == rs.C_E;
  r.quantities["R_star"] = Quantity{rs.R_star, witness, !witness, "max rho* over sampled spaces", {}};
  r.quantities["R_low"] = Quantity{rs.R_low, witness, false, "min rho+ over sampled spaces", {}};
  r.quantities["C_E"] = Quantity{rs.C_E, false, true, "max C(tau) over sampled tau", {}};
  std::vector<SpaceRecord> spaces;
  for (const auto& s : rs.spaces) spaces.push_back(space_record(s));
  r.spaces = std::move(spaces);
  sw.lap("simulate");
  if (o.timings) r.timings = sw.laps();
  emit(dump(report_to_json(r)), o.out);
  return exit_ok;
}

int cmd_verify(const Options& o) {
  AnalysisReport r;
  r.command = "verify";
  r.parameters = parameters_of(o);
  auto checks = suites::run_suite(o.suite, o.depth_given ? std::optional<std::size_t>(o.depth) : std::nullopt);
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    std::cerr << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << "  (" << c.detail << ")\n";
  }
  r.checks = std::move(checks);
  emit(dump(report_to_json(r)), o.out);
  return ok ? exit_ok : exit_suite;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--depth", o.depth, "number of leading points analyzed")->check(CLI::PositiveNumber);
  sub->add_option("--epsilon", o.epsilon, "admissibility slack p/q in (0,1)");
  sub->add_option("--tol", o.tol, "convergence tolerance p/q");
  sub->add_option("--bits", o.bits, "bit budget for numerators and denominators");
  sub->add_option("--out", o.out, "report path (stdout when omitted)");
  sub->add_flag("--timings", o.timings, "include per-stage wall times in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Porosity at 0 of countable subsets of the half-line, in exact arithmetic"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "gaps, p+, classification and quantities");
  add_common(analyze, o);
  analyze->add_option("--set", o.set_path, "SetSpec JSON file")->required();
  analyze->add_option("--plot", o.plot, "write lambda(h)/h profile as TSV");
  analyze->add_option("--trials", o.trials, "scaling families sampled per kind");

  auto* classify = app.add_subcommand("classify", "complete strong porosity certificate");
  add_common(classify, o);
  classify->add_option("--set", o.set_path, "SetSpec JSON file")->required();

  auto* construct = app.add_subcommand("construct", "emit the SetSpec of a named construction");
  construct->add_option("name", o.construction, "ratio-vanishing | doubled | prop28 | geometric")->required();
  construct->add_option("--factor", o.factor, "doubling factor c > 1");
  construct->add_option("--ratio", o.ratio, "ratio q in (0,1) for geometric");
  construct->add_option("--member", o.member, "prop28 member: tau | star | union");
  construct->add_option("--rule", o.rule, "base rule: super-geometric | factorial | geometric");
  construct->add_option("--out", o.out, "output path (stdout when omitted)");

  auto* simulate = app.add_subcommand("simulate", "sample pretangent spaces and R*, R+");
  add_common(simulate, o);
  simulate->add_option("--set", o.set_path, "SetSpec JSON file")->required();
  simulate->add_option("--trials", o.trials, "scaling families sampled per kind");

  auto* verify = app.add_subcommand("verify", "run the bundled identity suites");
  add_common(verify, o);
  verify->add_option("--suite", o.suite, "csp-identities | geometric | prop28 | scale | oracle | pretangent | "
                                         "self-similarity | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_invalid;
  }
  for (auto* sub : {analyze, classify, simulate, verify})
    if (sub->parsed()) o.depth_given = sub->count("--depth") > 0;

  try {
    if (analyze->parsed()) return cmd_analyze(o, true);
    if (classify->parsed()) return cmd_analyze(o, false);
    if (construct->parsed()) return cmd_construct(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::bit_budget_exceeded ? exit_budget : exit_invalid;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return exit_invalid;
  }
  return exit_invalid;
}
