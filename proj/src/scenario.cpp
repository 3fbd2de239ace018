#include "rca/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "rca/errors.hpp"

namespace rca {
namespace {

using nlohmann::json;

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError("scenario: " + where + "." + key + " is required");
  return j.at(key);
}

double needNumber(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError("scenario: " + where + " must be a number");
  return v.get<double>();
}

int needInt(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InputError("scenario: " + where + " must be an integer");
  return v.get<int>();
}

// A per-atom vector: either a scalar (broadcast) or an array of length n.
RandVar numArray(const json& v, int n, const std::string& where) {
  if (v.is_number()) return RandVar::Constant(n, v.get<double>());
  if (!v.is_array())
    throw InputError("scenario: " + where + " must be a number or an array");
  if (static_cast<int>(v.size()) != n)
    throw InputError("scenario: " + where + " must have " + std::to_string(n) + " entries");
  RandVar out(n);
  for (int i = 0; i < n; ++i) out[i] = needNumber(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

ConvexBody parseBody(const json& v, const SigmaAlgebra& F, const std::string& where) {
  if (!v.is_object()) throw InputError("scenario: " + where + " must be an object");
  const std::string kind = need(v, "kind", where).get<std::string>();
  const int n = F.atoms();
  if (kind == "box")
    return boxBody(F, numArray(need(v, "lower", where), n, where + ".lower"),
                   numArray(need(v, "upper", where), n, where + ".upper"));
  if (kind == "ball_inf")
    return ballInfBody(F, numArray(need(v, "radius", where), n, where + ".radius"));
  if (kind == "cross_polytope")
    return crossPolytopeBody(F, numArray(need(v, "scale", where), n, where + ".scale"));
  if (kind == "hull") {
    const json& gj = need(v, "generators", where);
    if (!gj.is_array() || gj.empty())
      throw InputError("scenario: " + where + ".generators must be a nonempty array");
    std::vector<RandVar> gens;
    for (std::size_t i = 0; i < gj.size(); ++i)
      gens.push_back(numArray(gj[i], n, where + ".generators[" + std::to_string(i) + "]"));
    return hullBody(F, gens);
  }
  throw InputError("scenario: " + where + ".kind must be box, ball_inf, hull, or cross_polytope");
}

RiskSpec parseRisk(const json& v, const FiniteProbSpace& space, const SigmaAlgebra& F,
                   const std::string& where) {
  if (!v.is_object()) throw InputError("scenario: " + where + " must be an object");
  RiskSpec spec;
  spec.family = familyFromName(need(v, "family", where).get<std::string>());
  if (v.contains("beta")) spec.beta = needNumber(v.at("beta"), where + ".beta");
  if (v.contains("lambda")) spec.lambda = numArray(v.at("lambda"), F.atoms(), where + ".lambda");
  if (v.contains("densities")) {
    const json& dj = v.at("densities");
    if (!dj.is_array()) throw InputError("scenario: " + where + ".densities must be an array");
    for (std::size_t i = 0; i < dj.size(); ++i)
      spec.densities.push_back(
          numArray(dj[i], F.atoms(), where + ".densities[" + std::to_string(i) + "]"));
  }
  validateRiskSpec(space, F, spec);
  return spec;
}

TreeSpec parseTree(const json& v, const std::string& where) {
  if (!v.is_object()) throw InputError("scenario: " + where + " must be an object");
  TreeSpec ts;
  ts.tree = makeTree(needInt(need(v, "steps", where), where + ".steps"),
                     needNumber(need(v, "maturity", where), where + ".maturity"));

  const json& dj = need(v, "driver", where);
  if (!dj.is_object()) throw InputError("scenario: " + where + ".driver must be an object");
  const std::string kind = need(dj, "kind", where + ".driver").get<std::string>();
  if (kind == "zero") {
    ts.driver = zeroDriver();
  } else {
    const double mu = needNumber(need(dj, "mu", where + ".driver"), where + ".driver.mu");
    if (kind == "abs")
      ts.driver = absDriver(mu);
    else if (kind == "linear")
      ts.driver = linearDriver(mu);
    else if (kind == "neg_abs")
      ts.driver = negAbsDriver(mu);
    else
      throw InputError("scenario: " + where + ".driver.kind must be zero, abs, linear, or neg_abs");
  }
  if (ts.driver.mu * std::sqrt(ts.tree.dt()) > 1.0 + 1e-12)
    throw InputError("scenario: " + where + ": driver too steep, mu*sqrt(dt) must be <= 1");

  if (v.contains("terminal")) {
    ts.terminal = numArray(v.at("terminal"), ts.tree.leaves(), where + ".terminal");
  } else {
    ts.terminal = RandVar(ts.tree.leaves());
    for (int leaf = 0; leaf < ts.tree.leaves(); ++leaf)
      ts.terminal[leaf] = std::max(ts.tree.terminalB(leaf), 0.0);
  }
  return ts;
}

}  // namespace

Scenario parseScenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario: parse error: ") + e.what());
  }
  if (!j.is_object()) throw InputError("scenario: top level must be an object");

  static const std::set<std::string> known{"schema", "seed",  "space",  "algebra",
                                           "vectors", "bodies", "risks",  "trees",
                                           "norm",    "checks", "suites"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw InputError("scenario: unknown field \"" + item.key() + "\"");

  if (j.value("schema", std::string()) != "rca-scenario/1")
    throw InputError("scenario: schema must be \"rca-scenario/1\"");

  Scenario sc;
  {
    const json& sj = need(j, "space", "scenario");
    const json& pj = need(sj, "probs", "space");
    if (!pj.is_array() || pj.empty())
      throw InputError("scenario: space.probs must be a nonempty array");
    RandVar probs(pj.size());
    for (std::size_t i = 0; i < pj.size(); ++i)
      probs[i] = needNumber(pj[i], "space.probs[" + std::to_string(i) + "]");
    sc.space = FiniteProbSpace(probs);
  }
  const int n = sc.space.atoms();
  {
    const json& aj = need(j, "algebra", "scenario");
    const json& lj = need(aj, "labels", "algebra");
    if (!lj.is_array() || static_cast<int>(lj.size()) != n)
      throw InputError("scenario: algebra.labels must have one label per atom");
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = needInt(lj[i], "algebra.labels[" + std::to_string(i) + "]");
    sc.algebra = SigmaAlgebra(labels);
  }

  if (j.contains("vectors")) {
    const json& vj = j.at("vectors");
    if (!vj.is_object()) throw InputError("scenario: vectors must be an object");
    for (const auto& item : vj.items())
      sc.vectors.emplace(item.key(), numArray(item.value(), n, "vectors." + item.key()));
  }
  if (j.contains("bodies")) {
    const json& bj = j.at("bodies");
    if (!bj.is_object()) throw InputError("scenario: bodies must be an object");
    for (const auto& item : bj.items())
      sc.bodies.emplace(item.key(), parseBody(item.value(), sc.algebra, "bodies." + item.key()));
  }
  if (j.contains("risks")) {
    const json& rj = j.at("risks");
    if (!rj.is_object()) throw InputError("scenario: risks must be an object");
    for (const auto& item : rj.items())
      sc.risks.emplace(item.key(),
                       parseRisk(item.value(), sc.space, sc.algebra, "risks." + item.key()));
  }
  if (j.contains("trees")) {
    const json& tj = j.at("trees");
    if (!tj.is_object()) throw InputError("scenario: trees must be an object");
    for (const auto& item : tj.items())
      sc.trees.emplace(item.key(), parseTree(item.value(), "trees." + item.key()));
  }

  if (j.contains("seed")) {
    const json& sj = j.at("seed");
    if (!sj.is_number_unsigned() && !sj.is_number_integer())
      throw InputError("scenario: seed must be a nonnegative integer");
    if (sj.is_number_integer() && sj.get<long long>() < 0)
      throw InputError("scenario: seed must be a nonnegative integer");
    sc.seed = sj.get<std::uint64_t>();
  }
  if (j.contains("norm")) {
    const json& nj = j.at("norm");
    if (!nj.is_object()) throw InputError("scenario: norm must be an object");
    sc.p = needNumber(need(nj, "p", "norm"), "norm.p");
    if (!(sc.p >= 1.0)) throw InputError("scenario: norm.p must be >= 1");
  }
  if (j.contains("checks")) {
    const json& cj = j.at("checks");
    if (!cj.is_object()) throw InputError("scenario: checks must be an object");
    if (cj.contains("trials")) sc.trials = needInt(cj.at("trials"), "checks.trials");
    if (cj.contains("probes")) sc.probes = needInt(cj.at("probes"), "checks.probes");
    if (cj.contains("closedness")) {
      if (!cj.at("closedness").is_boolean())
        throw InputError("scenario: checks.closedness must be a boolean");
      sc.closedness = cj.at("closedness").get<bool>();
    }
    if (sc.trials < 1) throw InputError("scenario: checks.trials must be >= 1");
    if (sc.probes < 1) throw InputError("scenario: checks.probes must be >= 1");
  }
  if (j.contains("suites")) {
    static const std::set<std::string> sections{"verify-axioms", "conjugate", "dual-rep",
                                                "biconjugate",   "separate",  "gauge",
                                                "polar",         "bipolar",   "extend",
                                                "gexp"};
    const json& uj = j.at("suites");
    if (!uj.is_array()) throw InputError("scenario: suites must be an array of section names");
    for (const json& s : uj) {
      if (!s.is_string() || !sections.count(s.get<std::string>()))
        throw InputError("scenario: suites entries must be command names (not suite-all)");
      sc.suites.push_back(s.get<std::string>());
    }
  }
  return sc;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseScenario(buf.str());
}

}  // namespace rca
