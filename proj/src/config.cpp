#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "shepp/cli.hpp"
#include "shepp/errors.hpp"

namespace shepp {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

// A YAML mapping whose keys are checked against an allowed set on entry.
class Section {
 public:
  Section(const YAML::Node& node, std::string name, std::set<std::string> allowed, int parent_line)
      : node_(node), name_(std::move(name)) {
    if (!node_ || node_.IsNull()) return;
    if (!node_.IsMap()) throw ConfigError("'" + name_ + "' must be a mapping", line_of(node_) ? line_of(node_) : parent_line);
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key))
        throw ConfigError("unknown key '" + qualified(key) + "'", line_of(kv.first));
      lines_[key] = line_of(kv.first);
    }
  }

  bool has(const std::string& key) const { return lines_.count(key) > 0; }
  int line(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? line_of(node_) : it->second;
  }
  YAML::Node child(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("'" + qualified(key) + "' has the wrong type", line(key));
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::map<std::string, int> lines_;
};

template <class Fn>
auto checked(int line, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what(), line);
  }
}

void require(bool ok, const std::string& what, int line) {
  if (!ok) throw ConfigError(what, line);
}

const std::set<std::string> kStationaryKeys{"family", "alpha", "beta", "a1", "lags", "values"};

StationaryCovariance parse_stationary(const Section& s, const std::string& family) {
  const int line = s.line("family");
  return checked(line, [&] {
    if (family == "fou") {
      const double alpha = s.get("alpha", 1.0);
      return StationaryCovariance::fractional_ou(alpha);
    }
    if (family == "cauchy") {
      const double alpha = s.get("alpha", 1.0), beta = s.get("beta", 1.0);
      return StationaryCovariance::generalized_cauchy(alpha, beta);
    }
    if (family == "tabulated") {
      for (const char* k : {"lags", "values", "alpha", "a1"})
        require(s.has(k), std::string("tabulated covariance needs '") + s.qualified(k) + "'", line);
      auto lags = s.get<std::vector<double>>("lags", {});
      auto values = s.get<std::vector<double>>("values", {});
      const double alpha = s.get("alpha", 1.0), a1 = s.get("a1", 1.0);
      return StationaryCovariance::tabulated(std::move(lags), std::move(values), alpha, a1);
    }
    throw ConfigError("unknown stationary family '" + family + "' (fou, cauchy, tabulated)", line);
  });
}

void check_keys_for(const Section& s, const std::string& family, const std::set<std::string>& keys,
                    const std::vector<std::string>& all) {
  for (const auto& k : all)
    if (s.has(k) && !keys.count(k))
      throw ConfigError("key '" + s.qualified(k) + "' does not apply to family " + family, s.line(k));
}

StationaryCovariance parse_nested_stationary(const Section& parent, const std::string& key) {
  const Section sub(parent.child(key), parent.qualified(key), kStationaryKeys, parent.line(key));
  const std::string family = sub.get<std::string>("family", "fou");
  const std::vector<std::string> all(kStationaryKeys.begin(), kStationaryKeys.end());
  if (family == "fou") check_keys_for(sub, family, {"family", "alpha"}, all);
  if (family == "cauchy") check_keys_for(sub, family, {"family", "alpha", "beta"}, all);
  return parse_stationary(sub, family);
}

FieldModel parse_model(const Section& s) {
  const std::vector<std::string> all{"family", "hurst", "weights", "hursts", "alpha", "beta",
                                     "a1",     "lags",  "values",  "zeta",   "covariance", "sigma"};
  const std::string family = s.get<std::string>("family", "fbm");
  const int line = s.line("family");
  if (family == "fbm") {
    check_keys_for(s, family, {"family", "hurst"}, all);
    const double h = s.get("hurst", 0.5);
    return checked(s.line("hurst"), [&] { return FieldModel(IncrementVariance::fbm(h)); });
  }
  if (family == "mixed-fbm") {
    check_keys_for(s, family, {"family", "weights", "hursts"}, all);
    require(s.has("weights") && s.has("hursts"), "mixed-fbm needs 'model.weights' and 'model.hursts'", line);
    auto w = s.get<std::vector<double>>("weights", {});
    auto h = s.get<std::vector<double>>("hursts", {});
    return checked(s.line("weights"),
                   [&] { return FieldModel(IncrementVariance::mixed_fbm(std::move(w), std::move(h))); });
  }
  if (family == "integrated") {
    check_keys_for(s, family, {"family", "zeta"}, all);
    auto zeta = parse_nested_stationary(s, "zeta");
    return IncrementVariance::integrated(std::move(zeta));
  }
  if (family == "example21") {
    check_keys_for(s, family, {"family", "covariance", "sigma"}, all);
    auto cov = parse_nested_stationary(s, "covariance");
    const double sigma = s.get("sigma", 1.0);
    require(sigma > 0.0, "'model.sigma' must be positive", s.line("sigma"));
    return Example21Field{std::move(cov), [sigma](double) { return sigma; }};
  }
  if (family == "fou") check_keys_for(s, family, {"family", "alpha"}, all);
  else if (family == "cauchy") check_keys_for(s, family, {"family", "alpha", "beta"}, all);
  else if (family == "tabulated") check_keys_for(s, family, {"family", "alpha", "a1", "lags", "values"}, all);
  else
    throw ConfigError("unknown model family '" + family +
                          "' (fbm, mixed-fbm, integrated, fou, cauchy, tabulated, example21)",
                      line);
  return parse_stationary(s, family);
}

ExperimentKind parse_kind(const std::string& name, int line) {
  static const std::map<std::string, ExperimentKind> kinds{
      {"tail", ExperimentKind::Tail},
      {"limitlaw", ExperimentKind::LimitLaw},
      {"pickands", ExperimentKind::Pickands},
      {"check-model", ExperimentKind::CheckModel},
      {"oracle-compare", ExperimentKind::OracleCompare},
      {"convergence", ExperimentKind::Convergence}};
  auto it = kinds.find(name);
  if (it == kinds.end())
    throw ConfigError("unknown experiment '" + name +
                          "' (tail, limitlaw, pickands, check-model, oracle-compare, convergence)",
                      line);
  return it->second;
}

void require_increasing(const std::vector<double>& xs, const std::string& what, int line) {
  require(!xs.empty(), "'" + what + "' must not be empty", line);
  for (std::size_t i = 1; i < xs.size(); ++i)
    require(xs[i] > xs[i - 1], "'" + what + "' must be strictly increasing", line);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Tail: return "tail";
    case ExperimentKind::LimitLaw: return "limitlaw";
    case ExperimentKind::Pickands: return "pickands";
    case ExperimentKind::CheckModel: return "check-model";
    case ExperimentKind::OracleCompare: return "oracle-compare";
    case ExperimentKind::Convergence: return "convergence";
  }
  return "?";
}

RunConfig parse_config(const std::string& document) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("malformed document: ") + e.msg, e.mark.line + 1);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  const Section top(root, "",
                    {"experiment", "model", "window", "grid", "tail", "limitlaw", "pickands",
                     "convergence", "oracle", "check", "mc", "output", "pickands_sq"},
                    1);
  RunConfig c;
  c.kind = parse_kind(top.get<std::string>("experiment", "tail"), top.line("experiment"));

  {
    const Section m(top.child("model"), "model",
                    {"family", "hurst", "weights", "hursts", "alpha", "beta", "a1", "lags", "values",
                     "zeta", "covariance", "sigma"},
                    top.line("model"));
    c.model = parse_model(m);
  }
  {
    const Section w(top.child("window"), "window", {"a", "b", "T"}, top.line("window"));
    c.a = w.get("a", c.a);
    c.b = w.get("b", c.b);
    c.T = w.get("T", c.T);
    require(c.a > 0.0 && c.b > c.a, "window needs 0 < a < b", w.line(w.has("b") ? "b" : "a"));
    require(c.T > 0.0, "'window.T' must be positive", w.line("T"));
  }
  {
    const Section g(top.child("grid"), "grid", {"mesh_d", "n_tau", "n_s"}, top.line("grid"));
    c.mesh_d = g.get("mesh_d", c.mesh_d);
    c.n_tau = g.get<std::size_t>("n_tau", 0);
    c.n_s = g.get<std::size_t>("n_s", 0);
    require(c.mesh_d > 0.0, "'grid.mesh_d' must be positive", g.line("mesh_d"));
    require((c.n_tau == 0) == (c.n_s == 0), "'grid.n_tau' and 'grid.n_s' must be given together",
            g.line("n_tau"));
    require(c.n_tau == 0 || (c.n_tau >= 2 && c.n_s >= 2), "fixed grids need at least 2 points per axis",
            g.line("n_tau"));
  }
  {
    const Section t(top.child("tail"), "tail", {"u"}, top.line("tail"));
    c.u_ladder = t.get("u", c.u_ladder);
    require_increasing(c.u_ladder, "tail.u", t.line("u"));
    require(c.u_ladder.front() > 0.0, "'tail.u' entries must be positive", t.line("u"));
  }
  {
    const Section l(top.child("limitlaw"), "limitlaw", {"T", "r", "location"}, top.line("limitlaw"));
    c.T_ladder = l.get("T", c.T_ladder);
    require_increasing(c.T_ladder, "limitlaw.T", l.line("T"));
    require(c.T_ladder.front() > std::numbers::e, "'limitlaw.T' entries must exceed e", l.line("T"));
    c.r = l.get("r", c.r);
    require(c.r >= 0.0, "'limitlaw.r' must be nonnegative", l.line("r"));
    const auto loc = l.get<std::string>("location", "consistent");
    require(loc == "consistent" || loc == "printed", "'limitlaw.location' is consistent or printed",
            l.line("location"));
    c.location = loc == "printed" ? LocationForm::Printed : LocationForm::Consistent;
  }
  {
    const Section p(top.child("pickands"), "pickands", {"alpha", "lambda", "eta", "strides", "method"},
                    top.line("pickands"));
    c.pk_alpha = p.get("alpha", c.pk_alpha);
    require(c.pk_alpha > 0.0 && c.pk_alpha <= 2.0, "'pickands.alpha' must lie in (0, 2]", p.line("alpha"));
    c.pk_lambda = p.get("lambda", 0.0);
    require(c.pk_lambda >= 0.0, "'pickands.lambda' must be nonnegative", p.line("lambda"));
    c.pk_eta = p.get("eta", c.pk_eta);
    require(c.pk_eta > 0.0, "'pickands.eta' must be positive", p.line("eta"));
    const double lambda = c.pk_lambda > 0.0 ? c.pk_lambda : default_lambda(c.pk_alpha);
    require(c.pk_eta <= lambda / 256.0 * (1 + 1e-12), "'pickands.eta' must not exceed lambda / 256",
            p.line("eta"));
    const double steps = lambda / c.pk_eta;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * steps, "'pickands.eta' must divide lambda",
            p.line("eta"));
    c.pk_strides = p.get("strides", c.pk_strides);
    require(!c.pk_strides.empty(), "'pickands.strides' must not be empty", p.line("strides"));
    for (auto s : c.pk_strides)
      require(s >= 1 && static_cast<double>(s) <= steps, "'pickands.strides' entries must lie in [1, lambda / eta]",
              p.line("strides"));
    const auto method = p.get<std::string>("method", "ratio");
    require(method == "ratio" || method == "truncated", "'pickands.method' is ratio or truncated",
            p.line("method"));
    c.pk_method = method == "ratio" ? PickandsMethod::Ratio : PickandsMethod::Truncated;
  }
  {
    const Section v(top.child("convergence"), "convergence", {"d", "u"}, top.line("convergence"));
    c.d_ladder = v.get("d", c.d_ladder);
    require(!c.d_ladder.empty(), "'convergence.d' must not be empty", v.line("d"));
    for (std::size_t i = 0; i < c.d_ladder.size(); ++i) {
      require(c.d_ladder[i] > 0.0, "'convergence.d' entries must be positive", v.line("d"));
      require(i == 0 || c.d_ladder[i] < c.d_ladder[i - 1], "'convergence.d' must be decreasing", v.line("d"));
      const double q = c.d_ladder.front() / c.d_ladder[i];
      require(std::abs(q - std::round(q)) <= 1e-9 * q, "'convergence.d' ratios d_0 / d_k must be integers",
              v.line("d"));
    }
    c.conv_u = v.get("u", c.conv_u);
    require(c.conv_u > 0.0, "'convergence.u' must be positive", v.line("u"));
  }
  {
    const Section o(top.child("oracle"), "oracle", {"u", "n_tau", "n_s"}, top.line("oracle"));
    c.oracle_u = o.get("u", c.oracle_u);
    c.oracle_n_tau = o.get("n_tau", c.oracle_n_tau);
    c.oracle_n_s = o.get("n_s", c.oracle_n_s);
    require(!c.oracle_u.empty(), "'oracle.u' must not be empty", o.line("u"));
    require(c.oracle_n_tau >= 2 && c.oracle_n_s >= 2 && c.oracle_n_tau * c.oracle_n_s <= 64,
            "oracle grid needs 2..64 points with at least 2 per axis", o.line("n_tau"));
  }
  {
    const Section k(top.child("check"), "check", {"berman_v"}, top.line("check"));
    c.berman_v = k.get("berman_v", c.berman_v);
    require_increasing(c.berman_v, "check.berman_v", k.line("berman_v"));
    require(c.berman_v.front() > 1.0, "'check.berman_v' entries must exceed 1", k.line("berman_v"));
  }
  {
    const Section mc(top.child("mc"), "mc", {"n", "seed", "threads"}, top.line("mc"));
    c.n = mc.get("n", c.n);
    c.seed = mc.get("seed", c.seed);
    c.threads = mc.get("threads", c.threads);
    require(c.n >= 1, "'mc.n' must be positive", mc.line("n"));
  }
  {
    const Section out(top.child("output"), "output", {"dir", "ledger"}, top.line("output"));
    c.out_dir = out.get("dir", c.out_dir);
    c.ledger = out.get<std::string>("ledger", "");
  }
  if (top.has("pickands_sq")) {
    const double v = top.get("pickands_sq", 0.0);
    require(v > 0.0, "'pickands_sq' must be positive", top.line("pickands_sq"));
    c.pickands_sq = v;
  }

  // Per-experiment checks that need the resolved model.
  if (c.kind == ExperimentKind::Tail || c.kind == ExperimentKind::LimitLaw) {
    const double alpha = checked(top.line("model"), [&] { return local_structure(c.model, c.a, c.b).alpha; });
    if (!c.pickands_sq && !known_value(alpha))
      throw ConfigError("alpha = " + std::to_string(alpha) +
                            " has no exact Pickands constant; set 'pickands_sq'",
                        top.line("model"));
  }
  if (c.kind == ExperimentKind::LimitLaw && std::holds_alternative<Example21Field>(c.model))
    throw ConfigError("limitlaw needs a stationary or stationary-increment model", top.line("model"));

  return c;
}

RunConfig parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read " + file.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

nlohmann::json stationary_json(const StationaryCovariance& c) {
  switch (c.family()) {
    case CovarianceFamily::FractionalOU: return {{"family", "fou"}, {"alpha", c.alpha()}};
    case CovarianceFamily::GeneralizedCauchy:
      return {{"family", "cauchy"}, {"alpha", c.alpha()}, {"beta", c.beta()}};
    case CovarianceFamily::Tabulated:
      return {{"family", "tabulated"},
              {"lags", std::vector<double>(c.table_lags().begin(), c.table_lags().end())},
              {"values", std::vector<double>(c.table_values().begin(), c.table_values().end())},
              {"alpha", c.alpha()},
              {"a1", c.a1()}};
  }
  return {};
}

nlohmann::json model_json(const FieldModel& m) {
  if (auto* s = std::get_if<StationaryCovariance>(&m)) return stationary_json(*s);
  if (auto* e = std::get_if<Example21Field>(&m))
    return {{"family", "example21"}, {"covariance", stationary_json(e->covariance)}, {"sigma", e->sigma(1.0)}};
  const auto& v = std::get<IncrementVariance>(m);
  switch (v.family()) {
    case VarianceFamily::Fbm: return {{"family", "fbm"}, {"hurst", v.hurst()}};
    case VarianceFamily::MixedFbm:
      return {{"family", "mixed-fbm"},
              {"weights", std::vector<double>(v.weights().begin(), v.weights().end())},
              {"hursts", std::vector<double>(v.hursts().begin(), v.hursts().end())}};
    case VarianceFamily::Integrated: return {{"family", "integrated"}, {"zeta", stationary_json(v.zeta())}};
  }
  return {};
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(kind);
  j["model"] = model_json(model);
  j["window"] = {{"a", a}, {"b", b}, {"T", T}};
  j["grid"] = {{"mesh_d", mesh_d}, {"n_tau", n_tau}, {"n_s", n_s}};
  j["tail"] = {{"u", u_ladder}};
  j["limitlaw"] = {{"T", T_ladder}, {"r", r},
                   {"location", location == LocationForm::Printed ? "printed" : "consistent"}};
  j["pickands"] = {{"alpha", pk_alpha},
                   {"lambda", pk_lambda > 0.0 ? pk_lambda : default_lambda(pk_alpha)},
                   {"eta", pk_eta},
                   {"strides", pk_strides},
                   {"method", to_string(pk_method)}};
  j["convergence"] = {{"d", d_ladder}, {"u", conv_u}};
  j["oracle"] = {{"u", oracle_u}, {"n_tau", oracle_n_tau}, {"n_s", oracle_n_s}};
  j["check"] = {{"berman_v", berman_v}};
  j["mc"] = {{"n", n}, {"seed", seed}};
  j["output"] = {{"dir", out_dir}, {"ledger", ledger}};
  j["pickands_sq"] = pickands_sq ? nlohmann::json(*pickands_sq) : nlohmann::json("exact");
  return j;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"experiment", "tail", "tail | limitlaw | pickands | check-model | oracle-compare | convergence"},
      {"model.family", "fbm", "fbm | mixed-fbm | integrated | fou | cauchy | tabulated | example21"},
      {"model.hurst", "0.5", "Hurst index H of the fBm input (alpha = 2H)"},
      {"model.weights", "-", "mixed-fbm weights lambda_i > 0 with sum of squares 1"},
      {"model.hursts", "-", "mixed-fbm Hurst indices, strictly increasing"},
      {"model.alpha", "1", "local exponent of fou / cauchy / tabulated correlations"},
      {"model.beta", "1", "generalized Cauchy exponent: r(t) = (1 + |t|^alpha)^-beta"},
      {"model.a1", "-", "tabulated: coefficient in r(t) = 1 - a1 |t|^alpha near 0"},
      {"model.lags", "-", "tabulated: increasing lags starting at 0"},
      {"model.values", "-", "tabulated: correlations at the lags, first value 1"},
      {"model.zeta", "{family: fou, alpha: 1}", "integrated: correlation of the integrand (nested model)"},
      {"model.covariance", "{family: fou, alpha: 1}", "example21: shared correlation of X and Y"},
      {"model.sigma", "1", "example21: constant scale sigma(tau) (cancels after standardization)"},
      {"window.a", "0.5", "smallest window length tau"},
      {"window.b", "1", "largest window length tau"},
      {"window.T", "10", "horizon of the s axis"},
      {"grid.mesh_d", "0.25", "mesh factor d: spacing d * u^(-2/alpha) for threshold u"},
      {"grid.n_tau", "0", "fixed grid: tau points (0 = mesh rule)"},
      {"grid.n_s", "0", "fixed grid: s points (0 = mesh rule)"},
      {"tail.u", "[2.0, 2.5, 3.0, 3.5]", "threshold ladder of the tail-ratio study"},
      {"limitlaw.T", "[50, 200, 800]", "horizon ladder, each > e"},
      {"limitlaw.r", "0", "Berman limit r of the target law G_r"},
      {"limitlaw.location", "consistent", "b_T form: consistent | printed"},
      {"pickands.alpha", "1", "exponent alpha in (0, 2]"},
      {"pickands.lambda", "0", "window length (0 = 64 for alpha <= 1, 16 for alpha >= 1.5)"},
      {"pickands.eta", "0.015625", "simulation mesh, at most lambda / 256"},
      {"pickands.strides", "[1]", "lattice strides: d = stride * eta, shared paths"},
      {"pickands.method", "ratio", "ratio | truncated"},
      {"convergence.d", "[1, 0.5, 0.25, 0.125]", "decreasing mesh factors with integer ratios d_0 / d_k"},
      {"convergence.u", "2.5", "threshold of the convergence study"},
      {"oracle.u", "[1.5, 2.0, 2.5]", "thresholds compared against the Cholesky oracle"},
      {"oracle.n_tau", "4", "oracle grid tau points"},
      {"oracle.n_s", "4", "oracle grid s points (n_tau * n_s <= 64)"},
      {"check.berman_v", "[10, 100, 1000, 10000]", "lags v for delta(v) ln v"},
      {"pickands_sq", "exact", "squared Pickands constant; required when alpha is not 1 or 2"},
      {"mc.n", "10000", "replications"},
      {"mc.seed", "1", "master seed"},
      {"mc.threads", "0", "workers (0 = SHEPP_THREADS or 1)"},
      {"output.dir", "out", "output directory"},
      {"output.ledger", "-", "CSV ledger that Pickands runs append to"},
  };
  return keys;
}

std::vector<std::string> preset_names() {
  return {"brownian-tail", "fou-tail",     "mixed-fbm-tail", "integrated-tail", "pickands-1",
          "pickands-2",    "limitlaw",     "oracle",         "convergence",     "check-fbm"};
}

std::string preset_document(const std::string& name) {
  static const std::map<std::string, std::string> presets{
      {"brownian-tail",
       "experiment: tail\nmodel: {family: fbm, hurst: 0.5}\nwindow: {a: 0.5, b: 1.0, T: 10}\n"
       "tail: {u: [2.5, 3.0, 3.5]}\nmc: {n: 20000}\n"},
      {"fou-tail",
       "experiment: tail\nmodel: {family: fou, alpha: 1}\nwindow: {a: 1.0, b: 2.0, T: 10}\n"
       "tail: {u: [2.5, 3.0, 3.5]}\nmc: {n: 20000}\n"},
      {"mixed-fbm-tail",
       "experiment: tail\nmodel: {family: mixed-fbm, weights: [0.6, 0.8], hursts: [0.5, 0.7]}\n"
       "window: {a: 0.5, b: 1.0, T: 10}\ntail: {u: [2.5, 3.0, 3.5]}\nmc: {n: 20000}\n"},
      {"integrated-tail",
       "experiment: tail\nmodel: {family: integrated, zeta: {family: fou, alpha: 1}}\n"
       "window: {a: 0.5, b: 1.0, T: 10}\ntail: {u: [2.5, 3.0, 3.5]}\nmc: {n: 20000}\n"},
      {"pickands-1", "experiment: pickands\npickands: {alpha: 1, lambda: 64, eta: 0.015625}\nmc: {n: 10000}\n"},
      {"pickands-2", "experiment: pickands\npickands: {alpha: 2, lambda: 16, eta: 0.0078125}\nmc: {n: 10000}\n"},
      {"limitlaw",
       "experiment: limitlaw\nmodel: {family: fbm, hurst: 0.5}\nwindow: {a: 0.5, b: 1.0}\n"
       "limitlaw: {T: [50, 200, 800]}\nmc: {n: 2000}\n"},
      {"oracle",
       "experiment: oracle-compare\nmodel: {family: fbm, hurst: 0.5}\nwindow: {a: 0.5, b: 1.0, T: 1.5}\n"
       "oracle: {u: [1.5, 2.0, 2.5], n_tau: 4, n_s: 4}\nmc: {n: 10000}\n"},
      {"convergence",
       "experiment: convergence\nmodel: {family: fbm, hurst: 0.5}\nwindow: {a: 0.5, b: 1.0, T: 5}\n"
       "convergence: {d: [1, 0.5, 0.25, 0.125], u: 2.5}\nmc: {n: 10000}\n"},
      {"check-fbm", "experiment: check-model\nmodel: {family: fbm, hurst: 0.7}\nwindow: {a: 0.5, b: 1.0}\n"},
  };
  auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + name + "'", 0);
  return it->second;
}

}  // namespace shepp
