#include "hjnet/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hjnet {

using json = nlohmann::ordered_json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += '\n';
    out += e;
  }
  return out;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string element(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Collects problems instead of stopping at the first one, so a user sees the
// whole list in one go.
class Reader {
 public:
  Reader(bool strict, std::vector<std::string>& warnings) : strict_(strict), warnings_(warnings) {}

  void error(const std::string& path, const std::string& msg) {
    errors_.push_back((path.empty() ? std::string("<root>") : path) + ": " + msg);
  }
  const std::vector<std::string>& errors() const { return errors_; }
  bool ok() const { return errors_.empty(); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        if (strict_) {
          error(child(path, k), "unknown key");
        } else {
          warnings_.push_back(child(path, k) + ": unknown key ignored");
        }
      }
    }
  }

  static const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& path, const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(child(path, key), "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& path, const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
      error(child(path, key), "expected a nonnegative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path, const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(child(path, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& path,
                                             const char* key, bool allow_scalar = false) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (allow_scalar && v->is_number()) return std::vector<double>{v->get<double>()};
    if (!v->is_array()) {
      error(child(path, key), allow_scalar ? "expected a number or a list of numbers"
                                           : "expected a list of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        error(element(child(path, key), i), "expected a number");
        return std::nullopt;
      }
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::size_t>> counts(const json& obj, const std::string& path,
                                                 const char* key) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      error(child(path, key), "expected a list of integers");
      return std::nullopt;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number_unsigned()) {
        error(element(child(path, key), i), "expected a nonnegative integer");
        return std::nullopt;
      }
      out.push_back((*v)[i].get<std::size_t>());
    }
    return out;
  }

 private:
  bool strict_;
  std::vector<std::string>& warnings_;
  std::vector<std::string> errors_;
};

std::optional<FarBoundary> parse_far(const std::string& s) {
  if (s == "frozen") return FarBoundary::frozen;
  if (s == "extrapolate") return FarBoundary::extrapolate;
  return std::nullopt;
}

const char* far_name(FarBoundary b) { return b == FarBoundary::frozen ? "frozen" : "extrapolate"; }

const char* flux_name(FluxKind k) {
  return k == FluxKind::godunov ? "godunov" : "lax_friedrichs";
}

bool decreasing_positive(const std::vector<double>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) return false;
    if (i > 0 && !(xs[i] < xs[i - 1])) return false;
  }
  return !xs.empty();
}

void read_network(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* net = Reader::find(root, "network");
  if (!net) return;
  const std::string path = "network";
  if (!r.object(*net, path)) return;
  r.keys(*net, path, {"branches", "length", "lengths", "far_bc"});
  const auto branches = r.count(*net, path, "branches");
  const auto length = r.number(*net, path, "length");
  const auto lengths = r.numbers(*net, path, "lengths");

  std::vector<double> lens;
  if (lengths) {
    lens = *lengths;
    if (length) r.error(child(path, "length"), "give either 'length' or 'lengths', not both");
    if (branches && *branches != lens.size())
      r.error(child(path, "branches"), "does not match the number of lengths");
  } else {
    const std::size_t K = branches.value_or(2);
    lens.assign(K, length.value_or(1.0));
  }
  if (lens.empty()) {
    r.error(path, "a junction needs at least one branch");
    return;
  }
  for (std::size_t i = 0; i < lens.size(); ++i)
    if (!(lens[i] > 0.0)) r.error(element(child(path, "lengths"), i), "length must be positive");

  std::vector<FarBoundary> far(lens.size(), FarBoundary::frozen);
  if (const json* fb = Reader::find(*net, "far_bc")) {
    const std::string fpath = child(path, "far_bc");
    if (fb->is_string()) {
      if (auto b = parse_far(fb->get<std::string>())) {
        far.assign(lens.size(), *b);
      } else {
        r.error(fpath, "expected 'frozen' or 'extrapolate'");
      }
    } else if (fb->is_array() && fb->size() == lens.size()) {
      for (std::size_t i = 0; i < fb->size(); ++i) {
        const auto& e = (*fb)[i];
        auto b = e.is_string() ? parse_far(e.get<std::string>()) : std::nullopt;
        if (b) {
          far[i] = *b;
        } else {
          r.error(element(fpath, i), "expected 'frozen' or 'extrapolate'");
        }
      }
    } else {
      r.error(fpath, "expected a string or one entry per branch");
    }
  }
  spec.network = JunctionNetwork{lens, far};
}

std::optional<CatalogEntry> read_entry(Reader& r, const json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  r.keys(j, path, {"key", "params"});
  auto key = r.string(j, path, "key");
  if (!key) {
    if (!Reader::find(j, "key")) r.error(child(path, "key"), "missing");
    return std::nullopt;
  }
  auto params = r.numbers(j, path, "params");
  return CatalogEntry{*key, params.value_or(std::vector<double>{})};
}

void read_hamiltonians(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* h = Reader::find(root, "hamiltonians");
  if (!h) return;
  const std::string path = "hamiltonians";
  std::vector<CatalogEntry> entries;
  if (h->is_object()) {
    if (auto e = read_entry(r, *h, path)) entries.push_back(*e);
  } else if (h->is_array()) {
    for (std::size_t i = 0; i < h->size(); ++i)
      if (auto e = read_entry(r, (*h)[i], element(path, i))) entries.push_back(*e);
  } else {
    r.error(path, "expected an object or a list of objects");
    return;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      catalog::make(entries[i].key, entries[i].params);
    } catch (const std::exception& ex) {
      r.error(h->is_array() ? element(path, i) : path, ex.what());
    }
  }
  if (entries.empty() && r.ok()) r.error(path, "at least one hamiltonian is required");
  spec.hamiltonians = entries;
}

void read_boundary(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* b = Reader::find(root, "boundary");
  if (!b) return;
  const std::string path = "boundary";
  if (!r.object(*b, path)) return;
  r.keys(*b, path, {"type", "B", "A"});
  const auto type = r.string(*b, path, "type").value_or("kirchhoff");
  BoundarySpec out;
  if (type == "kirchhoff") {
    if (Reader::find(*b, "A")) r.error(child(path, "A"), "only meaningful for type flux_limiter");
    out.kind = BoundarySpec::Kind::kirchhoff;
    out.value = r.number(*b, path, "B").value_or(0.0);
  } else if (type == "flux_limiter") {
    if (Reader::find(*b, "B")) r.error(child(path, "B"), "only meaningful for type kirchhoff");
    out.kind = BoundarySpec::Kind::flux_limiter;
    const json* a = Reader::find(*b, "A");
    if (!a || (a->is_string() && a->get<std::string>() == "A0")) {
      out.at_a0 = true;
    } else if (a->is_number()) {
      out.value = a->get<double>();
    } else {
      r.error(child(path, "A"), "expected a number or \"A0\"");
    }
  } else {
    r.error(child(path, "type"), "expected 'kirchhoff' or 'flux_limiter'");
  }
  spec.boundary = out;
}

void read_initial(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* j = Reader::find(root, "initial");
  if (!j) return;
  auto e = read_entry(r, *j, "initial");
  if (!e) return;
  try {
    if (e->key == "random") {
      if (!e->params.empty()) r.error("initial.params", "the 'random' profile takes no parameters");
    } else {
      distance_profile(*e);
    }
  } catch (const std::exception& ex) {
    r.error("initial", ex.what());
  }
  spec.initial = *e;
}

void read_solver(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* s = Reader::find(root, "solver");
  if (!s) return;
  const std::string path = "solver";
  if (!r.object(*s, path)) return;
  r.keys(*s, path, {"flux", "cfl", "alpha", "dt", "snapshot_stride", "slope_bound"});
  SolveConfig& c = spec.solver;
  if (auto f = r.string(*s, path, "flux")) {
    if (*f == "lax_friedrichs") {
      c.flux = FluxKind::lax_friedrichs;
    } else if (*f == "godunov") {
      c.flux = FluxKind::godunov;
    } else {
      r.error(child(path, "flux"), "expected 'lax_friedrichs' or 'godunov'");
    }
  }
  if (auto v = r.number(*s, path, "cfl")) {
    c.cfl = *v;
    if (!(*v > 0.0 && *v <= 1.0)) r.error(child(path, "cfl"), "cfl must lie in (0,1]");
  }
  c.alpha = r.number(*s, path, "alpha");
  if (c.alpha && !(*c.alpha >= 0.0)) r.error(child(path, "alpha"), "alpha must be nonnegative");
  c.dt = r.number(*s, path, "dt");
  if (c.dt && !(*c.dt > 0.0)) r.error(child(path, "dt"), "dt must be positive");
  if (auto n = r.count(*s, path, "snapshot_stride")) {
    c.snapshot_stride = *n;
    if (*n == 0) r.error(child(path, "snapshot_stride"), "must be at least 1");
  }
  c.slope_bound = r.number(*s, path, "slope_bound");
  if (c.slope_bound && !(*c.slope_bound > 0.0))
    r.error(child(path, "slope_bound"), "must be positive");
}

void read_viscous(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* v = Reader::find(root, "viscous");
  if (!v) return;
  const std::string path = "viscous";
  if (!r.object(*v, path)) return;
  r.keys(*v, path, {"epsilon", "eps_list"});
  if (auto e = r.number(*v, path, "epsilon")) {
    spec.epsilon = *e;
    if (!(*e > 0.0)) r.error(child(path, "epsilon"), "epsilon must be positive");
  }
  if (auto l = r.numbers(*v, path, "eps_list")) {
    spec.eps_list = *l;
    if (!decreasing_positive(*l))
      r.error(child(path, "eps_list"), "must be a nonempty, positive, strictly decreasing list");
  }
}

void read_comparison(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* c = Reader::find(root, "comparison");
  if (!c) return;
  const std::string path = "comparison";
  if (!r.object(*c, path)) return;
  r.keys(*c, path, {"solvers", "branch_counts", "bump_height"});
  if (const json* s = Reader::find(*c, "solvers")) {
    const std::string spath = child(path, "solvers");
    if (!s->is_array() || s->empty()) {
      r.error(spath, "expected a nonempty list of solver names");
    } else {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < s->size(); ++i) {
        const auto& e = (*s)[i];
        static const std::set<std::string> known{"kirchhoff", "flux_limiter", "viscous"};
        if (!e.is_string() || !known.count(e.get<std::string>())) {
          r.error(element(spath, i), "expected 'kirchhoff', 'flux_limiter' or 'viscous'");
        } else {
          names.push_back(e.get<std::string>());
        }
      }
      spec.solvers = names;
    }
  }
  if (auto k = r.counts(*c, path, "branch_counts")) {
    spec.branch_counts = *k;
    for (std::size_t i = 0; i < k->size(); ++i)
      if ((*k)[i] == 0) r.error(element(child(path, "branch_counts"), i), "must be at least 1");
  }
  if (auto h = r.number(*c, path, "bump_height")) {
    spec.bump_height = *h;
    if (!(*h >= 0.0)) r.error(child(path, "bump_height"), "must be nonnegative");
  }
}

void read_evaluation(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* e = Reader::find(root, "evaluation");
  if (!e) return;
  const std::string path = "evaluation";
  if (!r.object(*e, path)) return;
  r.keys(*e, path, {"radius", "stencil", "density"});
  spec.eval_radius = r.number(*e, path, "radius");
  if (spec.eval_radius && !(*spec.eval_radius > 0.0))
    r.error(child(path, "radius"), "must be positive");
  if (auto s = r.count(*e, path, "stencil")) {
    spec.residual.stencil = *s;
    if (*s == 0) r.error(child(path, "stencil"), "must be at least 1");
  }
  if (auto d = r.count(*e, path, "density")) {
    spec.residual.density = *d;
    if (*d < 3) r.error(child(path, "density"), "must be at least 3");
  }
}

void read_lemma(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* l = Reader::find(root, "lemma");
  if (!l) return;
  const std::string path = "lemma";
  if (!r.object(*l, path)) return;
  r.keys(*l, path, {"branch_counts", "instances", "budget", "density"});
  if (auto k = r.counts(*l, path, "branch_counts")) {
    spec.lemma.branch_counts = *k;
    if (k->empty()) r.error(child(path, "branch_counts"), "must not be empty");
    for (std::size_t i = 0; i < k->size(); ++i)
      if ((*k)[i] == 0 || (*k)[i] > 8)
        r.error(element(child(path, "branch_counts"), i), "must lie in 1..8");
  }
  if (auto n = r.count(*l, path, "instances")) spec.lemma.instances = *n;
  if (auto b = r.count(*l, path, "budget")) {
    spec.lemma.budget = *b;
    if (*b == 0) r.error(child(path, "budget"), "must be at least 1");
  }
  if (auto d = r.count(*l, path, "density")) {
    spec.lemma.density = *d;
    if (*d != 0 && *d < 11) r.error(child(path, "density"), "must be 0 (automatic) or >= 11");
  }
}

void read_tolerances(Reader& r, const json& root, ExperimentSpec& spec) {
  const json* t = Reader::find(root, "tolerances");
  if (!t) return;
  const std::string path = "tolerances";
  if (!r.object(*t, path)) return;
  r.keys(*t, path, {"comparison", "wholeline_error", "halving_ratio", "viscosity_final",
                    "equivalence_final", "lemma", "adversarial"});
  auto read = [&](const char* key, double& slot) {
    if (auto v = r.number(*t, path, key)) {
      slot = *v;
      if (!(*v >= 0.0)) r.error(child(path, key), "must be nonnegative");
    }
  };
  Tolerances& tol = spec.tol;
  read("comparison", tol.comparison);
  read("wholeline_error", tol.wholeline_error);
  read("halving_ratio", tol.halving_ratio);
  read("viscosity_final", tol.viscosity_final);
  read("equivalence_final", tol.equivalence_final);
  read("lemma", tol.lemma);
  read("adversarial", tol.adversarial);
}

// Cross-field checks that need the whole spec.
void validate(Reader& r, const ExperimentSpec& spec) {
  const std::size_t K = spec.network.branches();
  if (spec.hamiltonians.size() != 1 && spec.hamiltonians.size() != K) {
    std::ostringstream msg;
    msg << "expected 1 or " << K << " entries, got " << spec.hamiltonians.size();
    r.error("hamiltonians", msg.str());
    return;
  }
  for (double dx : spec.dx_ladder) {
    try {
      build_grid(spec.network, dx);
    } catch (const std::exception& e) {
      r.error("dx", e.what());
    }
  }
  if (spec.boundary.kind == BoundarySpec::Kind::flux_limiter) {
    std::vector<HamiltonianSpec> hams;
    try {
      hams = resolve_hamiltonians(spec, K);
    } catch (const std::exception&) {
      return;  // already reported
    }
    const bool convex = std::all_of(hams.begin(), hams.end(), [](const HamiltonianSpec& h) {
      return h.convex_in_p && h.p0 && h.xt_independent;
    });
    if (!convex) {
      r.error("boundary", "a flux limiter needs convex, (x,t)-independent hamiltonians");
      return;
    }
    if (!spec.boundary.at_a0) {
      const double a0 = a_naught(hams);
      if (spec.boundary.value < a0) {
        std::ostringstream msg;
        msg << "A=" << spec.boundary.value << " is below A0=" << a0;
        r.error("boundary.A", msg.str());
      }
    }
  }
}

json entry_json(const CatalogEntry& e) {
  json j;
  j["key"] = e.key;
  j["params"] = e.params;
  return j;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json spec_to_json(const ExperimentSpec& s) {
  json j;
  j["network"]["lengths"] = s.network.lengths;
  const bool uniform_far =
      std::all_of(s.network.far_bc.begin(), s.network.far_bc.end(),
                  [&](FarBoundary b) { return b == s.network.far_bc.front(); });
  if (uniform_far && !s.network.far_bc.empty()) {
    j["network"]["far_bc"] = far_name(s.network.far_bc.front());
  } else {
    json arr = json::array();
    for (auto b : s.network.far_bc) arr.push_back(far_name(b));
    j["network"]["far_bc"] = arr;
  }
  j["hamiltonians"] = json::array();
  for (const auto& e : s.hamiltonians) j["hamiltonians"].push_back(entry_json(e));
  if (s.boundary.kind == BoundarySpec::Kind::kirchhoff) {
    j["boundary"] = {{"type", "kirchhoff"}, {"B", s.boundary.value}};
  } else if (s.boundary.at_a0) {
    j["boundary"] = {{"type", "flux_limiter"}, {"A", "A0"}};
  } else {
    j["boundary"] = {{"type", "flux_limiter"}, {"A", s.boundary.value}};
  }
  j["initial"] = entry_json(s.initial);
  j["T"] = s.T;
  j["dx"] = s.dx_ladder;
  j["seed"] = s.seed;
  j["seeds"] = s.seeds;
  j["solver"] = {{"flux", flux_name(s.solver.flux)},
                 {"cfl", s.solver.cfl},
                 {"alpha", optional_json(s.solver.alpha)},
                 {"dt", optional_json(s.solver.dt)},
                 {"snapshot_stride", s.solver.snapshot_stride},
                 {"slope_bound", optional_json(s.solver.slope_bound)}};
  j["viscous"] = {{"epsilon", s.epsilon}, {"eps_list", s.eps_list}};
  j["comparison"] = {{"solvers", s.solvers},
                     {"branch_counts", s.branch_counts},
                     {"bump_height", s.bump_height}};
  j["evaluation"] = {{"radius", optional_json(s.eval_radius)},
                     {"stencil", s.residual.stencil},
                     {"density", s.residual.density}};
  j["lemma"] = {{"branch_counts", s.lemma.branch_counts},
                {"instances", s.lemma.instances},
                {"budget", s.lemma.budget},
                {"density", s.lemma.density}};
  j["tolerances"] = {{"comparison", s.tol.comparison},
                     {"wholeline_error", s.tol.wholeline_error},
                     {"halving_ratio", s.tol.halving_ratio},
                     {"viscosity_final", s.tol.viscosity_final},
                     {"equivalence_final", s.tol.equivalence_final},
                     {"lemma", s.tol.lemma},
                     {"adversarial", s.tol.adversarial}};
  return j;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: invalid JSON: ") + e.what()});
  }
  std::vector<std::string> local_warnings;
  Reader r(strict, warnings ? *warnings : local_warnings);
  if (!r.object(root, "")) throw ConfigError(r.errors());
  r.keys(root, "",
         {"kind", "network", "hamiltonians", "boundary", "initial", "T", "dx", "seed", "seeds",
          "solver", "viscous", "comparison", "evaluation", "lemma", "tolerances", "output"});

  RunConfig cfg;
  ExperimentSpec& spec = cfg.spec;
  if (auto k = r.string(root, "", "kind")) {
    cfg.kind = parse_experiment_kind(*k);
    if (!cfg.kind) {
      r.error("kind", "unknown experiment kind '" + *k + "'");
    } else {
      spec.kind = *cfg.kind;
    }
  }
  read_network(r, root, spec);
  read_hamiltonians(r, root, spec);
  read_boundary(r, root, spec);
  read_initial(r, root, spec);
  if (auto T = r.number(root, "", "T")) {
    spec.T = *T;
    if (!(*T > 0.0)) r.error("T", "final time must be positive");
  }
  if (auto dx = r.numbers(root, "", "dx", true)) {
    spec.dx_ladder = *dx;
    if (!decreasing_positive(*dx))
      r.error("dx", "resolution ladder must be positive and strictly decreasing");
  }
  if (auto s = r.count(root, "", "seed")) spec.seed = *s;
  if (auto n = r.count(root, "", "seeds")) {
    spec.seeds = *n;
    if (*n == 0) r.error("seeds", "must be at least 1");
  }
  read_solver(r, root, spec);
  read_viscous(r, root, spec);
  read_comparison(r, root, spec);
  read_evaluation(r, root, spec);
  read_lemma(r, root, spec);
  read_tolerances(r, root, spec);
  cfg.output = r.string(root, "", "output");

  if (r.ok()) validate(r, spec);
  if (!r.ok()) throw ConfigError(r.errors());
  return cfg;
}

std::string spec_json(const ExperimentSpec& spec) {
  json j = spec_to_json(spec);
  j["kind"] = to_string(spec.kind);
  return j.dump(2);
}

std::string serialize(const RunConfig& config) {
  json j;
  if (config.kind) j["kind"] = to_string(*config.kind);
  const json body = spec_to_json(config.spec);
  for (auto& [k, v] : body.items()) j[k] = v;
  if (config.output) j["output"] = *config.output;
  return j.dump(2) + "\n";
}

}  // namespace hjnet
