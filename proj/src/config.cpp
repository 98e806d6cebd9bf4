#include "wavetank/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wavetank/errors.hpp"

namespace wavetank {

using nlohmann::json;

namespace {

// Reads keys out of one object; whatever is left at the end is unknown.
class Reader {
 public:
  Reader(const json& j, std::string where) : where_(std::move(where)) {
    if (!j.is_object()) throw ConfigInvalid(where_ + " must be a table");
    for (auto it = j.begin(); it != j.end(); ++it) left_.insert(it.key());
    j_ = &j;
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() == 0 && !left_.empty())
      throw ConfigInvalid("unknown key '" + *left_.begin() + "' in " + where_);
  }

  bool has(const std::string& k) const { return j_->contains(k); }
  const json& raw(const std::string& k) {
    left_.erase(k);
    return j_->at(k);
  }
  std::string path(const std::string& k) const { return where_ == "config" ? k : where_ + "." + k; }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigInvalid(path(k) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigInvalid(path(k) + " must be finite");
    return x;
  }
  int integer(const std::string& k, int def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigInvalid(path(k) + " must be an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) throw ConfigInvalid(path(k) + " must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigInvalid(path(k) + " must be a string");
    return v.get<std::string>();
  }

 private:
  const json* j_ = nullptr;
  std::string where_;
  std::set<std::string> left_;
};

Vec2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigInvalid(where + " must be a pair [x, y]");
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

std::vector<Vec2> points(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigInvalid(where + " must be a list of [x, y]");
  std::vector<Vec2> out;
  for (const json& p : v) out.push_back(point(p, where));
  return out;
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigInvalid(where + " must be a number or a list of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigInvalid(where + " must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigInvalid(what);
}

DomainSpec read_domain(const json& j) {
  DomainSpec d;
  Reader r(j, "domain");
  d.kind = r.string("type", "trapezoid");
  if (d.kind == "trapezoid") {
    d.a = r.number("a", 1.0);
    d.b = r.number("b", 1.0);
    require(d.a > 0 && d.b > 0, "domain.a and domain.b must be positive");
  } else if (d.kind == "tilted_square") {
    d.alpha = r.number("alpha", 0.0);
  } else if (d.kind == "unit_square") {
  } else if (d.kind == "polygon") {
    require(r.has("vertices"), "domain.vertices is required for a polygon");
    d.vertices = points(r.raw("vertices"), "domain.vertices");
    require(d.vertices.size() >= 3, "a polygon needs at least 3 vertices");
  } else if (d.kind == "arc_domain") {
    require(r.has("edges"), "domain.edges is required for an arc_domain");
    const json& edges = r.raw("edges");
    require(edges.is_array() && !edges.empty(), "domain.edges must be a non-empty list");
    for (const json& e : edges) {
      Reader er(e, "domain.edges[]");
      const std::string kind = er.string("type", "segment");
      if (kind == "segment") {
        require(er.has("start") && er.has("end"), "segments need start and end");
        d.edges.push_back(StraightSegment{point(er.raw("start"), "start"), point(er.raw("end"), "end")});
      } else if (kind == "arc") {
        require(er.has("center"), "arcs need a center");
        CircularArc a;
        a.center = point(er.raw("center"), "center");
        a.radius = er.number("radius", 1.0);
        a.start_angle = er.number("start_angle", 0.0);
        a.end_angle = er.number("end_angle", 0.0);
        require(a.radius > 0, "arc radius must be positive");
        d.edges.push_back(a);
      } else {
        throw ConfigInvalid("unknown edge type '" + kind + "'");
      }
    }
  } else {
    throw ConfigInvalid("unknown domain type '" + d.kind + "'");
  }
  return d;
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

}  // namespace

PlanarDomain DomainSpec::build() const {
  if (kind == "trapezoid") return make_trapezoid(a, b);
  if (kind == "tilted_square") return make_tilted_square(alpha);
  if (kind == "unit_square") return make_unit_square();
  if (kind == "polygon") return make_polygon(vertices);
  if (kind == "arc_domain") return PlanarDomain(edges);
  throw ConfigInvalid("unknown domain type '" + kind + "'");
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"check", "sweep",       "orbit",     "corner",
                                                 "evolve", "lap", "kernel-check", "bem-verify"};
  return names;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  Reader r(j, "config");
  if (r.has("domain")) c.domain = read_domain(r.raw("domain"));
  if (r.has("lambda")) c.lambdas = numbers(r.raw("lambda"), "lambda");
  require(!c.lambdas.empty(), "lambda must not be empty");
  for (double l : c.lambdas) require(l > 0 && l < 1, "lambda values must lie in (0, 1)");
  if (r.has("tasks")) {
    const json& t = r.raw("tasks");
    require(t.is_array(), "tasks must be a list");
    for (const json& x : t) {
      require(x.is_string(), "tasks must be strings");
      const std::string name = x.get<std::string>();
      const auto& known = task_names();
      require(std::find(known.begin(), known.end(), name) != known.end(), "unknown task '" + name + "'");
      require(std::find(c.tasks.begin(), c.tasks.end(), name) == c.tasks.end(), "task '" + name + "' listed twice");
      c.tasks.push_back(name);
    }
  }
  c.out = r.string("out", c.out.string());
  {
    const int seed = r.integer("seed", 0);
    require(seed >= 0, "seed must be non-negative");
    c.seed = std::uint64_t(seed);
  }
  if (r.has("load")) {
    Reader l(r.raw("load"), "load");
    if (l.has("center")) c.load.center = point(l.raw("center"), "load.center");
    c.load.radius = l.number("radius", c.load.radius);
    c.load.amplitude = l.number("amplitude", c.load.amplitude);
    require(c.load.radius > 0, "load.radius must be positive");
  }
  if (r.has("mesh")) {
    Reader m(r.raw("mesh"), "mesh");
    c.mesh.h = m.number("h", c.mesh.h);
    c.mesh.lattice = m.string("lattice", c.mesh.lattice);
    if (m.has("graded_points")) c.mesh.graded_points = points(m.raw("graded_points"), "mesh.graded_points");
    c.mesh.grading = m.number("grading", c.mesh.grading);
    c.mesh.h_min = m.number("h_min", c.mesh.h_min);
    require(c.mesh.h > 0, "mesh.h must be positive");
    require(c.mesh.lattice == "triangular" || c.mesh.lattice == "square", "mesh.lattice is triangular or square");
    require(c.mesh.grading > 0 && c.mesh.h_min > 0, "mesh.grading and mesh.h_min must be positive");
  }
  if (r.has("sweep")) {
    Reader s(r.raw("sweep"), "sweep");
    c.sweep.lambda_min = s.number("lambda_min", c.sweep.lambda_min);
    c.sweep.lambda_max = s.number("lambda_max", c.sweep.lambda_max);
    c.sweep.steps = s.integer("steps", c.sweep.steps);
    require(0 < c.sweep.lambda_min && c.sweep.lambda_min <= c.sweep.lambda_max && c.sweep.lambda_max < 1,
            "sweep needs 0 < lambda_min <= lambda_max < 1");
    require(c.sweep.steps >= 1, "sweep.steps must be at least 1");
  }
  if (r.has("orbit")) {
    Reader o(r.raw("orbit"), "orbit");
    c.orbit.seed = o.number("seed", c.orbit.seed);
    c.orbit.iters = o.integer("iters", c.orbit.iters);
    c.orbit.q_max = o.integer("q_max", c.orbit.q_max);
    c.orbit.depth = o.integer("depth", c.orbit.depth);
    require(c.orbit.iters >= 0 && c.orbit.q_max >= 1 && c.orbit.depth >= 1, "orbit counts must be positive");
  }
  if (r.has("corner")) {
    Reader o(r.raw("corner"), "corner");
    c.corner.s_max = o.number("s_max", c.corner.s_max);
    require(c.corner.s_max > 0, "corner.s_max must be positive");
  }
  if (r.has("evolve")) {
    Reader e(r.raw("evolve"), "evolve");
    c.evolve.dt = e.number("dt", c.evolve.dt);
    c.evolve.T = e.number("T", c.evolve.T);
    c.evolve.periods = e.integer("periods", c.evolve.periods);
    c.evolve.heatmap = e.boolean("heatmap", c.evolve.heatmap);
    require(c.evolve.dt > 0 && c.evolve.T >= 0 && c.evolve.periods >= 1, "evolve.dt, evolve.T, evolve.periods out of range");
  }
  if (r.has("lap")) {
    Reader l(r.raw("lap"), "lap");
    if (l.has("eps")) c.lap.eps = numbers(l.raw("eps"), "lap.eps");
    c.lap.heatmap = l.boolean("heatmap", c.lap.heatmap);
    require(!c.lap.eps.empty(), "lap.eps must not be empty");
    for (std::size_t k = 0; k < c.lap.eps.size(); ++k)
      require(c.lap.eps[k] > 0 && (k == 0 || c.lap.eps[k] < c.lap.eps[k - 1]), "lap.eps must be positive and decreasing");
  }
  if (r.has("tube")) {
    Reader t(r.raw("tube"), "tube");
    c.tube.width = t.number("width", c.tube.width);
    c.tube.special_rays = t.boolean("special_rays", c.tube.special_rays);
    require(c.tube.width >= 0, "tube.width must be non-negative");
  }
  if (r.has("kernel")) {
    Reader k(r.raw("kernel"), "kernel");
    c.kernel.eps = k.number("eps", c.kernel.eps);
    c.kernel.samples = k.integer("samples", c.kernel.samples);
    c.kernel.chart = k.number("chart", c.kernel.chart);
    require(c.kernel.eps > 0 && c.kernel.samples >= 1 && c.kernel.chart > 0, "kernel parameters out of range");
  }
  if (r.has("bem")) {
    Reader b(r.raw("bem"), "bem");
    c.bem.eps = b.number("eps", c.bem.eps);
    c.bem.order = b.integer("order", c.bem.order);
    c.bem.panels_per_half_edge = b.integer("panels_per_half_edge", c.bem.panels_per_half_edge);
    c.bem.fem_check = b.boolean("fem_check", c.bem.fem_check);
    require(c.bem.eps >= 0.02, "bem.eps must be at least 0.02");
    require(c.bem.order >= 2 && c.bem.order <= 32 && c.bem.panels_per_half_edge >= 1, "bem panel layout out of range");
  }
  return c;
}

json ScenarioConfig::echo() const {
  json d = {{"type", domain.kind}};
  if (domain.kind == "trapezoid") {
    d["a"] = domain.a;
    d["b"] = domain.b;
  } else if (domain.kind == "tilted_square") {
    d["alpha"] = domain.alpha;
  } else if (domain.kind == "polygon") {
    d["vertices"] = json::array();
    for (const Vec2& v : domain.vertices) d["vertices"].push_back(point_json(v));
  } else if (domain.kind == "arc_domain") {
    d["edges"] = json::array();
    for (const Edge& e : domain.edges) {
      if (const auto* s = std::get_if<StraightSegment>(&e))
        d["edges"].push_back({{"type", "segment"}, {"start", point_json(s->start)}, {"end", point_json(s->end)}});
      else {
        const auto& a = std::get<CircularArc>(e);
        d["edges"].push_back({{"type", "arc"}, {"center", point_json(a.center)}, {"radius", a.radius},
                              {"start_angle", a.start_angle}, {"end_angle", a.end_angle}});
      }
    }
  }
  json graded = json::array();
  for (const Vec2& p : mesh.graded_points) graded.push_back(point_json(p));
  return {
      {"domain", d},
      {"lambda", lambdas},
      {"tasks", tasks},
      {"out", out.string()},
      {"seed", seed},
      {"load", {{"center", point_json(load.center)}, {"radius", load.radius}, {"amplitude", load.amplitude}}},
      {"mesh", {{"h", mesh.h}, {"lattice", mesh.lattice}, {"graded_points", graded}, {"grading", mesh.grading}, {"h_min", mesh.h_min}}},
      {"sweep", {{"lambda_min", sweep.lambda_min}, {"lambda_max", sweep.lambda_max}, {"steps", sweep.steps}}},
      {"orbit", {{"seed", orbit.seed}, {"iters", orbit.iters}, {"q_max", orbit.q_max}, {"depth", orbit.depth}}},
      {"corner", {{"s_max", corner.s_max}}},
      {"evolve", {{"dt", evolve.dt}, {"T", evolve.T}, {"periods", evolve.periods}, {"heatmap", evolve.heatmap}}},
      {"lap", {{"eps", lap.eps}, {"heatmap", lap.heatmap}}},
      {"tube", {{"width", tube.width}, {"special_rays", tube.special_rays}}},
      {"kernel", {{"eps", kernel.eps}, {"samples", kernel.samples}, {"chart", kernel.chart}}},
      {"bem", {{"eps", bem.eps}, {"order", bem.order}, {"panels_per_half_edge", bem.panels_per_half_edge}, {"fem_check", bem.fem_check}}},
  };
}

namespace {

json to_json_node(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    json o = json::object();
    for (const auto& [k, v] : *t) o[std::string(k.str())] = to_json_node(v);
    return o;
  }
  if (const auto* a = n.as_array()) {
    json o = json::array();
    for (const auto& v : *a) o.push_back(to_json_node(v));
    return o;
  }
  if (const auto* v = n.as_integer()) return v->get();
  if (const auto* v = n.as_floating_point()) return v->get();
  if (const auto* v = n.as_boolean()) return v->get();
  if (const auto* v = n.as_string()) return v->get();
  throw ConfigInvalid("dates and times are not valid config values");
}

}  // namespace

ScenarioConfig parse_toml(const std::string& text) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML line " << e.source().begin.line << ": " << e.description();
    throw ConfigInvalid(os.str());
  }
  return config_from_json(to_json_node(t));
}

ScenarioConfig parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("JSON: ") + e.what());
  }
  return config_from_json(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return path.extension() == ".json" ? parse_json(ss.str()) : parse_toml(ss.str());
}

}  // namespace wavetank
