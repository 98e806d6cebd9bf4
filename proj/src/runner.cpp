#include "wavetank/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>

#include "wavetank/billiard.hpp"
#include "wavetank/corner_analysis.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/evolution.hpp"
#include "wavetank/fem.hpp"
#include "wavetank/mesh.hpp"
#include "wavetank/output.hpp"
#include "wavetank/potential.hpp"

namespace wavetank {

using nlohmann::json;
namespace fs = std::filesystem;

bool RunManifest::ok() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskRecord& t) { return t.ok; });
}

json RunManifest::to_json() const {
  json t = json::array();
  for (const TaskRecord& r : tasks) {
    json e = {{"name", r.name}, {"ok", r.ok}, {"seconds", r.seconds}, {"files", r.files}};
    if (!r.ok) e["error"] = {{"kind", r.error_kind}, {"message", r.error}};
    t.push_back(e);
  }
  json f = json::array();
  for (const FileRecord& r : files) f.push_back({{"path", r.path}, {"bytes", r.bytes}, {"fnv1a64", r.fnv1a64}});
  return {{"version", version}, {"config", config}, {"tasks", t}, {"files", f}, {"ok", ok()}};
}

namespace {

json point_json(const BoundaryPoint& p) {
  return {{"theta", p.theta}, {"edge", p.edge_index}, {"x", p.xy.x()}, {"y", p.xy.y()}};
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json rotation_json(const RotationNumber& r) {
  return {{"approx", r.approx}, {"p", r.p}, {"q", r.q}, {"error_bound", r.error_bound}};
}

json orbit_json(const OrbitRecord& o) {
  json pts = json::array();
  for (const BoundaryPoint& p : o.points) pts.push_back(point_json(p));
  return {{"seed", point_json(o.seed)}, {"periodic", o.is_periodic}, {"period", o.period},
          {"multiplier", o.multiplier}, {"corner_contact", o.corner_contact}, {"points", pts}};
}

json chords_json(const std::vector<Chord>& cs) {
  json out = json::array();
  for (const Chord& c : cs) out.push_back({{"a", point_json(c.a)}, {"b", point_json(c.b)}, {"sign", sign_name(c.sign)}});
  return out;
}

const char* status_name(MorseSmaleStatus s) {
  switch (s) {
    case MorseSmaleStatus::certified: return "certified";
    case MorseSmaleStatus::not_morse_smale: return "not_morse_smale";
    case MorseSmaleStatus::undetermined: return "undetermined";
  }
  return "?";
}

json simplicity_json(const SimplicityReport& s) {
  json pts = json::object();
  for (int e = 0; e < 4; ++e) {
    json p = point_json(s.characteristic.points[std::size_t(e)]);
    p["value"] = s.characteristic.values[std::size_t(e)];
    p["unique"] = bool(s.characteristic.unique[std::size_t(e)]);
    pts[extremum_name(Extremum(e))] = p;
  }
  return {{"verdict", s.verdict},
          {"unique_extrema", s.unique_extrema},
          {"smooth_away_from_extrema", s.smooth_away_from_extrema},
          {"nondegenerate_extrema", s.nondegenerate_extrema},
          {"straight_corners", s.straight_corners},
          {"exotic_vertices", s.exotic_vertices},
          {"diagnostics", s.diagnostics},
          {"characteristic_points", pts}};
}

json morse_smale_json(const MorseSmaleReport& m) {
  json att = json::array(), rep = json::array();
  for (const auto& o : m.attracting_orbits) att.push_back(orbit_json(o));
  for (const auto& o : m.repelling_orbits) rep.push_back(orbit_json(o));
  return {{"verdict", m.verdict},
          {"status", status_name(m.status)},
          {"lambda_simple", m.lambda_simple},
          {"rotation", m.rotation ? rotation_json(*m.rotation) : json(nullptr)},
          {"sigma_nonempty", m.sigma_nonempty},
          {"sigma_disjoint_from_corners", m.sigma_disjoint_from_corners},
          {"hyperbolic", m.hyperbolic},
          {"min_abs_log_multiplier", m.min_abs_log_multiplier},
          {"attracting_orbits", att},
          {"repelling_orbits", rep},
          {"diagnostics", m.diagnostics}};
}

MeshOptions mesh_options(const MeshParams& p) {
  MeshOptions o;
  o.h = p.h;
  o.graded_points = p.graded_points;
  o.grading = p.grading;
  o.h_min = p.h_min;
  o.lattice = p.lattice == "square" ? Lattice::square : Lattice::triangular;
  return o;
}

// Collects the files of one task.
class TaskContext {
 public:
  TaskContext(const ScenarioConfig& c, const PlanarDomain& d, int workers) : cfg(c), domain(d), workers(workers) {}

  const ScenarioConfig& cfg;
  const PlanarDomain& domain;
  int workers;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content) {
    write_atomic(cfg.out / name, content);
    files.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void heatmap(const std::string& name, const Eigen::VectorXd& field, const TriMesh& mesh, const std::string& title) {
    for (const fs::path& p : emit_heatmap(field, mesh, cfg.out / name, title))
      files.push_back(fs::relative(p, cfg.out).generic_string());
  }
  // "name.ext" or "name_lambda0.8.ext" when several lambdas are configured.
  std::string file(const std::string& stem, double lambda, const std::string& ext) const {
    if (cfg.lambdas.size() == 1) return stem + ext;
    char buf[32];
    std::snprintf(buf, sizeof buf, "_lambda%.6g", lambda);
    return stem + buf + ext;
  }
};

void task_check(TaskContext& ctx) {
  for (double lambda : ctx.cfg.lambdas) {
    const SimplicityReport s = check_lambda_simple(ctx.domain, lambda);
    json j = {{"lambda", lambda}, {"lambda_simple", s.verdict}, {"simplicity", simplicity_json(s)}};
    if (s.verdict)
      j["morse_smale"] = morse_smale_json(morse_smale_check(ctx.domain, lambda));
    else
      j["morse_smale"] = nullptr;
    ctx.write_json(ctx.file("check", lambda, ".json"), j);
  }
}

void task_sweep(TaskContext& ctx) {
  const SweepParams& p = ctx.cfg.sweep;
  const std::size_t n = std::size_t(p.steps);
  std::vector<std::vector<double>> rows(n);
  std::vector<json> details(n);
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const double lambda = n == 1 ? p.lambda_min : p.lambda_min + (p.lambda_max - p.lambda_min) * double(k) / double(n - 1);
    const SimplicityReport s = check_lambda_simple(ctx.domain, lambda);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> row = {lambda, double(s.verdict), 0.0, nan, 0.0, 0.0, nan, 0.0};
    json d = {{"lambda", lambda}, {"lambda_simple", s.verdict}, {"diagnostics", s.diagnostics}};
    if (s.verdict) {
      const MorseSmaleReport m = morse_smale_check(ctx.domain, lambda);
      row[2] = double(m.verdict);
      if (m.rotation) {
        row[3] = m.rotation->approx;
        row[4] = double(m.rotation->p);
        row[5] = double(m.rotation->q);
      }
      row[6] = m.min_abs_log_multiplier;
      row[7] = double(m.attracting_orbits.size());
      d["morse_smale"] = m.verdict;
      d["status"] = status_name(m.status);
      d["diagnostics"] = m.diagnostics;
    }
    rows[k] = row;
    details[k] = d;
  });
  ctx.write("sweep.csv",
            csv_table({"lambda", "lambda_simple", "morse_smale", "rotation", "p", "q", "min_abs_log_multiplier", "attractors"}, rows));
  ctx.write_json("sweep.json", json{{"domain", ctx.cfg.echo()["domain"]}, {"points", details}});
}

void task_orbit(TaskContext& ctx) {
  const OrbitParams& p = ctx.cfg.orbit;
  for (double lambda : ctx.cfg.lambdas) {
    const ChessBilliard cb(ctx.domain, lambda);
    std::vector<std::vector<double>> rows;
    BoundaryPoint x = ctx.domain.at_theta(p.seed);
    std::string stopped;
    for (int k = 0; k <= p.iters; ++k) {
      rows.push_back({double(k), x.theta, x.xy.x(), x.xy.y()});
      if (k == p.iters) break;
      try {
        x = cb.b(x);
      } catch (const Error& e) {
        stopped = e.what();
        break;
      }
    }
    ctx.write(ctx.file("orbit", lambda, ".csv"), csv_table({"k", "theta", "x", "y"}, rows));

    json j = {{"lambda", lambda}, {"seed_theta", p.seed}, {"iterations", rows.size() - 1}};
    if (!stopped.empty()) j["stopped"] = stopped;
    const RotationNumber r = rotation_number(ctx.domain, lambda, std::max(p.iters, 1), p.seed);
    j["rotation"] = rotation_json(r);
    j["rational_guess"] = rotation_json(rational_guess(r.approx, r.error_bound, p.q_max));
    const PeriodicSearch ps = find_periodic_orbits(ctx.domain, lambda, p.q_max);
    json orbits = json::array();
    for (const auto& o : ps.orbits) orbits.push_back(orbit_json(o));
    j["periodic"] = {{"rotation", rotation_json(ps.rotation)}, {"all_periodic", ps.all_periodic}, {"orbits", orbits}};
    const RaySet rays = corner_orbits(ctx.domain, lambda, p.depth);
    json fw = json::array(), bw = json::array();
    for (const auto& q : rays.forward) fw.push_back(point_json(q));
    for (const auto& q : rays.backward) bw.push_back(point_json(q));
    j["corner_orbits"] = {{"forward", fw}, {"backward", bw}, {"special_rays", chords_json(rays.special_rays)}};
    try {
      j["attractor_chords"] = chords_json(attractor_chords(ctx.domain, lambda).attractor_chords);
    } catch (const Error& e) {
      j["attractor_chords"] = nullptr;
      j["attractor_error"] = e.what();
    }
    ctx.write_json(ctx.file("orbit", lambda, ".json"), j);
  }
}

void task_corner(TaskContext& ctx) {
  for (double lambda : ctx.cfg.lambdas) {
    json corners = json::array();
    for (std::size_t v : ctx.domain.corner_vertices()) {
      const BoundaryPoint vp = ctx.domain.vertex_point(v);
      json e = {{"vertex", v}, {"x", vp.xy.x()}, {"y", vp.xy.y()}};
      try {
        const CornerClass c = classify_corner(ctx.domain, lambda, vp);
        const IndicialData id = indicial_data(c.alpha, ctx.cfg.corner.s_max);
        json roots = json::array();
        for (cplx s : id.roots_strip) roots.push_back(cplx_json(s));
        e["characteristic"] = true;
        e["mu"] = sign_name(c.mu);
        e["nu"] = sign_name(c.nu);
        e["alpha_plus"] = c.alpha_plus;
        e["alpha_minus"] = c.alpha_minus;
        e["alpha"] = c.alpha;
        e["l_exponent"] = cplx_json(id.l_exponent);
        e["re_l"] = id.re_l;
        e["energy_space"] = id.energy_space;
        e["sobolev_bound"] = id.sobolev_bound;
        e["roots_strip"] = roots;
      } catch (const NotACharacteristicCorner&) {
        e["characteristic"] = false;
      }
      corners.push_back(e);
    }
    ctx.write_json(ctx.file("corner", lambda, ".json"),
                   {{"lambda", lambda}, {"s_max", ctx.cfg.corner.s_max}, {"corners", corners}});
  }
}

// Attractor chords, plus special rays on request; nullopt when there is no attractor.
std::optional<RaySet> tube_rays(const TaskContext& ctx, double lambda, json& info) {
  try {
    RaySet r = attractor_chords(ctx.domain, lambda);
    if (ctx.cfg.tube.special_rays) r.special_rays = corner_orbits(ctx.domain, lambda, ctx.cfg.orbit.depth).special_rays;
    return r;
  } catch (const Error& e) {
    info["tube_error"] = e.what();
    return std::nullopt;
  }
}

void task_evolve(TaskContext& ctx) {
  const TriMesh mesh = triangulate(ctx.domain, mesh_options(ctx.cfg.mesh));
  const StiffnessForms forms = assemble_forms(mesh);
  const Eigen::VectorXd F = load_vector(mesh, forms, ctx.cfg.load);
  const double width = ctx.cfg.tube.width > 0 ? ctx.cfg.tube.width : 3 * mesh.h;
  for (double lambda : ctx.cfg.lambdas) {
    const double period = 2 * std::numbers::pi / lambda;
    const double T = ctx.cfg.evolve.T > 0 ? ctx.cfg.evolve.T : ctx.cfg.evolve.periods * period;
    LeapfrogOptions opt;
    opt.dt = ctx.cfg.evolve.dt;
    opt.T = T;
    for (int k = 1; k * period <= T * (1 + 1e-12); ++k) opt.record_times.push_back(k * period);
    if (opt.record_times.empty() || opt.record_times.back() < T) opt.record_times.push_back(T);
    const EvolutionTrace tr = evolve_leapfrog(forms, F, lambda, opt);

    json info = {{"lambda", lambda}, {"T", T}, {"dt", opt.dt}, {"vertices", mesh.vertex_count()},
                 {"triangles", mesh.triangles.size()}, {"warnings", tr.warnings}, {"tube_width", width}};
    std::vector<std::vector<double>> rows;
    const std::optional<RaySet> rays = tube_rays(ctx, lambda, info);
    if (rays) {
      const std::vector<char> tube = tube_mask(mesh, *rays, width);
      const ConcentrationSeries cs = concentration_diagnostics(mesh, tr, tube);
      for (std::size_t k = 0; k < cs.times.size(); ++k)
        rows.push_back({cs.times[k], tr.sup_norm[k], cs.total_h1[k], cs.in_tube_h1[k], cs.off_tube_h1[k], cs.tube_ratio[k]});
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t k = 0; k < tr.times.size(); ++k)
        rows.push_back({tr.times[k], tr.sup_norm[k], h1_norm(mesh, tr.fields[k].cast<cplx>()), nan, nan, nan});
    }
    ctx.write(ctx.file("evolve", lambda, ".csv"),
              csv_table({"t", "sup", "h1", "in_tube_h1", "off_tube_h1", "tube_ratio"}, rows));
    ctx.write_json(ctx.file("evolve", lambda, ".json"), info);
    if (ctx.cfg.evolve.heatmap && !tr.fields.empty())
      ctx.heatmap(ctx.file("evolve_final", lambda, ".svg"), tr.fields.back(), mesh, "u at t = " + format_double(tr.times.back()));
  }
}

void task_lap(TaskContext& ctx) {
  const TriMesh mesh = triangulate(ctx.domain, mesh_options(ctx.cfg.mesh));
  const StiffnessForms forms = assemble_forms(mesh);
  const Eigen::VectorXd F = load_vector(mesh, forms, ctx.cfg.load);
  const double width = ctx.cfg.tube.width > 0 ? ctx.cfg.tube.width : 3 * mesh.h;
  for (double lambda : ctx.cfg.lambdas) {
    json info = {{"lambda", lambda}, {"vertices", mesh.vertex_count()}, {"tube_width", width}};
    const std::optional<RaySet> rays = tube_rays(ctx, lambda, info);
    const std::vector<char> tube = rays ? tube_mask(mesh, *rays, width) : std::vector<char>{};
    const LapReport r = lap_sweep(mesh, forms, F, lambda, ctx.cfg.lap.eps, tube);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.eps.size(); ++k) rows.push_back({r.eps[k], r.h1[k], r.tube_energy_fraction[k]});
    ctx.write(ctx.file("lap", lambda, ".csv"), csv_table({"eps", "h1", "tube_energy_fraction"}, rows));
    info["eps"] = r.eps;
    info["cauchy_off_tube"] = r.cauchy_off_tube;
    info["cauchy_decreasing"] = r.cauchy_decreasing;
    info["localization_increasing"] = r.localization_increasing;
    ctx.write_json(ctx.file("lap", lambda, ".json"), info);
    if (ctx.cfg.lap.heatmap && !r.fields.empty())
      ctx.heatmap(ctx.file("lap_re", lambda, ".svg"), r.fields.back().real(), mesh,
                  "Re u, eps = " + format_double(r.eps.back()));
  }
}

void task_kernel_check(TaskContext& ctx) {
  const KernelParams& p = ctx.cfg.kernel;
  for (double lambda : ctx.cfg.lambdas) {
    const auto f = ComplexFrequency::off_axis(cplx(lambda, p.eps));
    json corners = json::array();
    for (std::size_t v : ctx.domain.corner_vertices()) {
      // the chart wants a (+,+) corner; one of the reflections provides it
      std::optional<PlanarDomain> mirrored;
      CornerClass c;
      std::string reflection;
      try {
        c = classify_corner(ctx.domain, lambda, ctx.domain.vertex_point(v));
      } catch (const NotACharacteristicCorner&) {
        continue;
      }
      const std::pair<std::optional<Reflection>, const char*> options[] = {
          {std::nullopt, "none"}, {Reflection::x1, "x1"}, {Reflection::x2, "x2"}, {Reflection::both, "both"}};
      bool found = false;
      for (const auto& [r, rname] : options) {
        if (r) mirrored.emplace(reflect(ctx.domain, *r));
        const PlanarDomain& d = r ? *mirrored : ctx.domain;
        const Vec2 target = r ? reflect_point(ctx.domain.vertices()[v], *r) : ctx.domain.vertices()[v];
        std::size_t w = 0;
        for (std::size_t k = 1; k < d.vertices().size(); ++k)
          if ((d.vertices()[k] - target).norm() < (d.vertices()[w] - target).norm()) w = k;
        const CornerClass cc = classify_corner(d, lambda, d.vertex_point(w));
        if (cc.mu == Sign::plus && cc.nu == Sign::plus) {
          c = cc;
          reflection = rname;
          found = true;
          break;
        }
      }
      if (!found) throw NotACharacteristicCorner("no reflection makes vertex " + std::to_string(v) + " a (+,+) corner");
      const KernelCheckReport r = kernel_check(c, f, p.samples, p.chart);
      const double worst = *std::max_element(r.max_rel_error_exact.begin(), r.max_rel_error_exact.end());
      corners.push_back({{"vertex", v},
                         {"reflection", reflection},
                         {"alpha", c.alpha},
                         {"max_rel_error_exact", r.max_rel_error_exact},
                         {"max_rel_error_leading", r.max_rel_error_leading},
                         {"samples_per_quadrant", r.samples_per_quadrant},
                         {"within_1e-3", worst < 1e-3}});
    }
    ctx.write_json(ctx.file("kernel_check", lambda, ".json"),
                   {{"lambda", lambda}, {"eps", p.eps}, {"chart", p.chart}, {"corners", corners}});
  }
}

cplx bem_density(const BoundaryPoint& p) {
  const double t = p.theta, pi = std::numbers::pi;
  return cplx(std::cos(2 * pi * t) + 0.3 * std::sin(4 * pi * t), 0.5 * std::sin(2 * pi * t));
}

void task_bem_verify(TaskContext& ctx) {
  const BemParams& p = ctx.cfg.bem;
  PanelOptions po;
  po.order = p.order;
  po.panels_per_half_edge = p.panels_per_half_edge;
  for (double lambda : ctx.cfg.lambdas) {
    const auto f = ComplexFrequency::off_axis(cplx(lambda, p.eps));
    json info = {{"lambda", lambda}, {"eps", p.eps}};

    // round trip: g = dC v for a smooth v, then solve for v again
    BoundaryDensity v = make_panel_density(ctx.domain, po);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.values[i] = bem_density(v.nodes[std::size_t(i)]);
    BoundaryDensity g = v;
    g.values = differentiated_single_layer_matrix(ctx.domain, v, f) * v.values;
    const BoundarySolveResult rt = boundary_solve(ctx.domain, f, g, v.mass());
    info["round_trip"] = {{"nodes", v.size()},
                          {"residual", rt.residual},
                          {"condition_estimate", rt.condition_estimate},
                          {"relative_error", (rt.v.values - v.values).norm() / v.values.norm()}};

    if (p.fem_check) {
      BoundaryDensity gb = make_panel_density(ctx.domain, po);
      for (Eigen::Index i = 0; i < gb.size(); ++i) {
        const BoundaryPoint& x = gb.nodes[std::size_t(i)];
        const Vec2c gr = volume_potential_gradient(ctx.cfg.load, f, x.xy);
        const Vec2 tau = ctx.domain.tangent(x);
        gb.values[i] = gr[0] * tau[0] + gr[1] * tau[1];
      }
      const BoundarySolveResult s0 = boundary_solve(ctx.domain, f, gb, 0.0), s1 = boundary_solve(ctx.domain, f, gb, 1.0);
      const BoundaryPoint anchor = gb.nodes[std::size_t(gb.size() / 3)];
      const cplx c0 = restricted_single_layer(ctx.domain, s0.v, f, anchor);
      const cplx c1 = restricted_single_layer(ctx.domain, s1.v, f, anchor);
      const cplx mass = (volume_potential(ctx.cfg.load, f, anchor.xy) - c0) / (c1 - c0);
      BoundaryDensity vb = s0.v;
      vb.values = s0.v.values + mass * (s1.v.values - s0.v.values);

      const TriMesh mesh = triangulate(ctx.domain, mesh_options(ctx.cfg.mesh));
      const StiffnessForms forms = assemble_forms(mesh);
      const Eigen::VectorXcd u =
          forms.to_nodal(resolvent_solve(forms, load_vector(mesh, forms, ctx.cfg.load).cast<cplx>(), f.omega));
      std::vector<std::vector<double>> rows;
      double worst = 0.0;
      for (std::size_t i = 0; i < mesh.vertex_count(); i += 97) {
        const Vec2& x = mesh.vertices[i];
        if (mesh.boundary[i] || (ctx.domain.project(x).xy - x).norm() < 0.1) continue;
        const cplx fem = u[Eigen::Index(i)];
        const cplx bem = volume_potential(ctx.cfg.load, f, x) - single_layer(ctx.domain, vb, f, x);
        worst = std::max(worst, std::abs(fem - bem));
        rows.push_back({x.x(), x.y(), fem.real(), fem.imag(), bem.real(), bem.imag()});
      }
      const double scale = u.cwiseAbs().maxCoeff();
      info["fem_vs_bem"] = {{"points", rows.size()}, {"max_abs_diff", worst}, {"max_abs_u", scale},
                            {"relative", scale > 0 ? worst / scale : 0.0}};
      ctx.write(ctx.file("bem_interior", lambda, ".csv"),
                csv_table({"x", "y", "fem_re", "fem_im", "bem_re", "bem_im"}, rows));
    }
    ctx.write_json(ctx.file("bem_verify", lambda, ".json"), info);
  }
}

const std::map<std::string, std::function<void(TaskContext&)>>& task_table() {
  static const std::map<std::string, std::function<void(TaskContext&)>> t = {
      {"check", task_check}, {"sweep", task_sweep}, {"orbit", task_orbit}, {"corner", task_corner},
      {"evolve", task_evolve}, {"lap", task_lap}, {"kernel-check", task_kernel_check}, {"bem-verify", task_bem_verify}};
  return t;
}

}  // namespace

RunManifest run(const ScenarioConfig& cfg, const RunOptions& opt) {
  RunManifest m;
  m.config = cfg.echo();
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create " + cfg.out.string() + ": " + ec.message());

  std::optional<PlanarDomain> domain;
  std::string domain_error;
  try {
    domain.emplace(cfg.domain.build());
  } catch (const std::exception& e) {
    domain_error = e.what();
  }

  for (const std::string& name : cfg.tasks) {
    TaskRecord rec;
    rec.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    log_message(LogLevel::info, "task " + name);
    if (!domain) {
      rec.error_kind = "GeometryError";
      rec.error = domain_error;
    } else {
      TaskContext ctx(cfg, *domain, opt.workers);
      try {
        task_table().at(name)(ctx);
        rec.ok = true;
      } catch (const Error& e) {
        rec.error_kind = e.kind();
        rec.error = e.what();
      } catch (const std::exception& e) {
        rec.error_kind = "TaskFailed";
        rec.error = e.what();
      }
      rec.files = ctx.files;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!rec.ok) log_message(LogLevel::info, "task " + name + " failed: " + rec.error);
    log_message(LogLevel::debug, "task " + name + " took " + format_double(rec.seconds) + " s");
    m.tasks.push_back(rec);
  }

  for (const TaskRecord& t : m.tasks) {
    for (const std::string& f : t.files) {
      const std::string bytes = read_file(cfg.out / f);
      m.files.push_back({f, bytes.size(), hex64(fnv1a64(bytes))});
    }
  }
  write_atomic(cfg.out / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace wavetank
