#include "vswalk/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vswalk/csv.hpp"
#include "vswalk/errors.hpp"
#include "vswalk/estimator.hpp"
#include "vswalk/parallel.hpp"
#include "vswalk/sampling.hpp"

namespace vswalk {

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    out.push_back(parse_double(std::string_view(text).substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_number_list(text);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  require(parts.size() == 3, "grid must look like a:b:N");
  const double a = parse_double(parts[0]), b = parse_double(parts[1]);
  const double nd = parse_double(parts[2]);
  require(nd >= 1 && nd == std::floor(nd) && nd <= 1e7, "grid point count must be a positive integer");
  const long n = static_cast<long>(nd);
  std::vector<double> out;
  for (long k = 0; k < n; ++k) out.push_back(n == 1 ? a : (k == n - 1 ? b : a + (b - a) * k / (n - 1)));
  return out;
}

namespace {

struct Options {
  std::string alphas, construction = "full", c_grid = "0.005:1:201", out;
  std::string backend = "euclidean", h = "const:0", mode = "full", start, phi, point, eps_grid, method = "quadrature";
  std::string pz_grid = "-30:30:601";
  int dim = 3;
  double c = 0.5, eps = 0.1;
  long steps = 0, paths = 0, samples = 0;
  std::uint64_t seed = 0;
};

CarnotParams parse_alphas(const std::string& s) {
  require(!s.empty(), "--alphas is required");
  return CarnotParams(parse_number_list(s));
}

Backend make_backend(const Options& o) {
  if (o.backend == "euclidean") {
    require(o.dim >= 1 && o.dim <= kMaxDim, "--dim out of range");
    return Backend::euclidean(o.dim, parse_weight(o.h, o.dim));
  }
  if (o.backend == "sphere") return Backend::sphere(parse_weight(o.h, 3));
  if (o.backend == "heisenberg" || o.backend == "carnot") {
    CarnotParams p = parse_alphas(o.alphas.empty() && o.backend == "heisenberg" ? "1" : o.alphas);
    if (o.backend == "heisenberg") require(p.equal_alphas(), "heisenberg backend needs equal alphas");
    return Backend::carnot(p, parse_weight(o.h, p.dim()));
  }
  throw ValidationError("unknown backend '" + o.backend + "'");
}

Vec make_point(const Backend& b, const std::string& s) {
  Vec q = Vec::Zero(b.ambient_dim());
  if (s.empty()) {
    if (b.kind() == BackendKind::sphere) q[2] = 1.0;
    return q;
  }
  auto v = parse_number_list(s);
  require(static_cast<int>(v.size()) == b.ambient_dim(), "point has the wrong number of coordinates");
  for (int k = 0; k < b.ambient_dim(); ++k) q[k] = v[k];
  b.check_point(q);
  return q;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw NumericalError("failed writing '" + path + "'");
}

int cmd_sigma(const Options& o) {
  CarnotParams p = parse_alphas(o.alphas);
  Construction cons = parse_construction(o.construction);
  std::vector<double> cs = parse_grid(o.c_grid);
  for (double c : cs) require(c > 0.0 && c <= 1.0, "c-grid values must lie in (0, 1]");
  std::vector<SigmaResult> res = sigma_curve(p, cs, cons);
  std::ostringstream ss;
  CsvWriter w(ss);
  w.row({"c", "i", "sigma", "err_estimate"});
  for (const auto& r : res)
    for (int i = 0; i < p.d(); ++i)
      w.row({format_double(r.c), std::to_string(i + 1), format_double(r.values[i]), format_double(r.quad_error_estimate)});
  write_file(o.out, ss.str());
  return 0;
}

int cmd_density(const Options& o) {
  CarnotParams p = parse_alphas(o.alphas);
  require(o.c > 0.0 && o.c <= 1.0, "--c must lie in (0, 1]");
  require(o.eps > 0.0, "--eps must be positive");
  std::vector<double> grid = parse_grid(o.pz_grid);
  Backend b = Backend::carnot(p);
  Vec q = Vec::Zero(p.dim());
  StepDensity full = geodesic_step_density(b, q, o.c, o.eps, StepMode::full);
  StepDensity mini = geodesic_step_density(b, q, o.c, o.eps, StepMode::minimizing);
  StepDensity sgn = geodesic_step_density(b, q, o.c, o.eps, StepMode::signed_measure);
  std::ostringstream ss;
  CsvWriter w(ss);
  w.row({"pz", "full", "minimizing", "signed"});
  for (double pz : grid)
    w.row({format_double(pz), format_double(full.pz_marginal(pz)), format_double(mini.pz_marginal(pz)),
           format_double(sgn.pz_marginal(pz))});
  write_file(o.out, ss.str());
  return 0;
}

int cmd_walk(const Options& o) {
  Backend b = make_backend(o);
  Vec q0 = make_point(b, o.start);
  WalkConfig cfg{o.eps, o.c, parse_step_mode(o.mode), o.steps, o.paths, o.seed};
  cfg.validate(b);
  std::vector<Path> paths = simulate_paths(b, q0, cfg);
  std::ostringstream ss;
  CsvWriter w(ss);
  std::vector<std::string> header{"path_id", "step"};
  for (int k = 0; k < b.ambient_dim(); ++k)
    header.push_back(b.kind() == BackendKind::carnot && k == b.ambient_dim() - 1 ? "z" : "x" + std::to_string(k + 1));
  w.row(header);
  std::vector<std::string> fields;
  for (std::size_t id = 0; id < paths.size(); ++id) {
    const Path& path = paths[id];
    for (std::size_t m = 0; m < path.size(); ++m) {
      fields.assign({std::to_string(id), std::to_string(m)});
      for (int k = 0; k < path.dim; ++k) fields.push_back(format_double(path.coords[m * path.dim + k]));
      w.row(fields);
    }
  }
  write_file(o.out, ss.str());
  return 0;
}

int cmd_generator_check(const Options& o, bool seed_given) {
  Backend b = make_backend(o);
  Vec q = make_point(b, o.point);
  require(!o.phi.empty(), "--phi is required");
  Polynomial phi = Polynomial::parse(o.phi, b.ambient_dim());
  StepMode mode = parse_step_mode(o.mode);
  Method method = parse_method(o.method);
  require(!o.eps_grid.empty(), "--eps-grid is required");
  std::vector<double> eps = parse_grid(o.eps_grid);
  for (double e : eps) require(e > 0.0, "eps values must be positive");
  require(o.c >= 0.0 && o.c <= 1.0, "--c must lie in [0, 1]");
  if (method == Method::monte_carlo) {
    require(seed_given, "--seed is required for monte_carlo");
    require(o.samples >= 1000, "--samples must be >= 1000");
    require(mode != StepMode::signed_measure, "the signed construction cannot be sampled");
  }
  GeneratorSpec spec;
  spec.backend = b;
  spec.c = o.c;
  if (b.kind() == BackendKind::carnot) {
    if (mode == StepMode::flow) {
      spec.variant = GeneratorVariant::flow_contact;
    } else {
      require(o.c > 0.0, "carnot geodesic walks need c in (0, 1]");
      spec.variant = mode == StepMode::minimizing ? GeneratorVariant::carnot_alt
                     : o.backend == "heisenberg"  ? GeneratorVariant::heisenberg_geodesic
                                                  : GeneratorVariant::carnot_geodesic;
    }
  } else {
    require(mode == StepMode::full || (mode == StepMode::flow && b.kind() == BackendKind::euclidean),
            "mode not available on this backend");
    spec.variant = mode == StepMode::flow ? GeneratorVariant::flow_riem : GeneratorVariant::riem_geodesic;
  }
  if (b.kind() == BackendKind::carnot && mode != StepMode::flow)
    spec.sigma = sigma_coeffs(b.params(), o.c, construction_of(mode));
  spec.validate();
  const double target = limit_generator(spec, phi, q);
  EstimateOptions opt{method, o.samples, o.seed, Execution::parallel};
  std::ostringstream ss;
  CsvWriter w(ss);
  w.row({"eps", "estimate", "stderr", "target", "abs_error"});
  for (double e : eps) {
    Estimate est = estimate_Leps(b, q, o.c, e, mode, phi, opt);
    w.row({format_double(e), format_double(est.value), format_double(est.error), format_double(target),
           format_double(std::abs(est.value - target))});
  }
  write_file(o.out, ss.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
  configure_threads_from_env();
  Options o;
  CLI::App app{"Geodesic and flow random walks with volume sampling"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  auto* sigma = app.add_subcommand("sigma", "limit coefficients sigma_i(c) on a c grid");
  sigma->add_option("--alphas", o.alphas, "comma-separated alphas, sorted")->required();
  sigma->add_option("--construction", o.construction, "full | minimizing | signed");
  sigma->add_option("--c-grid", o.c_grid, "a:b:N");
  sigma->add_option("--out", o.out, "output CSV")->required();

  auto* density = app.add_subcommand("density", "p_z marginals of the step densities");
  density->add_option("--alphas", o.alphas)->required();
  density->add_option("--c", o.c)->required();
  density->add_option("--eps", o.eps)->required();
  density->add_option("--pz-grid", o.pz_grid, "a:b:N");
  density->add_option("--out", o.out)->required();

  auto* walk = app.add_subcommand("walk", "simulate random-walk paths");
  walk->add_option("--backend", o.backend, "euclidean | sphere | heisenberg | carnot");
  walk->add_option("--dim", o.dim, "euclidean dimension");
  walk->add_option("--alphas", o.alphas);
  walk->add_option("--h", o.h, "weight: const:v | linear:a1,.. | quad:a;M | poly:expr");
  walk->add_option("--eps", o.eps)->required();
  walk->add_option("--c", o.c)->required();
  walk->add_option("--mode", o.mode, "full | minimizing | flow");
  walk->add_option("--steps", o.steps)->required();
  walk->add_option("--paths", o.paths)->required();
  auto* walk_seed = walk->add_option("--seed", o.seed)->required();
  walk->add_option("--start", o.start, "comma-separated start point");
  walk->add_option("--out", o.out)->required();
  (void)walk_seed;

  auto* gen = app.add_subcommand("generator-check", "compare L^eps phi with the limit generator");
  gen->add_option("--backend", o.backend);
  gen->add_option("--dim", o.dim);
  gen->add_option("--alphas", o.alphas);
  gen->add_option("--c", o.c)->required();
  gen->add_option("--h", o.h);
  gen->add_option("--phi", o.phi, "polynomial in x1..xn, z")->required();
  gen->add_option("--point", o.point);
  gen->add_option("--mode", o.mode);
  gen->add_option("--eps-grid", o.eps_grid)->required();
  gen->add_option("--method", o.method, "quadrature | monte_carlo");
  gen->add_option("--samples", o.samples);
  auto* gen_seed = gen->add_option("--seed", o.seed);
  gen->add_option("--out", o.out)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (sigma->parsed()) return cmd_sigma(o);
    if (density->parsed()) return cmd_density(o);
    if (walk->parsed()) return cmd_walk(o);
    if (gen->parsed()) return cmd_generator_check(o, gen_seed->count() > 0);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace vswalk
