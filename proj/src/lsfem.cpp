#include "lsfem/lsfem.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lsfem/quadrature.hpp"

namespace lsfem {

namespace {

FeFunction expand_free(const SpacePtr& space, const std::vector<double>& free_vals,
                       const std::function<double(Vec2)>& g) {
  assert(static_cast<int>(free_vals.size()) == space->n_free());
  FeFunction f = zero_function(space);
  for (int d = 0; d < space->n_dofs(); ++d) {
    const int idx = space->free_index[d];
    if (idx >= 0)
      f.coefficients[d] = free_vals[idx];
    else if (g)
      f.coefficients[d] = g(space->dof_coords[d]);
  }
  return f;
}

/// int (K grad f) . grad f per element of f's own mesh (exact quadrature:
/// the integrand is polynomial).
std::vector<double> element_energy_sq(const FeFunction& f, const FormDescriptor& form) {
  const FeSpace& space = *f.space;
  const SimplicialMesh& mesh = *space.mesh;
  const int dim = mesh.dim;
  const int ns = shape_count(dim, space.degree);
  const Mat2 K = form.diffusion();
  const QuadratureRule rule = default_quadrature(space.degree, space.degree, dim);

  std::vector<Vec2> ref_grads(rule.points.size() * ns);
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    shape_ref_gradients(dim, space.degree, rule.points[q], ref_grads.data() + q * ns);

  std::vector<double> out(mesh.elements.size(), 0.0);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const ElementMap map = element_map(mesh, static_cast<int>(e));
    const int* dofs = space.dofs_of(static_cast<int>(e));
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 g{0.0, 0.0};
      for (int j = 0; j < ns; ++j)
        g = g + f.coefficients[dofs[j]] * map.push_gradient(ref_grads[q * ns + j]);
      acc += rule.weights[q] * std::abs(map.det) * dot(K.apply(g), g);
    }
    out[e] = acc;
  }
  return out;
}

double energy_sq(const FeFunction& f, const FormDescriptor& form) {
  const auto per_element = element_energy_sq(f, form);
  return std::accumulate(per_element.begin(), per_element.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Adaptive element quadrature for error integrals. Integrands built from an
// exact solution can have layers far below the mesh size; a cell is accepted
// when the embedded parent/children comparison converges, and cells meeting
// a layer-hint band are subdivided unconditionally until they resolve the
// layer scale, so the comparison is never fooled by an invisible spike.
// ---------------------------------------------------------------------------

constexpr double quad_rel_tol = 1e-9;
constexpr double quad_noise_tol = 1e-14;
constexpr int max_components = 8;

struct CellIntegrator {
  int dim;
  int n;  ///< integrand components, <= max_components
  QuadratureRule rule;
  std::vector<LayerHint> hints;
  int max_depth;
  /// Component acting as a cancellation-noise floor: difference-of-equals
  /// integrands ((u - u_h)^2 with u_h == u to roundoff) never settle under a
  /// purely relative comparison, so cells whose signal deviation stays below
  /// quad_noise_tol times this magnitude integral are accepted as converged.
  int noise = -1;
  std::function<void(Vec2, double, double*)> eval;  ///< accumulate w * f(x)

  void apply_rule(Vec2 a, Vec2 b, Vec2 c, double* acc) const {
    if (dim == 1) {
      const double len = b.x - a.x;
      for (std::size_t q = 0; q < rule.points.size(); ++q)
        eval({a.x + rule.points[q].x * len, 0.0}, rule.weights[q] * std::abs(len), acc);
    } else {
      const Vec2 e1 = b - a, e2 = c - a;
      const double det = std::abs(cross2(e1, e2));
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 p = rule.points[q];
        eval(a + p.x * e1 + p.y * e2, rule.weights[q] * det, acc);
      }
    }
  }

  bool forced_split(Vec2 a, Vec2 b, Vec2 c) const {
    for (const auto& h : hints) {
      auto coord = [&](Vec2 v) { return h.axis == 0 ? v.x : v.y; };
      double lo = std::min(coord(a), coord(b));
      double hi = std::max(coord(a), coord(b));
      if (dim == 2) {
        lo = std::min(lo, coord(c));
        hi = std::max(hi, coord(c));
      }
      if (hi - lo <= 0.5 * h.scale) continue;  // layer resolved by this cell
      if (hi >= h.position - 30.0 * h.scale && lo <= h.position + 30.0 * h.scale) return true;
    }
    return false;
  }

  void integrate(Vec2 a, Vec2 b, Vec2 c, int depth, double* out) const {
    double parent[max_components] = {0.0};
    double refined[max_components] = {0.0};
    apply_rule(a, b, c, parent);

    Vec2 kids[4][3];
    int n_kids;
    if (dim == 1) {
      const Vec2 m = 0.5 * (a + b);
      n_kids = 2;
      kids[0][0] = a, kids[0][1] = m;
      kids[1][0] = m, kids[1][1] = b;
    } else {
      const Vec2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
      n_kids = 4;
      kids[0][0] = a, kids[0][1] = mab, kids[0][2] = mca;
      kids[1][0] = mab, kids[1][1] = b, kids[1][2] = mbc;
      kids[2][0] = mca, kids[2][1] = mbc, kids[2][2] = c;
      kids[3][0] = mab, kids[3][1] = mbc, kids[3][2] = mca;
    }
    for (int k = 0; k < n_kids; ++k) apply_rule(kids[k][0], kids[k][1], kids[k][2], refined);

    const int signal = noise >= 0 ? noise : n;
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < signal; ++i) {
      diff += std::abs(refined[i] - parent[i]);
      scale += std::abs(refined[i]);
    }
    const double floor = noise >= 0 ? quad_noise_tol * std::abs(refined[noise]) : 0.0;
    const bool converged = diff <= quad_rel_tol * scale + floor;
    if (depth >= max_depth || (converged && !forced_split(a, b, c))) {
      for (int i = 0; i < n; ++i) out[i] += refined[i];
      return;
    }
    for (int k = 0; k < n_kids; ++k)
      integrate(kids[k][0], kids[k][1], kids[k][2], depth + 1, out);
  }
};

CellIntegrator make_integrator(int dim, int n, const std::vector<LayerHint>& hints,
                               std::function<void(Vec2, double, double*)> eval) {
  assert(n <= max_components);
  CellIntegrator ci;
  ci.dim = dim;
  ci.n = n;
  ci.rule = dim == 1 ? gauss_legendre_01(6) : triangle_rule(10);
  ci.hints = hints;
  ci.max_depth = dim == 1 ? 40 : 14;
  ci.eval = std::move(eval);
  return ci;
}

void element_corners(const SimplicialMesh& mesh, int e, Vec2* v) {
  v[0] = mesh.vertices[mesh.elements[e][0]];
  v[1] = mesh.vertices[mesh.elements[e][1]];
  v[2] = mesh.dim == 2 ? mesh.vertices[mesh.elements[e][2]] : Vec2{0.0, 0.0};
}

/// Value of a discrete function at a physical point known to lie in element e.
double value_in_element(const FeFunction& f, int e, Vec2 x, double* shape_buf) {
  const FeSpace& space = *f.space;
  const Vec2 ref = ref_from_barycentric(space.mesh->dim, barycentric(*space.mesh, e, x));
  shape_values(space.mesh->dim, space.degree, ref, shape_buf);
  const int* dofs = space.dofs_of(e);
  double v = 0.0;
  for (int j = 0; j < shape_count(space.mesh->dim, space.degree); ++j)
    v += f.coefficients[dofs[j]] * shape_buf[j];
  return v;
}

Vec2 gradient_in_element(const FeFunction& f, int e, Vec2 x, const ElementMap& map,
                         Vec2* grad_buf) {
  const FeSpace& space = *f.space;
  const int dim = space.mesh->dim;
  const Vec2 ref = ref_from_barycentric(dim, barycentric(*space.mesh, e, x));
  shape_ref_gradients(dim, space.degree, ref, grad_buf);
  const int* dofs = space.dofs_of(e);
  Vec2 g{0.0, 0.0};
  for (int j = 0; j < shape_count(dim, space.degree); ++j)
    g = g + f.coefficients[dofs[j]] * map.push_gradient(grad_buf[j]);
  return g;
}

std::string test_kind_name(TestKind kind) {
  return kind == TestKind::p2_same_mesh ? "p2_same_mesh" : "p1_refined_mesh";
}

}  // namespace

FeFunction solve_direct(const FormDescriptor& form, const SpacePtr& trial) {
  const AssembledOperator op = assemble_full(*trial, *trial, form);
  std::vector<double> rhs = assemble_load(*trial, form);
  for (int i = 0; i < trial->n_free(); ++i) rhs[i] += op.dirichlet_correction[i];
  auto [x, report] = solve_sparse(op.matrix, rhs);
  return expand_free(trial, x, form.dirichlet_g);
}

FeFunction riesz_representant(const FeFunction& u, const FormDescriptor& form,
                              const SpacePtr& test) {
  FormDescriptor aform = form;
  aform.dirichlet_g = nullptr;
  const AssembledOperator a_op = assemble_diffusion(*test, *test, aform);
  const std::vector<double> rhs = assemble_convective_load(*test, u, form);
  auto [w, report] = solve_sparse(a_op.matrix, rhs);
  return expand_free(test, w, nullptr);
}

DiscreteXNorm discrete_xnorm(const FeFunction& u, const FormDescriptor& form,
                             const SpacePtr& test) {
  DiscreteXNorm n;
  const double y_sq = energy_sq(u, form);
  const FeFunction w = riesz_representant(u, form, test);
  const double w_sq = energy_sq(w, form);
  n.y_part = std::sqrt(y_sq);
  n.w_part = std::sqrt(w_sq);
  n.total = std::sqrt(y_sq + w_sq);
  return n;
}

double y_norm_error(const FeFunction& u, const ExactSolution& exact, const FormDescriptor& form) {
  const FeSpace& space = *u.space;
  const SimplicialMesh& mesh = *space.mesh;
  const Mat2 K = form.diffusion();
  double total[2] = {0.0, 0.0};
  Vec2 grad_buf[8];
  int ei = 0;
  ElementMap map;
  CellIntegrator ci =
      make_integrator(mesh.dim, 2, exact.layers, [&](Vec2 x, double w, double* acc) {
        const Vec2 gu = exact.gradient(x);
        const Vec2 gh = gradient_in_element(u, ei, x, map, grad_buf);
        const Vec2 ge = gu - gh;
        const Vec2 gm{std::abs(gu.x) + std::abs(gh.x), std::abs(gu.y) + std::abs(gh.y)};
        acc[0] += w * dot(K.apply(ge), ge);
        acc[1] += w * dot(K.apply(gm), gm);
      });
  ci.noise = 1;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    ei = static_cast<int>(e);
    map = element_map(mesh, ei);
    Vec2 v[3];
    element_corners(mesh, ei, v);
    ci.integrate(v[0], v[1], v[2], 0, total);
  }
  return std::sqrt(total[0]);
}

double l2_norm_error(const FeFunction& u, const ExactSolution& exact) {
  const FeSpace& space = *u.space;
  const SimplicialMesh& mesh = *space.mesh;
  double total[2] = {0.0, 0.0};
  double shape_buf[8];
  int ei = 0;
  CellIntegrator ci =
      make_integrator(mesh.dim, 2, exact.layers, [&](Vec2 x, double w, double* acc) {
        const double ue = exact.value(x);
        const double uh = value_in_element(u, ei, x, shape_buf);
        const double d = ue - uh;
        const double m = std::abs(ue) + std::abs(uh);
        acc[0] += w * d * d;
        acc[1] += w * m * m;
      });
  ci.noise = 1;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    ei = static_cast<int>(e);
    Vec2 v[3];
    element_corners(mesh, ei, v);
    ci.integrate(v[0], v[1], v[2], 0, total);
  }
  return std::sqrt(total[0]);
}

DiscreteXNorm discrete_xnorm_error(const FeFunction& u, const ExactSolution& exact,
                                   const FormDescriptor& form, const SpacePtr& test) {
  const double y_part = y_norm_error(u, exact, form);

  // Right-hand side (beta . grad(u_exact - u), q) of the representant
  // problem: adaptive quadrature for the exact part, the standard assembly
  // rule for the discrete part.
  const SimplicialMesh& mesh = *test->mesh;
  const int dim = mesh.dim;
  const int nt = shape_count(dim, test->degree);
  std::vector<double> rhs(test->n_free(), 0.0);
  {
    double shape_buf[8];
    std::vector<double> local(nt);
    int ei = 0;
    const CellIntegrator ci =
        make_integrator(dim, nt, exact.layers, [&](Vec2 x, double w, double* acc) {
          const Vec2 b = form.beta ? form.beta(x) : Vec2{0.0, 0.0};
          const double conv = w * dot(b, exact.gradient(x));
          const Vec2 ref = ref_from_barycentric(dim, barycentric(mesh, ei, x));
          shape_values(dim, test->degree, ref, shape_buf);
          for (int i = 0; i < nt; ++i) acc[i] += conv * shape_buf[i];
        });
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
      ei = static_cast<int>(e);
      Vec2 v[3];
      element_corners(mesh, ei, v);
      std::fill(local.begin(), local.end(), 0.0);
      ci.integrate(v[0], v[1], v[2], 0, local.data());
      const int* dofs = test->dofs_of(ei);
      for (int i = 0; i < nt; ++i) {
        const int row = test->free_index[dofs[i]];
        if (row >= 0) rhs[row] += local[i];
      }
    }
  }
  const std::vector<double> discrete = assemble_convective_load(*test, u, form);
  for (int i = 0; i < test->n_free(); ++i) rhs[i] -= discrete[i];

  FormDescriptor aform = form;
  aform.dirichlet_g = nullptr;
  const AssembledOperator a_op = assemble_diffusion(*test, *test, aform);
  auto [w_free, report] = solve_sparse(a_op.matrix, rhs);
  const FeFunction w = expand_free(test, w_free, nullptr);

  DiscreteXNorm n;
  n.y_part = y_part;
  n.w_part = std::sqrt(energy_sq(w, form));
  n.total = std::hypot(n.y_part, n.w_part);
  return n;
}

LsSolveResult solve_least_squares(const FormDescriptor& form, const SpacePtr& trial,
                                  const SpacePtr& test) {
  FormDescriptor aform = form;
  aform.dirichlet_g = nullptr;
  const AssembledOperator a_op = assemble_diffusion(*test, *test, aform);
  const AssembledOperator b_op = assemble_full(*test, *trial, form);
  std::vector<double> rhs = assemble_load(*test, form);
  for (int i = 0; i < test->n_free(); ++i) rhs[i] += b_op.dirichlet_correction[i];

  SaddleSolution saddle = solve_saddle(a_op.matrix, b_op.matrix, rhs);

  LsSolveResult result;
  result.u = expand_free(trial, saddle.u, form.dirichlet_g);
  result.p = expand_free(test, saddle.p, nullptr);
  result.solve_report = saddle.report;

  // Local indicators eta_l^2 = int_{tau_l} (K grad p) . grad p per trial
  // element; test-element contributions are summed into their ancestors
  // when the test space lives on a refined mesh.
  const std::vector<double> test_energy = element_energy_sq(result.p, form);
  const std::size_t n_trial = trial->mesh->elements.size();
  std::vector<double> local_sq(n_trial, 0.0);
  if (test->mesh.get() == trial->mesh.get()) {
    local_sq = test_energy;
  } else {
    const std::vector<int> ancestor = ancestor_elements(test->mesh, trial->mesh);
    for (std::size_t e = 0; e < test_energy.size(); ++e) local_sq[ancestor[e]] += test_energy[e];
  }
  result.eta_local.resize(n_trial);
  double total = 0.0;
  for (std::size_t e = 0; e < n_trial; ++e) {
    total += local_sq[e];
    result.eta_local[e] = std::sqrt(local_sq[e]);
  }
  result.eta_global = std::sqrt(total);
  return result;
}

std::vector<int> dorfler_mark(const std::vector<double>& eta_local, double theta) {
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("dorfler_mark: theta must lie in (0, 1]");
  double total = 0.0;
  for (double eta : eta_local) {
    if (eta < 0.0) throw std::invalid_argument("dorfler_mark: negative indicator");
    total += eta * eta;
  }
  if (total <= 0.0) return {};

  std::vector<int> order(eta_local.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return eta_local[a] != eta_local[b] ? eta_local[a] > eta_local[b] : a < b;
  });

  const double target = theta * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int idx : order) {
    if (acc >= target) break;
    marked.push_back(idx);
    acc += eta_local[idx] * eta_local[idx];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

SpacePtr make_test_space(const MeshPtr& trial_mesh, TestKind kind,
                         const std::vector<int>& test_dirichlet_markers) {
  if (kind == TestKind::p2_same_mesh) return build_space(trial_mesh, 2, test_dirichlet_markers);
  return build_space(refine_uniform(trial_mesh), 1, test_dirichlet_markers);
}

AdaptiveReport adaptive_solve(const FormDescriptor& form, const MeshPtr& initial_mesh,
                              const AdaptiveConfig& config) {
  AdaptiveReport report;
  {
    std::ostringstream os;
    os << "strategy=adaptive theta=" << config.theta << " test=" << test_kind_name(config.test_kind)
       << " max_dofs=" << config.max_dofs;
    report.config_echo = os.str();
  }

  MeshPtr mesh = initial_mesh;
  for (int level = 0;; ++level) {
    const SpacePtr trial = build_space(mesh, 1, form.trial_dirichlet_markers);
    const SpacePtr test = make_test_space(mesh, config.test_kind, form.test_dirichlet_markers);
    const LsSolveResult solved = solve_least_squares(form, trial, test);

    LevelRow row;
    row.level = level;
    row.elements = static_cast<long>(mesh->elements.size());
    row.vertices = static_cast<long>(mesh->vertices.size());
    row.dofs = static_cast<long>(trial->n_dofs()) + static_cast<long>(test->n_dofs());
    row.eta_global = solved.eta_global;
    if (config.exact) {
      row.err_y = y_norm_error(solved.u, *config.exact, form);
      row.err_l2 = l2_norm_error(solved.u, *config.exact);
      row.err_xvh = discrete_xnorm_error(solved.u, *config.exact, form, test).total;
    }
    for (const auto& [name, probe] : config.extractors)
      row.characteristics.emplace_back(name, probe(solved.u));
    if (config.on_level) config.on_level({level, mesh, &solved.u, &solved.p});
    report.rows.push_back(std::move(row));

    if (report.rows.back().dofs >= config.max_dofs) break;
    if (level + 1 >= config.max_levels) break;
    const std::vector<int> marked = dorfler_mark(solved.eta_local, config.theta);
    if (marked.empty()) break;
    mesh = refine_adaptive_nvb(mesh, marked);
  }
  return report;
}

AdaptiveReport uniform_study(const FormDescriptor& form, const MeshPtr& initial_mesh,
                             const UniformConfig& config) {
  if (config.levels < 1) throw std::invalid_argument("uniform_study: levels must be >= 1");
  AdaptiveReport report;
  {
    std::ostringstream os;
    os << "strategy=uniform solver=" << (config.least_squares ? "ls" : "direct")
       << " levels=" << config.levels;
    if (config.least_squares) os << " test=" << test_kind_name(config.test_kind);
    report.config_echo = os.str();
  }

  MeshPtr mesh = initial_mesh;
  for (int level = 0; level < config.levels; ++level) {
    const SpacePtr trial = build_space(mesh, 1, form.trial_dirichlet_markers);

    LevelRow row;
    row.level = level;
    row.elements = static_cast<long>(mesh->elements.size());
    row.vertices = static_cast<long>(mesh->vertices.size());

    FeFunction u;
    const FeFunction* p = nullptr;
    FeFunction p_store;
    if (config.least_squares) {
      const SpacePtr test = make_test_space(mesh, config.test_kind, form.test_dirichlet_markers);
      LsSolveResult solved = solve_least_squares(form, trial, test);
      u = std::move(solved.u);
      p_store = std::move(solved.p);
      p = &p_store;
      row.dofs = static_cast<long>(trial->n_dofs()) + static_cast<long>(test->n_dofs());
      row.eta_global = solved.eta_global;
    } else {
      u = solve_direct(form, trial);
      row.dofs = trial->n_dofs();
    }

    if (config.exact) {
      row.err_y = y_norm_error(u, *config.exact, form);
      row.err_l2 = l2_norm_error(u, *config.exact);
    }
    for (const auto& [name, probe] : config.extractors)
      row.characteristics.emplace_back(name, probe(u));
    if (config.on_level) config.on_level({level, mesh, &u, p});
    report.rows.push_back(std::move(row));

    if (level + 1 < config.levels) mesh = refine_uniform(mesh);
  }
  return report;
}

}  // namespace lsfem
