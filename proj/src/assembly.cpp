#include "lsfem/assembly.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "lsfem/parallel.hpp"
#include "lsfem/quadrature.hpp"

namespace lsfem {

namespace {

constexpr int assembly_chunk = 512;

bool touches_origin(const SimplicialMesh& mesh, int e) {
  double xmin = mesh.vertices[mesh.elements[e][0]].x;
  xmin = std::min(xmin, mesh.vertices[mesh.elements[e][1]].x);
  return xmin < 1e-13;
}

bool needs_graded_rule(const FormDescriptor& form, const SimplicialMesh& mesh, int e) {
  return form.singular_at_zero && mesh.dim == 1 && touches_origin(mesh, e);
}

/// The graded rule concentrated toward the element endpoint at x = 0.
QuadratureRule graded_rule_for(const ElementMap& map) {
  return graded_segment_rule(/*toward_one=*/std::abs(map.v0.x) > 1e-13);
}

struct ShapeTable {
  std::vector<double> values;  ///< n_points x n_shapes
  std::vector<Vec2> grads;     ///< n_points x n_shapes, reference gradients
  int n_shapes = 0;

  void build(const QuadratureRule& rule, int dim, int degree) {
    n_shapes = shape_count(dim, degree);
    values.resize(rule.points.size() * n_shapes);
    grads.resize(rule.points.size() * n_shapes);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      shape_values(dim, degree, rule.points[q], values.data() + q * n_shapes);
      shape_ref_gradients(dim, degree, rule.points[q], grads.data() + q * n_shapes);
    }
  }
};

struct BilinearKernel {
  const FeSpace& test;
  const FeSpace& trial;
  const FormDescriptor& form;
  bool convection;  ///< false: a-form (diffusion only), true: full b-form

  bool same_mesh;
  std::vector<int> ancestor;  ///< test element -> trial element when nested

  QuadratureRule rule;
  ShapeTable test_table, trial_table;

  Mat2 K;
  std::vector<double> lift;  ///< g at constrained trial dofs (0 for free)

  BilinearKernel(const FeSpace& test_, const FeSpace& trial_, const FormDescriptor& form_,
                 bool convection_)
      : test(test_), trial(trial_), form(form_), convection(convection_) {
    if (test.mesh->dim != form.dim || trial.mesh->dim != form.dim)
      throw std::invalid_argument("assemble: space/form dimension mismatch");
    same_mesh = test.mesh.get() == trial.mesh.get();
    if (!same_mesh) ancestor = ancestor_elements(test.mesh, trial.mesh);

    rule = default_quadrature(trial.degree, test.degree, form.dim);
    test_table.build(rule, form.dim, test.degree);
    if (same_mesh) trial_table.build(rule, form.dim, trial.degree);

    K = form.diffusion();
    lift.assign(trial.n_dofs(), 0.0);
    if (form.dirichlet_g) {
      for (int d = 0; d < trial.n_dofs(); ++d)
        if (trial.is_dirichlet[d]) lift[d] = form.dirichlet_g(trial.dof_coords[d]);
    }
  }

  /// Element contributions for test elements [begin, end) appended to out;
  /// Dirichlet columns go to corr as (free test row, value) pairs.
  void run(int begin, int end, std::vector<Triplet>& out,
           std::vector<std::pair<int, double>>& corr) const {
    const auto& test_mesh = *test.mesh;
    const auto& trial_mesh = *trial.mesh;
    const int nt = test_table.n_shapes;
    const int ns = shape_count(form.dim, trial.degree);

    std::vector<double> local(static_cast<std::size_t>(nt) * ns);
    std::vector<Vec2> trial_ref_grads(ns);
    std::vector<double> test_vals_buf(nt);
    std::vector<Vec2> test_grads_buf(nt);
    std::vector<Vec2> test_grad(nt), trial_grad(ns);

    for (int e = begin; e < end; ++e) {
      const ElementMap map = element_map(test_mesh, e);
      const int a = same_mesh ? e : ancestor[e];
      const ElementMap trial_map = same_mesh ? map : element_map(trial_mesh, a);

      const bool graded = needs_graded_rule(form, test_mesh, e);
      QuadratureRule local_rule;
      if (graded) local_rule = graded_rule_for(map);
      const QuadratureRule& r = graded ? local_rule : rule;

      std::fill(local.begin(), local.end(), 0.0);
      for (std::size_t q = 0; q < r.points.size(); ++q) {
        const Vec2 ref = r.points[q];
        const Vec2 x = map.to_physical(ref);
        const double w = r.weights[q] * std::abs(map.det);

        const double* tv;
        const Vec2* tg;
        if (graded) {
          shape_values(form.dim, test.degree, ref, test_vals_buf.data());
          shape_ref_gradients(form.dim, test.degree, ref, test_grads_buf.data());
          tv = test_vals_buf.data();
          tg = test_grads_buf.data();
        } else {
          tv = test_table.values.data() + q * nt;
          tg = test_table.grads.data() + q * nt;
        }
        for (int i = 0; i < nt; ++i) test_grad[i] = map.push_gradient(tg[i]);

        if (same_mesh && !graded) {
          const Vec2* sg = trial_table.grads.data() + q * ns;
          for (int j = 0; j < ns; ++j) trial_grad[j] = trial_map.push_gradient(sg[j]);
        } else {
          Vec2 trial_ref = ref;
          if (!same_mesh) trial_ref = ref_from_barycentric(form.dim, barycentric(trial_mesh, a, x));
          shape_ref_gradients(form.dim, trial.degree, trial_ref, trial_ref_grads.data());
          for (int j = 0; j < ns; ++j) trial_grad[j] = trial_map.push_gradient(trial_ref_grads[j]);
        }

        Vec2 b{0.0, 0.0};
        if (convection && form.beta) b = form.beta(x);

        for (int j = 0; j < ns; ++j) {
          const Vec2 kg = K.apply(trial_grad[j]);
          const double adv = convection ? dot(b, trial_grad[j]) : 0.0;
          for (int i = 0; i < nt; ++i)
            local[static_cast<std::size_t>(i) * ns + j] +=
                w * (dot(kg, test_grad[i]) + adv * tv[i]);
        }
      }

      const int* tdofs = test.dofs_of(e);
      const int* sdofs = trial.dofs_of(a);
      for (int i = 0; i < nt; ++i) {
        const int row = test.free_index[tdofs[i]];
        if (row < 0) continue;
        for (int j = 0; j < ns; ++j) {
          const double v = local[static_cast<std::size_t>(i) * ns + j];
          const int col = trial.free_index[sdofs[j]];
          if (col >= 0) {
            out.push_back({row, col, v});
          } else if (lift[sdofs[j]] != 0.0) {
            corr.emplace_back(row, -v * lift[sdofs[j]]);
          }
        }
      }
    }
  }
};

AssembledOperator assemble_bilinear(const FeSpace& test, const FeSpace& trial,
                                    const FormDescriptor& form, bool convection) {
  const BilinearKernel kernel(test, trial, form, convection);
  const int n = static_cast<int>(test.mesh->elements.size());
  const int chunks = chunk_count(n, assembly_chunk);

  std::vector<std::vector<Triplet>> triplet_buf(chunks);
  std::vector<std::vector<std::pair<int, double>>> corr_buf(chunks);
  parallel_chunks(n, assembly_chunk, [&](int c, int begin, int end) {
    kernel.run(begin, end, triplet_buf[c], corr_buf[c]);
  });

  std::size_t total = 0;
  for (const auto& b : triplet_buf) total += b.size();
  std::vector<Triplet> triplets;
  triplets.reserve(total);
  for (auto& b : triplet_buf) triplets.insert(triplets.end(), b.begin(), b.end());

  AssembledOperator op;
  op.matrix = from_triplets(test.n_free(), trial.n_free(), std::move(triplets));
  // Chunks cover contiguous element ranges, so appending in chunk order
  // reproduces the serial accumulation order exactly.
  op.dirichlet_correction.assign(test.n_free(), 0.0);
  for (const auto& b : corr_buf)
    for (const auto& [row, v] : b) op.dirichlet_correction[row] += v;
  return op;
}

}  // namespace

AssembledOperator assemble_diffusion(const FeSpace& test, const FeSpace& trial,
                                     const FormDescriptor& form) {
  return assemble_bilinear(test, trial, form, /*convection=*/false);
}

AssembledOperator assemble_full(const FeSpace& test, const FeSpace& trial,
                                const FormDescriptor& form) {
  return assemble_bilinear(test, trial, form, /*convection=*/true);
}

std::vector<double> assemble_convective_load(const FeSpace& test, const FeFunction& u,
                                             const FormDescriptor& form) {
  const FeSpace& trial = *u.space;
  if (static_cast<int>(u.coefficients.size()) != trial.n_dofs())
    throw std::invalid_argument("assemble_convective_load: coefficient size mismatch");
  const auto& test_mesh = *test.mesh;
  const auto& trial_mesh = *trial.mesh;
  const int dim = form.dim;
  if (test_mesh.dim != dim || trial_mesh.dim != dim)
    throw std::invalid_argument("assemble_convective_load: dimension mismatch");

  const bool same_mesh = test.mesh.get() == trial.mesh.get();
  std::vector<int> ancestor;
  if (!same_mesh) ancestor = ancestor_elements(test.mesh, trial.mesh);

  const int nt = shape_count(dim, test.degree);
  const int ns = shape_count(dim, trial.degree);
  const QuadratureRule smooth = default_quadrature(trial.degree, test.degree, dim);
  ShapeTable table;
  table.build(smooth, dim, test.degree);

  std::vector<double> rhs(test.n_free(), 0.0);
  std::vector<double> test_vals(nt);
  std::vector<Vec2> grads(ns);
  for (std::size_t e = 0; e < test_mesh.elements.size(); ++e) {
    const int ei = static_cast<int>(e);
    const ElementMap map = element_map(test_mesh, ei);
    const int a = same_mesh ? ei : ancestor[ei];
    const ElementMap trial_map = same_mesh ? map : element_map(trial_mesh, a);
    const int* tdofs = test.dofs_of(ei);
    const int* sdofs = trial.dofs_of(a);

    const bool graded = needs_graded_rule(form, test_mesh, ei);
    QuadratureRule local_rule;
    if (graded) local_rule = graded_rule_for(map);
    const QuadratureRule& r = graded ? local_rule : smooth;

    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const Vec2 ref = r.points[q];
      const Vec2 x = map.to_physical(ref);
      Vec2 trial_ref = ref;
      if (!same_mesh) trial_ref = ref_from_barycentric(dim, barycentric(trial_mesh, a, x));
      shape_ref_gradients(dim, trial.degree, trial_ref, grads.data());
      Vec2 grad_u{0.0, 0.0};
      for (int j = 0; j < ns; ++j) {
        const Vec2 g = trial_map.push_gradient(grads[j]);
        grad_u = grad_u + u.coefficients[sdofs[j]] * g;
      }
      const Vec2 b = form.beta ? form.beta(x) : Vec2{0.0, 0.0};
      const double w = r.weights[q] * std::abs(map.det) * dot(b, grad_u);

      const double* tv;
      if (graded) {
        shape_values(dim, test.degree, ref, test_vals.data());
        tv = test_vals.data();
      } else {
        tv = table.values.data() + q * nt;
      }
      for (int i = 0; i < nt; ++i) {
        const int row = test.free_index[tdofs[i]];
        if (row >= 0) rhs[row] += w * tv[i];
      }
    }
  }
  return rhs;
}

std::vector<double> assemble_load(const FeSpace& test, const FormDescriptor& form) {
  std::vector<double> rhs(test.n_free(), 0.0);
  if (!form.f) return rhs;

  const auto& mesh = *test.mesh;
  const int dim = mesh.dim;
  if (dim != form.dim) throw std::invalid_argument("assemble_load: dimension mismatch");
  const int nt = shape_count(dim, test.degree);

  const QuadratureRule smooth = default_quadrature(test.degree, test.degree, dim);
  ShapeTable table;
  table.build(smooth, dim, test.degree);

  std::vector<double> vals(nt);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const ElementMap map = element_map(mesh, static_cast<int>(e));
    const bool graded = needs_graded_rule(form, mesh, static_cast<int>(e));
    QuadratureRule local_rule;
    if (graded) local_rule = graded_rule_for(map);
    const QuadratureRule& r = graded ? local_rule : smooth;

    const int* dofs = test.dofs_of(static_cast<int>(e));
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const Vec2 x = map.to_physical(r.points[q]);
      const double w = r.weights[q] * std::abs(map.det) * form.f(x);
      const double* tv;
      if (graded) {
        shape_values(dim, test.degree, r.points[q], vals.data());
        tv = vals.data();
      } else {
        tv = table.values.data() + q * nt;
      }
      for (int i = 0; i < nt; ++i) {
        const int row = test.free_index[dofs[i]];
        if (row >= 0) rhs[row] += w * tv[i];
      }
    }
  }
  return rhs;
}

}  // namespace lsfem
