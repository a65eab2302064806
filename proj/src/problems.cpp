#include "lsfem/problems.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace lsfem {

namespace {

constexpr double nan64 = std::numeric_limits<double>::quiet_NaN();

// "1e-2" style formatting for benchmark ids built from a perturbation
// parameter; falls back to %g when the value is not a plain power of ten.
std::string compact_pow10(double value) {
  int e10 = static_cast<int>(std::lround(std::log10(value)));
  char buf[32];
  if (std::abs(std::pow(10.0, e10) - value) < 1e-12 * value)
    std::snprintf(buf, sizeof(buf), "1e%d", e10);
  else
    std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

// Manufactured solution shared by the smooth 1D velocity studies:
// u vanishes at both ends of (0,1) and is convection-free friendly in the
// sense that f stays bounded for every velocity with x*v(x) bounded.
double smooth_u(double x) {
  return x - (std::exp(x - 1.0) - std::exp(-1.0)) / (1.0 - std::exp(-1.0));
}
double smooth_du(double x) { return 1.0 - std::exp(x - 1.0) / (1.0 - std::exp(-1.0)); }
double smooth_d2u(double x) { return -std::exp(x - 1.0) / (1.0 - std::exp(-1.0)); }

// Inlet profile of the rotating example: a plateau of height one over
// roughly (1/3, 2/3) with cos^2 ramps of half-width xi on both sides.
double rotating_inlet(double x) {
  constexpr double xi = 1e-3;
  constexpr double pi = std::numbers::pi;
  const double lo = 1.0 / 3.0, hi = 2.0 / 3.0;
  if (x >= lo - xi && x <= lo + xi) {
    const double s = 1.0 - std::cos((lo + xi - x) / (2.0 * xi) * pi);
    return 1.0 - 0.25 * s * s;
  }
  if (x > lo + xi && x < hi - xi) return 1.0;
  if (x >= hi - xi && x <= hi + xi) {
    const double s = 1.0 - std::cos((x - hi + xi) / (2.0 * xi) * pi);
    return 1.0 - 0.25 * s * s;
  }
  return 0.0;
}

double centroid_value(const FeFunction& u, int e) {
  const FeSpace& sp = *u.space;
  const int dim = sp.mesh->dim;
  const Vec2 ref = dim == 1 ? Vec2{0.5, 0.0} : Vec2{1.0 / 3.0, 1.0 / 3.0};
  double vals[6];
  shape_values(dim, sp.degree, ref, vals);
  double v = 0.0;
  const int* dofs = sp.dofs_of(e);
  for (int i = 0; i < sp.local_dofs; ++i) v += vals[i] * u.coefficients[dofs[i]];
  return v;
}

std::function<double(const FeFunction&)> width_probe(Vec2 a, Vec2 b,
                                                     double LayerWidths::* member) {
  // Coarse levels may not cross the band yet; report NaN instead of failing
  // the whole refinement run.
  return [a, b, member](const FeFunction& u) {
    try {
      return layer_widths(u, a, b).*member;
    } catch (const std::runtime_error&) {
      return nan64;
    }
  };
}

}  // namespace

Benchmark smooth_1d(VelocityChoice choice, double v) {
  Benchmark b;
  std::function<double(double)> vel;
  switch (choice) {
    case VelocityChoice::constant: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", v);
      b.name = std::string("smooth_1d_v") + buf;
      b.description = std::string("smooth solution on (0,1), constant velocity v=") + buf;
      vel = [v](double) { return v; };
      break;
    }
    case VelocityChoice::inv_sqrt:
      b.name = "smooth_1d_invsqrt";
      b.description = "smooth solution on (0,1), velocity 1/sqrt(x)";
      vel = [](double x) { return 1.0 / std::sqrt(x); };
      break;
    case VelocityChoice::inv_x:
      b.name = "smooth_1d_invx";
      b.description = "smooth solution on (0,1), velocity 1/x";
      vel = [](double x) { return 1.0 / x; };
      break;
  }

  FormDescriptor fd;
  fd.dim = 1;
  fd.alpha = 1.0;
  fd.beta = [vel](Vec2 p) { return Vec2{vel(p.x), 0.0}; };
  fd.f = [vel](Vec2 p) { return -smooth_d2u(p.x) + vel(p.x) * smooth_du(p.x); };
  fd.trial_dirichlet_markers = {marker_left, marker_right};
  fd.test_dirichlet_markers = {marker_left, marker_right};
  fd.singular_at_zero = choice != VelocityChoice::constant;
  b.descriptor = fd;

  b.mesh_factory = [] { return make_interval_mesh(0.0, 1.0, 2); };

  ExactSolution ex;
  ex.value = [](Vec2 p) { return smooth_u(p.x); };
  ex.gradient = [](Vec2 p) { return Vec2{smooth_du(p.x), 0.0}; };
  ex.div_k_grad = [](Vec2 p) { return smooth_d2u(p.x); };
  b.exact = ex;

  b.uniform_levels = 8;
  b.adaptive_max_dofs = b.adaptive_max_dofs_long = 2000;
  return b;
}

Benchmark boundary_layer_1d(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("boundary_layer_1d: epsilon must be positive");

  Benchmark b;
  b.name = "bl1d_eps" + compact_pow10(epsilon);
  b.description = "-eps u'' + u' = 1 on (0,1), layer at x=1, eps=" + compact_pow10(epsilon);

  // All exponentials have nonpositive arguments, so the evaluation stays
  // overflow-free for arbitrarily small epsilon.
  const double eps = epsilon;
  const double denom = 1.0 - std::exp(-1.0 / eps);
  auto layer = [eps, denom](double x) { return std::exp(-(1.0 - x) / eps) / denom; };

  FormDescriptor fd;
  fd.dim = 1;
  fd.alpha = eps;
  fd.beta = [](Vec2) { return Vec2{1.0, 0.0}; };
  fd.f = [](Vec2) { return 1.0; };
  fd.trial_dirichlet_markers = {marker_left, marker_right};
  fd.test_dirichlet_markers = {marker_left, marker_right};
  b.descriptor = fd;

  b.mesh_factory = [] { return make_interval_mesh(0.0, 1.0, 4); };
  b.uniform_mesh_factory = [] { return make_interval_mesh(0.0, 1.0, 128); };

  ExactSolution ex;
  ex.value = [eps](Vec2 p) {
    return p.x - (std::exp(-(1.0 - p.x) / eps) - std::exp(-1.0 / eps)) /
                     (1.0 - std::exp(-1.0 / eps));
  };
  ex.gradient = [eps, layer](Vec2 p) { return Vec2{1.0 - layer(p.x) / eps, 0.0}; };
  ex.div_k_grad = [eps, layer](Vec2 p) { return -layer(p.x) / eps; };
  ex.layers = {{0, 1.0, eps}};
  b.exact = ex;

  b.uniform_levels = 5;
  b.adaptive_max_dofs = b.adaptive_max_dofs_long = 3000;
  return b;
}

Benchmark rotating_convection_2d() {
  Benchmark b;
  b.name = "rotating";
  b.description = "rotational transport of an inlet plateau on (0,1)^2, alpha=1e-5";

  FormDescriptor fd;
  fd.dim = 2;
  fd.alpha = 1e-5;
  fd.beta = [](Vec2 p) { return Vec2{-p.y, p.x}; };
  fd.f = [](Vec2) { return 0.0; };
  // Inhomogeneous data enters on the bottom inlet only; right and top hold
  // the profile at zero and the left outflow stays natural (Neumann).
  fd.dirichlet_g = [](Vec2 p) { return p.y < 1e-12 ? rotating_inlet(p.x) : 0.0; };
  fd.trial_dirichlet_markers = {marker_right, marker_bottom, marker_top};
  fd.test_dirichlet_markers = {marker_right, marker_bottom, marker_top};
  b.descriptor = fd;

  b.mesh_factory = [] { return make_rect_mesh(0.0, 0.0, 1.0, 1.0, 16, 16); };

  const Vec2 outlet_a{0.0, 0.0}, outlet_b{0.0, 1.0};
  b.characteristic_extractors = {
      {"width_lower", width_probe(outlet_a, outlet_b, &LayerWidths::lower)},
      {"width_upper", width_probe(outlet_a, outlet_b, &LayerWidths::upper)},
      {"width_profile", width_probe(outlet_a, outlet_b, &LayerWidths::profile)},
      {"osc_max", [](const FeFunction& u) { return osc_max(u); }},
  };

  b.uniform_least_squares = true;
  b.uniform_levels = 4;
  b.adaptive_max_dofs = 120000;
  b.adaptive_max_dofs_long = 750000;
  return b;
}

Benchmark hemker() {
  Benchmark b;
  b.name = "hemker";
  b.description = "flow past a circular obstacle on (-3,9)x(-3,3), alpha=1e-4";

  FormDescriptor fd;
  fd.dim = 2;
  fd.alpha = 1e-4;
  fd.beta = [](Vec2) { return Vec2{1.0, 0.0}; };
  fd.f = [](Vec2) { return 0.0; };
  // Constrained dofs sit either on the inflow (x = -3) or on the obstacle.
  fd.dirichlet_g = [](Vec2 p) { return p.x < -3.0 + 1e-9 ? 0.0 : 1.0; };
  fd.trial_dirichlet_markers = {marker_left, marker_circle};
  fd.test_dirichlet_markers = {marker_left, marker_circle};
  b.descriptor = fd;

  b.mesh_factory = [] { return make_hemker_mesh(20); };

  b.characteristic_extractors = {
      {"width_upper", width_probe(Vec2{4.0, 0.0}, Vec2{4.0, 3.0}, &LayerWidths::upper)},
      {"osc_max", [](const FeFunction& u) { return osc_max(u); }},
  };

  b.uniform_least_squares = true;
  b.uniform_levels = 3;
  b.adaptive_max_dofs = 120000;
  b.adaptive_max_dofs_long = 800000;
  return b;
}

Benchmark spacetime_layer_1d(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("spacetime_layer_1d: epsilon must be positive");

  Benchmark b;
  b.name = "spacetime_layer_1d";
  b.description = "space-time layer problem on Q=(0,1)^2, eps=" + compact_pow10(epsilon);

  // u(x,t) = T(t) S(x) with T = 1 - exp(-t/eps) and
  // S = (exp((x-1)/eps) - 1)/(exp(-1/eps) - 1) + x - 1; both factors use
  // exponentials of nonpositive arguments only.
  const double eps = epsilon;
  const double denom = std::exp(-1.0 / eps) - 1.0;
  auto T = [eps](double t) { return 1.0 - std::exp(-t / eps); };
  auto dT = [eps](double t) { return std::exp(-t / eps) / eps; };
  auto S = [eps, denom](double x) { return (std::exp((x - 1.0) / eps) - 1.0) / denom + x - 1.0; };
  auto dS = [eps, denom](double x) { return std::exp((x - 1.0) / eps) / (eps * denom) + 1.0; };
  auto d2S = [eps, denom](double x) { return std::exp((x - 1.0) / eps) / (eps * eps * denom); };

  FormDescriptor fd;
  fd.dim = 2;
  fd.spacetime = true;
  fd.alpha = eps;
  fd.beta = [](Vec2) { return Vec2{1.0, 1.0}; };  // (velocity, time)
  fd.f = [=](Vec2 p) {
    return dT(p.y) * S(p.x) + T(p.y) * dS(p.x) - eps * T(p.y) * d2S(p.x);
  };
  // The solution vanishes on the lateral boundary and at t = 0; the test
  // space only needs the lateral conditions.
  fd.trial_dirichlet_markers = {marker_left, marker_right, marker_bottom};
  fd.test_dirichlet_markers = {marker_left, marker_right};
  b.descriptor = fd;

  b.mesh_factory = [] { return make_rect_mesh(0.0, 0.0, 1.0, 1.0, 4, 4); };

  ExactSolution ex;
  ex.value = [=](Vec2 p) { return T(p.y) * S(p.x); };
  ex.gradient = [=](Vec2 p) { return Vec2{T(p.y) * dS(p.x), dT(p.y) * S(p.x)}; };
  ex.div_k_grad = [=](Vec2 p) { return eps * T(p.y) * d2S(p.x); };
  ex.layers = {{0, 1.0, eps}, {1, 0.0, eps}};
  b.exact = ex;

  b.default_test_kind = TestKind::p1_refined_mesh;
  b.uniform_least_squares = true;
  b.uniform_levels = 7;
  b.adaptive_max_dofs = 40000;
  b.adaptive_max_dofs_long = 150000;
  return b;
}

double osc_max(const FeFunction& u) {
  if (!u.space || u.coefficients.empty()) throw std::invalid_argument("osc_max: empty function");
  double mx = u.coefficients[0], mn = u.coefficients[0];
  for (double c : u.coefficients) {
    mx = std::max(mx, c);
    mn = std::min(mn, c);
  }
  if (u.space->degree == 2) {
    // Quadratic extrema need not sit on dofs; sample element centroids too.
    for (int e = 0; e < u.space->mesh->n_elements(); ++e) {
      const double v = centroid_value(u, e);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
  }
  return (mx - 1.0) - std::min(mn, 0.0);
}

LayerWidths layer_widths(const FeFunction& u, Vec2 a, Vec2 b, double band_low, double band_high,
                         int samples) {
  if (samples < 10000) throw std::invalid_argument("layer_widths: need at least 1e4 samples");
  if (!(band_low < band_high)) throw std::invalid_argument("layer_widths: empty band");
  const Vec2 dir = b - a;
  const double len = norm(dir);
  if (!(len > 0.0)) throw std::invalid_argument("layer_widths: degenerate segment");

  const double spacing = len / samples;
  std::vector<double> vals(samples + 1);
  int hint = -1;
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    vals[i] = evaluate(u, a + s * dir, hint);
  }

  const auto region = [&](double v) { return v < band_low ? -1 : (v > band_high ? 1 : 0); };

  LayerWidths out;
  // The profile width counts everything above the lower band edge, i.e. it
  // spans from the outer foot of the rising layer to the outer foot of the
  // falling one; mid-band counting would shave half a layer off each side.
  long above_low = 0;
  for (double v : vals)
    if (v >= band_low) ++above_low;
  out.profile = above_low * spacing;

  bool entered_band = false;
  bool have_lower = false;
  int i = 0;
  while (i <= samples) {
    if (region(vals[i]) != 0) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 <= samples && region(vals[j + 1]) == 0) ++j;
    entered_band = true;

    const int prev = i > 0 ? region(vals[i - 1]) : 0;
    const int next = j < samples ? region(vals[j + 1]) : 0;
    bool rising = prev == -1 && next == 1;
    bool falling = prev == 1 && next == -1;
    if (!rising && !falling) {  // runs touching the segment ends
      rising = vals[j] > vals[i];
      falling = vals[j] < vals[i];
    }

    const double width = (j - i) * spacing;
    if (rising && !have_lower) {
      out.lower = width;
      have_lower = true;
      out.upper = nan64;  // the matching falling run must come later
    } else if (falling && std::isnan(out.upper)) {
      out.upper = width;
    }
    i = j + 1;
  }
  if (!entered_band)
    throw std::runtime_error("layer_widths: profile never enters the band");
  return out;
}

double strong_residual(const Benchmark& b, Vec2 x) {
  if (!b.exact) throw std::logic_error("strong_residual: benchmark has no exact solution");
  const ExactSolution& ex = *b.exact;
  const double diffusion = ex.div_k_grad ? ex.div_k_grad(x) : 0.0;
  const Vec2 beta = b.descriptor.beta(x);
  const double load = b.descriptor.f ? b.descriptor.f(x) : 0.0;
  return -diffusion + dot(beta, ex.gradient(x)) - load;
}

const std::vector<Benchmark>& benchmark_registry() {
  static const std::vector<Benchmark> registry = [] {
    std::vector<Benchmark> r;
    r.push_back(smooth_1d(VelocityChoice::constant, 10.0));
    r.push_back(smooth_1d(VelocityChoice::constant, 100.0));
    r.push_back(smooth_1d(VelocityChoice::constant, 1000.0));
    r.push_back(smooth_1d(VelocityChoice::inv_sqrt));
    r.push_back(smooth_1d(VelocityChoice::inv_x));
    r.push_back(boundary_layer_1d(1e-2));
    {
      Benchmark b = boundary_layer_1d(1e-4);
      b.uniform_mesh_factory = [] { return make_interval_mesh(0.0, 1.0, 4096); };
      r.push_back(b);
      b = boundary_layer_1d(1e-5);
      b.uniform_mesh_factory = [] { return make_interval_mesh(0.0, 1.0, 65536); };
      r.push_back(b);
    }
    r.push_back(rotating_convection_2d());
    r.push_back(hemker());
    r.push_back(spacetime_layer_1d(1e-2));
    return r;
  }();
  return registry;
}

const Benchmark* find_benchmark(const std::string& name) {
  for (const Benchmark& b : benchmark_registry())
    if (b.name == name) return &b;
  return nullptr;
}

}  // namespace lsfem
