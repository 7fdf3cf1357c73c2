#include "emscat/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "emscat/asymptotics.hpp"
#include "emscat/errors.hpp"
#include "emscat/kinematics.hpp"
#include "emscat/parallel.hpp"
#include "emscat/quadrature.hpp"

namespace emscat {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_indices(int d, int i, int k) {
  if (i < 0 || k < 0 || i >= d || k >= d || i == k) fail(ErrorCode::InvalidArgument, "need distinct indices i, k");
}

void check_step(const Vec& at, double step) {
  if (!(step > 0.0)) fail(ErrorCode::StepUnderflow, "finite-difference step must be positive");
  const double scale = std::max(1.0, sup_norm(at));
  if (scale + step == scale || step < 1e-14 * scale)
    fail(ErrorCode::StepUnderflow, "finite-difference step is below the resolution of the evaluation point");
}

// d/dy_k of w~(y, x) at y by central differences.
Vec y_derivative(const TildeSampler& w, const Vec& y, const Vec& x, int k, double h) {
  Vec yp = y, ym = y;
  yp(k) += h;
  ym(k) -= h;
  return (w(yp, x) - w(ym, x)) / (2.0 * h);
}

Vec x_derivative(const TildeSampler& w, const Vec& y, const Vec& x, int k, double h) {
  Vec xp = x, xm = x;
  xp(k) += h;
  xm(k) -= h;
  return (w(y, xp) - w(y, xm)) / (2.0 * h);
}

// d_i w~_k - d_k w~_i in x at (theta, x).
double x_curl(const TildeSampler& w, const Vec& theta, const Vec& x, int i, int k, double h) {
  return x_derivative(w, theta, x, i, h)(k) - x_derivative(w, theta, x, k, h)(i);
}

double plane_formula(const Vec& theta, const Vec& odd, int i, int k) {
  return theta(k) * odd(i) - theta(i) * odd(k);
}

void check_plane_manifold(const Ray& ray, int i, int k) {
  const int d = static_cast<int>(ray.theta.size());
  check_indices(d, i, k);
  for (int j = 0; j < d; ++j)
    if (j != i && j != k && std::abs(ray.theta(j)) > 1e-12)
      fail(ErrorCode::OffManifold, "ray direction has components outside coordinates i, k");
}
}  // namespace

RaySampler w1_sampler(FieldPtr field, double c) {
  return [field, c](const Ray& r) { return w1(*field, r, c); };
}
RaySampler w3_sampler(FieldPtr field) {
  return [field](const Ray& r) { return w3(*field, r); };
}
TildeSampler w1_tilde_sampler(FieldPtr field, double c) {
  return [field, c](const Vec& y, const Vec& x) { return w1_tilde(*field, y, x, c); };
}
TildeSampler w3_tilde_sampler(FieldPtr field) {
  return [field](const Vec& y, const Vec& x) { return w3_tilde(*field, y, x); };
}
TildeSampler w4_tilde_sampler(FieldPtr field) {
  return [field](const Vec& y, const Vec& x) { return w4_tilde(*field, y, x); };
}
RaySampler w3_from_w1(RaySampler w) {
  return [w = std::move(w)](const Ray& r) -> Vec { return 0.5 * (w(r) - w(r.reversed())); };
}

Vec pgradv_from_w1(const RaySampler& w, const Ray& ray) { return -0.5 * (w(ray) + w(ray.reversed())); }

double pb_from_w1_plane(const RaySampler& w, const Ray& ray, int i, int k) {
  check_plane_manifold(ray, i, k);
  const Vec odd = 0.5 * (w(ray) - w(ray.reversed()));
  return plane_formula(ray.theta, odd, i, k);
}

double pb_from_w3_plane(const RaySampler& w, const Ray& ray, int i, int k) {
  check_plane_manifold(ray, i, k);
  return plane_formula(ray.theta, w(ray), i, k);
}

double pb_from_w1_derivative(const TildeSampler& w, const Ray& ray, int i, int k, double step) {
  check_indices(static_cast<int>(ray.theta.size()), i, k);
  check_step(ray.theta, step);
  const Vec& t = ray.theta;
  const Vec mt = -t;
  return 0.5 * (y_derivative(w, t, ray.x, k, step)(i) + y_derivative(w, mt, ray.x, k, step)(i) -
                y_derivative(w, t, ray.x, i, step)(k) - y_derivative(w, mt, ray.x, i, step)(k));
}

double pb_from_w3_derivative(const TildeSampler& w, const Ray& ray, int i, int k, double step) {
  check_indices(static_cast<int>(ray.theta.size()), i, k);
  check_step(ray.theta, step);
  return y_derivative(w, ray.theta, ray.x, k, step)(i) - y_derivative(w, ray.theta, ray.x, i, step)(k);
}

double pb_from_w4_d4(const TildeSampler& w, const Ray& ray, int j, int k, double step) {
  const int d = static_cast<int>(ray.theta.size());
  if (d < 4) fail(ErrorCode::InvalidArgument, "this reconstruction needs d >= 4");
  check_indices(d, j, k);
  if (std::abs(ray.theta(j)) > 1e-12 || std::abs(ray.theta(k)) > 1e-12)
    fail(ErrorCode::OffManifold, "ray direction must vanish in coordinates j and k");
  check_step(ray.x, step);
  return x_curl(w, ray.theta, ray.x, k, j, step);
}

double w4_identity_residual(const Field& field, const Ray& ray, int i, int k, double step) {
  const int d = field.dim();
  check_indices(d, i, k);
  check_step(ray.x, step);
  const Mat pb = ray_pb(field, ray);
  const Vec& t = ray.theta;
  double lhs = -pb(i, k);
  for (int j = 0; j < d; ++j) lhs += t(j) * (t(k) * pb(i, j) - t(i) * pb(k, j));
  const TildeSampler w = [&field](const Vec& y, const Vec& x) { return w4_tilde(field, y, x); };
  return std::abs(lhs - x_curl(w, t, ray.x, i, k, step));
}

Mat w4_tilde_second(const TildeSampler& w, const Vec& theta, const Vec& x, int l, double inner, double outer) {
  const int d = static_cast<int>(theta.size());
  if (l < 0 || l >= d) fail(ErrorCode::InvalidArgument, "derivative index out of range");
  check_step(x, inner);
  check_step(x, outer);
  auto curl = [&](const Vec& z) {
    Mat jac(d, d);  // jac(n, m) = d_m w~_n
    for (int m = 0; m < d; ++m) jac.col(m) = x_derivative(w, theta, z, m, inner);
    return Mat(jac.transpose() - jac);  // (m, n): d_m w~_n - d_n w~_m
  };
  Vec xp = x, xm = x;
  xp(l) += outer;
  xm(l) -= outer;
  return (curl(xp) - curl(xm)) / (2.0 * outer);
}

namespace {
// Orthonormal pair spanning the plane orthogonal to a nonzero 3-vector.
std::pair<Vec, Vec> orthonormal_complement(const Vec& n) {
  const Vec u = n.normalized();
  int j = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(u(i)) < std::abs(u(j))) j = i;
  Vec a = unit(3, j) - u(j) * u;
  a.normalize();
  Vec b(3);
  b << u(1) * a(2) - u(2) * a(1), u(2) * a(0) - u(0) * a(2), u(0) * a(1) - u(1) * a(0);
  return {a, b};
}

CVec3 to_star(const std::array<std::complex<double>, 3>& pair_values) {
  // pair_values in (23, 13, 12) order
  return {pair_values[0], -pair_values[1], pair_values[2]};
}
}  // namespace

CVec3 fourier_b_derivs_from_w4(const TildeSampler& w, const Vec& p, int l, const FourierPlaneOptions& opt) {
  if (p.size() != 3) fail(ErrorCode::InvalidArgument, "Fourier formula is for d = 3");
  if (l < 0 || l >= 3) fail(ErrorCode::InvalidArgument, "derivative index out of range");
  if (opt.nodes < 2 || !(opt.extent > 0.0)) fail(ErrorCode::Coverage, "plane grid needs nodes >= 2 and extent > 0");
  std::vector<Vec> family;
  if (p.norm() == 0.0) {
    for (int j = 0; j < 3; ++j) family.push_back(unit(3, j));
  } else {
    auto [a, b] = orthonormal_complement(p);
    family = {a, b};
  }
  const Vec center = opt.center.size() == 3 ? opt.center : Vec(Vec::Zero(3));
  const GaussRule g = gauss_legendre(opt.nodes, -opt.extent, opt.extent);
  const std::size_t n = g.nodes.size();
  const double norm = std::pow(2.0 * kPi, -1.5);
  CVec3 out{0.0, 0.0, 0.0};
  for (const Vec& th : family) {
    auto [e1, e2] = orthonormal_complement(th);
    const Vec foot = center - center.dot(th) * th;
    std::vector<std::array<std::complex<double>, 3>> partial(n * n);
    parallel_for(n * n, opt.threads, [&](std::size_t idx) {
      const std::size_t a = idx / n, b = idx % n;
      const Vec y = foot + g.nodes[a] * e1 + g.nodes[b] * e2;
      const Mat s = w4_tilde_second(w, th, y, l, opt.inner_step, opt.outer_step);
      const std::complex<double> phase = std::polar(g.weights[a] * g.weights[b], -y.dot(p));
      partial[idx] = {phase * s(1, 2), phase * s(0, 2), phase * s(0, 1)};
    });
    std::array<std::complex<double>, 3> sum{0.0, 0.0, 0.0};
    for (const auto& v : partial)
      for (int c = 0; c < 3; ++c) sum[c] += v[c];
    const CVec3 x = to_star(sum);
    const std::complex<double> dot = norm * (th(0) * x[0] + th(1) * x[1] + th(2) * x[2]);
    for (int c = 0; c < 3; ++c) out[c] += dot * th(c);
  }
  return out;
}

CVec3 fourier_b_derivs_direct(const Field& field, const Vec& p, int l, const Vec& center, double extent, int nodes) {
  if (field.dim() != 3 || p.size() != 3) fail(ErrorCode::InvalidArgument, "Fourier formula is for d = 3");
  const GaussRule g = gauss_legendre(nodes, -extent, extent);
  const std::size_t n = g.nodes.size();
  std::array<std::complex<double>, 3> sum{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        Vec x(3);
        x << center(0) + g.nodes[a], center(1) + g.nodes[b], center(2) + g.nodes[c];
        const Mat db = field.magnetic_derivative(x, l);
        const std::complex<double> phase = std::polar(g.weights[a] * g.weights[b] * g.weights[c], -x.dot(p));
        sum[0] += phase * db(1, 2);
        sum[1] += phase * db(0, 2);
        sum[2] += phase * db(0, 1);
      }
  const double norm = std::pow(2.0 * kPi, -1.5);
  // (-F B_23l, F B_13l, -F B_12l)
  return {-norm * sum[0], norm * sum[1], -norm * sum[2]};
}

RaySampler PlaneDataset::w1_estimate() const {
  const double s = spec.s * spec.c;
  const double factor = s * lorentz_factor(s, spec.c);
  const std::size_t m = angles.size(), n = offsets.size();
  // Rays of the dataset are looked up by index; other rays are rejected.
  return [this, factor, m, n](const Ray& r) -> Vec {
    double phi = std::atan2(r.theta.dot(plane.e2()), r.theta.dot(plane.e1()));
    if (phi < 0) phi += 2.0 * kPi;
    const double dphi = 2.0 * kPi / double(m);
    std::size_t ia = static_cast<std::size_t>(std::lround(phi / dphi)) % m;
    const Vec normal = -std::sin(angles[ia]) * plane.e1() + std::cos(angles[ia]) * plane.e2();
    const double q = (r.x - plane.foot()).dot(normal);
    const double dq = offsets[1] - offsets[0];
    const long io = std::lround((q - offsets[0]) / dq);
    if (io < 0 || io >= static_cast<long>(n)) fail(ErrorCode::Coverage, "ray is outside the dataset");
    return factor * a_sc[ia * n + static_cast<std::size_t>(io)];
  };
}

PlaneDataset simulate_plane_dataset(FieldPtr field, const PlaneRestriction& plane, const PlaneDataSpec& spec) {
  if (spec.angles < 2 || spec.offsets < 2) fail(ErrorCode::Coverage, "dataset needs at least 2 angles and 2 offsets");
  if (!(spec.s > 0.0 && spec.s < 1.0)) fail(ErrorCode::Domain, "speed fraction must lie in (0, 1)");
  if (plane.dim() != field->dim()) fail(ErrorCode::InvalidArgument, "plane and field differ in dimension");
  PlaneDataset data{plane, spec, uniform_angles(2 * spec.angles, 2.0 * kPi), uniform_offsets(spec.offsets, spec.extent),
                    {}, {}, 0.0};
  const std::size_t m = data.angles.size(), n = data.offsets.size();
  data.a_sc.resize(m * n);
  data.b_sc.resize(m * n);
  std::vector<double> drift(m * n, 0.0);
  const double speed = spec.s * spec.c;
  parallel_for(m * n, spec.threads, [&](std::size_t idx) {
    const Ray r = data.ray(idx / n, idx % n);
    const ScatteringDatum sd = scattering_data(field, spec.c, speed * r.theta, r.x, spec.solver);
    data.a_sc[idx] = sd.a;
    data.b_sc[idx] = sd.b;
    drift[idx] = sd.energy_drift;
  });
  for (double e : drift) data.max_energy_drift = std::max(data.max_energy_drift, e);
  return data;
}

namespace {
struct PlaneSinogramInput {
  std::size_t m, half, n;
};

PlaneSinogramInput dataset_shape(const PlaneDataset& data) {
  const std::size_t m = data.angles.size(), n = data.offsets.size();
  if (m % 2 != 0) fail(ErrorCode::Coverage, "dataset must hold a full turn of angles");
  return {m, m / 2, n};
}

// w1 estimates at ray (ia, io) and its reverse.
std::pair<Vec, Vec> w1_pair(const PlaneDataset& data, std::size_t ia, std::size_t io) {
  const auto sh = dataset_shape(data);
  const double s = data.spec.s * data.spec.c;
  const double factor = s * lorentz_factor(s, data.spec.c);
  const std::size_t ra = (ia + sh.half) % sh.m, ro = sh.n - 1 - io;
  return {factor * data.a_sc[ia * sh.n + io], factor * data.a_sc[ra * sh.n + ro]};
}

double grid_extent(const PlaneDataset& data, const ReconstructOptions& opt) {
  return opt.grid_extent > 0.0 ? opt.grid_extent : data.spec.extent / std::sqrt(2.0);
}

double systematic_error(const FieldPtr& field, const PlaneDataset& data, int threads) {
  const std::size_t m = data.angles.size(), n = data.offsets.size();
  std::vector<double> err(m * n);
  const double s = data.spec.s * data.spec.c;
  const double factor = s * lorentz_factor(s, data.spec.c);
  parallel_for(m * n, threads, [&](std::size_t idx) {
    const Ray r = data.ray(idx / n, idx % n);
    err[idx] = (factor * data.a_sc[idx] - w1(*field, r, data.spec.c)).norm();
  });
  return *std::max_element(err.begin(), err.end());
}

GridFunction plane_truth(const PlaneRestriction& plane, const std::function<double(const Vec&)>& f, double extent,
                         int resolution) {
  return sample_grid([&](double u1, double u2) { return f(plane.embed(u1, u2)); }, extent, resolution);
}
}  // namespace

ReconstructionReport reconstruct_b(const FieldPtr& field, const PlaneDataset& data, int i, int k,
                                   const ReconstructOptions& opt) {
  const int d = field->dim();
  check_indices(d, i, k);
  if (std::abs(std::abs(data.plane.e1()(i)) - 1.0) > 1e-12 || std::abs(std::abs(data.plane.e2()(k)) - 1.0) > 1e-12)
    fail(ErrorCode::OffManifold, "plane tangents must be the coordinate vectors e_i, e_k");
  const auto sh = dataset_shape(data);
  std::vector<double> angles(data.angles.begin(), data.angles.begin() + static_cast<long>(sh.half));
  Sinogram sino(angles, data.offsets, 1, data.spec.extent, "PB");
  for (std::size_t ia = 0; ia < sh.half; ++ia)
    for (std::size_t io = 0; io < sh.n; ++io) {
      const Ray r = data.ray(ia, io);
      auto [wp, wm] = w1_pair(data, ia, io);
      const Vec odd = 0.5 * (wp - wm);
      sino.at(ia, io) = plane_formula(r.theta, odd, i, k);
    }
  FbpOptions fo;
  fo.resolution = opt.resolution;
  fo.extent = grid_extent(data, opt);
  fo.threads = opt.threads;
  ReconstructionReport rep;
  rep.target = "B_" + std::to_string(i + 1) + std::to_string(k + 1);
  rep.pipeline = "a_sc -> w1 (high-energy scaling) -> PB_ik (odd part on the plane) -> filtered back-projection";
  rep.estimate = invert_xray_2d(sino, 0, fo);
  rep.truth = plane_truth(data.plane, [&](const Vec& x) { return field->magnetic(x)(i, k); }, fo.extent,
                          opt.resolution);
  rep.relative_error = relative_l2_error(rep.estimate, rep.truth);
  if (opt.systematic) rep.systematic = systematic_error(field, data, opt.threads);
  return rep;
}

namespace {
// V from its gradient by integrating along one grid axis from both far ends.
GridFunction integrate_axis(const GridFunction& g, bool rows) {
  GridFunction v(g.extent, g.resolution);
  const int n = g.resolution;
  const double h = g.spacing();
  for (int line = 0; line < n; ++line) {
    auto at = [&](int s) { return rows ? g.at(s, line) : g.at(line, s); };
    std::vector<double> fwd(n, 0.0), bwd(n, 0.0);
    for (int s = 1; s < n; ++s) fwd[s] = fwd[s - 1] + 0.5 * h * (at(s - 1) + at(s));
    for (int s = n - 2; s >= 0; --s) bwd[s] = bwd[s + 1] - 0.5 * h * (at(s) + at(s + 1));
    for (int s = 0; s < n; ++s) (rows ? v.at(s, line) : v.at(line, s)) = 0.5 * (fwd[s] + bwd[s]);
  }
  return v;
}

double discrete_curl_ratio(const GridFunction& g1, const GridFunction& g2) {
  const int n = g1.resolution;
  const double h = g1.spacing();
  double num = 0.0, den = 0.0;
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) {
      const double d2g1 = (g1.at(i, j + 1) - g1.at(i, j - 1)) / (2 * h);
      const double d1g2 = (g2.at(i + 1, j) - g2.at(i - 1, j)) / (2 * h);
      num += (d2g1 - d1g2) * (d2g1 - d1g2);
      den += d2g1 * d2g1 + d1g2 * d1g2;
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}
}  // namespace

ReconstructionReport reconstruct_v(const FieldPtr& field, const PlaneDataset& data, const ReconstructOptions& opt) {
  const auto sh = dataset_shape(data);
  std::vector<double> angles(data.angles.begin(), data.angles.begin() + static_cast<long>(sh.half));
  Sinogram sino(angles, data.offsets, 2, data.spec.extent, "PgradV");
  const Vec& e1 = data.plane.e1();
  const Vec& e2 = data.plane.e2();
  for (std::size_t ia = 0; ia < sh.half; ++ia)
    for (std::size_t io = 0; io < sh.n; ++io) {
      auto [wp, wm] = w1_pair(data, ia, io);
      const Vec pg = -0.5 * (wp + wm);
      sino.at(ia, io, 0) = pg.dot(e1);
      sino.at(ia, io, 1) = pg.dot(e2);
    }
  FbpOptions fo;
  fo.resolution = opt.resolution;
  fo.extent = grid_extent(data, opt);
  fo.threads = opt.threads;
  const GridFunction g1 = invert_xray_2d(sino, 0, fo);
  const GridFunction g2 = invert_xray_2d(sino, 1, fo);
  const GridFunction vr = integrate_axis(g1, true);
  const GridFunction vc = integrate_axis(g2, false);
  ReconstructionReport rep;
  rep.target = "V";
  rep.pipeline =
      "a_sc -> w1 (high-energy scaling) -> P grad V (even part) -> filtered back-projection per component -> "
      "integration from the boundary along rows and columns";
  rep.estimate = GridFunction(fo.extent, opt.resolution);
  for (std::size_t q = 0; q < rep.estimate.values.size(); ++q)
    rep.estimate.values[q] = 0.5 * (vr.values[q] + vc.values[q]);
  rep.truth = plane_truth(data.plane, [&](const Vec& x) { return field->potential(x); }, fo.extent, opt.resolution);
  rep.relative_error = relative_l2_error(rep.estimate, rep.truth);
  rep.path_difference = relative_l2_error(vr, vc);
  rep.curl_residual = discrete_curl_ratio(g1, g2);
  if (opt.systematic) rep.systematic = systematic_error(field, data, opt.threads);
  return rep;
}

ReconstructionReport reconstruct_b_from_w4(const FieldPtr& field, const PlaneRestriction& plane, int j, int k,
                                           int angles, int offsets, double extent, const ReconstructOptions& opt) {
  const int d = field->dim();
  if (d < 4) fail(ErrorCode::InvalidArgument, "this reconstruction needs d >= 4");
  check_indices(d, j, k);
  for (const Vec* e : {&plane.e1(), &plane.e2()})
    if (std::abs((*e)(j)) > 1e-12 || std::abs((*e)(k)) > 1e-12)
      fail(ErrorCode::OffManifold, "plane tangents must vanish in coordinates j and k");
  Sinogram sino(uniform_angles(angles), uniform_offsets(offsets, extent), 1, extent, "PB");
  const TildeSampler w = w4_tilde_sampler(field);
  const std::size_t n = sino.offsets.size();
  parallel_for(sino.angles.size() * n, opt.threads, [&](std::size_t idx) {
    const Ray r = plane.embed_ray(sino.angles[idx / n], sino.offsets[idx % n]);
    sino.at(idx / n, idx % n) = pb_from_w4_d4(w, r, j, k);
  });
  FbpOptions fo;
  fo.resolution = opt.resolution;
  fo.extent = opt.grid_extent > 0.0 ? opt.grid_extent : extent / std::sqrt(2.0);
  fo.threads = opt.threads;
  ReconstructionReport rep;
  rep.target = "B_" + std::to_string(j + 1) + std::to_string(k + 1);
  rep.pipeline = "w4~ -> x-derivatives on rays with theta_j = theta_k = 0 -> PB_jk -> filtered back-projection";
  rep.estimate = invert_xray_2d(sino, 0, fo);
  rep.truth = plane_truth(plane, [&](const Vec& x) { return field->magnetic(x)(j, k); }, fo.extent, opt.resolution);
  rep.relative_error = relative_l2_error(rep.estimate, rep.truth);
  return rep;
}

NonuniquenessReport nonuniqueness_demo(NonuniqueKind kind, const FieldPtr& kernel, const FieldPtr& base, int rays,
                                       std::uint64_t seed, double c) {
  if (kernel->dim() != base->dim()) fail(ErrorCode::InvalidArgument, "kernel and base fields differ in dimension");
  if (rays < 1) fail(ErrorCode::InvalidArgument, "need at least one ray");
  const int d = kernel->dim();
  const FieldPtr sum = make_sum_field({base, kernel});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.0, 4.0);
  NonuniquenessReport rep{kind, rays, 0.0, 0.0, 0.0, 0.0};
  for (int r = 0; r < rays; ++r) {
    Vec th(d), x(d);
    for (int i = 0; i < d; ++i) th(i) = normal(rng);
    th.normalize();
    for (int i = 0; i < d; ++i) x(i) = normal(rng);
    x -= x.dot(th) * th;
    if (x.norm() > 0.0) x *= radius(rng) / x.norm();
    const Ray ray{th, x};
    if (kind == NonuniqueKind::Electric) {
      rep.max_kernel_functional = std::max(rep.max_kernel_functional, w2(*kernel, ray, c).norm());
      rep.max_witness = std::max(rep.max_witness, w1(*kernel, ray, c).norm());
      rep.max_pair_difference = std::max(rep.max_pair_difference, (w2(*base, ray, c) - w2(*sum, ray, c)).norm());
    } else {
      rep.max_kernel_functional = std::max(rep.max_kernel_functional, w4(*kernel, ray).norm());
      rep.max_witness = std::max(rep.max_witness, w3(*kernel, ray).norm());
      rep.max_pair_difference = std::max(rep.max_pair_difference, (w4(*base, ray) - w4(*sum, ray)).norm());
    }
    rep.max_pair_w1_difference = std::max(rep.max_pair_w1_difference, (w1(*base, ray, c) - w1(*sum, ray, c)).norm());
  }
  return rep;
}

}  // namespace emscat
