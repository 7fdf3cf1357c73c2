#include "emscat/xray.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "emscat/csv.hpp"
#include "emscat/errors.hpp"
#include "emscat/parallel.hpp"

namespace emscat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Ray make_ray(const Vec& theta, const Vec& x) {
  if (theta.size() != x.size()) fail(ErrorCode::InvalidArgument, "ray direction and offset differ in dimension");
  if (std::abs(theta.norm() - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "ray direction is not a unit vector");
  if (std::abs(theta.dot(x)) > 1e-12 * std::max(1.0, x.norm()))
    fail(ErrorCode::InvalidArgument, "ray offset is not orthogonal to its direction");
  return Ray{theta, x};
}

Ray project_to_ray(const Vec& y, const Vec& x) {
  const double n2 = y.squaredNorm();
  if (!(n2 > 0.0)) fail(ErrorCode::ZeroDirection, "direction vector is zero");
  Vec theta = y / std::sqrt(n2);
  Vec off = x - (x.dot(y) / n2) * y;
  off -= off.dot(theta) * theta;  // one more sweep for round-off
  return Ray{theta, off};
}

QuadOptions LineQuadrature::options(double center) const {
  QuadOptions o;
  o.abs_tol = abs_tol;
  o.rel_tol = rel_tol;
  o.scale = scale;
  o.center = center;
  o.max_intervals = max_intervals;
  return o;
}

double xray_transform(const ScalarFn& f, const Ray& ray, double decay, const LineQuadrature& q) {
  if (!(decay > 1.0)) fail(ErrorCode::NoConvergence, "line integral needs decay exponent > 1");
  return integrate([&](double t) { return f(ray.point(t)); }, -HUGE_VAL, HUGE_VAL, q.options()).value;
}

Vec xray_transform(const VectorFn& f, const Ray& ray, double decay, const LineQuadrature& q) {
  if (!(decay > 1.0)) fail(ErrorCode::NoConvergence, "line integral needs decay exponent > 1");
  return integrate([&](double t) -> Vec { return f(ray.point(t)); }, -HUGE_VAL, HUGE_VAL, q.options()).value;
}

Sinogram::Sinogram(std::vector<double> a, std::vector<double> o, int comps, double ext, std::string lbl)
    : angles(std::move(a)), offsets(std::move(o)), components(comps), extent(ext), label(std::move(lbl)) {
  if (comps < 1) fail(ErrorCode::InvalidArgument, "sinogram needs at least one component");
  values.assign(angles.size() * offsets.size() * static_cast<std::size_t>(comps), 0.0);
  if (extent == 0.0)
    for (double q : offsets) extent = std::max(extent, std::abs(q));
}

void Sinogram::validate() const {
  if (angles.size() < 2 || offsets.size() < 2)
    fail(ErrorCode::Coverage, "sinogram needs at least 2 angles and 2 offsets");
  for (std::size_t i = 1; i < angles.size(); ++i)
    if (!(angles[i] > angles[i - 1])) fail(ErrorCode::InvalidArgument, "sinogram angles not strictly increasing");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (!(offsets[i] > offsets[i - 1])) fail(ErrorCode::InvalidArgument, "sinogram offsets not strictly increasing");
  if (values.size() != angles.size() * offsets.size() * static_cast<std::size_t>(components))
    fail(ErrorCode::InvalidArgument, "sinogram value count mismatch");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "sinogram contains non-finite values");
}

std::vector<double> uniform_angles(int m, double span) {
  std::vector<double> a(m);
  for (int i = 0; i < m; ++i) a[i] = span * i / m;
  return a;
}

std::vector<double> uniform_offsets(int n, double extent) {
  std::vector<double> q(n);
  for (int j = 0; j < n; ++j) q[j] = n == 1 ? 0.0 : -extent + 2.0 * extent * j / (n - 1);
  return q;
}

GridFunction::GridFunction(double ext, int res) : extent(ext), resolution(res) {
  if (res < 2) fail(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
  if (!(ext > 0.0)) fail(ErrorCode::InvalidArgument, "grid extent must be positive");
  values.assign(static_cast<std::size_t>(res) * res, 0.0);
}

GridFunction sample_grid(const std::function<double(double, double)>& f, double extent, int resolution) {
  GridFunction g(extent, resolution);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) g.at(i, j) = f(g.coordinate(i), g.coordinate(j));
  return g;
}

double relative_l2_error(const GridFunction& a, const GridFunction& b) {
  if (a.resolution != b.resolution || std::abs(a.extent - b.extent) > 1e-12 * b.extent)
    fail(ErrorCode::InvalidArgument, "grids are not congruent");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    num += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
    den += b.values[k] * b.values[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

namespace {
// int_a^b f cos(kappa f + phase) df
double moment_cos(double kappa, double phase, double a, double b) {
  if (std::abs(kappa) * std::max(std::abs(a), std::abs(b)) < 1e-7)
    return std::cos(phase) * (b * b - a * a) / 2.0 - std::sin(phase) * kappa * (b * b * b - a * a * a) / 3.0;
  auto prim = [&](double f) {
    const double arg = kappa * f + phase;
    return f * std::sin(arg) / kappa + std::cos(arg) / (kappa * kappa);
  };
  return prim(b) - prim(a);
}
}  // namespace

std::vector<double> ramp_filter(int n, double spacing, double rolloff) {
  if (!(rolloff >= 0.0 && rolloff <= 1.0)) fail(ErrorCode::InvalidArgument, "roll-off fraction must lie in [0, 1]");
  // h[j] = 2 int_0^N f W(f) cos(2 pi f j dq) df, N = 1/(2 dq); W = 1 below f0 and
  // a raised cosine from 1 at f0 to 0 at N.
  const double nyq = 1.0 / (2.0 * spacing);
  const double f0 = (1.0 - rolloff) * nyq;
  const double width = nyq - f0;
  std::vector<double> h(n);
  for (int k = 0; k < n; ++k) {
    const double w = 2.0 * kPi * k * spacing;
    double v = moment_cos(w, 0.0, 0.0, f0);
    if (width > 0.0) {
      const double kw = kPi / width, ph = kPi * f0 / width;
      v += 0.5 * moment_cos(w, 0.0, f0, nyq) + 0.25 * moment_cos(w + kw, -ph, f0, nyq) +
           0.25 * moment_cos(w - kw, ph, f0, nyq);
    }
    h[k] = 2.0 * v;
  }
  return h;
}

GridFunction invert_xray_2d(const Sinogram& sino, int component, const FbpOptions& opt) {
  sino.validate();
  if (component < 0 || component >= sino.components) fail(ErrorCode::InvalidArgument, "component out of range");
  const std::size_t m = sino.angles.size(), n = sino.offsets.size();
  const double q0 = sino.offsets.front();
  const double dq = (sino.offsets.back() - q0) / double(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(sino.offsets[j] - (q0 + dq * j)) > 1e-9 * dq)
      fail(ErrorCode::InvalidArgument, "filtered back-projection needs uniformly spaced offsets");
  if (sino.angles.front() < -1e-12 || sino.angles.back() >= kPi)
    fail(ErrorCode::Coverage, "sinogram angles must lie in [0, pi)");

  // Angular quadrature weights on the circle of period pi.
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = i == 0 ? sino.angles[m - 1] - kPi : sino.angles[i - 1];
    const double next = i + 1 == m ? sino.angles[0] + kPi : sino.angles[i + 1];
    w[i] = 0.5 * (next - prev);
  }

  const std::vector<double> h = ramp_filter(static_cast<int>(n), dq, opt.window ? opt.rolloff : 0.0);
  std::vector<double> filtered(m * n);
  parallel_for(m, opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const long dj = static_cast<long>(j) - static_cast<long>(k);
        acc += sino.at(i, k, component) * h[static_cast<std::size_t>(std::labs(dj))];
      }
      filtered[i * n + j] = acc * dq;
    }
  });

  const double extent = opt.extent > 0.0 ? opt.extent : sino.extent;
  GridFunction g(extent, opt.resolution);
  std::vector<double> cs(m), sn(m);
  for (std::size_t i = 0; i < m; ++i) {
    cs[i] = std::cos(sino.angles[i]);
    sn[i] = std::sin(sino.angles[i]);
  }
  parallel_for(static_cast<std::size_t>(opt.resolution), opt.threads, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double x2 = g.coordinate(j);
    for (int i = 0; i < g.resolution; ++i) {
      const double x1 = g.coordinate(i);
      double acc = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        const double q = -x1 * sn[a] + x2 * cs[a];
        const double u = (q - q0) / dq;
        if (u < 0.0 || u > double(n - 1)) continue;
        std::size_t k = static_cast<std::size_t>(u);
        if (k >= n - 1) k = n - 2;
        const double f = u - double(k);
        acc += w[a] * ((1.0 - f) * filtered[a * n + k] + f * filtered[a * n + k + 1]);
      }
      g.at(i, j) = acc;
    }
  });
  return g;
}

PlaneRestriction::PlaneRestriction(const Vec& point, const Vec& e1, const Vec& e2) : e1_(e1), e2_(e2) {
  if (point.size() != e1.size() || e1.size() != e2.size())
    fail(ErrorCode::InvalidArgument, "plane vectors differ in dimension");
  if (std::abs(e1.norm() - 1.0) > 1e-12 || std::abs(e2.norm() - 1.0) > 1e-12 || std::abs(e1.dot(e2)) > 1e-12)
    fail(ErrorCode::InvalidArgument, "plane tangent vectors are not orthonormal");
  foot_ = point - point.dot(e1) * e1 - point.dot(e2) * e2;
}

Ray PlaneRestriction::embed_ray(double phi, double q) const {
  const double c = std::cos(phi), s = std::sin(phi);
  return Ray{c * e1_ + s * e2_, foot_ + q * (-s * e1_ + c * e2_)};
}

std::function<double(double, double)> PlaneRestriction::restrict(const ScalarFn& f) const {
  return [f, self = *this](double u1, double u2) { return f(self.embed(u1, u2)); };
}

std::string sinogram_csv(const Sinogram& s) {
  std::string out = "phi,q,component,value\n";
  for (std::size_t i = 0; i < s.angles.size(); ++i)
    for (std::size_t j = 0; j < s.offsets.size(); ++j)
      for (int c = 0; c < s.components; ++c) {
        out += format_double(s.angles[i]);
        out += ',';
        out += format_double(s.offsets[j]);
        out += ',';
        out += std::to_string(c);
        out += ',';
        out += format_double(s.at(i, j, c));
        out += '\n';
      }
  return out;
}

void write_sinogram_csv(const std::string& path, const Sinogram& s) { write_text_file(path, sinogram_csv(s)); }

Sinogram read_sinogram_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "phi,q,component,value")
    fail(ErrorCode::Parse, path + ": expected header phi,q,component,value");
  std::map<double, std::size_t> ai, qi;
  int comps = 0;
  struct Row { double phi, q; int c; double v; };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected 4 fields");
    Row r{parse_double(f[0]), parse_double(f[1]), static_cast<int>(parse_double(f[2])), parse_double(f[3])};
    ai.emplace(r.phi, 0);
    qi.emplace(r.q, 0);
    comps = std::max(comps, r.c + 1);
    rows.push_back(r);
  }
  std::vector<double> angles, offsets;
  for (auto& [k, v] : ai) { v = angles.size(); angles.push_back(k); }
  for (auto& [k, v] : qi) { v = offsets.size(); offsets.push_back(k); }
  Sinogram s(angles, offsets, std::max(comps, 1));
  if (rows.size() != s.values.size()) fail(ErrorCode::Parse, path + ": incomplete sinogram grid");
  for (const Row& r : rows) s.at(ai[r.phi], qi[r.q], r.c) = r.v;
  return s;
}

std::string grid_csv(const GridFunction& g) {
  std::string out = "x1,x2,value\n";
  for (int j = 0; j < g.resolution; ++j)
    for (int i = 0; i < g.resolution; ++i) {
      out += format_double(g.coordinate(i));
      out += ',';
      out += format_double(g.coordinate(j));
      out += ',';
      out += format_double(g.at(i, j));
      out += '\n';
    }
  return out;
}

void write_grid_csv(const std::string& path, const GridFunction& g) { write_text_file(path, grid_csv(g)); }

GridFunction read_grid_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x1,x2,value")
    fail(ErrorCode::Parse, path + ": expected header x1,x2,value");
  std::vector<double> vals;
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected 3 fields");
    const double x1 = parse_double(f[0]);
    lo = std::min(lo, x1);
    hi = std::max(hi, x1);
    vals.push_back(parse_double(f[2]));
  }
  const int n = static_cast<int>(std::lround(std::sqrt(double(vals.size()))));
  if (n < 2 || static_cast<std::size_t>(n) * n != vals.size()) fail(ErrorCode::Parse, path + ": grid is not square");
  GridFunction g(0.5 * (hi - lo), n);
  g.values = std::move(vals);
  return g;
}

}  // namespace emscat
