#include "emscat/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "emscat/errors.hpp"
#include "emscat/quadrature.hpp"

namespace emscat {

namespace {

constexpr double kFdStep = 1e-5;

Mat zero_mat(int d) { return Mat::Zero(d, d); }

}  // namespace

Vec fd_gradient(const ScalarFn& f, const Vec& x, double h) {
  const double step = h * (1.0 + x.norm());
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + step;
    xm(i) = x(i) - step;
    g(i) = (f(xp) - f(xm)) / (2.0 * step);
    xp(i) = xm(i) = x(i);
  }
  return g;
}

Mat fd_jacobian(const VectorFn& f, const Vec& x, double h) {
  const double step = h * (1.0 + x.norm());
  const int d = static_cast<int>(x.size());
  Mat j(d, d);
  Vec xp = x, xm = x;
  for (int k = 0; k < d; ++k) {
    xp(k) = x(k) + step;
    xm(k) = x(k) - step;
    const Vec fp = f(xp), fm = f(xm);
    if (j.rows() != fp.size()) j.resize(fp.size(), d);
    j.col(k) = (fp - fm) / (2.0 * step);
    xp(k) = xm(k) = x(k);
  }
  return j;
}

Field::Field(int dim, double alpha) : dim_(dim), alpha_(alpha) {
  if (dim < 2 || dim > kMaxDim) fail(ErrorCode::InvalidArgument, "field dimension out of range");
  if (!(alpha > 1.0)) fail(ErrorCode::InvalidArgument, "field decay exponent alpha must exceed 1");
}

void Field::check_dim(const Vec& x) const {
  if (x.size() != dim_) fail(ErrorCode::InvalidArgument, "point has wrong dimension");
}

Mat Field::potential_hessian(const Vec& x) const {
  return fd_jacobian([this](const Vec& y) { return potential_gradient(y); }, x, kFdStep);
}

Vec Field::vector_potential(const Vec& x) const {
  switch (magnetic_source()) {
    case MagneticSource::None:
      return Vec::Zero(dim_);
    case MagneticSource::FieldStrength:
      return transversal_gauge([this](const Vec& y) { return magnetic(y); })(x);
    case MagneticSource::VectorPotential:
      break;
  }
  fail(ErrorCode::InvalidArgument, name() + ": vector potential not provided");
}

Mat Field::vector_potential_jacobian(const Vec& x) const {
  if (magnetic_source() == MagneticSource::None) return zero_mat(dim_);
  return fd_jacobian([this](const Vec& y) { return vector_potential(y); }, x, kFdStep);
}

Mat Field::magnetic(const Vec& x) const {
  switch (magnetic_source()) {
    case MagneticSource::None:
      return zero_mat(dim_);
    case MagneticSource::VectorPotential: {
      const Mat j = vector_potential_jacobian(x);
      return j.transpose() - j;
    }
    case MagneticSource::FieldStrength:
      break;
  }
  fail(ErrorCode::InvalidArgument, name() + ": magnetic field not provided");
}

Mat Field::magnetic_derivative(const Vec& x, int l) const {
  if (magnetic_source() == MagneticSource::None) return zero_mat(dim_);
  const double step = kFdStep * (1.0 + x.norm());
  Vec xp = x, xm = x;
  xp(l) += step;
  xm(l) -= step;
  return (magnetic(xp) - magnetic(xm)) / (2.0 * step);
}

void Field::sample(const Vec& x, Vec& grad_v, Mat& b) const {
  grad_v = has_electric() ? potential_gradient(x) : Vec::Zero(dim_);
  b = has_magnetic() ? magnetic(x) : zero_mat(dim_);
}

namespace {

class ZeroField final : public Field {
 public:
  using Field::Field;
  std::string name() const override { return "zero"; }
  double potential(const Vec&) const override { return 0.0; }
  Vec potential_gradient(const Vec&) const override { return Vec::Zero(dim()); }
  Mat potential_hessian(const Vec&) const override { return zero_mat(dim()); }
  MagneticSource magnetic_source() const override { return MagneticSource::None; }
  bool has_electric() const override { return false; }
  void sample(const Vec&, Vec& grad_v, Mat& b) const override {
    grad_v = Vec::Zero(dim());
    b = zero_mat(dim());
  }
};

class InversePowerField final : public Field {
 public:
  InversePowerField(int d, double v0, double alpha, Vec center)
      : Field(d, alpha), v0_(v0), center_(std::move(center)) {
    if (center_.size() != d) fail(ErrorCode::InvalidArgument, "inverse_power: center has wrong dimension");
  }
  std::string name() const override { return "inverse_power"; }
  double potential(const Vec& x) const override {
    check_dim(x);
    return v0_ * std::pow(1.0 + (x - center_).squaredNorm(), -0.5 * alpha());
  }
  Vec potential_gradient(const Vec& x) const override {
    check_dim(x);
    const Vec y = x - center_;
    const double q = 1.0 + y.squaredNorm();
    return (-alpha() * v0_ * std::pow(q, -0.5 * alpha() - 1.0)) * y;
  }
  Mat potential_hessian(const Vec& x) const override {
    check_dim(x);
    const Vec y = x - center_;
    const double q = 1.0 + y.squaredNorm();
    const double a = alpha();
    const double p1 = std::pow(q, -0.5 * a - 1.0);
    Mat h = Mat::Identity(dim(), dim()) * (-a * v0_ * p1);
    h += (a * (a + 2.0) * v0_ * p1 / q) * (y * y.transpose());
    return h;
  }
  MagneticSource magnetic_source() const override { return MagneticSource::None; }
  void sample(const Vec& x, Vec& grad_v, Mat& b) const override {
    grad_v = potential_gradient(x);
    b = zero_mat(dim());
  }

 private:
  double v0_;
  Vec center_;
};

class GaussianField final : public Field {
 public:
  GaussianField(int d, double v0, double w, double alpha, Vec center)
      : Field(d, alpha), v0_(v0), w2_(w * w), center_(std::move(center)) {
    if (!(w > 0.0)) fail(ErrorCode::InvalidArgument, "gaussian: width must be positive");
    if (center_.size() != d) fail(ErrorCode::InvalidArgument, "gaussian: center has wrong dimension");
  }
  std::string name() const override { return "gaussian"; }
  double potential(const Vec& x) const override {
    check_dim(x);
    return v0_ * std::exp(-(x - center_).squaredNorm() / w2_);
  }
  Vec potential_gradient(const Vec& x) const override {
    check_dim(x);
    const Vec y = x - center_;
    return (-2.0 * v0_ / w2_ * std::exp(-y.squaredNorm() / w2_)) * y;
  }
  Mat potential_hessian(const Vec& x) const override {
    check_dim(x);
    const Vec y = x - center_;
    const double e = std::exp(-y.squaredNorm() / w2_);
    Mat h = Mat::Identity(dim(), dim()) * (-2.0 * v0_ * e / w2_);
    h += (4.0 * v0_ * e / (w2_ * w2_)) * (y * y.transpose());
    return h;
  }
  MagneticSource magnetic_source() const override { return MagneticSource::None; }
  void sample(const Vec& x, Vec& grad_v, Mat& b) const override {
    grad_v = potential_gradient(x);
    b = zero_mat(dim());
  }

 private:
  double v0_, w2_;
  Vec center_;
};

// A = b0 (-x2 xi, x1 xi), xi(t) = (1+t)^-sigma, t = |x|^2.
// curl: B12 = b0 (2 xi + 2 t xi') = 2 b0 (1+t)^(-sigma-1) (1 + (1-sigma) t).
class RadialMagneticField final : public Field {
 public:
  RadialMagneticField(double b0, double sigma) : Field(2, 2.0 * sigma - 1.0), b0_(b0), sigma_(sigma) {
    if (!(sigma > 1.0)) fail(ErrorCode::InvalidArgument, "radial_magnetic: sigma must exceed 1");
  }
  std::string name() const override { return "radial_magnetic"; }
  double potential(const Vec&) const override { return 0.0; }
  Vec potential_gradient(const Vec&) const override { return Vec::Zero(2); }
  Mat potential_hessian(const Vec&) const override { return zero_mat(2); }
  bool has_electric() const override { return false; }
  MagneticSource magnetic_source() const override { return MagneticSource::VectorPotential; }

  Vec vector_potential(const Vec& x) const override {
    check_dim(x);
    const double xi = b0_ * std::pow(1.0 + x.squaredNorm(), -sigma_);
    Vec a(2);
    a << -x(1) * xi, x(0) * xi;
    return a;
  }
  Mat vector_potential_jacobian(const Vec& x) const override {
    check_dim(x);
    const double t = x.squaredNorm();
    const double xi = b0_ * std::pow(1.0 + t, -sigma_);
    const double dxi = -sigma_ * xi / (1.0 + t);
    Mat j(2, 2);
    j(0, 0) = -2.0 * x(0) * x(1) * dxi;
    j(0, 1) = -xi - 2.0 * x(1) * x(1) * dxi;
    j(1, 0) = xi + 2.0 * x(0) * x(0) * dxi;
    j(1, 1) = 2.0 * x(0) * x(1) * dxi;
    return j;
  }
  double b12(double t) const {
    return 2.0 * b0_ * std::pow(1.0 + t, -sigma_ - 1.0) * (1.0 + (1.0 - sigma_) * t);
  }
  Mat magnetic(const Vec& x) const override {
    check_dim(x);
    const double b = b12(x.squaredNorm());
    Mat m(2, 2);
    m << 0.0, b, -b, 0.0;
    return m;
  }
  Mat magnetic_derivative(const Vec& x, int l) const override {
    check_dim(x);
    const double t = x.squaredNorm();
    // d/dt of 2 xi + 2 t xi' is 4 xi' + 2 t xi''.
    const double q = 1.0 + t;
    const double dxi = -sigma_ * b0_ * std::pow(q, -sigma_ - 1.0);
    const double ddxi = sigma_ * (sigma_ + 1.0) * b0_ * std::pow(q, -sigma_ - 2.0);
    const double db = (4.0 * dxi + 2.0 * t * ddxi) * 2.0 * x(l);
    Mat m(2, 2);
    m << 0.0, db, -db, 0.0;
    return m;
  }
  void sample(const Vec& x, Vec& grad_v, Mat& b) const override {
    grad_v = Vec::Zero(2);
    b = magnetic(x);
  }

 private:
  double b0_, sigma_;
};

class LocalizedMagneticField final : public Field {
 public:
  explicit LocalizedMagneticField(const LocalizedMagneticSpec& s)
      : Field(s.d, s.profile == Profile::Power ? 2.0 * s.kappa : s.alpha), spec_(s) {
    if (spec_.moment.size() != s.d) fail(ErrorCode::InvalidArgument, "localized_magnetic: moment has wrong dimension");
    if (spec_.center.size() != s.d) fail(ErrorCode::InvalidArgument, "localized_magnetic: center has wrong dimension");
    if (s.profile == Profile::Power && !(s.kappa > 0.5))
      fail(ErrorCode::InvalidArgument, "localized_magnetic: kappa must exceed 1/2");
    if (s.profile == Profile::Gaussian && !(s.width > 0.0))
      fail(ErrorCode::InvalidArgument, "localized_magnetic: width must be positive");
  }
  std::string name() const override { return "localized_magnetic"; }
  double potential(const Vec&) const override { return 0.0; }
  Vec potential_gradient(const Vec&) const override { return Vec::Zero(dim()); }
  Mat potential_hessian(const Vec&) const override { return zero_mat(dim()); }
  bool has_electric() const override { return false; }
  MagneticSource magnetic_source() const override { return MagneticSource::FieldStrength; }

  // profile value p(t) and its first two t-derivatives, times b0
  void profile(double t, double& p1, double& p2) const {
    if (spec_.profile == Profile::Power) {
      const double k = spec_.kappa;
      const double base = spec_.b0 * std::pow(1.0 + t, -k - 1.0);
      p1 = -k * base;
      p2 = k * (k + 1.0) * base / (1.0 + t);
    } else {
      const double w2 = spec_.width * spec_.width;
      const double p = spec_.b0 * std::exp(-t / w2);
      p1 = -p / w2;
      p2 = p / (w2 * w2);
    }
  }
  Mat magnetic(const Vec& x) const override {
    check_dim(x);
    const Vec y = x - spec_.center;
    double p1, p2;
    profile(y.squaredNorm(), p1, p2);
    const Vec g = 2.0 * p1 * y;
    return g * spec_.moment.transpose() - spec_.moment * g.transpose();
  }
  Mat magnetic_derivative(const Vec& x, int l) const override {
    check_dim(x);
    const Vec y = x - spec_.center;
    double p1, p2;
    profile(y.squaredNorm(), p1, p2);
    // column l of the Hessian of phi
    Vec hl = (4.0 * p2 * y(l)) * y;
    hl(l) += 2.0 * p1;
    return hl * spec_.moment.transpose() - spec_.moment * hl.transpose();
  }
  void sample(const Vec& x, Vec& grad_v, Mat& b) const override {
    grad_v = Vec::Zero(dim());
    b = magnetic(x);
  }

 private:
  LocalizedMagneticSpec spec_;
};

double min_alpha(const std::vector<FieldPtr>& parts) {
  if (parts.empty()) fail(ErrorCode::InvalidArgument, "sum field needs at least one component");
  double a = parts.front()->alpha();
  for (const auto& p : parts) {
    if (!p) fail(ErrorCode::InvalidArgument, "sum field component is null");
    a = std::min(a, p->alpha());
  }
  return a;
}

class SumField final : public Field {
 public:
  explicit SumField(std::vector<FieldPtr> parts)
      : Field(parts.empty() || !parts.front() ? 2 : parts.front()->dim(), min_alpha(parts)), parts_(std::move(parts)) {
    for (const auto& p : parts_)
      if (p->dim() != dim()) fail(ErrorCode::InvalidArgument, "sum field components differ in dimension");
  }
  std::string name() const override { return "sum"; }
  double potential(const Vec& x) const override {
    double v = 0.0;
    for (const auto& p : parts_) v += p->potential(x);
    return v;
  }
  Vec potential_gradient(const Vec& x) const override {
    Vec g = Vec::Zero(dim());
    for (const auto& p : parts_) g += p->potential_gradient(x);
    return g;
  }
  Mat potential_hessian(const Vec& x) const override {
    Mat h = zero_mat(dim());
    for (const auto& p : parts_) h += p->potential_hessian(x);
    return h;
  }
  bool has_electric() const override {
    return std::any_of(parts_.begin(), parts_.end(), [](const FieldPtr& p) { return p->has_electric(); });
  }
  MagneticSource magnetic_source() const override {
    MagneticSource s = MagneticSource::None;
    for (const auto& p : parts_) {
      if (p->magnetic_source() == MagneticSource::FieldStrength) return MagneticSource::FieldStrength;
      if (p->magnetic_source() == MagneticSource::VectorPotential) s = MagneticSource::VectorPotential;
    }
    return s;
  }
  Vec vector_potential(const Vec& x) const override {
    Vec a = Vec::Zero(dim());
    for (const auto& p : parts_) a += p->vector_potential(x);
    return a;
  }
  Mat vector_potential_jacobian(const Vec& x) const override {
    Mat j = zero_mat(dim());
    for (const auto& p : parts_) j += p->vector_potential_jacobian(x);
    return j;
  }
  Mat magnetic(const Vec& x) const override {
    Mat b = zero_mat(dim());
    for (const auto& p : parts_) b += p->magnetic(x);
    return b;
  }
  Mat magnetic_derivative(const Vec& x, int l) const override {
    Mat b = zero_mat(dim());
    for (const auto& p : parts_) b += p->magnetic_derivative(x, l);
    return b;
  }
  void sample(const Vec& x, Vec& grad_v, Mat& b) const override {
    grad_v = Vec::Zero(dim());
    b = zero_mat(dim());
    Vec g;
    Mat m;
    for (const auto& p : parts_) {
      p->sample(x, g, m);
      grad_v += g;
      b += m;
    }
  }

 private:
  std::vector<FieldPtr> parts_;
};

class FunctionField final : public Field {
 public:
  FunctionField(int d, double alpha, ScalarFn v, VectorFn gv, VectorFn a)
      : Field(d, alpha), v_(std::move(v)), gv_(std::move(gv)), a_(std::move(a)) {}
  std::string name() const override { return "function"; }
  double potential(const Vec& x) const override { return v_ ? v_(x) : 0.0; }
  Vec potential_gradient(const Vec& x) const override {
    if (gv_) return gv_(x);
    if (v_) return fd_gradient(v_, x, kFdStep);
    return Vec::Zero(dim());
  }
  bool has_electric() const override { return static_cast<bool>(v_); }
  MagneticSource magnetic_source() const override {
    return a_ ? MagneticSource::VectorPotential : MagneticSource::None;
  }
  Vec vector_potential(const Vec& x) const override { return a_ ? a_(x) : Vec::Zero(dim()); }

 private:
  ScalarFn v_;
  VectorFn gv_;
  VectorFn a_;
};

}  // namespace

FieldPtr make_zero_field(int d, double alpha) { return std::make_shared<ZeroField>(d, alpha); }

FieldPtr make_inverse_power_field(int d, double v0, double alpha, const Vec& center) {
  return std::make_shared<InversePowerField>(d, v0, alpha, center);
}

FieldPtr make_gaussian_field(int d, double v0, double w, double alpha, const Vec& center) {
  return std::make_shared<GaussianField>(d, v0, w, alpha, center);
}

FieldPtr make_radial_magnetic_field(double b0, double sigma) {
  return std::make_shared<RadialMagneticField>(b0, sigma);
}

FieldPtr make_localized_magnetic_field(const LocalizedMagneticSpec& spec) {
  return std::make_shared<LocalizedMagneticField>(spec);
}

FieldPtr make_sum_field(const std::vector<FieldPtr>& parts) { return std::make_shared<SumField>(parts); }

FieldPtr make_function_field(int d, double alpha, ScalarFn v, VectorFn grad_v, VectorFn a) {
  return std::make_shared<FunctionField>(d, alpha, std::move(v), std::move(grad_v), std::move(a));
}

MatrixFn magnetic_from_potential(VectorFn a, int d, MatrixFn jacobian) {
  if (!jacobian) {
    jacobian = [a](const Vec& x) { return fd_jacobian(a, x, 1e-5); };
  }
  return [jacobian, d](const Vec& x) -> Mat {
    const Mat j = jacobian(x);
    if (j.rows() != d || j.cols() != d) fail(ErrorCode::InvalidArgument, "vector potential has wrong dimension");
    return j.transpose() - j;
  };
}

VectorFn transversal_gauge(MatrixFn b, double abs_tol) {
  return [b, abs_tol](const Vec& x) -> Vec {
    if (x.squaredNorm() == 0.0) return Vec::Zero(x.size());
    QuadOptions opt;
    opt.abs_tol = abs_tol;
    opt.rel_tol = 0.0;
    opt.initial_intervals = 4;
    auto r = integrate([&](double s) -> Vec { return (s * (b(s * x) * x)).eval(); }, 0.0, 1.0, opt);
    return -r.value;
  };
}

DecayReport verify_decay(const Field& field, const DecaySampling& sampling) {
  const int d = field.dim();
  const double alpha = field.alpha();
  const MagneticSource src = field.magnetic_source();
  DecayReport rep;
  for (auto& w : rep.worst_points) w = Vec::Zero(d);

  std::mt19937_64 rng(sampling.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto random_unit = [&]() {
    Vec u(d);
    do {
      for (int i = 0; i < d; ++i) u(i) = normal(rng);
    } while (u.norm() < 1e-12);
    return Vec(u / u.norm());
  };

  // Ratios |derivative of order m| * (1+|x|)^(alpha+m) at one point.
  auto ratios = [&](const Vec& x) {
    std::array<double, 3> m{0.0, 0.0, 0.0};
    const double w = 1.0 + x.norm();
    if (field.has_electric()) {
      m[0] = std::abs(field.potential(x));
      m[1] = sup_norm(field.potential_gradient(x));
      m[2] = field.potential_hessian(x).cwiseAbs().maxCoeff();
    }
    if (src == MagneticSource::VectorPotential) {
      m[0] = std::max(m[0], sup_norm(field.vector_potential(x)));
      m[1] = std::max(m[1], field.vector_potential_jacobian(x).cwiseAbs().maxCoeff());
      const double step = 1e-5 * w;
      for (int l = 0; l < d; ++l) {
        Vec xp = x, xm = x;
        xp(l) += step;
        xm(l) -= step;
        const Mat h = (field.vector_potential_jacobian(xp) - field.vector_potential_jacobian(xm)) / (2.0 * step);
        m[2] = std::max(m[2], h.cwiseAbs().maxCoeff());
      }
    } else if (src == MagneticSource::FieldStrength) {
      // Weakened assumptions: B and its first derivatives carry the decay.
      m[1] = std::max(m[1], field.magnetic(x).cwiseAbs().maxCoeff());
      for (int l = 0; l < d; ++l)
        m[2] = std::max(m[2], field.magnetic_derivative(x, l).cwiseAbs().maxCoeff());
    }
    for (int k = 0; k < 3; ++k) m[k] *= std::pow(w, alpha + k);
    return m;
  };

  auto absorb = [&](const Vec& x, const std::array<double, 3>& m) {
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(m[k])) {
        rep.pass = false;
        rep.message = "non-finite derivative ratio";
        rep.beta[k] = std::numeric_limits<double>::infinity();
        rep.worst_points[k] = x;
      } else if (m[k] > rep.beta[k]) {
        rep.beta[k] = m[k];
        rep.worst_points[k] = x;
      }
    }
  };

  std::vector<Vec> dirs;
  for (int i = 0; i < d; ++i) {
    dirs.push_back(unit(d, i));
    dirs.push_back(-unit(d, i));
  }
  for (int i = 0; i < sampling.random_directions; ++i) dirs.push_back(random_unit());

  // Radii: dense linear near the origin plus logarithmic out to r_max.
  std::vector<double> radii{0.0};
  const int n = std::max(8, sampling.radial_points);
  for (int i = 1; i <= n; ++i) radii.push_back(4.0 * i / n);
  for (int i = 0; i <= n; ++i) radii.push_back(4.0 * std::pow(sampling.r_max / 4.0, double(i) / n));

  std::vector<std::array<double, 3>> at_far(dirs.size()), at_mid(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    for (double r : radii) absorb(r * dirs[k], ratios(r * dirs[k]));
    at_far[k] = ratios(sampling.r_max * dirs[k]);
    at_mid[k] = ratios(0.1 * sampling.r_max * dirs[k]);
  }
  for (int i = 0; i < sampling.random_points; ++i) {
    const double u = uni(rng);
    const Vec x = (sampling.r_max * u * u * u) * random_unit();
    absorb(x, ratios(x));
  }

  // Growth along rays: a bounded ratio cannot double over the last decade.
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    for (int m = 0; m < 3; ++m) {
      if (at_mid[k][m] > 0.0) rep.growth[m] = std::max(rep.growth[m], at_far[k][m] / at_mid[k][m]);
      const bool significant = at_far[k][m] > 1e-6 * rep.beta[m];
      if (significant && at_far[k][m] > 2.0 * at_mid[k][m]) {
        rep.pass = false;
        if (rep.message.empty()) {
          std::ostringstream os;
          os << "order-" << m << " ratio grows with |x| (decay slower than declared alpha=" << alpha << ")";
          rep.message = os.str();
        }
      }
    }
  }
  return rep;
}

}  // namespace emscat
