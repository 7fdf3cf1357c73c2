#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "emscat/linalg.hpp"

namespace emscat {

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;

// Where the magnetic part comes from: a vector potential A (B = curl A), or a
// closed field strength B whose A is the transversal gauge.
enum class MagneticSource { None, VectorPotential, FieldStrength };

class Field {
 public:
  Field(int dim, double alpha);
  virtual ~Field() = default;

  int dim() const { return dim_; }
  // Declared decay exponent (> 1).
  double alpha() const { return alpha_; }
  virtual std::string name() const = 0;

  virtual double potential(const Vec& x) const = 0;
  virtual Vec potential_gradient(const Vec& x) const = 0;
  virtual Mat potential_hessian(const Vec& x) const;

  virtual MagneticSource magnetic_source() const = 0;
  virtual Vec vector_potential(const Vec& x) const;
  // J(i, k) = dA_i / dx_k
  virtual Mat vector_potential_jacobian(const Vec& x) const;
  virtual Mat magnetic(const Vec& x) const;
  // d B / d x_l
  virtual Mat magnetic_derivative(const Vec& x, int l) const;

  virtual bool has_electric() const { return true; }
  bool has_magnetic() const { return magnetic_source() != MagneticSource::None; }

  // grad V and B at x in one call.
  virtual void sample(const Vec& x, Vec& grad_v, Mat& b) const;

 protected:
  void check_dim(const Vec& x) const;

 private:
  int dim_;
  double alpha_;
};

using FieldPtr = std::shared_ptr<const Field>;

FieldPtr make_zero_field(int d, double alpha = 2.0);
// V = v0 (1 + |x - center|^2)^(-alpha/2)
FieldPtr make_inverse_power_field(int d, double v0, double alpha, const Vec& center);
// V = v0 exp(-|x - center|^2 / w^2); alpha is the declared (arbitrary) exponent.
FieldPtr make_gaussian_field(int d, double v0, double w, double alpha, const Vec& center);
// d = 2: A = b0 (-x2 xi(|x|^2), x1 xi(|x|^2)), xi(t) = (1 + t)^(-sigma), alpha = 2 sigma - 1.
FieldPtr make_radial_magnetic_field(double b0, double sigma);

enum class Profile { Power, Gaussian };
struct LocalizedMagneticSpec {
  int d = 3;
  double b0 = 1.0;
  Vec moment;       // m
  Vec center;
  Profile profile = Profile::Power;
  double kappa = 1.5;   // power profile (1 + r^2)^(-kappa), alpha = 2 kappa
  double width = 1.0;   // gaussian profile exp(-r^2 / w^2)
  double alpha = 3.0;   // declared exponent for the gaussian profile
};
// B_ik = m_k d_i phi - m_i d_k phi with phi = b0 * profile(|x - center|^2);
// A is the transversal gauge of B.
FieldPtr make_localized_magnetic_field(const LocalizedMagneticSpec& spec);
FieldPtr make_sum_field(const std::vector<FieldPtr>& parts);
// Plug-in field from plain functions; missing derivatives use finite differences.
FieldPtr make_function_field(int d, double alpha, ScalarFn v, VectorFn grad_v = {}, VectorFn a = {});

// B_ik = dA_k/dx_i - dA_i/dx_k; the Jacobian defaults to central differences.
MatrixFn magnetic_from_potential(VectorFn a, int d, MatrixFn jacobian = {});
// A(x) = -int_0^1 s B(s x) x ds
VectorFn transversal_gauge(MatrixFn b, double abs_tol = 1e-10);

// Central-difference helpers, step h * (1 + |x|).
Vec fd_gradient(const ScalarFn& f, const Vec& x, double h);
Mat fd_jacobian(const VectorFn& f, const Vec& x, double h);

struct DecaySampling {
  double r_max = 1e3;
  int radial_points = 400;
  int random_directions = 16;
  int random_points = 2000;
  std::uint64_t seed = 12345;
};

struct DecayReport {
  std::array<double, 3> beta{0.0, 0.0, 0.0};
  std::array<Vec, 3> worst_points;
  std::array<double, 3> growth{0.0, 0.0, 0.0};
  bool pass = true;
  std::string message;

  double beta_tilde() const { return beta[1] > beta[2] ? beta[1] : beta[2]; }
};

DecayReport verify_decay(const Field& field, const DecaySampling& sampling = {});

}  // namespace emscat
