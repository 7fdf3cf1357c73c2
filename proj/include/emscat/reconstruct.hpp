#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emscat/dynamics.hpp"
#include "emscat/fields.hpp"
#include "emscat/linalg.hpp"
#include "emscat/xray.hpp"

namespace emscat {

// w(theta, x) on rays and the extension w~(y, x) on (R^d \ 0) x R^d.
using RaySampler = std::function<Vec(const Ray&)>;
using TildeSampler = std::function<Vec(const Vec& y, const Vec& x)>;

RaySampler w1_sampler(FieldPtr field, double c);
RaySampler w3_sampler(FieldPtr field);
TildeSampler w1_tilde_sampler(FieldPtr field, double c);
TildeSampler w3_tilde_sampler(FieldPtr field);
TildeSampler w4_tilde_sampler(FieldPtr field);
// w3 = (w1(theta) - w1(-theta)) / 2
RaySampler w3_from_w1(RaySampler w1);

// P(grad V) = -(w1(theta) + w1(-theta)) / 2
Vec pgradv_from_w1(const RaySampler& w1, const Ray& ray);
// PB_ik on rays whose direction is supported on coordinates i, k (OffManifold otherwise).
double pb_from_w1_plane(const RaySampler& w1, const Ray& ray, int i, int k);
double pb_from_w3_plane(const RaySampler& w3, const Ray& ray, int i, int k);
// PB_ik from y-derivatives at y = theta (central differences); StepUnderflow
// when the step is not representable at the ray.
double pb_from_w1_derivative(const TildeSampler& w1t, const Ray& ray, int i, int k, double step = 1e-4);
double pb_from_w3_derivative(const TildeSampler& w3t, const Ray& ray, int i, int k, double step = 1e-4);

// d >= 4, theta_j = theta_k = 0: PB_jk = d_k w4~_j - d_j w4~_k (x-derivatives).
double pb_from_w4_d4(const TildeSampler& w4t, const Ray& ray, int j, int k, double step = 1e-3);

// Residual of sum_j theta_j [theta_k PB_ij - theta_i PB_kj] - PB_ik = d_i w4~_k - d_k w4~_i.
double w4_identity_residual(const Field& field, const Ray& ray, int i, int k, double step = 1e-3);

// d/dx_l (d_m w4~_n - d_n w4~_m)(theta, x) by nested central differences, all (m, n) at once.
Mat w4_tilde_second(const TildeSampler& w4t, const Vec& theta, const Vec& x, int l, double inner = 1e-3,
                    double outer = 2e-3);

struct FourierPlaneOptions {
  int nodes = 48;          // Gauss-Legendre nodes per axis on [-extent, extent]
  double extent = 6.0;     // half-width of the plane square
  Vec center;              // plane integrals are centred on the projection of this point (empty: origin)
  double inner_step = 1e-3;
  double outer_step = 2e-3;
  int threads = 1;
};

using CVec3 = std::array<std::complex<double>, 3>;
// (-F B_23l, F B_13l, -F B_12l)(p) for d = 3; p = 0 sums over the standard basis.
CVec3 fourier_b_derivs_from_w4(const TildeSampler& w4t, const Vec& p, int l, const FourierPlaneOptions& opt = {});
// The same vector from a field's dB by a direct 3-D Fourier integral on [c - L, c + L]^3.
CVec3 fourier_b_derivs_direct(const Field& field, const Vec& p, int l, const Vec& center, double extent, int nodes);

// Scattering data on the rays of a plane, for a full turn of angles so that
// every ray (phi, q) has its reverse (phi + pi, -q) in the set.
struct PlaneDataSpec {
  int angles = 120;    // over [0, pi); the dataset holds 2 * angles directions
  int offsets = 129;
  double extent = 8.0;
  double s = 0.99;     // fraction of c
  double c = 1.0;
  SolverSpec solver;
  int threads = 1;
};

struct PlaneDataset {
  PlaneRestriction plane;
  PlaneDataSpec spec;
  std::vector<double> angles;   // 2 * spec.angles values over [0, 2 pi)
  std::vector<double> offsets;  // symmetric about 0
  std::vector<Vec> a_sc;        // [angle * offsets + offset]
  std::vector<Vec> b_sc;
  double max_energy_drift = 0.0;

  Ray ray(std::size_t ia, std::size_t io) const { return plane.embed_ray(angles[ia], offsets[io]); }
  // w1 estimate s a_sc / sqrt(1 - s^2/c^2)
  RaySampler w1_estimate() const;
};

PlaneDataset simulate_plane_dataset(FieldPtr field, const PlaneRestriction& plane, const PlaneDataSpec& spec);

struct ReconstructionReport {
  std::string target;
  std::string pipeline;
  GridFunction estimate, truth;
  double relative_error = 0.0;
  double systematic = 0.0;      // max |w1 estimate - w1| over the rays, when computed
  double path_difference = NAN;  // V only: rows vs columns, relative L2
  double curl_residual = NAN;    // V only: relative discrete curl of the gradient
};

struct ReconstructOptions {
  int resolution = 129;
  double grid_extent = 0.0;  // 0: dataset extent / sqrt 2
  int threads = 1;
  bool systematic = false;   // also evaluate w1 on every ray
};

// PB_ik from the w1 plane formula on the dataset, FBP on the plane.  Plane tangents must
// be the coordinate vectors e_i, e_k.
ReconstructionReport reconstruct_b(const FieldPtr& field, const PlaneDataset& data, int i, int k,
                                   const ReconstructOptions& opt = {});
// P grad V from the even part of w1, FBP of the in-plane gradient, integration from the boundary.
ReconstructionReport reconstruct_v(const FieldPtr& field, const PlaneDataset& data, const ReconstructOptions& opt = {});
// d >= 4: PB_jk on a plane orthogonal to e_j, e_k from derivatives of w4~, FBP on the plane.
ReconstructionReport reconstruct_b_from_w4(const FieldPtr& field, const PlaneRestriction& plane, int j, int k,
                                           int angles, int offsets, double extent, const ReconstructOptions& opt = {});

enum class NonuniqueKind { Electric, Magnetic2d };
struct NonuniquenessReport {
  NonuniqueKind kind;
  int rays = 0;
  double max_kernel_functional = 0.0;  // max |w2(V_rad)| or max |w4(B_rad)|
  double max_witness = 0.0;            // max |w1(V_rad)| or max |w3(B_rad)|
  double max_pair_difference = 0.0;    // max |w2(base) - w2(base + kernel)| (or w4)
  double max_pair_w1_difference = 0.0; // the same pair seen through w1
};
// `kernel` is the radial field, `base` a non-radial field of the same dimension.
NonuniquenessReport nonuniqueness_demo(NonuniqueKind kind, const FieldPtr& kernel, const FieldPtr& base, int rays,
                                       std::uint64_t seed, double c = 1.0);

}  // namespace emscat
