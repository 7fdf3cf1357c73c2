#pragma once

// Adaptive Gauss-Kronrod (7,15) quadrature for scalar or Eigen-vector valued
// integrands on finite, half-infinite and infinite intervals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

#include "emscat/errors.hpp"

namespace emscat {

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
  int initial_intervals = 8;
  // Length scale of the algebraic map used for infinite ranges, and the
  // point the doubly infinite map is centred on.
  double scale = 1.0;
  double center = 0.0;
  bool throw_on_failure = true;
};

template <class T>
struct QuadResult {
  T value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline int n_comp(double) { return 1; }
inline double comp(double v, int) { return v; }
inline double& comp_ref(double& v, int) { return v; }
template <class D>
int n_comp(const Eigen::MatrixBase<D>& v) { return static_cast<int>(v.size()); }
template <class D>
double comp(const Eigen::MatrixBase<D>& v, int i) { return v(i); }
template <class D>
double& comp_ref(Eigen::MatrixBase<D>& v, int i) { return v(i); }

template <class T>
T zero_like(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else {
    return T::Zero(v.size());
  }
}

template <class T>
double norm_inf(const T& v) {
  double m = 0.0;
  for (int i = 0; i < n_comp(v); ++i) m = std::max(m, std::abs(comp(v, i)));
  return m;
}

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  double magnitude;  // integral of |f| (max over components)
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One G7/K15 pass with the QUADPACK error heuristic applied per component.
template <class T, class G>
Segment<T> gk15(G& g, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T fc = g(mid);
  T fv1[7], fv2[7];
  T resk = fc * kWgk[7];
  T resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = g(mid - dx);
    fv2[j] = g(mid + dx);
    resk += (fv1[j] + fv2[j]) * kWgk[j];
    if (j % 2 == 1) resg += (fv1[j] + fv2[j]) * kWg[j / 2];
  }
  const int nc = n_comp(fc);
  double err = 0.0;
  double mag = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int c = 0; c < nc; ++c) {
    const double kval = comp(resk, c);
    const double mean = 0.5 * kval;
    double resabs = kWgk[7] * std::abs(comp(fc, c));
    double resasc = kWgk[7] * std::abs(comp(fc, c) - mean);
    for (int j = 0; j < 7; ++j) {
      resabs += kWgk[j] * (std::abs(comp(fv1[j], c)) + std::abs(comp(fv2[j], c)));
      resasc += kWgk[j] * (std::abs(comp(fv1[j], c) - mean) + std::abs(comp(fv2[j], c) - mean));
    }
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double e = std::abs((kval - comp(resg, c)) * half);
    if (resasc != 0.0 && e != 0.0) e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) e = std::max(50.0 * eps * resabs, e);
    err = std::max(err, e);
    mag = std::max(mag, resabs);
  }
  T value = resk * half;
  return Segment<T>{a, b, value, err, mag};
}

template <class T, class G>
QuadResult<T> adaptive(G& g, double a, double b, const QuadOptions& opt) {
  std::priority_queue<Segment<T>> heap;
  const int n0 = std::max(1, opt.initial_intervals);
  int evals = 0;
  Segment<T> first = gk15<T>(g, a, n0 == 1 ? b : a + (b - a) / n0);
  T total = first.value;
  double total_err = first.error;
  double total_mag = first.magnitude;
  evals += 15;
  heap.push(std::move(first));
  for (int i = 1; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    Segment<T> s = gk15<T>(g, lo, hi);
    evals += 15;
    total += s.value;
    total_err += s.error;
    total_mag += s.magnitude;
    heap.push(std::move(s));
  }
  double frozen_err = 0.0;
  T frozen = zero_like(total);
  bool converged = false;
  int intervals = n0;
  while (true) {
    // Round-off floor: cancelling integrands cannot beat eps * int |f|.
    const double floor = 200.0 * std::numeric_limits<double>::epsilon() * total_mag;
    const double tol = std::max({opt.abs_tol, opt.rel_tol * norm_inf(total), floor});
    if (total_err + frozen_err <= tol) { converged = true; break; }
    if (heap.empty() || intervals >= opt.max_intervals) break;
    Segment<T> worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b) ||
        std::abs(worst.b - worst.a) < 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(m))) {
      // Cannot split further; keep its contribution and stop refining it.
      frozen_err += worst.error;
      frozen += worst.value;
      total_err -= worst.error;
      continue;
    }
    Segment<T> l = gk15<T>(g, worst.a, m);
    Segment<T> r = gk15<T>(g, m, worst.b);
    evals += 30;
    ++intervals;
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    total_mag += l.magnitude + r.magnitude - worst.magnitude;
    heap.push(std::move(l));
    heap.push(std::move(r));
  }
  // Re-sum to shed the drift from incremental updates.
  T sum = frozen;
  double err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (!converged && opt.throw_on_failure) {
    fail(ErrorCode::Quadrature, "adaptive quadrature did not converge (error estimate " +
                                    std::to_string(err) + ")");
  }
  return QuadResult<T>{sum, err, evals, converged};
}

}  // namespace detail

// Integrates f over [a, b]; either bound may be infinite.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {})
    -> QuadResult<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (std::isnan(a) || std::isnan(b)) fail(ErrorCode::InvalidArgument, "integration bound is NaN");
  if (a == b) {
    T probe = f(std::isfinite(a) ? a : 0.0);
    return QuadResult<T>{detail::zero_like(probe), 0.0, 1, true};
  }
  if (a > b) {
    auto r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  const double s = opt.scale;
  if (std::isfinite(a) && std::isfinite(b)) {
    auto g = [&](double t) -> T { return f(t); };
    return detail::adaptive<T>(g, a, b, opt);
  }
  // Nodes that round onto an infinite endpoint contribute the (zero) limit
  // of an integrable tail.
  const T zero = detail::zero_like(f(std::isfinite(a) ? a : (std::isfinite(b) ? b : opt.center)));
  if (!std::isfinite(a) && !std::isfinite(b)) {
    const double c = opt.center;
    auto g = [&](double u) -> T {
      const double q = 1.0 - u * u;
      if (!(q > 0.0)) return zero;
      T v = f(c + s * u / q);
      v *= s * (1.0 + u * u) / (q * q);
      return v;
    };
    return detail::adaptive<T>(g, -1.0, 1.0, opt);
  }
  if (std::isfinite(a)) {
    auto g = [&](double u) -> T {
      const double q = 1.0 - u;
      if (!(q > 0.0)) return zero;
      T v = f(a + s * u / q);
      v *= s / (q * q);
      return v;
    };
    return detail::adaptive<T>(g, 0.0, 1.0, opt);
  }
  auto g = [&](double u) -> T {
    const double q = 1.0 - u;
    if (!(q > 0.0)) return zero;
    T v = f(b - s * u / q);
    v *= s / (q * q);
    return v;
  };
  return detail::adaptive<T>(g, 0.0, 1.0, opt);
}

struct GaussRule {
  std::vector<double> nodes, weights;
};

// n-point Gauss-Legendre rule mapped to [a, b].
inline GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative roots
  GaussRule r;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    r.nodes.push_back(mid + half * x);
    r.weights.push_back(half * 2.0 / ((1.0 - x * x) * dp * dp));
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it)
    if (*it != 0.0) add(-*it);
  for (double z : zeros) add(z);
  return r;
}

}  // namespace emscat
