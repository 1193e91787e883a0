#include "gchisq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "gchisq/error.hpp"

namespace gchisq {

namespace {

constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208575505322, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
struct Segment {
  double a, b;
  T value;
  double err;
  double absval;
  int depth;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <typename T, typename F>
Segment<T> gk21(const F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kWgk[10];
  T gauss{};
  double absval = std::abs(fc) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kronrod += (f1 + f2) * kWgk[j];
    absval += (std::abs(f1) + std::abs(f2)) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  Segment<T> seg{a, b, kronrod * h, std::abs((kronrod - gauss) * h), absval * std::abs(h), depth};
  if (!std::isfinite(std::abs(seg.value))) {
    throw Error(Errc::NoConvergence, "non-finite integrand value");
  }
  return seg;
}

template <typename T, typename F>
QuadratureResult<T> adaptive(const F& f, double a, double b, double rel_tol, double abs_tol,
                             AdaptiveLimits limits) {
  if (!(a < b)) throw Error(Errc::InvalidArgument, "integration bounds must satisfy a < b");
  std::priority_queue<Segment<T>> queue;
  queue.push(gk21<T>(f, a, b, 0));
  long evals = 21;
  // Intervals that cannot be refined further are parked here.
  T frozen_value{};
  double frozen_err = 0.0;

  auto totals = [&](T& value, double& err) {
    value = frozen_value;
    err = frozen_err;
    auto copy = queue;
    while (!copy.empty()) {
      value += copy.top().value;
      err += copy.top().err;
      copy.pop();
    }
  };

  T value{};
  double err = 0.0;
  double queue_err = queue.top().err;
  T queue_value = queue.top().value;
  // Estimate of int |f|; cancellation below about 100 eps of it cannot be resolved.
  double abs_integral = queue.top().absval;
  for (;;) {
    value = frozen_value + queue_value;
    err = frozen_err + queue_err;
    const double floor = 100.0 * kEps * abs_integral;
    if (err <= std::max({abs_tol, rel_tol * std::abs(value), floor}) || queue.empty()) break;
    if (evals >= limits.max_evals) {
      throw Error(Errc::NoConvergence, "adaptive quadrature exceeded evaluation budget");
    }
    Segment<T> worst = queue.top();
    queue.pop();
    queue_err -= worst.err;
    queue_value -= worst.value;
    const double mid = 0.5 * (worst.a + worst.b);
    const bool roundoff = worst.err <= 50.0 * kEps * worst.absval;
    const bool too_small = (worst.b - worst.a) <= 4.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b)) ||
                           mid <= worst.a || mid >= worst.b;
    if (roundoff || too_small || worst.depth >= limits.max_depth) {
      frozen_value += worst.value;
      frozen_err += worst.err;
      if (queue.empty()) {
        totals(value, err);
        break;
      }
      continue;
    }
    auto left = gk21<T>(f, worst.a, mid, worst.depth + 1);
    auto right = gk21<T>(f, mid, worst.b, worst.depth + 1);
    evals += 42;
    abs_integral += left.absval + right.absval - worst.absval;
    queue_err += left.err + right.err;
    queue_value += left.value + right.value;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed drift accumulated by the running totals.
  totals(value, err);
  return QuadratureResult<T>{value, err, evals};
}

}  // namespace

RealResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                            double rel_tol, double abs_tol, AdaptiveLimits limits) {
  return adaptive<double>(f, a, b, rel_tol, abs_tol, limits);
}

ComplexResult integrate_finite_complex(const std::function<std::complex<double>(double)>& f,
                                     double a, double b, double rel_tol, double abs_tol,
                                     AdaptiveLimits limits) {
  return adaptive<std::complex<double>>(f, a, b, rel_tol, abs_tol, limits);
}

RealResult integrate_semi_infinite(const std::function<double(double)>& f, double a,
                                   double rel_tol, double abs_tol, double scale) {
  auto mapped = [&](double w) {
    const double one_minus = 1.0 - w;
    const double x = a + scale * w / one_minus;
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v * scale / (one_minus * one_minus);
  };
  return adaptive<double>(mapped, 0.0, 1.0, rel_tol, abs_tol, {});
}

ComplexResult integrate_circle(const std::function<std::complex<double>(std::complex<double>)>& f,
                               std::complex<double> center, double radius, double rel_tol,
                               CircleNormalization norm) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "radius must be positive");
  using cplx = std::complex<double>;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // sum of f(t_k) e^{i u_k} over the current node set
  cplx sum{};
  double max_abs = 0.0;
  auto add_nodes = [&](long n, long start, long step) {
    for (long k = start; k < n; k += step) {
      const double u = two_pi * static_cast<double>(k) / static_cast<double>(n);
      const cplx e(std::cos(u), std::sin(u));
      const cplx v = f(center + radius * e) * e;
      max_abs = std::max(max_abs, std::abs(v));
      sum += v;
    }
  };
  long n = 64;
  add_nodes(n, 0, 1);
  cplx previous = sum / static_cast<double>(n);
  long evals = n;
  constexpr long kMaxNodes = 1L << 22;
  while (true) {
    add_nodes(2 * n, 1, 2);
    evals += n;
    n *= 2;
    const cplx current = sum / static_cast<double>(n);
    const double diff = std::abs(current - previous);
    const double floor = 100.0 * kEps * max_abs;
    if (diff <= std::max(rel_tol * std::abs(current), floor) && n >= 128) {
      // mean of f e^{iu} equals (1/(2 pi i)) * contour integral / radius
      const double factor = radius;
      cplx value = current * factor;
      double err = diff * factor;
      if (norm == CircleNormalization::Raw) {
        value *= cplx(0.0, two_pi);
        err *= two_pi;
      }
      return ComplexResult{value, err, evals};
    }
    if (n >= kMaxNodes) throw Error(Errc::NoConvergence, "circle trapezoid did not converge");
    previous = current;
  }
}

RealResult integrate_tanh_sinh(const std::function<double(double, double, double)>& f, double a,
                               double b, double rel_tol) {
  if (!(a < b)) throw Error(Errc::InvalidArgument, "integration bounds must satisfy a < b");
  constexpr double half_pi = 0.5 * std::numbers::pi;
  const double h_half = 0.5 * (b - a);
  constexpr double t_max = 6.5;
  long evals = 0;

  // Node x = c + h_half * tanh(pi/2 sinh t); distances to the ends are formed directly.
  auto node = [&](double t) {
    const double sh = half_pi * std::sinh(t);
    const double ch = half_pi * std::cosh(t);
    const double e = std::exp(-2.0 * std::abs(sh));
    const double one_minus_abs = 2.0 * e / (1.0 + e);  // 1 - |tanh(sh)|
    const double w = ch * 4.0 * e / ((1.0 + e) * (1.0 + e));  // ch / cosh^2(sh)
    const double dist = h_half * one_minus_abs;
    // Beyond this the weight is negligible and products of distances can underflow.
    if (one_minus_abs < 1e-200 || w * h_half == 0.0) return 0.0;
    ++evals;
    double x, dl, dr;
    if (t < 0) {
      dl = dist;
      x = a + dl;
      dr = (b - a) - dl;
    } else {
      dr = dist;
      x = b - dr;
      dl = (b - a) - dr;
    }
    return f(x, dl, dr) * w * h_half;
  };

  double h = 1.0;
  double sum = node(0.0);
  for (double t = h; t <= t_max; t += h) sum += node(t) + node(-t);
  double estimate = sum * h;
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += node(t) + node(-t);
    const double next = sum * h;
    const double diff = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && diff <= rel_tol * std::abs(next)) {
      return RealResult{next, diff, evals};
    }
  }
  throw Error(Errc::NoConvergence, "tanh-sinh did not converge");
}

}  // namespace gchisq
