#include "renewal/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace renewal {
namespace {

// Kronrod 21-point abscissae (positive half, descending) and weights; the
// odd-indexed abscissae carry the embedded 10-point Gauss rule.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077548323012513, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand is not finite at x=" << x << " (value " << y << ")";
    throw NumericError(msg.str());
  }
  return y;
}

Panel gauss_kronrod(const RealFunction& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = checked(f, center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double resabs = std::abs(kronrod);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kXgk[i];
    f1[i] = checked(f, center - dx);
    f2[i] = checked(f, center + dx);
    kronrod += kWgk[i] * (f1[i] + f2[i]);
    resabs += kWgk[i] * (std::abs(f1[i]) + std::abs(f2[i]));
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1[i] + f2[i]);
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int i = 0; i < 10; ++i)
    resasc += kWgk[i] * (std::abs(f1[i] - mean) + std::abs(f2[i] - mean));

  const double value = kronrod * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

double tolerance(const QuadratureOptions& opts, double value) {
  return std::max(opts.rel_tol * std::abs(value), opts.abs_tol);
}

// Adaptive refinement starting from an initial partition.
QuadratureResult refine(const RealFunction& f, const std::vector<double>& cuts,
                        const QuadratureOptions& opts) {
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int panels = static_cast<int>(heap.size());
  while (total_err > tolerance(opts, total) && panels < opts.max_panels) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel at machine resolution
    heap.pop();
    Panel left = gauss_kronrod(f, worst.a, mid);
    Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to drop drift from the incremental updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  return {total, total_err, total_err <= tolerance(opts, total)};
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (a == b) return {0.0, 0.0, true};
  return refine(f, {a, b}, opts);
}

QuadratureResult integrate_semi_infinite(const RealFunction& f,
                                         const QuadratureOptions& opts) {
  constexpr int kMinExponent = -20;
  constexpr int kMaxExponent = 60;

  double peak = 0.0;
  for (int k = kMinExponent; k <= 0; ++k)
    peak = std::max(peak, std::abs(checked(f, std::ldexp(1.0, k))));

  const double drop = opts.abs_tol * 1e-2;
  int exponent = 0;
  for (;; ++exponent) {
    const double fx = std::abs(checked(f, std::ldexp(1.0, exponent)));
    peak = std::max(peak, fx);
    if (fx <= drop * peak || exponent == kMaxExponent) break;
  }

  for (; exponent <= kMaxExponent; ++exponent) {
    const double x_end = std::ldexp(1.0, exponent);
    // Geometric partition resolves both the behaviour near 0 and the bulk.
    std::vector<double> cuts{0.0};
    for (int k = exponent - 30; k <= exponent; ++k) cuts.push_back(std::ldexp(1.0, k));
    QuadratureResult body = refine(f, cuts, opts);
    QuadratureResult tail = refine(f, {x_end, 2.0 * x_end}, opts);
    const double budget = tolerance(opts, body.value);
    if (std::abs(tail.value) <= 0.1 * budget || exponent == kMaxExponent) {
      QuadratureResult out;
      out.value = body.value + tail.value;
      out.abs_error_estimate = body.abs_error_estimate + tail.abs_error_estimate;
      out.converged = body.converged && tail.converged &&
                      std::abs(tail.value) <= 0.1 * budget &&
                      out.abs_error_estimate <= tolerance(opts, out.value);
      return out;
    }
  }
  return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
}

double find_root_bracketed(const RealFunction& g, double lo, double hi,
                           double tol, int max_iter) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo;
  double b = hi;
  double fa = g(a);
  double fb = g(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw RootFindingError("objective not finite at bracket end", a, b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "root not bracketed: g(" << a << ")=" << fa << ", g(" << b << ")=" << fb;
    throw RootFindingError(msg.str(), a, b);
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * m * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
    fb = g(b);
    if (!std::isfinite(fb)) throw RootFindingError("objective not finite inside bracket", b, c);
  }
  std::ostringstream msg;
  msg << "root finder did not converge in " << max_iter << " iterations";
  throw RootFindingError(msg.str(), std::min(b, c), std::max(b, c));
}

}  // namespace renewal
