#include "twoway/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "twoway/errors.hpp"

namespace twoway {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

void Quadrature::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("quadrature tolerances must be positive");
  if (truncation && !(*truncation > 0.0))
    throw DomainError("quadrature truncation point must be positive");
  if (max_subdivisions < 1) throw DomainError("quadrature needs at least one subdivision");
}

double integrate(const std::function<double(double)>& f, double a, double b, const Quadrature& q) {
  q.validate();
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, q);

  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int used = 1;
  while (err > std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
    if (used >= q.max_subdivisions)
      throw NonConvergenceError("adaptive quadrature hit the subdivision limit (error estimate " +
                                std::to_string(err) + ")");
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++used;
    // Resum from the segments before accepting.
    if (err <= std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
      std::vector<Segment> all;
      total = 0.0;
      err = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (const auto& s : all) {
        total += s.value;
        err += s.error;
        heap.push(s);
      }
    }
  }
  return total;
}

}  // namespace twoway
