#include "pennet/tv.hpp"

#include <stdexcept>
#include <vector>

namespace pennet {

// Forward pass keeps the derivative of the running message as a sorted knot
// list; x holds knot positions, a/b hold slope/intercept deltas accumulated
// while walking inward from either end. Clipping the derivative at -lam and
// +lam yields the backpointer intervals [tm_k, tp_k] used in the backward
// pass.
Eigen::VectorXd tv1d_prox(const Eigen::VectorXd& y, double lam) {
  const Eigen::Index n = y.size();
  if (lam < 0) throw std::invalid_argument("tv1d_prox: negative penalty");
  if (n == 0) return y;
  if (n == 1 || lam == 0.0) return y;

  std::vector<double> x(2 * static_cast<std::size_t>(n));
  std::vector<double> a(2 * static_cast<std::size_t>(n));
  std::vector<double> b(2 * static_cast<std::size_t>(n));
  std::vector<double> tm(static_cast<std::size_t>(n) - 1);
  std::vector<double> tp(static_cast<std::size_t>(n) - 1);

  // First data point, clipped and combined with the second data term.
  tm[0] = y[0] - lam;
  tp[0] = y[0] + lam;
  Eigen::Index l = n - 1;
  Eigen::Index r = n;
  x[l] = tm[0];
  x[r] = tp[0];
  a[l] = 1.0;
  b[l] = -y[0] + lam;
  a[r] = -1.0;
  b[r] = y[0] + lam;
  double afirst = 1.0;
  double bfirst = -lam - y[1];
  double alast = -1.0;
  double blast = -lam + y[1];

  for (Eigen::Index k = 1; k < n - 1; ++k) {
    // Walk in from the left until the derivative exceeds -lam.
    double alo = afirst;
    double blo = bfirst;
    Eigen::Index lo = l;
    for (; lo <= r; ++lo) {
      if (alo * x[lo] + blo > -lam) break;
      alo += a[lo];
      blo += b[lo];
    }
    tm[k] = (-lam - blo) / alo;
    l = lo - 1;
    x[l] = tm[k];

    // Walk in from the right until the derivative drops below +lam.
    double ahi = alast;
    double bhi = blast;
    Eigen::Index hi = r;
    for (; hi >= l; --hi) {
      if (-ahi * x[hi] - bhi < lam) break;
      ahi += a[hi];
      bhi += b[hi];
    }
    tp[k] = (lam + bhi) / (-ahi);
    r = hi + 1;
    x[r] = tp[k];

    a[l] = alo;
    b[l] = blo + lam;
    a[r] = ahi;
    b[r] = bhi + lam;
    afirst = 1.0;
    bfirst = -lam - y[k + 1];
    alast = -1.0;
    blast = -lam + y[k + 1];
  }

  // Minimize the final message, then follow backpointers.
  double alo = afirst;
  double blo = bfirst;
  Eigen::Index lo = l;
  for (; lo <= r; ++lo) {
    if (alo * x[lo] + blo > 0.0) break;
    alo += a[lo];
    blo += b[lo];
  }
  Eigen::VectorXd beta(n);
  beta[n - 1] = -blo / alo;
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    if (beta[k + 1] > tp[k])
      beta[k] = tp[k];
    else if (beta[k + 1] < tm[k])
      beta[k] = tm[k];
    else
      beta[k] = beta[k + 1];
  }
  return beta;
}

}  // namespace pennet
