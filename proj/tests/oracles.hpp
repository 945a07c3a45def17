#pragma once

// Reference computations used only by the tests. They are written from the
// formulas directly (long double, no shared code with src/) so a bug in the
// library cannot hide in both places.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using real = long double;

inline real normal_pdf(real x, real mean, real sd) {
  const real z = (x - mean) / sd;
  return std::exp(-z * z / 2) / (sd * std::sqrt(2 * std::numbers::pi_v<real>));
}

// Window weights; hann and tukey use the half-angle identities
// cos^2 t = (1 + cos 2t) / 2 so they do not share an expression with src/.
inline real gaussian_window(real d, real s) { return std::exp(-(d * d) / (2 * s * s)); }
inline real hann_window(real d, real s) {
  return (1 + std::cos(std::numbers::pi_v<real> * d / (d + s))) / 2;
}
inline real tukey_window(real d, real s) {
  if (d < s) return 1;
  return (1 + std::cos(std::numbers::pi_v<real> * d / (2 * (d + s)))) / 2;
}
inline real circular_window(real d, real s) { return d <= s ? 1 : 0; }

// Composite Simpson over [a, b] with n (even) panels.
inline real simpson(const std::function<real(real)>& f, real a, real b, int n = 20000) {
  const real h = (b - a) / n;
  real sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4 : 2);
  return sum * h / 3;
}

// Bayes rule evaluated term by term: prior_i * prod_k lik[i][k], normalized.
inline std::vector<real> brute_posterior(const std::vector<std::vector<real>>& lik,
                                         const std::vector<real>& prior) {
  std::vector<real> out(prior.size());
  real total = 0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    real p = prior[i];
    for (real l : lik[i]) p *= l;
    out[i] = p;
    total += p;
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace oracle
