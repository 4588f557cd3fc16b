#pragma once

// Independent 1-D integral representations of the Brillouin-zone integrals,
// used only as test oracles against the tensor quadrature path.
//
//   (2pi)^{-d} \int dp / sqrt(E(p)) = (2/sqrt(pi)) \int_0^inf i0e(u^2)^d du
//   (2pi)^{-d} \int dp / (E(p) + mu) = \int_0^inf e^{-mu t} i0e(t)^d dt
//
// with i0e(t) = e^{-t} I_0(t), via 1/sqrt(E) and 1/(E + mu) Laplace
// transforms and the factorization of exp(-t E(p)) over axes. The coth
// kernel reduces to massive Green functions through
//   x coth x = 1 + 2 sum_k x^2 / (x^2 + pi^2 k^2).

#include <cmath>
#include <vector>

namespace qac_test {

// e^{-t} I_0(t); series for small t, asymptotic expansion beyond
inline double i0e(double t) {
  if (t < 18.0) return std::exp(-t) * std::cyl_bessel_i(0.0, t);
  const double it = 1.0 / t;
  // A&S 9.7.1: I_0(t) ~ e^t/sqrt(2 pi t) (1 + 1/8t + 9/128t^2 + ...)
  double series = 1.0 + it * (0.125 + it * (0.0703125 + it * (0.0732421875 +
                  it * (0.112152099609375 + it * 0.2271080017089844))));
  return series / std::sqrt(2.0 * M_PI * t);
}

struct Gl16 {
  std::vector<double> x, w;  // 16-point Gauss-Legendre on [0, 1]
  Gl16() {
    static const double xs[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double ws[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    for (int i = 7; i >= 0; --i) {
      x.push_back(0.5 - 0.5 * xs[i]);
      w.push_back(0.5 * ws[i]);
    }
    for (int i = 0; i < 8; ++i) {
      x.push_back(0.5 + 0.5 * xs[i]);
      w.push_back(0.5 * ws[i]);
    }
  }
};

// integral of f over [a, b] by composite 16-point GL with n panels
template <typename F>
double integrate(F f, double a, double b, int panels) {
  static const Gl16 gl;
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < gl.x.size(); ++i) total += gl.w[i] * f(lo + h * gl.x[i]);
  }
  return total * h;
}

// (2pi)^{-d} \int dp E(p)^{-1/2}
inline double theta_oracle(int d) {
  auto f = [&](double u) { return std::pow(i0e(u * u), d); };
  // integrand ~ (2 pi u^2)^{-d/2}; cut where the tail is negligible
  const double U = 400.0;
  double val = (2.0 / std::sqrt(M_PI)) * integrate(f, 0.0, U, 400);
  // asymptotic tail: (2pi)^{-d/2} [U^{1-d}/(d-1) + (d/8) U^{-1-d}/(d+1) * 2]
  const double c = std::pow(2.0 * M_PI, -0.5 * d);
  double tail = c * (std::pow(U, 1.0 - d) / (d - 1.0) +
                     0.25 * d * std::pow(U, -1.0 - d) / (d + 1.0));
  return val + (2.0 / std::sqrt(M_PI)) * tail;
}

// (2pi)^{-d} \int dp / (E(p) + mu), mu >= 0 (mu = 0 needs d >= 3)
inline double green_oracle(int d, double mu) {
  auto f = [&](double t) { return std::exp(-mu * t) * std::pow(i0e(t), d); };
  const double U = mu > 0.1 ? std::min(400.0, 60.0 / mu + 20.0) : 2000.0;
  double val = integrate(f, 0.0, U, 600);
  double tail = 0.0;
  if (mu <= 0.1) {
    // e^{-mu t} ~ 1 on the tail only when mu U << 1; otherwise negligible
    const double c = std::pow(2.0 * M_PI, -0.5 * d);
    if (mu == 0.0)
      tail = c * std::pow(U, 1.0 - 0.5 * d) / (0.5 * d - 1.0);
    else
      tail = c * std::exp(-mu * U) * std::pow(U, -0.5 * d) / mu;
  }
  return val + tail;
}

// Matsubara-sum oracle for
// (2(2pi)^d)^{-1} \int [2 m J E]^{-1/2} coth(beta sqrt(J E / 2m)) dp
inline double infrared_oracle(int d, double m, double j, double beta) {
  const double pref = 1.0 / (beta * j);
  double sum = green_oracle(d, 0.0);
  const int K = 4000;
  for (int k = 1; k <= K; ++k) {
    const double mu = 2.0 * m * M_PI * M_PI * k * k / (beta * beta * j);
    sum += 2.0 * green_oracle(d, mu);
  }
  // tail: G(mu) ~ 1/mu - d/mu^2; sum_{k>K} 1/k^2 = psi'(K+1), use integrals
  const double c = 2.0 * m * M_PI * M_PI / (beta * beta * j);
  const double t1 = (1.0 / c) * (1.0 / K);                    // sum 1/(c k^2) tail
  const double t2 = (d / (c * c)) * (1.0 / (3.0 * K * K * K));  // sum d/(c k^2)^2 tail
  sum += 2.0 * (t1 - t2);
  return 0.5 * pref * sum;
}

}  // namespace qac_test
