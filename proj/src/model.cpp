#include "qac/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qac {

void fail_validation(const std::string& msg) { throw Error{Error::Kind::validation, msg}; }
void fail_numeric(const std::string& msg) { throw Error{Error::Kind::numeric, msg}; }

double site_distance(std::span<const int> a, std::span<const int> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

double Potential::operator()(double x) const { return even_part(x * x) - field * x; }

double Potential::even_part(double t) const {
  double v = 0.0;
  for (std::size_t s = even_coeffs.size(); s-- > 0;) v = v * t + even_coeffs[s];
  return v * t;
}

DynamicalMatrix DynamicalMatrix::nearest_neighbor(double j) {
  DynamicalMatrix m;
  m.kind = Kind::nearest_neighbor;
  m.strength = j;
  m.range = 1.0;
  return m;
}

DynamicalMatrix DynamicalMatrix::finite_range(std::vector<std::pair<Site, double>> entries) {
  DynamicalMatrix m;
  m.kind = Kind::finite_range;
  for (auto& [off, j] : entries) {
    Site key = off;
    // canonicalize so that o and -o share one table slot
    for (int c : key) {
      if (c > 0) break;
      if (c < 0) {
        for (int& v : key) v = -v;
        break;
      }
    }
    m.table[key] += 0.0;  // ensure slot
    m.table[key] = j;
    double r2 = 0.0;
    for (int c : key) r2 += static_cast<double>(c) * c;
    m.range = std::max(m.range, std::sqrt(r2));
  }
  return m;
}

DynamicalMatrix DynamicalMatrix::exponential_decay(double j, double rate) {
  DynamicalMatrix m;
  m.kind = Kind::exponential_decay;
  m.strength = j;
  m.rate = rate;
  return m;
}

DynamicalMatrix DynamicalMatrix::polynomial_decay(double j, double gamma) {
  DynamicalMatrix m;
  m.kind = Kind::polynomial_decay;
  m.strength = j;
  m.gamma = gamma;
  return m;
}

double DynamicalMatrix::entry(std::span<const int> a, std::span<const int> b, int d) const {
  switch (kind) {
    case Kind::nearest_neighbor: {
      long long s = 0;
      for (int i = 0; i < d; ++i) {
        const long long dd = static_cast<long long>(a[i]) - b[i];
        s += dd * dd;
      }
      return s == 1 ? strength : 0.0;
    }
    case Kind::finite_range: {
      Site off(d);
      for (int i = 0; i < d; ++i) off[i] = a[i] - b[i];
      for (int c : off) {
        if (c > 0) break;
        if (c < 0) {
          for (int& v : off) v = -v;
          break;
        }
      }
      auto it = table.find(off);
      return it == table.end() ? 0.0 : it->second;
    }
    case Kind::exponential_decay: {
      const double r = site_distance(a, b);
      return r == 0.0 ? 0.0 : strength * std::exp(-rate * r);
    }
    case Kind::polynomial_decay: {
      const double r = site_distance(a, b);
      return r == 0.0 ? 0.0 : strength * std::pow(1.0 + r, -(d + gamma));
    }
  }
  return 0.0;
}

bool DynamicalMatrix::ferromagnetic() const {
  if (kind == Kind::finite_range) {
    return std::all_of(table.begin(), table.end(),
                       [](const auto& kv) { return kv.second >= 0.0; });
  }
  return strength >= 0.0;
}

double DynamicalMatrix::reach(int d, double tail_tol) const {
  switch (kind) {
    case Kind::nearest_neighbor:
      return 1.0;
    case Kind::finite_range:
      return range;
    case Kind::exponential_decay: {
      if (rate <= 0.0) fail_validation("exponential coupling needs rate > 0");
      // |J| e^{-rate r} below tol relative to |J|
      double r = -std::log(std::max(tail_tol, 1e-300)) / rate;
      return std::max(1.0, r) + d;  // slack for shell counting
    }
    case Kind::polynomial_decay: {
      if (gamma <= 0.0) fail_validation("polynomial coupling needs gamma > 0");
      double r = std::pow(std::max(tail_tol, 1e-300), -1.0 / (d + gamma)) - 1.0;
      return std::max(1.0, r) + d;
    }
  }
  return 0.0;
}

const Potential& ModelSpec::potential_at(std::span<const int> site) const {
  if (!site_overrides.empty()) {
    Site key(site.begin(), site.end());
    auto it = site_overrides.find(key);
    if (it != site_overrides.end()) return it->second;
  }
  return potential;
}

double weight(const WeightFamily& family, std::span<const int> a, std::span<const int> b) {
  const double r = site_distance(a, b);
  switch (family.kind) {
    case WeightFamily::Kind::exponential:
      if (family.alpha <= 0.0) fail_validation("exponential weights need alpha > 0");
      return std::exp(-family.alpha * r);
    case WeightFamily::Kind::polynomial:
      if (family.alpha <= 1.0) fail_validation("polynomial weights need alpha > 1");
      if (family.epsilon <= 0.0) fail_validation("polynomial weights need epsilon > 0");
      return std::pow(1.0 + family.epsilon * r, -family.alpha * family.d);
  }
  return 0.0;
}

namespace {

// sup_l sum_{l'} |J_{ll'}| g(|l-l'|) for translation forms, where g is the
// reciprocal weight (g = 1 for Ĵ0). Shells in the sup-norm; stops when a
// proven tail bound drops below 1e-12 of the partial sum.
struct TermBound {
  // per-site term magnitude and a decreasing envelope f(n) valid for
  // Euclidean distance >= n
  double (*term)(double r, const DynamicalMatrix& m, const WeightFamily* w, int d);
  double (*envelope)(double n, const DynamicalMatrix& m, const WeightFamily* w, int d);
};

double term_value(double r, const DynamicalMatrix& m, const WeightFamily* w, int d) {
  double j = 0.0;
  switch (m.kind) {
    case DynamicalMatrix::Kind::exponential_decay:
      j = std::abs(m.strength) * std::exp(-m.rate * r);
      break;
    case DynamicalMatrix::Kind::polynomial_decay:
      j = std::abs(m.strength) * std::pow(1.0 + r, -(d + m.gamma));
      break;
    default:
      return 0.0;  // finite kinds enumerate the table directly
  }
  if (w == nullptr) return j;
  if (w->kind == WeightFamily::Kind::exponential) return j * std::exp(w->alpha * r);
  return j * std::pow(1.0 + w->epsilon * r, w->alpha * w->d);
}

// shell count |{o : |o|_inf = n}| <= 2d (2n+1)^{d-1}
double shell_count_bound(double n, int d) {
  return 2.0 * d * std::pow(2.0 * n + 1.0, d - 1);
}

double sum_decaying(const ModelSpec& spec, const WeightFamily* w) {
  const auto& m = spec.couplings;
  const int d = spec.d;

  // divergence screens
  if (m.kind == DynamicalMatrix::Kind::exponential_decay) {
    if (m.rate <= 0.0) fail_validation("exponential coupling needs rate > 0");
    if (w && w->kind == WeightFamily::Kind::exponential && w->alpha >= m.rate)
      fail_numeric("j_hat_alpha diverges: weight alpha >= coupling decay rate");
  } else if (m.kind == DynamicalMatrix::Kind::polynomial_decay) {
    if (m.gamma <= 0.0) fail_validation("polynomial coupling needs gamma > 0");
    if (w && w->kind == WeightFamily::Kind::exponential)
      fail_numeric("j_hat_alpha diverges: exponential weights with polynomial coupling decay");
    if (w && w->kind == WeightFamily::Kind::polynomial && w->alpha * d >= m.gamma)
      fail_numeric("j_hat_alpha diverges: weight alpha >= gamma/d");
  }

  double partial = 0.0;
  Site off(d, 0);
  for (long long n = 1; n < 100000; ++n) {
    // enumerate the sup-norm shell |o|_inf = n
    double shell = 0.0;
    std::vector<int> idx(d, -static_cast<int>(n));
    while (true) {
      bool on_shell = false;
      for (int i = 0; i < d; ++i)
        if (std::abs(idx[i]) == n) on_shell = true;
      if (on_shell) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += static_cast<double>(idx[i]) * idx[i];
        shell += term_value(std::sqrt(r2), m, w, d);
      }
      int i = 0;
      for (; i < d; ++i) {
        if (idx[i] < n) {
          ++idx[i];
          break;
        }
        idx[i] = -static_cast<int>(n);
      }
      if (i == d) break;
    }
    partial += shell;

    // tail bound: sum_{k>n} shells, Euclidean distance >= sup-norm = k
    double tail = 0.0;
    const double f1 = term_value(static_cast<double>(n + 1), m, w, d) *
                      shell_count_bound(static_cast<double>(n + 1), d);
    if (m.kind == DynamicalMatrix::Kind::exponential_decay) {
      const double alpha = (w && w->kind == WeightFamily::Kind::exponential) ? w->alpha : 0.0;
      double extra = 1.0;
      if (w && w->kind == WeightFamily::Kind::polynomial)
        extra = std::pow(1.0 + w->epsilon * (n + 2.0) / (n + 1.0), w->alpha * w->d);
      const double q = std::exp(-(m.rate - alpha)) *
                       std::pow((2.0 * n + 5.0) / (2.0 * n + 3.0), d - 1) * extra;
      tail = (q < 1.0) ? f1 / (1.0 - q) : std::numeric_limits<double>::infinity();
    } else {
      // polynomial decay, optionally with polynomial reciprocal weight:
      // envelope c (1+k)^{-(1+gamma')} with gamma' > 0; integral tail
      const double alpha_d = (w && w->kind == WeightFamily::Kind::polynomial) ? w->alpha * d : 0.0;
      const double gp = m.gamma - alpha_d;
      const double c = std::abs(m.strength) * 2.0 * d * std::pow(2.0, d - 1) *
                       ((w && w->kind == WeightFamily::Kind::polynomial)
                            ? std::pow(std::max(1.0, w->epsilon), w->alpha * w->d)
                            : 1.0);
      tail = c * std::pow(1.0 + n, -gp) / gp;
    }
    if (tail < 1e-12 * std::max(partial, 1e-300)) return partial;
  }
  fail_numeric("j_hat sum did not converge within the shell budget");
}

double sum_finite(const ModelSpec& spec, const WeightFamily* w) {
  const auto& m = spec.couplings;
  const int d = spec.d;
  double sum = 0.0;
  if (m.kind == DynamicalMatrix::Kind::nearest_neighbor) {
    Site o(d, 0), z(d, 0);
    for (int i = 0; i < d; ++i) {
      o[i] = 1;
      const double g = w ? 1.0 / weight(*w, o, z) : 1.0;
      sum += 2.0 * std::abs(m.strength) * g;
      o[i] = 0;
    }
    return sum;
  }
  Site z(d, 0);
  for (const auto& [off, j] : m.table) {
    bool zero = std::all_of(off.begin(), off.end(), [](int c) { return c == 0; });
    if (zero) continue;  // diagonal entries are a validation error, not a sum term
    const double g = w ? 1.0 / weight(*w, off, z) : 1.0;
    sum += 2.0 * std::abs(j) * g;
  }
  return sum;
}

}  // namespace

double j_hat_zero(const ModelSpec& spec) {
  if (spec.couplings.finite_reach()) return sum_finite(spec, nullptr);
  return sum_decaying(spec, nullptr);
}

double j_hat_alpha(const ModelSpec& spec, const WeightFamily& family) {
  if (family.alpha == 0.0) return j_hat_zero(spec);
  // structural admissibility of alpha
  Site z(spec.d, 0);
  (void)weight(family, z, z);
  if (spec.couplings.finite_reach()) return sum_finite(spec, &family);
  return sum_decaying(spec, &family);
}

namespace {

bool finite(double x) { return std::isfinite(x); }

// min over x of V(x) - A x^{2r} on a grid wide enough that the leading
// term dominates, minus a Lipschitz safety margin.
double lower_bound_offset(const Potential& p, double A, int r) {
  auto g = [&](double x) { return p(x) - A * std::pow(x * x, r); };
  // beyond X the derivative of the leading difference keeps g increasing
  double X = 2.0;
  double coeff_mag = std::abs(p.field);
  for (double c : p.even_coeffs) coeff_mag = std::max(coeff_mag, std::abs(c));
  X = std::max(X, 4.0 * (1.0 + coeff_mag / std::max(A, 1e-12)));
  const int n = 8192;
  const double h = 2.0 * X / n;
  double mn = 0.0, max_slope = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -X + i * h;
    mn = std::min(mn, g(x));
    // crude derivative bound on the grid for the safety margin
    if (i > 0) {
      const double xp = -X + (i - 1) * h;
      max_slope = std::max(max_slope, std::abs(g(x) - g(xp)) / h);
    }
  }
  return mn - max_slope * h;
}

}  // namespace

void validate_structure(const ModelSpec& spec) {
  if (!(spec.mass > 0.0) || !finite(spec.mass)) fail_validation("mass must be positive and finite");
  if (!(spec.rigidity > 0.0) || !finite(spec.rigidity))
    fail_validation("rigidity must be positive and finite");
  if (!(spec.beta > 0.0) || !finite(spec.beta)) fail_validation("beta must be positive and finite");
  if (spec.d < 1) fail_validation("lattice dimension must be >= 1");
  std::vector<const Potential*> pots{&spec.potential};
  for (const auto& [site, p] : spec.site_overrides) pots.push_back(&p);
  for (const Potential* p : pots) {
    for (double c : p->even_coeffs)
      if (!finite(c)) fail_validation("non-finite potential coefficient");
    if (!finite(p->field)) fail_validation("non-finite external field");
  }
  if (spec.couplings.kind == DynamicalMatrix::Kind::finite_range) {
    for (const auto& [off, j] : spec.couplings.table) {
      bool zero = std::all_of(off.begin(), off.end(), [](int c) { return c == 0; });
      if (zero && j != 0.0) fail_validation("dynamical matrix must have zero diagonal (eq. j)");
      if (!finite(j)) fail_validation("non-finite coupling entry");
    }
  } else if (!finite(spec.couplings.strength)) {
    fail_validation("non-finite coupling strength");
  }
}

ValidationReport validate_model(const ModelSpec& spec) {
  ValidationReport rep;
  auto reject = [&](const std::string& m) { rep.diagnostics.push_back(m); };

  if (!(spec.mass > 0.0) || !finite(spec.mass)) reject("mass must be positive and finite");
  if (!(spec.rigidity > 0.0) || !finite(spec.rigidity)) reject("rigidity must be positive and finite");
  if (!(spec.beta > 0.0) || !finite(spec.beta)) reject("beta must be positive and finite");
  if (spec.d < 1) reject("lattice dimension must be >= 1");
  if (spec.nu < 1) reject("loop dimension must be >= 1");

  std::vector<const Potential*> pots{&spec.potential};
  for (const auto& [site, p] : spec.site_overrides) pots.push_back(&p);

  int min_r = std::numeric_limits<int>::max();
  double min_lead = std::numeric_limits<double>::infinity();
  for (const Potential* p : pots) {
    for (double c : p->even_coeffs)
      if (!finite(c)) reject("non-finite potential coefficient");
    if (!finite(p->field)) reject("non-finite external field");
    const int r = p->degree();
    if (r < 2 || p->even_coeffs.back() <= 0.0) {
      reject("lower bound of assumption (3) fails: need degree r >= 2 with positive leading coefficient");
      continue;
    }
    min_r = std::min(min_r, r);
    min_lead = std::min(min_lead, p->even_coeffs.back());
  }

  if (rep.diagnostics.empty()) {
    rep.lower_r = min_r;
    rep.lower_A = 0.5 * min_lead;
    double B = std::numeric_limits<double>::infinity();
    for (const Potential* p : pots)
      B = std::min(B, lower_bound_offset(*p, rep.lower_A, rep.lower_r));
    rep.lower_B = B;

    // coefficient-wise envelope; a valid shared continuous upper bound is
    // sum_s env_s x^{2s} + env_field |x|
    std::size_t max_deg = 0;
    for (const Potential* p : pots) max_deg = std::max(max_deg, p->even_coeffs.size());
    rep.upper_env_coeffs.assign(max_deg, -std::numeric_limits<double>::infinity());
    for (const Potential* p : pots) {
      for (std::size_t s = 0; s < max_deg; ++s) {
        const double c = s < p->even_coeffs.size() ? p->even_coeffs[s] : 0.0;
        rep.upper_env_coeffs[s] = std::max(rep.upper_env_coeffs[s], c);
      }
      rep.upper_env_field = std::max(rep.upper_env_field, std::abs(p->field));
    }
  }

  // dynamical matrix conditions (j): zero diagonal, symmetry; finiteness (6)
  if (spec.couplings.kind == DynamicalMatrix::Kind::finite_range) {
    for (const auto& [off, j] : spec.couplings.table) {
      bool zero = std::all_of(off.begin(), off.end(), [](int c) { return c == 0; });
      if (zero && j != 0.0) reject("dynamical matrix must have zero diagonal (eq. j)");
      if (!finite(j)) reject("non-finite coupling entry");
      if (static_cast<int>(off.size()) != spec.d) reject("coupling offset dimension mismatch");
    }
  } else {
    if (!finite(spec.couplings.strength)) reject("non-finite coupling strength");
    if (spec.couplings.kind == DynamicalMatrix::Kind::exponential_decay && spec.couplings.rate <= 0.0)
      reject("exponential coupling decay requires rate > 0");
    if (spec.couplings.kind == DynamicalMatrix::Kind::polynomial_decay && spec.couplings.gamma <= 0.0)
      reject("polynomial coupling decay requires gamma > 0 for finite J_hat_0");
  }

  if (rep.diagnostics.empty()) {
    try {
      rep.j_hat_zero = j_hat_zero(spec);
    } catch (const Error& e) {
      reject(e.message);
    }
  }

  rep.passes = rep.diagnostics.empty();
  return rep;
}

}  // namespace qac
