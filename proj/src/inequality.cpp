#include "qac/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qac/criteria.hpp"

namespace qac {

namespace {

InequalityReport report(std::string name, std::string instance, double lhs, double rhs,
                        double tol = kExactMarginTol) {
  InequalityReport r;
  r.inequality = std::move(name);
  r.instance = std::move(instance);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.tolerance = tol;
  r.status = r.margin >= -tol ? InequalityReport::Status::pass : InequalityReport::Status::fail;
  return r;
}

bool nonnegative_fields(const DiscreteAction& act) {
  for (const auto& p : act.site_potentials)
    if (p.field < 0.0) return false;
  if (act.has_boundary_field()) {
    for (const auto& row : act.boundary_field)
      for (double v : row)
        if (v < 0.0) return false;
  }
  return true;
}

bool even_zero_boundary(const DiscreteAction& act) {
  for (const auto& p : act.site_potentials)
    if (p.field != 0.0) return false;
  return !act.has_boundary_field();
}

bool convex_even_part(const DiscreteAction& act) {
  // v(t) = sum b_s t^s is convex on t >= 0 when b_s >= 0 for s >= 2
  for (const auto& p : act.site_potentials)
    for (std::size_t s = 1; s < p.even_coeffs.size(); ++s)
      if (p.even_coeffs[s] < 0.0) return false;
  return true;
}

std::string size_tag(const DiscreteAction& a) {
  return std::to_string(a.n_sites) + "site_P" + std::to_string(a.P);
}

}  // namespace

InequalityReport verify_fkg(const DiscreteAction& action, const SliceFunction& f,
                            const SliceFunction& g, const QuadratureScheme& quad,
                            const FkgOptions& opts) {
  if (!opts.skip_ferromagnetic_check && !action.ferromagnetic()) {
    InequalityReport r;
    r.inequality = "fkg";
    r.instance = size_tag(action);
    r.status = InequalityReport::Status::invalid_input;
    r.tolerance = kExactMarginTol;
    return r;
  }

  // monotonicity spot check: random coordinate bumps must not decrease f, g
  {
    std::mt19937_64 gen(opts.probe_seed);
    const int N = action.n_sites * action.P;
    std::uniform_real_distribution<double> val(-1.5, 1.5);
    std::vector<double> x(N);
    for (int probe = 0; probe < opts.monotonicity_probes; ++probe) {
      for (double& v : x) v = val(gen);
      const int k = static_cast<int>(gen() % static_cast<std::uint64_t>(N));
      const double f0 = f(x), g0 = g(x);
      x[k] += 0.5 + 0.5 * (val(gen) + 1.5);
      if (f(x) < f0 - 1e-12 || g(x) < g0 - 1e-12) {
        InequalityReport r;
        r.inequality = "fkg";
        r.instance = size_tag(action) + "_nonmonotone_input";
        r.status = InequalityReport::Status::invalid_input;
        r.tolerance = kExactMarginTol;
        return r;
      }
    }
  }

  const double ef = exact_expectation(action, f, quad);
  const double eg = exact_expectation(action, g, quad);
  const double efg = exact_expectation(
      action, [&](std::span<const double> x) { return f(x) * g(x); }, quad);
  return report("fkg", size_tag(action), efg, ef * eg);
}

InequalityReport verify_gks1(const DiscreteAction& action, std::span<const MomentFactor> legs,
                             const QuadratureScheme& quad) {
  if (!action.ferromagnetic() || !nonnegative_fields(action)) {
    InequalityReport r;
    r.inequality = "gks1";
    r.instance = size_tag(action);
    r.status = InequalityReport::Status::invalid_input;
    return r;
  }
  const double m = exact_moment(action, quad, legs);
  return report("gks1", size_tag(action), m, 0.0);
}

InequalityReport verify_gks2(const DiscreteAction& action, std::span<const MomentFactor> legs,
                             std::size_t split, const QuadratureScheme& quad) {
  if (!action.ferromagnetic() || !nonnegative_fields(action)) {
    InequalityReport r;
    r.inequality = "gks2";
    r.instance = size_tag(action);
    r.status = InequalityReport::Status::invalid_input;
    return r;
  }
  if (split == 0 || split >= legs.size()) fail_validation("gks2 split must cut the legs");
  std::vector<MomentFactor> a(legs.begin(), legs.begin() + split);
  std::vector<MomentFactor> b(legs.begin() + split, legs.end());
  const double mab = exact_moment(action, quad, legs);
  const double ma = exact_moment(action, quad, a);
  const double mb = exact_moment(action, quad, b);
  return report("gks2", size_tag(action), mab, ma * mb);
}

InequalityReport verify_lebowitz(const DiscreteAction& action,
                                 const std::array<MomentFactor, 4>& legs,
                                 const QuadratureScheme& quad) {
  if (!action.ferromagnetic() || !even_zero_boundary(action) || !convex_even_part(action)) {
    InequalityReport r;
    r.inequality = "lebowitz";
    r.instance = size_tag(action);
    r.status = InequalityReport::Status::invalid_input;
    return r;
  }
  const double u = exact_ursell(action, quad, legs);
  return report("lebowitz", size_tag(action), 0.0, u);  // pass iff U <= tol
}

InequalityReport verify_gaussian_domination(const DiscreteAction& action,
                                            std::span<const MomentFactor> legs,
                                            const QuadratureScheme& quad) {
  if (!action.ferromagnetic() || !even_zero_boundary(action) || !convex_even_part(action)) {
    InequalityReport r;
    r.inequality = "gaussian_domination";
    r.instance = size_tag(action);
    r.status = InequalityReport::Status::invalid_input;
    return r;
  }
  if (legs.size() % 2 != 0) fail_validation("gaussian domination needs an even leg count");
  const std::size_t n2 = legs.size();

  std::vector<MomentFactor> all(legs.begin(), legs.end());
  const double lhs = exact_moment(action, quad, all);

  // Wick pairing sum over all partitions into unordered pairs
  std::vector<int> order(n2);
  double wick = 0.0;
  std::function<double(std::vector<int>&)> pair_sum = [&](std::vector<int>& rest) -> double {
    if (rest.empty()) return 1.0;
    double total = 0.0;
    const int first = rest[0];
    for (std::size_t i = 1; i < rest.size(); ++i) {
      const int mate = rest[i];
      std::vector<int> next;
      for (std::size_t k = 1; k < rest.size(); ++k)
        if (k != i) next.push_back(rest[k]);
      const std::vector<MomentFactor> pr{legs[first], legs[mate]};
      total += exact_moment(action, quad, pr) * pair_sum(next);
    }
    return total;
  };
  std::vector<int> idx(n2);
  for (std::size_t i = 0; i < n2; ++i) idx[i] = static_cast<int>(i);
  wick = pair_sum(idx);
  return report("gaussian_domination", size_tag(action), wick, lhs);  // pass iff lhs <= wick
}

std::vector<InequalityReport> verify_infrared_sanity(const DiscreteAction& torus_action,
                                                     const ChainStats& stats,
                                                     const InfraredInputs& in) {
  if (torus_action.box.boundary != Box::Boundary::periodic_torus)
    fail_validation("infrared sanity needs a periodic torus action");
  if (in.j <= 0.0) fail_validation("infrared sanity needs J > 0");

  const Estimate op = estimate_order_parameter(stats, torus_action.box);
  const Estimate var = stats.estimate(moment_name(std::vector<MomentFactor>{{0, 0, 2}}));

  const double ir = infrared_integral(in.d, in.m, in.j, in.beta).value;
  std::vector<InequalityReport> out;

  {
    InequalityReport r;
    r.inequality = "infrared_bound";
    r.instance = size_tag(torus_action);
    r.method = "mc";
    r.lhs = op.value;
    r.rhs = var.value - ir;
    r.margin = r.lhs - r.rhs;
    r.mc_sigma = std::sqrt(op.std_error * op.std_error + var.std_error * var.std_error);
    r.tolerance = 3.0 * r.mc_sigma;
    if (r.rhs <= 0.0)
      r.status = InequalityReport::Status::vacuous_pass;
    else
      r.status = r.margin >= -r.tolerance ? InequalityReport::Status::pass
                                          : InequalityReport::Status::fail;
    out.push_back(r);
  }
  {
    InequalityReport r;
    r.inequality = "bogoliubov_floor";
    r.instance = size_tag(torus_action);
    r.method = "mc";
    r.lhs = var.value;
    r.rhs = in.t_star;
    r.margin = r.lhs - r.rhs;
    r.mc_sigma = var.std_error;
    r.tolerance = 3.0 * r.mc_sigma;
    r.status = r.margin >= -r.tolerance ? InequalityReport::Status::pass
                                        : InequalityReport::Status::fail;
    out.push_back(r);
  }
  return out;
}

namespace {

ModelSpec quartic_spec(int d, double b1, double b2, double h, double j, double beta) {
  ModelSpec s;
  s.d = d;
  s.mass = 1.0;
  s.rigidity = 1.0;
  s.beta = beta;
  s.potential.even_coeffs = {b1, b2};
  s.potential.field = h;
  s.couplings = DynamicalMatrix::nearest_neighbor(j);
  return s;
}

ModelSpec sextic_spec(int d, double b1, double b2, double b3, double j, double beta) {
  ModelSpec s = quartic_spec(d, b1, b2, 0.0, j, beta);
  s.potential.even_coeffs = {b1, b2, b3};
  return s;
}

SliceFunction coordinate_sum() {
  return [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  };
}

}  // namespace

std::vector<InequalityReport> run_exact_suite() {
  std::vector<InequalityReport> out;
  const QuadratureScheme q8 = QuadratureScheme::gauss_hermite(8);
  const QuadratureScheme q6 = QuadratureScheme::gauss_hermite(6);
  auto box1 = Box::rectangular({1});
  auto box2 = Box::rectangular({2});
  auto box3 = Box::rectangular({3});

  // 1-4: FKG on coordinate sums
  out.push_back(verify_fkg(build_action(quartic_spec(1, -0.5, 0.5, 0.0, 0.0, 1.0), box1, 3),
                           coordinate_sum(), coordinate_sum(), q8));
  out.push_back(verify_fkg(build_action(quartic_spec(1, -0.5, 0.5, 0.0, 0.4, 1.0), box2, 2),
                           coordinate_sum(), coordinate_sum(), q8));
  {
    BoundaryConfig xi;
    xi.set_constant({-1}, 0.7);
    Box ext = Box::rectangular({2}, Box::Boundary::external);
    out.push_back(verify_fkg(build_action(quartic_spec(1, -1.0, 0.6, 0.0, 0.3, 1.5), ext, 3, xi),
                             coordinate_sum(), coordinate_sum(), q6));
  }
  out.push_back(verify_fkg(build_action(sextic_spec(1, -0.4, 0.3, 0.2, 0.2, 1.0), box3, 2),
                           coordinate_sum(), coordinate_sum(), q6));

  // 5-7: GKS
  {
    auto act = build_action(quartic_spec(1, -0.5, 0.5, 0.2, 0.3, 1.0), box2, 3);
    const MomentFactor one[1] = {{0, 0, 1}};
    out.push_back(verify_gks1(act, one, q8));
    const MomentFactor three[3] = {{0, 0, 1}, {1, 1, 1}, {1, 2, 1}};
    out.push_back(verify_gks2(act, three, 1, q8));
  }
  {
    auto act = build_action(sextic_spec(1, -0.3, 0.2, 0.1, 0.25, 1.2), box3, 2);
    const MomentFactor legs[2] = {{0, 0, 1}, {2, 1, 1}};
    out.push_back(verify_gks2(act, legs, 1, q6));
  }

  // 8-10: Lebowitz / Gaussian domination
  {
    auto act = build_action(quartic_spec(1, -0.5, 0.5, 0.0, 0.3, 1.0), box2, 3);
    out.push_back(verify_lebowitz(act, {MomentFactor{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 2, 1}}, q8));
  }
  {
    auto act = build_action(quartic_spec(1, -2.0, 1.0, 0.0, 0.0, 1.0), box1, 4);
    out.push_back(verify_lebowitz(act, {MomentFactor{0, 0, 1}, {0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, q8));
  }
  {
    auto act = build_action(quartic_spec(1, -0.5, 0.4, 0.0, 0.35, 1.0), box2, 2);
    const MomentFactor legs[6] = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}, {0, 0, 1}, {1, 1, 1}};
    out.push_back(verify_gaussian_domination(act, legs, q6));
  }

  // 11: harmonic Wick equality at high quadrature order
  {
    ModelSpec s = quartic_spec(1, 0.0, 0.0, 0.0, 0.3, 1.0);
    s.potential.even_coeffs.clear();
    auto act = build_action(s, box2, 3);
    const QuadratureScheme q24 = QuadratureScheme::gauss_hermite(24);
    InequalityReport r = verify_lebowitz(
        act, {MomentFactor{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 2, 1}}, q24);
    r.inequality = "lebowitz_wick_equality";
    r.tolerance = 1e-10;
    r.status = std::abs(r.margin) <= r.tolerance ? InequalityReport::Status::pass
                                                 : InequalityReport::Status::fail;
    out.push_back(r);
  }

  // 12: meta-test; the harness must be able to fail. Antiferromagnetic
  // coupling with the precondition disabled produces a negative covariance.
  {
    auto act = build_action(quartic_spec(1, -0.5, 0.5, 0.0, -0.4, 1.5), box2, 2);
    FkgOptions opts;
    opts.skip_ferromagnetic_check = true;
    InequalityReport r = verify_fkg(
        act,
        [](std::span<const double> x) { return x[0] + x[1]; },
        [](std::span<const double> x) { return x[2] + x[3]; }, q8, opts);
    r.inequality = "fkg_meta_violation";
    // this entry passes when the underlying check FAILS with a clear margin
    r.status = (r.margin < -1e-6) ? InequalityReport::Status::pass
                                  : InequalityReport::Status::fail;
    out.push_back(r);
  }
  return out;
}

std::vector<InequalityReport> run_random_suite(int n_per_family, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uni = [&](double a, double b) {
    return a + (b - a) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  };
  auto pick_box = [&](int max_sites) {
    const int n = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_sites));
    return Box::rectangular({n});
  };

  std::vector<InequalityReport> out;
  const QuadratureScheme q6 = QuadratureScheme::gauss_hermite(6);

  for (int i = 0; i < n_per_family; ++i) {
    // FKG: any quartic, ferromagnetic J, increasing positive combinations
    {
      ModelSpec s = quartic_spec(1, uni(-1.2, 0.5), uni(0.15, 1.0), uni(-0.3, 0.3),
                                 uni(0.0, 0.4), uni(0.5, 2.0));
      Box box = pick_box(3);
      const int P = 2 + static_cast<int>(gen() % 2);
      auto act = build_action(s, box, P);
      const int N = act.n_sites * act.P;
      std::vector<double> cf(N), cg(N);
      for (int k = 0; k < N; ++k) {
        cf[k] = uni(0.0, 1.0);
        cg[k] = uni(0.0, 1.0);
      }
      auto lin = [](std::vector<double> c) -> SliceFunction {
        return [c = std::move(c)](std::span<const double> x) {
          double s = 0.0;
          for (std::size_t k = 0; k < x.size(); ++k) s += c[k] * x[k];
          return s;
        };
      };
      out.push_back(verify_fkg(act, lin(cf), lin(cg), q6));
    }
    // GKS: h >= 0
    {
      ModelSpec s = quartic_spec(1, uni(-1.0, 0.3), uni(0.2, 1.0), uni(0.0, 0.5),
                                 uni(0.0, 0.4), uni(0.5, 2.0));
      Box box = pick_box(3);
      const int P = 2 + static_cast<int>(gen() % 2);
      auto act = build_action(s, box, P);
      std::vector<MomentFactor> legs;
      const int n_legs = 2 + static_cast<int>(gen() % 2);
      for (int k = 0; k < n_legs; ++k)
        legs.push_back({static_cast<int>(gen() % static_cast<std::uint64_t>(act.n_sites)),
                        static_cast<int>(gen() % static_cast<std::uint64_t>(act.P)), 1});
      out.push_back(verify_gks1(act, legs, q6));
      out.push_back(verify_gks2(act, legs, 1, q6));
    }
    // Lebowitz: even, h = 0, convex v
    {
      ModelSpec s = quartic_spec(1, uni(-1.5, 0.0), uni(0.2, 1.0), 0.0, uni(0.0, 0.4),
                                 uni(0.5, 2.0));
      Box box = pick_box(2);
      const int P = 2 + static_cast<int>(gen() % 2);
      auto act = build_action(s, box, P);
      auto leg = [&]() {
        return MomentFactor{static_cast<int>(gen() % static_cast<std::uint64_t>(act.n_sites)),
                            static_cast<int>(gen() % static_cast<std::uint64_t>(act.P)), 1};
      };
      out.push_back(verify_lebowitz(act, {leg(), leg(), leg(), leg()}, q6));
    }
  }
  return out;
}

}  // namespace qac
