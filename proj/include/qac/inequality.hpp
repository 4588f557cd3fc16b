#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qac/oracle.hpp"
#include "qac/pimc.hpp"

namespace qac {

struct InequalityReport {
  enum class Status { pass, fail, invalid_input, vacuous_pass };

  std::string inequality;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // oriented so pass means margin >= -tolerance
  double tolerance = 0.0;
  Status status = Status::fail;
  std::string method = "exact";  // "exact" or "mc"
  double mc_sigma = 0.0;         // combined standard error for mc method

  bool ok() const { return status == Status::pass || status == Status::vacuous_pass; }
};

constexpr double kExactMarginTol = 1e-9;

using SliceFunction = std::function<double(std::span<const double>)>;

struct FkgOptions {
  bool skip_ferromagnetic_check = false;  // meta-test hook
  int monotonicity_probes = 64;
  std::uint64_t probe_seed = 2024;
};

// FKG inequality (w2): cov(f, g) >= 0 for increasing f, g under a
// ferromagnetic scalar kernel; exact oracle, naive path (general f, g).
InequalityReport verify_fkg(const DiscreteAction& action, const SliceFunction& f,
                            const SliceFunction& g, const QuadratureScheme& quad,
                            const FkgOptions& opts = {});

// GKS-I (w3b): <prod x_i> >= 0, and GKS-II (w3c): <A B> >= <A><B> where A is
// the product of the first `split` legs; requires V of the (w3a) form with
// h >= 0 and nonnegative boundary.
InequalityReport verify_gks1(const DiscreteAction& action, std::span<const MomentFactor> legs,
                             const QuadratureScheme& quad);
InequalityReport verify_gks2(const DiscreteAction& action, std::span<const MomentFactor> legs,
                             std::size_t split, const QuadratureScheme& quad);

// Lebowitz (v2): Ursell U <= 0, and Gaussian domination (vv1):
// <x_1 .. x_{2n}> <= Wick pairing sum; even V, h = 0, convex v.
InequalityReport verify_lebowitz(const DiscreteAction& action,
                                 const std::array<MomentFactor, 4>& legs,
                                 const QuadratureScheme& quad);
InequalityReport verify_gaussian_domination(const DiscreteAction& action,
                                            std::span<const MomentFactor> legs,
                                            const QuadratureScheme& quad);

// Infrared sanity (sig9) on a torus: P_Lambda >= <x^2> - IR integral within
// MC errors, plus the Bogoliubov floor <x^2> >= t*. RHS < 0 reports a
// vacuous pass.
struct InfraredInputs {
  int d = 3;
  double m = 1.0;
  double j = 0.0;
  double beta = 1.0;
  double t_star = 0.0;
};
std::vector<InequalityReport> verify_infrared_sanity(const DiscreteAction& torus_action,
                                                     const ChainStats& stats,
                                                     const InfraredInputs& in);

// The canonical exact suite (12 instances over 1-3 sites, P in {2,3,4},
// quartic/sextic potentials) plus the deliberate antiferromagnetic
// meta-violation as the final entry.
std::vector<InequalityReport> run_exact_suite();

// seeded random admissible instances, n per inequality family
std::vector<InequalityReport> run_random_suite(int n_per_family, std::uint64_t seed);

}  // namespace qac
