#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qac {

// Lattice sites are integer vectors in Z^d.
using Site = std::vector<int>;

double site_distance(std::span<const int> a, std::span<const int> b);

// One-site anharmonic potential V(x) = sum_{s=1..r} b_s x^{2s} - h x,
// so V(0) = 0 by construction.
struct Potential {
  std::vector<double> even_coeffs;  // b_1 .. b_r
  double field = 0.0;               // h

  int degree() const { return static_cast<int>(even_coeffs.size()); }
  double operator()(double x) const;
  // v(t) with t = x^2, i.e. the even part only
  double even_part(double t) const;
  bool is_even() const { return field == 0.0; }
};

struct DynamicalMatrix {
  enum class Kind { nearest_neighbor, finite_range, exponential_decay, polynomial_decay };

  Kind kind = Kind::nearest_neighbor;
  double strength = 0.0;  // J
  double rate = 1.0;      // exponential kind
  double gamma = 1.0;     // polynomial kind: |J(o)| = J (1+|o|)^{-(d+gamma)}
  // finite_range: canonical offset (first nonzero component > 0) -> J value.
  // A zero offset entry is representable and rejected by validate_model.
  std::map<Site, double> table;
  double range = 0.0;  // R for finite_range, from the table

  static DynamicalMatrix nearest_neighbor(double j);
  static DynamicalMatrix finite_range(std::vector<std::pair<Site, double>> entries);
  static DynamicalMatrix exponential_decay(double j, double rate);
  static DynamicalMatrix polynomial_decay(double j, double gamma);

  // J_{ll'} for arbitrary site pairs; zero on the diagonal unless the
  // finite_range table was built with an explicit zero offset.
  double entry(std::span<const int> a, std::span<const int> b, int d) const;
  bool ferromagnetic() const;
  bool finite_reach() const { return kind == Kind::nearest_neighbor || kind == Kind::finite_range; }
  // radius beyond which couplings are identically zero (finite kinds) or
  // whose neglected tail is below `tail_tol` in Ĵ0 units (decaying kinds)
  double reach(int d, double tail_tol) const;
};

struct ModelSpec {
  int d = 1;       // lattice dimension
  int nu = 1;      // loop dimension; the scalar theorems assume 1
  double mass = 1.0;
  double rigidity = 1.0;  // a
  double beta = 1.0;
  Potential potential;                  // shared by all sites
  std::map<Site, Potential> site_overrides;  // sparse site-dependent part
  DynamicalMatrix couplings;

  bool translation_invariant() const { return site_overrides.empty(); }
  const Potential& potential_at(std::span<const int> site) const;
};

// Decay weights of Definition 2.2; exponential w = exp(-alpha |l-l'|)
// or polynomial w = (1 + eps |l-l'|)^{-alpha d}.
struct WeightFamily {
  enum class Kind { exponential, polynomial };
  Kind kind = Kind::exponential;
  double alpha = 1.0;
  double epsilon = 1.0;  // polynomial kind only; the paper leaves it free
  int d = 1;
};

double weight(const WeightFamily& family, std::span<const int> a, std::span<const int> b);

struct ValidationReport {
  bool passes = false;
  double lower_A = 0.0;  // A_V
  double lower_B = 0.0;  // B_V
  int lower_r = 0;       // r > 1 when the lower bound holds
  std::vector<double> upper_env_coeffs;  // coefficient-wise envelope
  double upper_env_field = 0.0;          // max |h| over sites
  double j_hat_zero = 0.0;
  std::vector<std::string> diagnostics;
};

ValidationReport validate_model(const ModelSpec& spec);

// structural subset of validate_model: positive m/a/beta, finite
// coefficients, well-formed couplings. Finite-box constructions accept
// e.g. the harmonic crystal, which the full assumption check rejects.
void validate_structure(const ModelSpec& spec);

// Ĵ0 = sup_l sum_{l'} |J_{ll'}| via shell summation with a proven tail bound.
double j_hat_zero(const ModelSpec& spec);

// Ĵ_alpha = sup_l sum_{l'} |J_{ll'}| / w_alpha(l,l'); alpha = 0 degenerates
// to Ĵ0. Throws Error{numeric} when the sum diverges for the given decay.
double j_hat_alpha(const ModelSpec& spec, const WeightFamily& family);

// Error taxonomy shared by all modules; the CLI maps kinds to exit codes.
struct Error {
  enum class Kind { validation, numeric };
  Kind kind;
  std::string message;
};

[[noreturn]] void fail_validation(const std::string& msg);
[[noreturn]] void fail_numeric(const std::string& msg);

}  // namespace qac
