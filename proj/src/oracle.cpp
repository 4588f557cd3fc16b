#include "qac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qac {

namespace {

// quadrature nodes scaled so the Gauss-Hermite weight absorbs the diagonal
// Gaussian factor (m/eps + eps a/2) x^2 of the action
struct ScaledNodes {
  std::vector<double> x;     // physical node positions
  std::vector<double> logw;  // log GH weights
  double kin_cross = 0.0;    // m/eps, coefficient of x x' across slices
};

ScaledNodes scale_nodes(const DiscreteAction& act, const QuadratureScheme& quad) {
  ScaledNodes s;
  const double diag = 2.0 * act.mass / act.eps + act.eps * act.rigidity;
  const double sigma = 1.0 / std::sqrt(diag);
  s.kin_cross = act.mass / act.eps;
  s.x.resize(quad.q);
  s.logw.resize(quad.q);
  for (int i = 0; i < quad.q; ++i) {
    s.x[i] = std::sqrt(2.0) * sigma * quad.nodes[i];
    s.logw[i] = std::log(quad.weights[i]);
  }
  return s;
}

double ipow(double x, int p) {
  double r = 1.0;
  while (p-- > 0) r *= x;
  return r;
}

// ---------------------------------------------------------------------------
// transfer-matrix path

struct Transfer {
  const DiscreteAction* act;
  ScaledNodes nodes;
  int q = 0;
  int n_states = 0;                 // q^{n_sites}
  bool free_version = false;        // reference measure: no V, J, xi
  Eigen::MatrixXd kinetic;          // K(c,c') = exp(m/eps sum_l x_c x_c')
  std::vector<double> base_logA;    // slice-independent part of log A(c)
  std::vector<double> site_x;       // x value per (state, site): state*n_sites+l
  std::vector<double> sigma;        // eps * sum_l x_l per state
  double log_norm = 0.0;            // subtracted from every log A

  std::vector<int> digits(int state) const {
    std::vector<int> d(act->n_sites);
    for (int l = act->n_sites - 1; l >= 0; --l) {
      d[l] = state % q;
      state /= q;
    }
    return d;
  }
};

Transfer make_transfer(const DiscreteAction& act, const QuadratureScheme& quad,
                       const OracleLimits& limits, bool free_version) {
  Transfer tr;
  tr.act = &act;
  tr.nodes = scale_nodes(act, quad);
  tr.q = quad.q;
  tr.free_version = free_version;
  double states = 1.0;
  for (int l = 0; l < act.n_sites; ++l) states *= quad.q;
  if (states > limits.max_states)
    fail_numeric("instance too large for the transfer oracle: q^{|box|} = " +
                 std::to_string(states) + " states exceeds " + std::to_string(limits.max_states));
  if (states * states * std::max(act.P, 8) > limits.max_transfer_work)
    fail_numeric("instance too large for the transfer oracle: contraction work bound exceeded");
  tr.n_states = static_cast<int>(states);

  tr.site_x.resize(static_cast<std::size_t>(tr.n_states) * act.n_sites);
  tr.sigma.resize(tr.n_states);
  tr.base_logA.assign(tr.n_states, 0.0);
  for (int c = 0; c < tr.n_states; ++c) {
    const auto dg = tr.digits(c);
    double la = 0.0, sg = 0.0;
    for (int l = 0; l < act.n_sites; ++l) {
      const double x = tr.nodes.x[dg[l]];
      tr.site_x[static_cast<std::size_t>(c) * act.n_sites + l] = x;
      la += tr.nodes.logw[dg[l]];
      sg += x;
      if (!free_version) {
        const auto& pot = act.site_potentials[l];
        la -= act.eps * pot(x);
      }
    }
    if (!free_version) {
      for (const auto& pr : act.pairs)
        la += act.eps * pr.j * tr.site_x[static_cast<std::size_t>(c) * act.n_sites + pr.s1] *
              tr.site_x[static_cast<std::size_t>(c) * act.n_sites + pr.s2];
    }
    tr.sigma[c] = act.eps * sg;
    tr.base_logA[c] = la;
  }
  tr.log_norm = *std::max_element(tr.base_logA.begin(), tr.base_logA.end());
  for (double& v : tr.base_logA) v -= tr.log_norm;

  tr.kinetic.resize(tr.n_states, tr.n_states);
  for (int c = 0; c < tr.n_states; ++c) {
    for (int cp = 0; cp < tr.n_states; ++cp) {
      double e = 0.0;
      for (int l = 0; l < act.n_sites; ++l)
        e += tr.site_x[static_cast<std::size_t>(c) * act.n_sites + l] *
             tr.site_x[static_cast<std::size_t>(cp) * act.n_sites + l];
      tr.kinetic(c, cp) = std::exp(tr.nodes.kin_cross * e);
    }
  }
  return tr;
}

// slice step matrix M_t = diag(A_t) K, with optional x-power insertions
Eigen::MatrixXd slice_matrix(const Transfer& tr, int slice,
                             std::span<const MomentFactor> factors) {
  const auto& act = *tr.act;
  Eigen::VectorXd a(tr.n_states);
  for (int c = 0; c < tr.n_states; ++c) {
    double la = tr.base_logA[c];
    if (!tr.free_version && act.has_boundary_field()) {
      for (int l = 0; l < act.n_sites; ++l)
        la += act.eps * act.boundary_field[l][slice] *
              tr.site_x[static_cast<std::size_t>(c) * act.n_sites + l];
    }
    double v = std::exp(la);
    for (const auto& f : factors) {
      if (f.slice == slice)
        v *= ipow(tr.site_x[static_cast<std::size_t>(c) * act.n_sites + f.site], f.power);
    }
    a(c) = v;
  }
  return a.asDiagonal() * tr.kinetic;
}

struct LogTrace {
  double log_abs;
  double sign;
};

void normalize(Eigen::MatrixXd& m, double& log_scale) {
  const double s = m.cwiseAbs().maxCoeff();
  if (s > 0.0 && std::isfinite(s)) {
    m /= s;
    log_scale += std::log(s);
  }
}

// log tr(prod_t M_t); identical slices go through binary powering, otherwise
// the chain is multiplied in slice order. Every matrix carries an explicit
// log scale so entries stay in range at any P.
LogTrace chain_trace(const Transfer& tr, std::span<const MomentFactor> factors) {
  const auto& act = *tr.act;
  const int P = act.P;

  std::vector<bool> special(P, !tr.free_version && act.has_boundary_field());
  for (const auto& f : factors) {
    if (f.slice < 0 || f.slice >= P || f.site < 0 || f.site >= act.n_sites)
      fail_validation("moment factor outside the action's sites/slices");
    special[f.slice] = true;
  }
  const bool uniform = std::none_of(special.begin(), special.end(), [](bool b) { return b; });

  Eigen::MatrixXd acc;
  double la = 0.0;
  if (uniform) {
    std::vector<MomentFactor> none;
    Eigen::MatrixXd base = slice_matrix(tr, 0, none);
    double lb = 0.0;
    normalize(base, lb);
    bool first = true;
    int k = P;
    while (k > 0) {
      if (k & 1) {
        if (first) {
          acc = base;
          la = lb;
          first = false;
        } else {
          acc = acc * base;
          la += lb;
        }
        normalize(acc, la);
      }
      k >>= 1;
      if (k > 0) {
        base = base * base;
        lb *= 2.0;
        normalize(base, lb);
      }
    }
  } else {
    acc = Eigen::MatrixXd::Identity(tr.n_states, tr.n_states);
    for (int t = 0; t < P; ++t) {
      acc = acc * slice_matrix(tr, t, factors);
      normalize(acc, la);
    }
  }

  const double trv = acc.trace();
  if (!(std::abs(trv) > 0.0)) fail_numeric("transfer trace vanished (underflow)");
  return {std::log(std::abs(trv)) + la + tr.log_norm * P, trv >= 0.0 ? 1.0 : -1.0};
}

}  // namespace

double exact_partition(const DiscreteAction& action, const QuadratureScheme& quad,
                       const OracleLimits& limits) {
  Transfer full = make_transfer(action, quad, limits, false);
  Transfer free_tr = make_transfer(action, quad, limits, true);
  const LogTrace a = chain_trace(full, {});
  const LogTrace b = chain_trace(free_tr, {});
  return a.sign / b.sign * std::exp(a.log_abs - b.log_abs);
}

double exact_moment(const DiscreteAction& action, const QuadratureScheme& quad,
                    std::span<const MomentFactor> factors, const OracleLimits& limits) {
  Transfer full = make_transfer(action, quad, limits, false);
  const LogTrace z = chain_trace(full, {});
  const LogTrace m = chain_trace(full, factors);
  return m.sign * z.sign * std::exp(m.log_abs - z.log_abs);
}

std::vector<double> exact_smoments(const DiscreteAction& action, const QuadratureScheme& quad,
                                   int k_max, const OracleLimits& limits) {
  if (k_max < 0) fail_validation("k_max must be nonnegative");
  Transfer tr = make_transfer(action, quad, limits, false);
  const int n = tr.n_states;
  const int P = action.P;

  // R_j accumulates tr-weighted sums with total sigma-power j distributed
  // over the processed slices; R_j <- sum_i C(j,i) R_{j-i} diag(sigma^i) M_t
  std::vector<Eigen::MatrixXd> r(k_max + 1);
  r[0] = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j <= k_max; ++j) r[j] = Eigen::MatrixXd::Zero(n, n);

  std::vector<std::vector<double>> binom(k_max + 1, std::vector<double>(k_max + 1, 0.0));
  for (int j = 0; j <= k_max; ++j) {
    binom[j][0] = 1.0;
    for (int i = 1; i <= j; ++i)
      binom[j][i] = binom[j - 1][i - 1] + (i <= j - 1 ? binom[j - 1][i] : 0.0);
  }

  std::vector<Eigen::VectorXd> sig_pow(k_max + 1, Eigen::VectorXd::Ones(n));
  for (int i = 1; i <= k_max; ++i)
    for (int c = 0; c < n; ++c) sig_pow[i](c) = sig_pow[i - 1](c) * tr.sigma[c];

  double log_scale = 0.0;
  for (int t = 0; t < P; ++t) {
    std::vector<MomentFactor> none;
    const Eigen::MatrixXd m = slice_matrix(tr, t, none);
    std::vector<Eigen::MatrixXd> next(k_max + 1);
    for (int j = k_max; j >= 0; --j) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i <= j; ++i)
        w += binom[j][i] * (r[j - i] * sig_pow[i].asDiagonal());
      next[j] = w * m;
    }
    r = std::move(next);
    const double s = r[0].cwiseAbs().maxCoeff();
    if (s > 0.0 && (s > 1e120 || s < 1e-120)) {
      for (auto& mat : r) mat /= s;
      log_scale += std::log(s);
    }
  }
  (void)log_scale;  // cancels in the ratios below
  const double z = r[0].trace();
  if (!(z > 0.0)) fail_numeric("transfer trace vanished in S-moment accumulation");
  std::vector<double> out(k_max + 1);
  for (int j = 0; j <= k_max; ++j) out[j] = r[j].trace() / z;
  return out;
}

// ---------------------------------------------------------------------------
// naive tensor enumeration

namespace {

struct NaiveSums {
  double z_full = 0.0;
  double z_free = 0.0;
  double acc_obs = 0.0;
};

NaiveSums naive_sums(const DiscreteAction& action, const QuadratureScheme& quad,
                     const std::function<double(std::span<const double>)>* observable,
                     const OracleLimits& limits) {
  const int N = action.n_sites * action.P;
  const double terms = std::pow(static_cast<double>(quad.q), N);
  if (terms > limits.max_naive_terms)
    fail_numeric("instance too large for the naive oracle: q^{|box| P} = " +
                 std::to_string(terms) + " exceeds " + std::to_string(limits.max_naive_terms));

  const ScaledNodes sn = scale_nodes(action, quad);
  const double diag_coeff = action.mass / action.eps + 0.5 * action.eps * action.rigidity;

  // free action: same kinetic/harmonic skeleton, no V, J, xi
  DiscreteAction free_act = action;
  for (auto& p : free_act.site_potentials) p = Potential{};
  free_act.pairs.clear();
  free_act.boundary_field.clear();

  std::vector<int> idx(N, 0);
  std::vector<double> x(N);
  double logw_sum = 0.0;
  for (int i = 0; i < N; ++i) {
    x[i] = sn.x[0];
    logw_sum += sn.logw[0];
  }

  NaiveSums sums;
  while (true) {
    double diag = 0.0;
    for (int i = 0; i < N; ++i) diag += x[i] * x[i];
    diag *= diag_coeff;
    const double wf = std::exp(logw_sum - action.total(x) + diag);
    const double wf0 = std::exp(logw_sum - free_act.total(x) + diag);
    sums.z_full += wf;
    sums.z_free += wf0;
    if (observable) sums.acc_obs += wf * (*observable)(x);

    int i = N - 1;
    for (; i >= 0; --i) {
      logw_sum -= sn.logw[idx[i]];
      if (idx[i] + 1 < quad.q) {
        ++idx[i];
        x[i] = sn.x[idx[i]];
        logw_sum += sn.logw[idx[i]];
        break;
      }
      idx[i] = 0;
      x[i] = sn.x[0];
      logw_sum += sn.logw[0];
    }
    if (i < 0) break;
  }
  return sums;
}

}  // namespace

double exact_partition_naive(const DiscreteAction& action, const QuadratureScheme& quad,
                             const OracleLimits& limits) {
  const NaiveSums s = naive_sums(action, quad, nullptr, limits);
  return s.z_full / s.z_free;
}

double exact_expectation(const DiscreteAction& action,
                         const std::function<double(std::span<const double>)>& observable,
                         const QuadratureScheme& quad, const OracleLimits& limits) {
  const NaiveSums s = naive_sums(action, quad, &observable, limits);
  return s.acc_obs / s.z_full;
}

double exact_pair_correlation(const DiscreteAction& action, const QuadratureScheme& quad,
                              int site1, int slice1, int site2, int slice2,
                              const OracleLimits& limits) {
  const MomentFactor a{site1, slice1, 1}, b{site2, slice2, 1};
  double joint;
  if (a.site == b.site && a.slice == b.slice) {
    const MomentFactor sq{site1, slice1, 2};
    joint = exact_moment(action, quad, std::span(&sq, 1), limits);
  } else {
    const MomentFactor fs[2] = {a, b};
    joint = exact_moment(action, quad, fs, limits);
  }
  const double ma = exact_moment(action, quad, std::span(&a, 1), limits);
  const double mb = exact_moment(action, quad, std::span(&b, 1), limits);
  return joint - ma * mb;
}

double exact_ursell(const DiscreteAction& action, const QuadratureScheme& quad,
                    std::span<const MomentFactor> legs, const OracleLimits& limits) {
  if (legs.size() != 4) fail_validation("Ursell function needs exactly 4 legs");
  for (const auto& l : legs)
    if (l.power != 1) fail_validation("Ursell legs must have power 1");

  // merge coincident legs so the transfer insertion sees clean powers
  auto moment_of = [&](std::vector<MomentFactor> fs) {
    std::vector<MomentFactor> merged;
    for (const auto& f : fs) {
      bool found = false;
      for (auto& m : merged) {
        if (m.site == f.site && m.slice == f.slice) {
          m.power += f.power;
          found = true;
          break;
        }
      }
      if (!found) merged.push_back(f);
    }
    return exact_moment(action, quad, merged, limits);
  };

  // eq. (v1) with uncentered pair moments; the measures this applies to are
  // even with zero boundary, so first moments vanish and the uncentered
  // pairs coincide with the connected correlators
  const double four = moment_of({legs[0], legs[1], legs[2], legs[3]});
  const double k12 = moment_of({legs[0], legs[1]});
  const double k34 = moment_of({legs[2], legs[3]});
  const double k13 = moment_of({legs[0], legs[2]});
  const double k24 = moment_of({legs[1], legs[3]});
  const double k14 = moment_of({legs[0], legs[3]});
  const double k23 = moment_of({legs[1], legs[2]});
  return four - k12 * k34 - k13 * k24 - k14 * k23;
}

}  // namespace qac
