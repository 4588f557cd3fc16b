#include "qac/pimc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include "qac/simd/kernels.hpp"

namespace qac {

ObservableSpec ObservableSpec::product(std::string name, std::vector<MomentFactor> f) {
  ObservableSpec o;
  o.kind = Kind::product;
  o.name = std::move(name);
  o.factors = std::move(f);
  return o;
}

ObservableSpec ObservableSpec::block_mag_sq() {
  ObservableSpec o;
  o.kind = Kind::block_mag_sq;
  o.name = "block_mag_sq";
  return o;
}

std::string moment_name(std::span<const MomentFactor> factors) {
  std::string n = "m";
  for (const auto& f : factors) {
    n += ":s" + std::to_string(f.site) + "t" + std::to_string(f.slice);
    if (f.power != 1) n += "p" + std::to_string(f.power);
  }
  return n;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t chain_seed(std::uint64_t master, int index) {
  std::uint64_t s = master;
  (void)splitmix64(s);
  s ^= 0x6a09e667f3bcc909ULL * static_cast<std::uint64_t>(index + 1);
  return splitmix64(s);
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }
  int below(int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); }
};

double eval_observable(const ObservableSpec& o, std::span<const double> x, int n_sites, int P) {
  if (o.kind == ObservableSpec::Kind::block_mag_sq) {
    double m = 0.0;
    for (int l = 0; l < n_sites; ++l) m += x[static_cast<std::size_t>(l) * P];
    m /= n_sites;
    return m * m;
  }
  double v = 1.0;
  for (const auto& f : o.factors) {
    double b = x[static_cast<std::size_t>(f.site) * P + f.slice];
    double r = 1.0;
    for (int p = 0; p < f.power; ++p) r *= b;
    v *= r;
  }
  return v;
}

}  // namespace

double ChainRecord::ess(int obs) const {
  const auto& b = batches[obs];
  const long nb = static_cast<long>(b.size());
  if (nb < 8) return static_cast<double>(n_samples);
  double mean = 0.0;
  for (double v : b) mean += v;
  mean /= nb;
  double c0 = 0.0;
  for (double v : b) c0 += (v - mean) * (v - mean);
  c0 /= nb;
  if (c0 <= 0.0) return static_cast<double>(n_samples);
  // Geyer initial positive sequence on pair sums of batch autocorrelations
  double tau = 1.0;
  const long max_lag = std::min<long>(nb / 4, 128);
  for (long k = 1; k + 1 <= max_lag; k += 2) {
    double ck = 0.0, ck1 = 0.0;
    for (long i = 0; i + k < nb; ++i) ck += (b[i] - mean) * (b[i + k] - mean);
    for (long i = 0; i + k + 1 < nb; ++i) ck1 += (b[i] - mean) * (b[i + k + 1] - mean);
    ck /= nb;
    ck1 /= nb;
    const double pair = (ck + ck1) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  const double ess_batches = static_cast<double>(nb) / tau;
  return std::min(static_cast<double>(n_samples), ess_batches * static_cast<double>(batch_len));
}

ChainStats ChainStats::merge(const ChainStats& a, const ChainStats& b) {
  if (!a.names.empty() && !b.names.empty() && a.names != b.names)
    fail_validation("cannot merge chain statistics with different observable sets");
  ChainStats out;
  out.names = a.names.empty() ? b.names : a.names;
  out.chains = a.chains;
  for (const auto& [idx, rec] : b.chains) {
    if (out.chains.count(idx)) fail_validation("merge requires disjoint chain indices");
    out.chains.emplace(idx, rec);
  }
  return out;
}

int ChainStats::observable_index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

Estimate ChainStats::estimate(const std::string& name) const {
  const int idx = observable_index(name);
  if (idx < 0) fail_validation("missing observable: " + name);
  std::vector<std::string> in{name};
  return derived(in, [](std::span<const double> v) { return v[0]; });
}

Estimate ChainStats::derived(const std::vector<std::string>& inputs,
                             const std::function<double(std::span<const double>)>& fn) const {
  std::vector<int> idx;
  for (const auto& n : inputs) {
    const int i = observable_index(n);
    if (i < 0) fail_validation("missing observable: " + n);
    idx.push_back(i);
  }
  Estimate est;
  est.n_chains = static_cast<int>(chains.size());
  if (chains.empty()) fail_validation("no chains recorded");
  std::vector<double> values;
  double ess_min = std::numeric_limits<double>::infinity();
  for (const auto& [ci, rec] : chains) {
    std::vector<double> means(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) means[k] = rec.mean(idx[k]);
    values.push_back(fn(means));
    for (int i : idx) ess_min = std::min(ess_min, rec.ess(i));
  }
  double m = 0.0;
  for (double v : values) m += v;
  m /= values.size();
  est.value = m;
  est.ess = ess_min;
  if (values.size() >= 2) {
    double var = 0.0;
    for (double v : values) var += (v - m) * (v - m);
    var /= (values.size() - 1.0);
    est.std_error = std::sqrt(var / values.size());
  } else {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

double ChainStats::min_acceptance_single() const {
  double a = 1.0;
  for (const auto& [i, r] : chains) a = std::min(a, r.acceptance_single);
  return a;
}

bool ChainStats::all_acceptance_ok() const {
  return std::all_of(chains.begin(), chains.end(),
                     [](const auto& kv) { return kv.second.acceptance_ok; });
}

ChainStats sample_chain(const DiscreteAction& action, const std::vector<ObservableSpec>& obs,
                        const McParams& params, int chain_index) {
  if (params.n_sweeps < 1 || params.n_chains < 1) fail_validation("bad MC parameters");
  if (params.update_mix < 0.0 || params.update_mix > 1.0)
    fail_validation("update_mix must lie in [0, 1]");
  const int n_sites = action.n_sites;
  const int P = action.P;
  const double eps = action.eps;
  const auto& kr = simd::active();

  // per-site neighbor lists from the pair couplings
  std::vector<std::vector<std::pair<int, double>>> nbrs(n_sites);
  for (const auto& pr : action.pairs) {
    nbrs[pr.s1].push_back({pr.s2, pr.j});
    nbrs[pr.s2].push_back({pr.s1, pr.j});
  }

  Rng rng(chain_seed(params.master_seed, chain_index));
  std::vector<double> x(static_cast<std::size_t>(n_sites) * P, 0.0);
  std::vector<double> scratch(P);

  double width = params.proposal_width;
  double shift_width = params.shift_width;

  auto local_delta = [&](int l, int t, double nx) {
    const double* loop = x.data() + static_cast<std::size_t>(l) * P;
    const double old = loop[t];
    const double xm = loop[(t + P - 1) % P];
    const double xp = loop[(t + 1) % P];
    const double kin = action.mass / (2.0 * eps);
    double ds = kin * ((xp - nx) * (xp - nx) + (nx - xm) * (nx - xm) -
                       (xp - old) * (xp - old) - (old - xm) * (old - xm));
    const auto& pot = action.site_potentials[l];
    ds += eps * (0.5 * action.rigidity * (nx * nx - old * old) + pot(nx) - pot(old));
    double field = action.boundary_field_at(l, t);
    for (const auto& [l2, j] : nbrs[l]) field += j * x[static_cast<std::size_t>(l2) * P + t];
    ds -= eps * field * (nx - old);
    return ds;
  };

  auto shift_delta = [&](int l, double dv) {
    const double* loop = x.data() + static_cast<std::size_t>(l) * P;
    for (int t = 0; t < P; ++t) scratch[t] = loop[t] + dv;
    const auto& pot = action.site_potentials[l];
    double ds = eps * 0.5 * action.rigidity * (kr.sum_sq(scratch.data(), P) - kr.sum_sq(loop, P));
    if (!pot.even_coeffs.empty() || pot.field != 0.0) {
      ds += eps * (kr.sum_even_poly(scratch.data(), P, pot.even_coeffs.data(),
                                    pot.even_coeffs.size(), pot.field) -
                   kr.sum_even_poly(loop, P, pot.even_coeffs.data(), pot.even_coeffs.size(),
                                    pot.field));
    }
    double field_sum = 0.0;
    for (const auto& [l2, j] : nbrs[l]) {
      const double* other = x.data() + static_cast<std::size_t>(l2) * P;
      double s = 0.0;
      for (int t = 0; t < P; ++t) s += other[t];
      field_sum += j * s;
    }
    if (action.has_boundary_field())
      for (int t = 0; t < P; ++t) field_sum += action.boundary_field[l][t];
    ds -= eps * dv * field_sum;
    return ds;
  };

  ChainStats stats;
  for (const auto& o : obs) {
    for (const auto& f : o.factors)
      if (f.site < 0 || f.site >= n_sites || f.slice < 0 || f.slice >= P)
        fail_validation("observable factor outside the action");
    stats.names.push_back(o.name);
  }

  ChainRecord rec;
  rec.chain_index = chain_index;
  rec.sum.assign(obs.size(), 0.0);
  rec.sum_sq.assign(obs.size(), 0.0);
  rec.batches.assign(obs.size(), {});
  if (params.keep_series) rec.series.assign(obs.size(), {});
  std::vector<double> batch_acc(obs.size(), 0.0);
  long batch_fill = 0;

  long acc_single = 0, try_single = 0, acc_shift = 0, try_shift = 0;
  const long moves_per_sweep = static_cast<long>(n_sites) * P;
  const long total_sweeps = params.n_burnin + params.n_sweeps;

  for (long sweep = 0; sweep < total_sweeps; ++sweep) {
    const bool burnin = sweep < params.n_burnin;
    for (long mv = 0; mv < moves_per_sweep; ++mv) {
      if (rng.uniform() < params.update_mix) {
        const int l = rng.below(n_sites);
        const int t = rng.below(P);
        const double nx = x[static_cast<std::size_t>(l) * P + t] + width * rng.symmetric();
        const double ds = local_delta(l, t, nx);
        ++try_single;
        if (ds <= 0.0 || rng.uniform() < std::exp(-ds)) {
          x[static_cast<std::size_t>(l) * P + t] = nx;
          ++acc_single;
        }
      } else {
        const int l = rng.below(n_sites);
        const double dv = shift_width * rng.symmetric();
        const double ds = shift_delta(l, dv);
        ++try_shift;
        if (ds <= 0.0 || rng.uniform() < std::exp(-ds)) {
          double* loop = x.data() + static_cast<std::size_t>(l) * P;
          for (int t = 0; t < P; ++t) loop[t] += dv;
          ++acc_shift;
        }
      }
    }

    if (burnin) {
      // adaptation toward 0.4 acceptance, frozen after burn-in
      if (params.adapt && (sweep + 1) % 50 == 0 && try_single > 0) {
        const double r = static_cast<double>(acc_single) / try_single;
        width *= std::clamp(r / 0.4, 0.5, 2.0);
        if (try_shift > 0) {
          const double rs = static_cast<double>(acc_shift) / try_shift;
          shift_width *= std::clamp(rs / 0.4, 0.5, 2.0);
        }
        acc_single = try_single = acc_shift = try_shift = 0;
      }
      if (sweep + 1 == params.n_burnin) acc_single = try_single = acc_shift = try_shift = 0;
      continue;
    }

    ++rec.n_samples;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double v = eval_observable(obs[k], x, n_sites, P);
      rec.sum[k] += v;
      rec.sum_sq[k] += v * v;
      batch_acc[k] += v;
      if (params.keep_series) rec.series[k].push_back(v);
    }
    if (++batch_fill == rec.batch_len) {
      for (std::size_t k = 0; k < obs.size(); ++k) {
        rec.batches[k].push_back(batch_acc[k] / rec.batch_len);
        batch_acc[k] = 0.0;
      }
      batch_fill = 0;
    }
  }

  rec.acceptance_single = try_single > 0 ? static_cast<double>(acc_single) / try_single : 1.0;
  rec.acceptance_shift = try_shift > 0 ? static_cast<double>(acc_shift) / try_shift : 1.0;
  rec.acceptance_ok = rec.acceptance_single >= 0.05 && rec.acceptance_single <= 0.95;
  stats.chains.emplace(chain_index, std::move(rec));
  return stats;
}

ChainStats run_chains(const DiscreteAction& action, const std::vector<ObservableSpec>& obs,
                      const McParams& params) {
  const int nc = params.n_chains;
  std::vector<ChainStats> results(nc);
  int n_threads = params.n_threads > 0
                      ? params.n_threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, nc);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= nc) return;
      results[i] = sample_chain(action, obs, params, i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ChainStats merged = results[0];
  for (int i = 1; i < nc; ++i) merged = ChainStats::merge(merged, results[i]);
  if (!merged.all_acceptance_ok())
    fail_numeric("Metropolis acceptance rate left [0.05, 0.95] after adaptation");
  return merged;
}

Estimate estimate_order_parameter(const ChainStats& stats, const Box& box) {
  (void)box;
  return stats.estimate("block_mag_sq");
}

std::vector<ObservableSpec> pair_observables(int site1, int slice1, int site2, int slice2) {
  const MomentFactor a{site1, slice1, 1}, b{site2, slice2, 1};
  std::vector<MomentFactor> joint;
  if (site1 == site2 && slice1 == slice2)
    joint = {MomentFactor{site1, slice1, 2}};
  else
    joint = {a, b};
  return {
      ObservableSpec::product(moment_name(joint), joint),
      ObservableSpec::product(moment_name(std::span(&a, 1)), {a}),
      ObservableSpec::product(moment_name(std::span(&b, 1)), {b}),
  };
}

Estimate estimate_pair_correlation(const ChainStats& stats, int site1, int slice1, int site2,
                                   int slice2) {
  auto names_of = pair_observables(site1, slice1, site2, slice2);
  std::vector<std::string> in{names_of[0].name, names_of[1].name, names_of[2].name};
  return stats.derived(in, [](std::span<const double> v) { return v[0] - v[1] * v[2]; });
}

std::vector<ObservableSpec> ursell_observables(const std::array<MomentFactor, 4>& legs) {
  std::vector<ObservableSpec> out;
  auto add = [&](std::vector<MomentFactor> fs) {
    // merge coincident legs into powers for a canonical name
    std::vector<MomentFactor> merged;
    for (const auto& f : fs) {
      bool found = false;
      for (auto& m : merged)
        if (m.site == f.site && m.slice == f.slice) {
          m.power += f.power;
          found = true;
          break;
        }
      if (!found) merged.push_back(f);
    }
    const std::string n = moment_name(merged);
    for (const auto& o : out)
      if (o.name == n) return;
    out.push_back(ObservableSpec::product(n, merged));
  };
  add({legs[0], legs[1], legs[2], legs[3]});
  add({legs[0], legs[1]});
  add({legs[2], legs[3]});
  add({legs[0], legs[2]});
  add({legs[1], legs[3]});
  add({legs[0], legs[3]});
  add({legs[1], legs[2]});
  for (const auto& l : legs) add({l});
  return out;
}

Estimate estimate_ursell(const ChainStats& stats, const std::array<MomentFactor, 4>& legs) {
  auto canonical = [&](std::vector<MomentFactor> fs) {
    std::vector<MomentFactor> merged;
    for (const auto& f : fs) {
      bool found = false;
      for (auto& m : merged)
        if (m.site == f.site && m.slice == f.slice) {
          m.power += f.power;
          found = true;
          break;
        }
      if (!found) merged.push_back(f);
    }
    return moment_name(merged);
  };
  std::vector<std::string> in{
      canonical({legs[0], legs[1], legs[2], legs[3]}),
      canonical({legs[0], legs[1]}),
      canonical({legs[2], legs[3]}),
      canonical({legs[0], legs[2]}),
      canonical({legs[1], legs[3]}),
      canonical({legs[0], legs[3]}),
      canonical({legs[1], legs[2]}),
      canonical({legs[0]}),
      canonical({legs[1]}),
      canonical({legs[2]}),
      canonical({legs[3]}),
  };
  // eq. (v1): <1234> - K12 K34 - K13 K24 - K14 K23 with connected K
  return stats.derived(in, [](std::span<const double> v) {
    const double k12 = v[1] - v[7] * v[8];
    const double k34 = v[2] - v[9] * v[10];
    const double k13 = v[3] - v[7] * v[9];
    const double k24 = v[4] - v[8] * v[10];
    const double k14 = v[5] - v[7] * v[10];
    const double k23 = v[6] - v[8] * v[9];
    return v[0] - k12 * k34 - k13 * k24 - k14 * k23;
  });
}

}  // namespace qac
