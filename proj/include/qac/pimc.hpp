#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qac/lattice.hpp"
#include "qac/oracle.hpp"

namespace qac {

// Observables recorded once per sweep: either a product of slice variables
// or the squared block magnetization (1/|box| sum_l x_{l,0})^2.
struct ObservableSpec {
  enum class Kind { product, block_mag_sq };
  Kind kind = Kind::product;
  std::string name;
  std::vector<MomentFactor> factors;

  static ObservableSpec product(std::string name, std::vector<MomentFactor> f);
  static ObservableSpec block_mag_sq();
};

struct McParams {
  long n_sweeps = 20000;
  long n_burnin = 2000;
  int n_chains = 8;
  std::uint64_t master_seed = 1;
  double proposal_width = 0.5;  // adapted toward acceptance 0.4 during burn-in
  double shift_width = 0.5;
  double update_mix = 0.8;  // fraction of single-slice moves vs whole-loop shifts
  bool adapt = true;
  int n_threads = 0;     // 0 = hardware concurrency
  bool keep_series = false;  // retain per-sweep values (trace output)
};

// One chain's raw accumulators. Estimates always reduce per chain first;
// cross-chain error bars come from the spread of chain means.
struct ChainRecord {
  int chain_index = -1;
  long n_samples = 0;
  std::vector<double> sum;      // per observable
  std::vector<double> sum_sq;   // per observable
  long batch_len = 10;
  std::vector<std::vector<double>> batches;  // per observable batch means
  std::vector<std::vector<double>> series;   // optional per-sweep values
  double acceptance_single = 0.0;
  double acceptance_shift = 0.0;
  bool acceptance_ok = true;

  double mean(int obs) const { return sum[obs] / static_cast<double>(n_samples); }
  // autocorrelation-based effective sample size (Geyer initial positive
  // sequence on batch means)
  double ess(int obs) const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  int n_chains = 0;
};

// Merge-friendly accumulator: a union of per-chain records keyed by chain
// index, so merge is associative and commutative on disjoint seeds.
struct ChainStats {
  std::vector<std::string> names;
  std::map<int, ChainRecord> chains;

  static ChainStats merge(const ChainStats& a, const ChainStats& b);
  int observable_index(const std::string& name) const;  // -1 when missing
  Estimate estimate(const std::string& name) const;
  // per-chain functional of the chain's observable means, averaged across
  // chains with between-chain error bars
  Estimate derived(const std::vector<std::string>& inputs,
                   const std::function<double(std::span<const double>)>& fn) const;
  double min_acceptance_single() const;
  bool all_acceptance_ok() const;
};

// Metropolis chain targeting exp(-S) under the discrete free reference;
// 80/20 mix of single-slice moves and rigid whole-loop shifts by default.
ChainStats sample_chain(const DiscreteAction& action, const std::vector<ObservableSpec>& obs,
                        const McParams& params, int chain_index);

// n_chains independent chains, merged in chain-index order. Results are
// byte-identical for a given (action, params) at any thread count.
ChainStats run_chains(const DiscreteAction& action, const std::vector<ObservableSpec>& obs,
                      const McParams& params);

// P_Lambda(beta) of eq. (op) from the block_mag_sq observable.
Estimate estimate_order_parameter(const ChainStats& stats, const Box& box);

// connected K_{ll'}(t,t') from recorded product observables
Estimate estimate_pair_correlation(const ChainStats& stats, int site1, int slice1, int site2,
                                   int slice2);

// Ursell function of eq. (v1) from 4-point and pair observables
Estimate estimate_ursell(const ChainStats& stats, const std::array<MomentFactor, 4>& legs);

// canonical observable names used by the estimators
std::string moment_name(std::span<const MomentFactor> factors);
// the observables estimate_pair_correlation / estimate_ursell need
std::vector<ObservableSpec> pair_observables(int site1, int slice1, int site2, int slice2);
std::vector<ObservableSpec> ursell_observables(const std::array<MomentFactor, 4>& legs);

}  // namespace qac
