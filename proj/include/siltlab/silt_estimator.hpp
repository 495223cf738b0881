#pragma once

// Approximating SILT gamma_eps(T), the renormalized gamma~_eps(T) and the four
// terms of the regularized Tanaka decomposition, computed from a PathRecord.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "siltlab/particle_simulator.hpp"
#include "siltlab/radial_kernel.hpp"

namespace siltlab {

enum class SelfPairPolicy { Include, Exclude };
enum class PairBackend { Auto, Exact, Binned };

struct PairSumOptions {
  PairBackend backend = PairBackend::Auto;
  double exact_pair_limit = 4.0e6;          ///< Auto sums exactly when N_A N_B is at most this
  std::size_t max_grid_points = 1u << 22;   ///< Auto falls back to exact above this
  double bin_fraction = 0.25;               ///< bin width / kernel length scale
  double tail_tolerance = 1e-10;            ///< kernel cut-off k(R) / k(0) for the periodic box
};

struct PairSum {
  double value = 0.0;
  /// Half-width of a guaranteed enclosure of the exact sum (0 for the exact
  /// backend), from nearest-bin envelope kernels.
  double error_bound = 0.0;
  bool binned = false;
};

/// atom_mass(A) atom_mass(B) sum_{a,b} k(|x_a - y_b|). Self pairs a = b are
/// dropped only when &A == &B and policy is Exclude.
PairSum pairwise_kernel_sum(const ParticleCloud& A, const ParticleCloud& B, const RadialKernel& k,
                            SelfPairPolicy policy, const PairSumOptions& opts = {});

/// Kernel tables and regularized kernels shared by all paths of a run.
class SiltContext {
 public:
  explicit SiltContext(std::shared_ptr<const KernelTable> table, PairSumOptions opts = {});

  const KernelTable& table() const { return *table_; }
  const PairSumOptions& options() const { return opts_; }
  /// p_eps and G^{lambda,eps}, built once and cached.
  const RadialKernel& density(double eps) const;
  const RadialKernel& green(double lambda, double eps) const;

 private:
  std::shared_ptr<const KernelTable> table_;
  PairSumOptions opts_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<RadialKernel>> densities_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<RadialKernel>> greens_;
};

/// Kernel pairings over the snapshot grid t_j = j h (h = stride dt, j = 0..J,
/// t_J = T), with k(j,i) = <k, Y_{t_j} x Y_{t_i}> self pairs included:
///   same = sum_{j<J} k(j,j),  cross = sum_{j<i<J} k(j,i),  terminal = sum_{j<J} k(j,J).
struct SnapshotSums {
  double same = 0.0;
  double cross = 0.0;
  double terminal = 0.0;
};

std::vector<SnapshotSums> snapshot_sums(const PathRecord& path, const std::vector<const RadialKernel*>& kernels,
                                        double T, std::size_t stride = 1, const PairSumOptions& opts = {});

/// Delta^2 [sum_{j<i} k_eps(j,i) + (1/2) sum_j k_eps(j,j)].
double approx_silt(const PathRecord& path, const SiltContext& ctx, double eps, double T);

/// gamma minus e^{lambda eps} Delta sum_j <G^{lambda,eps}, Y_{t_j} x Y_{t_j}>.
double renormalized_silt(const PathRecord& path, const SiltContext& ctx, double eps, double lambda, double T);

struct TanakaTerms {
  double eps = 0.0;
  double lambda = 0.0;
  double dt = 0.0;
  double gamma = 0.0;
  double gamma_tilde = 0.0;
  double T1 = 0.0, T2 = 0.0, T3 = 0.0, T4 = 0.0;

  double reconstructed() const { return T1 + T2 + T3 + T4; }
  double reconstructed_tilde() const { return T1 + T2 + T4; }
  /// |gamma - (T1 + T2 + T3 + T4)| / gamma.
  double relative_gap() const;
};

/// T4 uses the increments dM_j(g) = Y_{j+1}(g) - Y_j(g) - Delta Y_j(lambda G - e^{-lambda eps} p_eps).
TanakaTerms tanaka_terms(const PathRecord& path, const SiltContext& ctx, double eps, double lambda, double T,
                         std::size_t stride = 1);

struct SiltSeries {
  std::string path_id;
  double lambda = 0.0;
  std::vector<TanakaTerms> rows;  ///< one per eps, in the order given
};

/// All eps of one path in a single sweep over snapshot pairs.
SiltSeries silt_series(const PathRecord& path, const SiltContext& ctx, const std::vector<double>& eps_list,
                       double lambda, double T, const std::string& path_id, std::size_t stride = 1);

}  // namespace siltlab
