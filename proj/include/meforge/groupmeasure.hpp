#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meforge/freegroup.hpp"

namespace meforge::groupmeasure {

using freegroup::Word;
using freegroup::WordSet;

/// Discrete group carrier: the free group F_rank. Rank 1 is the group of
/// integers (words a^j <-> j).
struct GroupDescriptor {
    std::uint32_t rank = 2;
    friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;
};

inline GroupDescriptor free_group(std::uint32_t k) { return GroupDescriptor{k}; }
inline GroupDescriptor integers() { return GroupDescriptor{1}; }

/// Word with exponent sum j on the single generator of F_1 = Z.
Word z_point(std::int64_t j);
std::int64_t z_value(const Word& w);

constexpr std::uint64_t kDefaultConvolutionBudget = 10'000'000;

/// Finitely supported probability measure on a discrete free group.
/// Weights are strictly positive, stored in canonical word order, and sum
/// to 1 (renormalized at construction and after every convolution).
class FiniteMeasure {
public:
    using Map = std::map<Word, double>;

    /// Normalizes arbitrary nonnegative weights; zero entries are pruned.
    static FiniteMeasure from_weights(GroupDescriptor group, const Map& weights);
    static FiniteMeasure point_mass(GroupDescriptor group, const Word& w);
    static FiniteMeasure uniform_on(GroupDescriptor group, const std::vector<Word>& words);
    /// Uniform measure on the 2k signed generators of F_k (the isotropic
    /// nearest-neighbor walk; on F_1 this is the simple walk on Z).
    static FiniteMeasure simple_walk(std::uint32_t k);
    /// Symmetric uniform measure on the window [-L, L] of Z.
    static FiniteMeasure uniform_window_on_Z(std::int64_t radius);

    GroupDescriptor group() const { return group_; }
    const Map& entries() const { return weights_; }
    std::size_t support_size() const { return weights_.size(); }
    double weight(const Word& w) const;
    double mass(const WordSet& set) const;
    double total() const;
    bool is_symmetric(double tol = 1e-12) const;

    /// Inverse-CDF sample in canonical support order; u in [0, 1).
    const Word& sample(double u) const;

    /// Structured text record; bit-exact round trip (hexfloat weights).
    std::string serialize() const;
    static FiniteMeasure parse(const std::string& text);

private:
    FiniteMeasure(GroupDescriptor group, Map weights)
        : group_(group), weights_(std::move(weights)) {}
    GroupDescriptor group_;
    Map weights_;
};

/// Convolution (mu * nu)(g) = sum_h mu(h) nu(h^{-1} g); renormalized.
FiniteMeasure convolve(const FiniteMeasure& mu, const FiniteMeasure& nu,
                       std::uint64_t budget = kDefaultConvolutionBudget);
FiniteMeasure convolution_power(const FiniteMeasure& nu, unsigned m,
                                std::uint64_t budget = kDefaultConvolutionBudget);

/// True when nu is the uniform measure on the 2k signed generators.
bool is_isotropic_simple_walk(const FiniteMeasure& nu);

/// Distribution of the distance-from-identity process of the isotropic
/// nearest-neighbor walk on F_k, as a birth-death dynamic program:
/// out-probability (2k-1)/2k, in-probability 1/2k (from 0, out with
/// probability 1). Returns rows m = 0..n_max; row m has entries at
/// distances 0..m.
std::vector<std::vector<double>> radial_distance_distributions(std::uint32_t k, unsigned n_max);

/// Exact nu^{*m}(e). Uses the radial program for isotropic walks, sparse
/// convolution otherwise (budget-guarded).
double return_probability(const FiniteMeasure& nu, unsigned m,
                          std::uint64_t budget = kDefaultConvolutionBudget);

struct SpectralEstimate {
    double lower_bound = 0.0;
    double upper_bound = 1.0;
    std::vector<std::string> methods;
    unsigned n_used = 0;  // index attaining the lower bound
};

/// Kesten lower bound max_n nu^{*2n}(e)^{1/2n} plus a certified upper
/// bound. Requires a symmetric measure.
SpectralEstimate spectral_radius_estimate(const FiniteMeasure& nu, unsigned n_max,
                                          unsigned upper_bound_power = 8,
                                          std::uint64_t budget = kDefaultConvolutionBudget);

/// Rigorous upper bound for ||lambda(nu)||: the l^1 bound, and for rank
/// >= 2 the Haagerup route (sum_n (n+1) ||nu^{*m}|_{S_n}||_2)^{1/m}.
double certified_norm_upper_bound(const FiniteMeasure& nu, unsigned m,
                                  std::uint64_t budget = kDefaultConvolutionBudget);

/// ||lambda(nu)|| of the isotropic nearest-neighbor walk on F_k:
/// sqrt(2k-1)/k (Kesten's closed form; equals 1 at k = 1).
double kesten_simple_walk_norm(std::uint32_t k);

/// Smallest m with rho_hat^m < threshold. Throws std::domain_error
/// ("gate unreachable") when rho_hat >= 1.
unsigned min_convolution_power_below(double rho_hat, double threshold = 1.0 / 3.0);

struct TransienceSums {
    std::vector<double> partial_sums;    // S_1..S_N
    std::vector<double> standard_errors; // zero when exact
    bool monte_carlo = false;
};

/// Partial sums S_N = sum_{n<=N} nu^{*n}(K). Radial program for
/// isotropic walks, sparse convolution within budget, Monte Carlo with
/// reported standard errors otherwise.
TransienceSums transience_partial_sums(const FiniteMeasure& nu, const WordSet& K, unsigned N,
                                       std::uint64_t budget = kDefaultConvolutionBudget,
                                       std::uint64_t seed = 1, unsigned partitions = 4,
                                       std::uint64_t samples = 100'000);

/// The explicit transience sequence: t_n = 3^{-5/3} for n in {1,2,3} and
/// n^{-2/n} - (n-1)^{-2/(n-1)} for n >= 4, so that the partial sums
/// telescope to n^{-2/n}.
double lemma37_t(unsigned n);
/// eps_n = 1 for n in {1,2}, n^{-2} for n >= 3.
double lemma37_eps(unsigned n);

struct Lemma37Plan {
    std::vector<std::int64_t> window_radii;  // L_n, strictly increasing
    /// L_n = base^n (rounded), n = 1..terms.
    static Lemma37Plan geometric_windows(double base, unsigned terms);
};

struct Lemma37Result {
    /// Materialized only when the mixture support fits the budget.
    std::optional<FiniteMeasure> measure;
    double mixture_mass = 0.0;            // sum of t_n before normalization
    std::vector<double> bn_probabilities; // nu^{*n}(B_n), B_n = [-n, n], n = 1..n_check
    std::vector<double> bn_standard_errors;
    bool monte_carlo = false;
};

/// Truncated mixture nu = sum_{n<=terms} t_n * Uniform[-L_n, L_n] on Z,
/// normalized, with the diagnostic sequence nu^{*n}(B_n). Exact dense
/// convolution when the support allows, Monte Carlo otherwise.
Lemma37Result build_lemma37_measure_on_Z(const Lemma37Plan& plan, unsigned terms,
                                         unsigned n_check, std::uint64_t seed,
                                         unsigned partitions = 4,
                                         std::uint64_t samples_per_n = 200'000,
                                         std::uint64_t budget = kDefaultConvolutionBudget);

/// Additive character on F_m; Delta(g) = exp(chi(g)) is the associated
/// positive multiplicative character.
struct Character {
    std::vector<double> per_generator;  // chi(a_i)
    double chi(const Word& w) const;
    double delta(const Word& w) const;
    std::uint32_t rank() const { return static_cast<std::uint32_t>(per_generator.size()); }
};

/// nu_1 ~ H Delta^{1/2}, nu_2 ~ H Delta^{-1/2} with one common
/// normalizer (equal for both by symmetry of H), so that
/// nu_1(g)/nu_2(g) = Delta(g) exactly on the common support.
std::pair<FiniteMeasure, FiniteMeasure> paired_measures_for_character(const FiniteMeasure& H,
                                                                      const Character& chi);

}  // namespace meforge::groupmeasure
