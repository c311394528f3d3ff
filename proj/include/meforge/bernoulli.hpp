#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meforge/groupmeasure.hpp"

namespace meforge::bernoulli {

using freegroup::Word;
using groupmeasure::FiniteMeasure;

/// Finite base space (X_0, mu_0): points 0..n-1 with positive weights.
struct FiniteBase {
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
    static FiniteBase uniform(std::size_t n);
    static FiniteBase from_weights(std::vector<double> w);  // validates, normalizes
};

/// Group-valued product base X_0 = G^m. Coordinate c carries the measure
/// coords[label-1][c]; the two labels differ only where a nonsingular
/// construction needs them to (same supports coordinate-wise).
struct ProductBase {
    std::array<std::vector<FiniteMeasure>, 2> coords;
    explicit ProductBase(std::vector<FiniteMeasure> shared);
    ProductBase(std::vector<FiniteMeasure> label1, std::vector<FiniteMeasure> label2);
    std::size_t arity() const { return coords[0].size(); }
};

using ProductPoint = std::vector<Word>;

/// Site-label rule of the nonsingular construction: label 1 iff the
/// reduced word ends with a positive power of the extra generator,
/// label 2 otherwise (including e).
int ending_rule(const Word& h, std::uint32_t extra_generator_index);

struct SiteAssignment {
    std::uint32_t extra_generator_index;
    int label(const Word& h) const { return ending_rule(h, extra_generator_index); }
};

/// A point of the Bernoulli space X_0^Gamma, realized lazily: coordinate
/// h is a pure function of (seed, offset * h). The action g.x replaces
/// the offset w by w g^{-1}, so that (g.x)_h = x_{g^{-1} h}.
struct LazyConfig {
    std::uint64_t seed = 0;
    Word offset;
    LazyConfig shifted(const Word& g) const {
        return LazyConfig{seed, freegroup::multiply(offset, freegroup::inverse(g))};
    }
};

/// Deterministic coordinate sampling. The reference law of a site is
/// always taken at its absolute label (of offset * h).
int sample_point(const FiniteBase& base, std::uint64_t seed, const Word& absolute_site);
ProductPoint sample_point(const ProductBase& base, int label, std::uint64_t seed,
                          const Word& absolute_site);

int coordinate(const LazyConfig& x, const Word& h, const FiniteBase& base);
ProductPoint coordinate(const LazyConfig& x, const Word& h, const ProductBase& base,
                        const SiteAssignment* assignment = nullptr);

/// The coordinates read by a cocycle evaluation along g, one per letter,
/// in evaluation order (letter j of g = s_1...s_m reads the site
/// (s_{j+1}...s_m)^{-1}, shifted by one letter for inverse letters).
/// Two adjacent reads coincide exactly at a +- sign adjacency, where the
/// evaluation uses independent generator maps at the shared site.
std::vector<Word> depends_set(const Word& g);

/// Generator maps phi_i for a group-valued cocycle: either a lookup
/// table over a finite base, or the coordinate projections phi_i(x) = x_i
/// over a product base.
class GroupCocycleSpec {
public:
    static GroupCocycleSpec from_table(std::uint32_t rank, groupmeasure::GroupDescriptor target,
                                       std::vector<std::vector<Word>> table);
    static GroupCocycleSpec coordinate_projection(std::uint32_t rank,
                                                  groupmeasure::GroupDescriptor target);

    std::uint32_t rank() const { return rank_; }
    groupmeasure::GroupDescriptor target() const { return target_; }
    bool is_projection() const { return projection_; }

    Word phi(std::uint32_t i, int base_point) const;           // table mode
    Word phi(std::uint32_t i, const ProductPoint& point) const;  // projection mode

    /// Table serialization (finite base spaces): base point -> target word.
    std::string serialize() const;
    static GroupCocycleSpec parse(const std::string& text);

private:
    std::uint32_t rank_ = 0;
    groupmeasure::GroupDescriptor target_;
    bool projection_ = false;
    std::vector<std::vector<Word>> table_;
};

/// Generator maps with values in U(C^d) over a finite base.
class UnitaryCocycleSpec {
public:
    UnitaryCocycleSpec(std::uint32_t rank, std::vector<std::vector<Eigen::MatrixXcd>> table);
    std::uint32_t rank() const { return rank_; }
    int dim() const { return dim_; }
    std::size_t base_size() const { return table_.front().size(); }
    const Eigen::MatrixXcd& phi(std::uint32_t i, int base_point) const {
        return table_[i - 1][static_cast<std::size_t>(base_point)];
    }

    std::string serialize() const;
    static UnitaryCocycleSpec parse(const std::string& text);

private:
    std::uint32_t rank_ = 0;
    int dim_ = 0;
    std::vector<std::vector<Eigen::MatrixXcd>> table_;
};

/// Evaluation of the canonical 1-cocycle alpha(a_i, x) = phi_i(x_e),
/// unfolded letter by letter with alpha(a_i^{-1}, x) = phi_i(x_{a_i})^{-1}.
Word eval_cocycle(const GroupCocycleSpec& spec, const Word& g, const LazyConfig& x,
                  const FiniteBase& base);
Word eval_cocycle(const GroupCocycleSpec& spec, const Word& g, const LazyConfig& x,
                  const ProductBase& base, const SiteAssignment* assignment = nullptr);
/// Exact-enumeration variant: coordinates supplied explicitly.
Word eval_cocycle(const GroupCocycleSpec& spec, const Word& g,
                  const std::map<Word, int>& assignment);
Eigen::MatrixXcd eval_cocycle(const UnitaryCocycleSpec& spec, const Word& g,
                              const LazyConfig& x, const FiniteBase& base);
Eigen::MatrixXcd eval_cocycle(const UnitaryCocycleSpec& spec, const Word& g,
                              const std::map<Word, int>& assignment);

/// Log Radon-Nikodym cocycle of the nonsingular Bernoulli action with
/// per-site measures mu_{label(h)}:
///   omega(g, x) = sum_h log( mu_{label(gh)}(x_h) / mu_{label(h)}(x_h) ),
/// summed over the finitely many sites with label(gh) != label(h) (all
/// inverses of suffixes of g). Satisfies
/// omega(gh, x) = omega(g, h.x) + omega(h, x).
double rn_cocycle(const SiteAssignment& assignment, const ProductBase& base, const Word& g,
                  const LazyConfig& x);

/// The toy wiring of the associated-flow construction: Gamma = F_{k+3}
/// acting on (G^{k+3})^Gamma with coordinate-projection generator maps,
/// last coordinate carrying nu_1/nu_2 by the ending rule of the extra
/// generator, nu_0 on the kernel of the character elsewhere.
struct Thm42System {
    std::uint32_t k = 1;  // Lambda_1 rank; acting group has rank k + 3
    GroupCocycleSpec spec;
    SiteAssignment assignment;
    ProductBase base;
    groupmeasure::Character chi;

    double omega(const Word& g, const LazyConfig& x) const;
    double log_delta_alpha(const Word& g, const LazyConfig& x) const;
    /// omega(g, x) - log Delta(alpha(g, x)); zero for the faithful wiring.
    double key_identity_gap(const Word& g, const LazyConfig& x) const;
};

Thm42System thm42_wiring(std::uint32_t k, const groupmeasure::Character& chi,
                         const FiniteMeasure& nu0, const FiniteMeasure& H);

}  // namespace meforge::bernoulli
