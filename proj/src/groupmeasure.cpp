#include "meforge/groupmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "meforge/errors.hpp"
#include "meforge/rng.hpp"

namespace meforge::groupmeasure {

namespace {

std::string format_hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

double parse_hex(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

Word z_point(std::int64_t j) {
    std::vector<std::int32_t> codes(static_cast<std::size_t>(j < 0 ? -j : j), j < 0 ? -1 : 1);
    return Word::reduce(1, codes);
}

std::int64_t z_value(const Word& w) {
    std::int64_t v = 0;
    for (std::int32_t c : w.codes()) v += (c > 0) ? 1 : -1;
    return v;
}

FiniteMeasure FiniteMeasure::from_weights(GroupDescriptor group, const Map& weights) {
    rng::KahanSum total;
    for (const auto& [w, p] : weights) {
        if (p < 0.0) throw std::invalid_argument("negative weight");
        if (w.rank() != group.rank) throw std::invalid_argument("word rank != group rank");
        total.add(p);
    }
    if (total.value() <= 0) throw std::invalid_argument("measure has no mass");
    Map out;
    for (const auto& [w, p] : weights)
        if (p > 0) out.emplace(w, p / total.value());
    return FiniteMeasure(group, std::move(out));
}

FiniteMeasure FiniteMeasure::point_mass(GroupDescriptor group, const Word& w) {
    return from_weights(group, Map{{w, 1.0}});
}

FiniteMeasure FiniteMeasure::uniform_on(GroupDescriptor group, const std::vector<Word>& words) {
    if (words.empty()) throw std::invalid_argument("uniform_on: empty support");
    Map m;
    for (const Word& w : words) m[w] += 1.0;
    return from_weights(group, m);
}

FiniteMeasure FiniteMeasure::simple_walk(std::uint32_t k) {
    std::vector<Word> gens;
    for (std::uint32_t i = 1; i <= k; ++i) {
        gens.push_back(Word::reduce(k, {static_cast<std::int32_t>(i)}));
        gens.push_back(Word::reduce(k, {-static_cast<std::int32_t>(i)}));
    }
    return uniform_on(GroupDescriptor{k}, gens);
}

FiniteMeasure FiniteMeasure::uniform_window_on_Z(std::int64_t radius) {
    if (radius < 0) throw std::invalid_argument("window radius must be >= 0");
    std::vector<Word> pts;
    for (std::int64_t j = -radius; j <= radius; ++j) pts.push_back(z_point(j));
    return uniform_on(integers(), pts);
}

double FiniteMeasure::weight(const Word& w) const {
    auto it = weights_.find(w);
    return it == weights_.end() ? 0.0 : it->second;
}

double FiniteMeasure::mass(const WordSet& set) const {
    rng::KahanSum s;
    for (const Word& w : set) s.add(weight(w));
    return s.value();
}

double FiniteMeasure::total() const {
    rng::KahanSum s;
    for (const auto& [w, p] : weights_) s.add(p);
    return s.value();
}

bool FiniteMeasure::is_symmetric(double tol) const {
    for (const auto& [w, p] : weights_)
        if (std::abs(weight(freegroup::inverse(w)) - p) > tol) return false;
    return true;
}

const Word& FiniteMeasure::sample(double u) const {
    double cum = 0.0;
    for (const auto& [w, p] : weights_) {
        cum += p;
        if (u < cum) return w;
    }
    return weights_.rbegin()->first;
}

std::string FiniteMeasure::serialize() const {
    std::ostringstream os;
    os << "meforge-measure v1\n";
    os << "group free " << group_.rank << "\n";
    os << "entries " << weights_.size() << "\n";
    for (const auto& [w, p] : weights_) os << w.key() << " " << format_hex(p) << "\n";
    os << "end\n";
    return os.str();
}

FiniteMeasure FiniteMeasure::parse(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "meforge-measure v1")
        throw std::invalid_argument("bad measure header");
    std::string tag, kind;
    std::uint32_t rank = 0;
    std::size_t n = 0;
    is >> tag >> kind >> rank;
    if (tag != "group" || kind != "free") throw std::invalid_argument("bad group descriptor");
    is >> tag >> n;
    if (tag != "entries") throw std::invalid_argument("bad entries count");
    Map m;
    for (std::size_t i = 0; i < n; ++i) {
        std::string key, weight;
        is >> key >> weight;
        m.emplace(Word::parse_key(rank, key), parse_hex(weight));
    }
    is >> tag;
    if (tag != "end") throw std::invalid_argument("missing end marker");
    rng::KahanSum total;
    for (const auto& [w, p] : m) total.add(p);
    if (std::abs(total.value() - 1.0) > 1e-9)
        throw std::invalid_argument("parsed measure mass differs from 1");
    return FiniteMeasure(GroupDescriptor{rank}, std::move(m));
}

FiniteMeasure convolve(const FiniteMeasure& mu, const FiniteMeasure& nu, std::uint64_t budget) {
    if (!(mu.group() == nu.group())) throw std::invalid_argument("group mismatch in convolve");
    std::uint64_t pairs =
        static_cast<std::uint64_t>(mu.support_size()) * static_cast<std::uint64_t>(nu.support_size());
    if (pairs > budget)
        throw BudgetExceeded("convolution with " + std::to_string(pairs) + " support pairs");
    FiniteMeasure::Map out;
    for (const auto& [g, p] : mu.entries())
        for (const auto& [h, q] : nu.entries()) out[freegroup::multiply(g, h)] += p * q;
    return FiniteMeasure::from_weights(mu.group(), out);
}

FiniteMeasure convolution_power(const FiniteMeasure& nu, unsigned m, std::uint64_t budget) {
    FiniteMeasure acc = FiniteMeasure::point_mass(nu.group(), Word::identity(nu.group().rank));
    for (unsigned i = 0; i < m; ++i) acc = convolve(acc, nu, budget);
    return acc;
}

bool is_isotropic_simple_walk(const FiniteMeasure& nu) {
    std::uint32_t k = nu.group().rank;
    if (nu.support_size() != 2ULL * k) return false;
    double expected = 1.0 / (2.0 * k);
    for (const auto& [w, p] : nu.entries())
        if (w.length() != 1 || std::abs(p - expected) > 1e-12) return false;
    return true;
}

std::vector<std::vector<double>> radial_distance_distributions(std::uint32_t k, unsigned n_max) {
    double in = 1.0 / (2.0 * k);
    double out = (2.0 * k - 1.0) / (2.0 * k);
    std::vector<std::vector<double>> rows;
    rows.reserve(n_max + 1);
    rows.push_back({1.0});
    for (unsigned m = 1; m <= n_max; ++m) {
        const std::vector<double>& prev = rows.back();
        std::vector<double> next(m + 1, 0.0);
        for (std::size_t d = 0; d < prev.size(); ++d) {
            double p = prev[d];
            if (p == 0.0) continue;
            if (d == 0) {
                next[1] += p;  // from the root every step is outward
            } else {
                next[d + 1] += p * out;
                next[d - 1] += p * in;
            }
        }
        rows.push_back(std::move(next));
    }
    return rows;
}

double return_probability(const FiniteMeasure& nu, unsigned m, std::uint64_t budget) {
    if (is_isotropic_simple_walk(nu))
        return radial_distance_distributions(nu.group().rank, m)[m][0];
    return convolution_power(nu, m, budget).weight(Word::identity(nu.group().rank));
}

double kesten_simple_walk_norm(std::uint32_t k) {
    return std::sqrt(2.0 * k - 1.0) / static_cast<double>(k);
}

double certified_norm_upper_bound(const FiniteMeasure& nu, unsigned m, std::uint64_t budget) {
    if (m == 0) throw std::invalid_argument("need m >= 1");
    double bound = 1.0;  // l^1 bound for a probability measure
    if (nu.group().rank >= 2) {
        FiniteMeasure power = convolution_power(nu, m, budget);
        std::map<std::size_t, double> sq_by_length;
        for (const auto& [w, p] : power.entries()) sq_by_length[w.length()] += p * p;
        rng::KahanSum haagerup;
        for (const auto& [n, sq] : sq_by_length)
            haagerup.add(static_cast<double>(n + 1) * std::sqrt(sq));
        bound = std::min(bound, std::pow(haagerup.value(), 1.0 / m));
    }
    return bound;
}

SpectralEstimate spectral_radius_estimate(const FiniteMeasure& nu, unsigned n_max,
                                          unsigned upper_bound_power, std::uint64_t budget) {
    if (!nu.is_symmetric()) throw std::invalid_argument("spectral_radius_estimate: asymmetric measure");
    SpectralEstimate est;
    if (is_isotropic_simple_walk(nu)) {
        auto rows = radial_distance_distributions(nu.group().rank, 2 * n_max);
        for (unsigned n = 1; n <= n_max; ++n) {
            double p = rows[2 * n][0];
            if (p <= 0.0) continue;
            double v = std::pow(p, 1.0 / (2.0 * n));
            if (v > est.lower_bound) {
                est.lower_bound = v;
                est.n_used = n;
            }
        }
        est.methods.push_back("kesten-return-lower(radial-dp)");
    } else {
        // nu^{*2n}(e) = ||nu^{*n}||_2^2 for symmetric nu.
        FiniteMeasure power = nu;
        for (unsigned n = 1; n <= n_max; ++n) {
            rng::KahanSum sq;
            for (const auto& [w, p] : power.entries()) sq.add(p * p);
            double v = std::pow(sq.value(), 1.0 / (2.0 * n));
            if (v > est.lower_bound) {
                est.lower_bound = v;
                est.n_used = n;
            }
            if (n == n_max) break;
            try {
                power = convolve(power, nu, budget);
            } catch (const BudgetExceeded&) {
                break;
            }
        }
        est.methods.push_back("kesten-return-lower(sparse)");
    }
    est.upper_bound = 1.0;
    est.methods.push_back("l1");
    if (nu.group().rank >= 2) {
        try {
            double h = certified_norm_upper_bound(nu, upper_bound_power, budget);
            if (h < est.upper_bound) {
                est.upper_bound = h;
                est.methods.push_back("haagerup(m=" + std::to_string(upper_bound_power) + ")");
            }
        } catch (const BudgetExceeded&) {
            // keep the l^1 bound
        }
    }
    est.lower_bound = std::min(est.lower_bound, est.upper_bound);
    return est;
}

unsigned min_convolution_power_below(double rho_hat, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw std::invalid_argument("threshold must lie in (0, 1)");
    if (rho_hat >= 1.0)
        throw std::domain_error("gate unreachable: certified spectral bound is not below 1");
    if (rho_hat < 0.0) throw std::invalid_argument("negative spectral bound");
    unsigned m = 1;
    double p = rho_hat;
    while (p >= threshold) {
        ++m;
        p *= rho_hat;
    }
    return m;
}

TransienceSums transience_partial_sums(const FiniteMeasure& nu, const WordSet& K, unsigned N,
                                       std::uint64_t budget, std::uint64_t seed,
                                       unsigned partitions, std::uint64_t samples) {
    if (K.empty()) throw std::invalid_argument("transience_partial_sums: empty K");
    TransienceSums out;
    out.partial_sums.reserve(N);
    if (is_isotropic_simple_walk(nu)) {
        std::uint32_t k = nu.group().rank;
        std::size_t max_d = 0;
        for (const Word& w : K) max_d = std::max(max_d, w.length());
        auto rows = radial_distance_distributions(k, N);
        std::vector<double> sphere_inv(max_d + 1);
        for (std::size_t d = 0; d <= max_d; ++d)
            sphere_inv[d] = 1.0 / static_cast<double>(sphere_size(k, static_cast<std::uint32_t>(d)));
        rng::KahanSum acc;
        for (unsigned n = 1; n <= N; ++n) {
            double pn = 0.0;
            for (const Word& w : K) {
                std::size_t d = w.length();
                if (d < rows[n].size()) pn += rows[n][d] * sphere_inv[d];
            }
            acc.add(pn);
            out.partial_sums.push_back(acc.value());
        }
        out.standard_errors.assign(N, 0.0);
        return out;
    }
    // Sparse convolution while the budget holds.
    try {
        FiniteMeasure power = FiniteMeasure::point_mass(nu.group(), Word::identity(nu.group().rank));
        rng::KahanSum acc;
        for (unsigned n = 1; n <= N; ++n) {
            power = convolve(power, nu, budget);
            acc.add(power.mass(K));
            out.partial_sums.push_back(acc.value());
        }
        out.standard_errors.assign(N, 0.0);
        return out;
    } catch (const BudgetExceeded&) {
        out.partial_sums.clear();
    }
    // Monte Carlo fallback: one walk of length N per sample; the partial
    // sum estimator is the mean cumulative visit count.
    out.monte_carlo = true;
    std::vector<double> sum(N + 1, 0.0), sumsq(N + 1, 0.0);
    std::uint64_t done = 0;
    for (unsigned part = 0; part < partitions; ++part) {
        std::uint64_t quota = samples / partitions + (part < samples % partitions ? 1 : 0);
        rng::Stream stream(rng::sub_seed(seed, part));
        for (std::uint64_t s = 0; s < quota; ++s) {
            Word pos = Word::identity(nu.group().rank);
            unsigned visits = 0;
            for (unsigned n = 1; n <= N; ++n) {
                pos = freegroup::multiply(pos, nu.sample(stream.next_unit()));
                if (K.count(pos)) ++visits;
                sum[n] += visits;
                sumsq[n] += static_cast<double>(visits) * visits;
            }
        }
        done += quota;
    }
    for (unsigned n = 1; n <= N; ++n) {
        double mean = sum[n] / static_cast<double>(done);
        double var = sumsq[n] / static_cast<double>(done) - mean * mean;
        out.partial_sums.push_back(mean);
        out.standard_errors.push_back(std::sqrt(std::max(0.0, var) / static_cast<double>(done)));
    }
    return out;
}

double lemma37_t(unsigned n) {
    if (n == 0) throw std::invalid_argument("lemma37_t: n >= 1");
    if (n <= 3) return std::pow(3.0, -5.0 / 3.0);
    return std::pow(static_cast<double>(n), -2.0 / n) -
           std::pow(static_cast<double>(n - 1), -2.0 / (n - 1));
}

double lemma37_eps(unsigned n) {
    if (n == 0) throw std::invalid_argument("lemma37_eps: n >= 1");
    if (n <= 2) return 1.0;
    return 1.0 / (static_cast<double>(n) * n);
}

Lemma37Plan Lemma37Plan::geometric_windows(double base, unsigned terms) {
    if (base <= 1.0) throw std::invalid_argument("window base must exceed 1");
    Lemma37Plan plan;
    double L = 1.0;
    for (unsigned n = 1; n <= terms; ++n) {
        L *= base;
        plan.window_radii.push_back(static_cast<std::int64_t>(L));
    }
    return plan;
}

namespace {

// Dense symmetric pmf on [-R, R] as a vector of length 2R+1.
std::vector<double> dense_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

Lemma37Result build_lemma37_measure_on_Z(const Lemma37Plan& plan, unsigned terms, unsigned n_check,
                                         std::uint64_t seed, unsigned partitions,
                                         std::uint64_t samples_per_n, std::uint64_t budget) {
    if (terms == 0 || terms > plan.window_radii.size())
        throw std::invalid_argument("terms out of range for plan");
    for (unsigned n = 1; n < terms; ++n)
        if (plan.window_radii[n] <= plan.window_radii[n - 1])
            throw std::invalid_argument("non-monotone windows");
    if (plan.window_radii.front() < 1) throw std::invalid_argument("windows must be >= 1");

    Lemma37Result result;
    std::vector<double> t(terms);
    rng::KahanSum mass;
    for (unsigned n = 1; n <= terms; ++n) {
        t[n - 1] = lemma37_t(n);
        mass.add(t[n - 1]);
    }
    result.mixture_mass = mass.value();

    std::int64_t max_L = plan.window_radii[terms - 1];
    bool materialize = (2 * max_L + 1) <= static_cast<std::int64_t>(budget) && max_L <= 100'000;
    std::vector<double> dense;
    if (materialize) {
        dense.assign(static_cast<std::size_t>(2 * max_L + 1), 0.0);
        for (unsigned n = 1; n <= terms; ++n) {
            std::int64_t L = plan.window_radii[n - 1];
            double w = (t[n - 1] / result.mixture_mass) / static_cast<double>(2 * L + 1);
            for (std::int64_t j = -L; j <= L; ++j) dense[static_cast<std::size_t>(j + max_L)] += w;
        }
        FiniteMeasure::Map m;
        for (std::int64_t j = -max_L; j <= max_L; ++j)
            m.emplace(z_point(j), dense[static_cast<std::size_t>(j + max_L)]);
        result.measure = FiniteMeasure::from_weights(integers(), m);
    }

    // Diagnostics nu^{*n}([-n, n]). Exact dense convolution when the
    // supports stay small, seeded Monte Carlo otherwise.
    std::uint64_t exact_work = 0;
    if (materialize) {
        std::uint64_t w = static_cast<std::uint64_t>(2 * max_L + 1);
        for (unsigned n = 2; n <= n_check; ++n)
            exact_work += w * (2ULL * (n - 1) * static_cast<std::uint64_t>(max_L) + 1);
    }
    if (materialize && exact_work <= 50ULL * budget) {
        std::vector<double> power = dense;
        for (unsigned n = 1; n <= n_check; ++n) {
            if (n > 1) power = dense_convolve(power, dense);
            std::int64_t R = static_cast<std::int64_t>(power.size() / 2);
            rng::KahanSum in_window;
            for (std::int64_t j = -static_cast<std::int64_t>(n); j <= static_cast<std::int64_t>(n); ++j)
                if (std::llabs(j) <= R) in_window.add(power[static_cast<std::size_t>(j + R)]);
            result.bn_probabilities.push_back(in_window.value());
            result.bn_standard_errors.push_back(0.0);
        }
        return result;
    }

    result.monte_carlo = true;
    std::vector<double> t_cdf(terms);
    double cum = 0.0;
    for (unsigned n = 0; n < terms; ++n) {
        cum += t[n] / result.mixture_mass;
        t_cdf[n] = cum;
    }
    for (unsigned n = 1; n <= n_check; ++n) {
        std::uint64_t hits = 0, done = 0;
        for (unsigned part = 0; part < partitions; ++part) {
            std::uint64_t quota =
                samples_per_n / partitions + (part < samples_per_n % partitions ? 1 : 0);
            rng::Stream stream(rng::sub_seed(seed ^ (0x5b3fULL * n), part));
            for (std::uint64_t s = 0; s < quota; ++s) {
                std::int64_t pos = 0;
                for (unsigned step = 0; step < n; ++step) {
                    double u = stream.next_unit();
                    unsigned c = 0;
                    while (c + 1 < terms && u >= t_cdf[c]) ++c;
                    std::int64_t L = plan.window_radii[c];
                    pos += static_cast<std::int64_t>(stream.next_below(2 * L + 1)) - L;
                }
                if (std::llabs(pos) <= static_cast<std::int64_t>(n)) ++hits;
            }
            done += quota;
        }
        double p = static_cast<double>(hits) / static_cast<double>(done);
        result.bn_probabilities.push_back(p);
        result.bn_standard_errors.push_back(
            std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(done)));
    }
    return result;
}

double Character::chi(const Word& w) const {
    if (w.rank() != rank()) throw std::invalid_argument("character rank mismatch");
    double v = 0.0;
    for (std::int32_t c : w.codes()) {
        std::uint32_t idx = static_cast<std::uint32_t>(c > 0 ? c : -c);
        v += (c > 0 ? 1.0 : -1.0) * per_generator[idx - 1];
    }
    return v;
}

double Character::delta(const Word& w) const { return std::exp(chi(w)); }

std::pair<FiniteMeasure, FiniteMeasure> paired_measures_for_character(const FiniteMeasure& H,
                                                                      const Character& chi) {
    if (H.group().rank != chi.rank())
        throw std::invalid_argument("character rank != measure group rank");
    if (!H.is_symmetric()) throw std::invalid_argument("paired measures need symmetric H");
    rng::KahanSum z;
    for (const auto& [g, h] : H.entries()) z.add(h * std::exp(0.5 * chi.chi(g)));
    double Z = z.value();
    FiniteMeasure::Map m1, m2;
    for (const auto& [g, h] : H.entries()) {
        double half = std::exp(0.5 * chi.chi(g));
        m1.emplace(g, h * half / Z);
        m2.emplace(g, h / (half * Z));
    }
    // One common normalizer: by symmetry of H and antisymmetry of chi the
    // two total masses agree, so both are probability measures.
    return {FiniteMeasure::from_weights(H.group(), m1), FiniteMeasure::from_weights(H.group(), m2)};
}

}  // namespace meforge::groupmeasure
