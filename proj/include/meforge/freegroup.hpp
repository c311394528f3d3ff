#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "meforge/rng.hpp"

namespace meforge::freegroup {

/// One letter of a word in F_k: a generator a_i or its inverse.
struct Letter {
    std::uint32_t index = 1;  // 1-based generator index
    int sign = +1;            // +1 or -1
};

constexpr std::uint64_t kDefaultEnumBudget = 10'000'000;

/// Freely reduced word in the free group F_rank. Immutable after
/// construction; all factories reduce their input. Letters are stored as
/// signed codes (+i for a_i, -i for a_i^{-1}), and the canonical key is
/// the length-prefixed letter sequence, which gives O(|g|) equality and a
/// run-independent total order.
class Word {
public:
    Word() = default;
    explicit Word(std::uint32_t rank) : rank_(rank) {}

    static Word identity(std::uint32_t rank) { return Word(rank); }

    /// Free reduction of an arbitrary letter-code sequence.
    static Word reduce(std::uint32_t rank, const std::vector<std::int32_t>& codes);
    static Word from_letters(std::uint32_t rank, const std::vector<Letter>& letters);

    /// Parses the textual canonical key ("e" or dot-joined signed codes,
    /// e.g. "1.-2.1" for a b^{-1} a).
    static Word parse_key(std::uint32_t rank, const std::string& key);

    std::uint32_t rank() const { return rank_; }
    std::size_t length() const { return codes_.size(); }
    bool is_identity() const { return codes_.empty(); }
    const std::vector<std::int32_t>& codes() const { return codes_; }

    Letter letter(std::size_t i) const {
        std::int32_t c = codes_[i];
        return Letter{static_cast<std::uint32_t>(c > 0 ? c : -c), c > 0 ? +1 : -1};
    }
    std::int32_t first_code() const { return codes_.front(); }
    std::int32_t last_code() const { return codes_.back(); }

    /// Canonical textual key, stable across runs and platforms.
    std::string key() const;

    /// Canonical binary key (little-endian 4-byte codes); PRF input.
    std::string packed_key() const;

    /// Human-readable form (a, b, c... for rank <= 26).
    std::string str() const;

    friend bool operator==(const Word& a, const Word& b) {
        return a.rank_ == b.rank_ && a.codes_ == b.codes_;
    }
    /// Length-first, then lexicographic on codes. Used as the canonical
    /// order for measure supports and set iteration.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
        if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
        if (auto c = a.codes_.size() <=> b.codes_.size(); c != 0) return c;
        for (std::size_t i = 0; i < a.codes_.size(); ++i)
            if (auto c = a.codes_[i] <=> b.codes_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    friend Word multiply(const Word&, const Word&);
    friend Word inverse(const Word&);

    std::vector<std::int32_t> codes_;
    std::uint32_t rank_ = 0;
};

Word multiply(const Word& g, const Word& h);
Word inverse(const Word& g);

/// Finite nonempty subsets of a free group (the paper's sets F and K).
using WordSet = std::set<Word>;

/// |{g : |g| = n}| in F_k: 1 for n = 0, else 2k(2k-1)^{n-1}.
std::uint64_t sphere_size(std::uint32_t k, std::uint32_t n);
std::uint64_t ball_size(std::uint32_t k, std::uint32_t n);

/// All reduced words of length exactly n, by depth-first search with
/// last-letter exclusion (no rejected candidates). Deterministic order.
std::vector<Word> enumerate_sphere(std::uint32_t k, std::uint32_t n,
                                   std::uint64_t budget = kDefaultEnumBudget);
std::vector<Word> enumerate_ball(std::uint32_t k, std::uint32_t n,
                                 std::uint64_t budget = kDefaultEnumBudget);

/// Generators of the free subgroups used in the strong-ergodicity
/// argument: which=1 gives (ab^{-1}, a^2 b^{-2}), which=2 gives
/// (a^{-1}b, a^{-2}b^2). Ambient rank 2.
std::pair<Word, Word> gamma_subgroup_generators(int which);

/// Words of subgroup-length <= radius over the given generators (and
/// their inverses), multiplied out in the ambient group. Enumeration is
/// reduced in the subgroup alphabet; the caller may check injectivity by
/// key distinctness.
std::vector<Word> subgroup_ball(const std::vector<Word>& generators, std::uint32_t radius,
                                std::uint64_t budget = kDefaultEnumBudget);

enum class SubsetClass { C1, C2 };

/// Partition of finite nonempty subsets of F_2: C1 holds {e} and every
/// set in which some maximal-length element starts with a negative
/// power; C2 holds the rest.
SubsetClass classify_subset(const WordSet& subset);

/// Natural projection F_m -> F_k (m >= k) deleting generators above k.
Word projection_pi(const Word& g, std::uint32_t k);

/// Uniformly random reduced word of the given length (deterministic in
/// the stream state).
Word random_reduced_word(rng::Stream& stream, std::uint32_t rank, std::uint32_t length);

}  // namespace meforge::freegroup
