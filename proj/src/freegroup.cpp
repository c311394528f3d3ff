#include "meforge/freegroup.hpp"

#include <limits>
#include <stdexcept>

#include "meforge/errors.hpp"

namespace meforge::freegroup {

namespace {

void check_code(std::uint32_t rank, std::int32_t code) {
    std::uint32_t idx = static_cast<std::uint32_t>(code > 0 ? code : -code);
    if (code == 0 || idx > rank)
        throw std::out_of_range("letter index " + std::to_string(code) +
                                " out of range for rank " + std::to_string(rank));
}

}  // namespace

Word Word::reduce(std::uint32_t rank, const std::vector<std::int32_t>& codes) {
    Word w(rank);
    w.codes_.reserve(codes.size());
    for (std::int32_t c : codes) {
        check_code(rank, c);
        if (!w.codes_.empty() && w.codes_.back() == -c)
            w.codes_.pop_back();
        else
            w.codes_.push_back(c);
    }
    return w;
}

Word Word::from_letters(std::uint32_t rank, const std::vector<Letter>& letters) {
    std::vector<std::int32_t> codes;
    codes.reserve(letters.size());
    for (const Letter& l : letters) {
        if (l.sign != +1 && l.sign != -1) throw std::invalid_argument("letter sign must be +-1");
        codes.push_back(l.sign * static_cast<std::int32_t>(l.index));
    }
    return reduce(rank, codes);
}

Word Word::parse_key(std::uint32_t rank, const std::string& key) {
    if (key == "e") return Word(rank);
    std::vector<std::int32_t> codes;
    std::size_t pos = 0;
    while (pos < key.size()) {
        std::size_t dot = key.find('.', pos);
        if (dot == std::string::npos) dot = key.size();
        codes.push_back(std::stoi(key.substr(pos, dot - pos)));
        pos = dot + 1;
    }
    Word w = reduce(rank, codes);
    if (w.codes() != codes) throw std::invalid_argument("key is not freely reduced: " + key);
    return w;
}

std::string Word::key() const {
    if (codes_.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        if (i) out.push_back('.');
        out += std::to_string(codes_[i]);
    }
    return out;
}

std::string Word::packed_key() const {
    std::string out;
    out.reserve(4 * codes_.size());
    for (std::int32_t c : codes_) {
        std::uint32_t u = static_cast<std::uint32_t>(c);
        out.push_back(static_cast<char>(u & 0xff));
        out.push_back(static_cast<char>((u >> 8) & 0xff));
        out.push_back(static_cast<char>((u >> 16) & 0xff));
        out.push_back(static_cast<char>((u >> 24) & 0xff));
    }
    return out;
}

std::string Word::str() const {
    if (codes_.empty()) return "e";
    std::string out;
    for (std::int32_t c : codes_) {
        std::uint32_t idx = static_cast<std::uint32_t>(c > 0 ? c : -c);
        if (!out.empty()) out.push_back(' ');
        if (rank_ <= 26)
            out.push_back(static_cast<char>('a' + idx - 1));
        else
            out += "g" + std::to_string(idx);
        if (c < 0) out += "^-1";
    }
    return out;
}

Word multiply(const Word& g, const Word& h) {
    if (g.rank() != h.rank()) throw std::invalid_argument("rank mismatch in multiply");
    Word out = g;
    for (std::int32_t c : h.codes_) {
        if (!out.codes_.empty() && out.codes_.back() == -c)
            out.codes_.pop_back();
        else
            out.codes_.push_back(c);
    }
    return out;
}

Word inverse(const Word& g) {
    Word out(g.rank());
    out.codes_.reserve(g.length());
    for (auto it = g.codes_.rbegin(); it != g.codes_.rend(); ++it) out.codes_.push_back(-*it);
    return out;
}

std::uint64_t sphere_size(std::uint32_t k, std::uint32_t n) {
    if (k < 1) throw std::invalid_argument("rank must be >= 1");
    if (n == 0) return 1;
    unsigned __int128 acc = 2ULL * k;
    for (std::uint32_t i = 1; i < n; ++i) {
        acc *= (2ULL * k - 1);
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw std::overflow_error("sphere_size overflows 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t ball_size(std::uint32_t k, std::uint32_t n) {
    unsigned __int128 acc = 0;
    for (std::uint32_t i = 0; i <= n; ++i) {
        acc += sphere_size(k, i);
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw std::overflow_error("ball_size overflows 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

namespace {

void dfs_sphere(std::uint32_t k, std::uint32_t n, std::vector<std::int32_t>& stack,
                std::vector<Word>& out) {
    if (stack.size() == n) {
        out.push_back(Word::reduce(k, stack));
        return;
    }
    std::int32_t forbidden = stack.empty() ? 0 : -stack.back();
    for (std::uint32_t i = 1; i <= k; ++i) {
        for (std::int32_t s : {+1, -1}) {
            std::int32_t c = s * static_cast<std::int32_t>(i);
            if (c == forbidden) continue;
            stack.push_back(c);
            dfs_sphere(k, n, stack, out);
            stack.pop_back();
        }
    }
}

}  // namespace

std::vector<Word> enumerate_sphere(std::uint32_t k, std::uint32_t n, std::uint64_t budget) {
    std::uint64_t size = sphere_size(k, n);
    if (size > budget)
        throw BudgetExceeded("sphere of size " + std::to_string(size) + " exceeds budget " +
                             std::to_string(budget));
    std::vector<Word> out;
    out.reserve(size);
    std::vector<std::int32_t> stack;
    dfs_sphere(k, n, stack, out);
    return out;
}

std::vector<Word> enumerate_ball(std::uint32_t k, std::uint32_t n, std::uint64_t budget) {
    if (ball_size(k, n) > budget) throw BudgetExceeded("ball exceeds enumeration budget");
    std::vector<Word> out;
    for (std::uint32_t i = 0; i <= n; ++i) {
        std::vector<Word> sphere = enumerate_sphere(k, i, budget);
        out.insert(out.end(), sphere.begin(), sphere.end());
    }
    return out;
}

std::pair<Word, Word> gamma_subgroup_generators(int which) {
    if (which == 1)
        return {Word::reduce(2, {1, -2}), Word::reduce(2, {1, 1, -2, -2})};
    if (which == 2)
        return {Word::reduce(2, {-1, 2}), Word::reduce(2, {-1, -1, 2, 2})};
    throw std::invalid_argument("gamma subgroup selector must be 1 or 2");
}

std::vector<Word> subgroup_ball(const std::vector<Word>& generators, std::uint32_t radius,
                                std::uint64_t budget) {
    if (generators.empty()) throw std::invalid_argument("need at least one generator");
    std::uint32_t rank = generators.front().rank();
    // Alphabet: generators and inverses, codes +-(i+1) in the subgroup.
    std::vector<Word> alphabet;
    for (const Word& g : generators) {
        alphabet.push_back(g);
        alphabet.push_back(inverse(g));
    }
    std::vector<Word> out{Word::identity(rank)};
    // frontier holds (embedded word, last subgroup-letter code)
    std::vector<std::pair<Word, std::int32_t>> frontier{{Word::identity(rank), 0}};
    for (std::uint32_t r = 1; r <= radius; ++r) {
        std::vector<std::pair<Word, std::int32_t>> next;
        for (const auto& [w, last] : frontier) {
            for (std::size_t a = 0; a < alphabet.size(); ++a) {
                // alphabet index: 2i for gen i, 2i+1 for its inverse
                std::int32_t code = (a % 2 == 0) ? static_cast<std::int32_t>(a / 2 + 1)
                                                 : -static_cast<std::int32_t>(a / 2 + 1);
                if (code == -last) continue;
                next.emplace_back(multiply(w, alphabet[a]), code);
                if (out.size() + next.size() > budget)
                    throw BudgetExceeded("subgroup ball exceeds budget");
            }
        }
        for (const auto& [w, last] : next) out.push_back(w);
        frontier = std::move(next);
    }
    return out;
}

SubsetClass classify_subset(const WordSet& subset) {
    if (subset.empty()) throw std::invalid_argument("classify_subset: empty set");
    std::size_t max_len = 0;
    for (const Word& w : subset) max_len = std::max(max_len, w.length());
    if (max_len == 0) return SubsetClass::C1;  // subset == {e}
    for (const Word& w : subset)
        if (w.length() == max_len && w.first_code() < 0) return SubsetClass::C1;
    return SubsetClass::C2;
}

Word projection_pi(const Word& g, std::uint32_t k) {
    if (g.rank() < k) throw std::invalid_argument("projection_pi: word rank below target rank");
    std::vector<std::int32_t> kept;
    kept.reserve(g.length());
    for (std::int32_t c : g.codes()) {
        std::uint32_t idx = static_cast<std::uint32_t>(c > 0 ? c : -c);
        if (idx <= k) kept.push_back(c);
    }
    return Word::reduce(k, kept);
}

Word random_reduced_word(rng::Stream& stream, std::uint32_t rank, std::uint32_t length) {
    std::vector<std::int32_t> codes;
    codes.reserve(length);
    for (std::uint32_t i = 0; i < length; ++i) {
        std::int32_t forbidden = codes.empty() ? 0 : -codes.back();
        std::int32_t c;
        do {
            std::uint64_t r = stream.next_below(2ULL * rank);
            std::uint32_t idx = static_cast<std::uint32_t>(r / 2) + 1;
            c = (r % 2 == 0) ? static_cast<std::int32_t>(idx) : -static_cast<std::int32_t>(idx);
        } while (c == forbidden);
        codes.push_back(c);
    }
    return Word::reduce(rank, codes);
}

}  // namespace meforge::freegroup
