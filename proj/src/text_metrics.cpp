#include "procassess/text_metrics.hpp"

#include "procassess/errors.hpp"

#include <bit>
#include <cstdint>
#include <unordered_map>

namespace procassess {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

double f_measure(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

}  // namespace

TokenSequence normalize(std::string_view text) {
    TokenSequence out;
    std::string current;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                                   : static_cast<char>(c));
        } else if (!current.empty()) {
            out.tokens_.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.tokens_.push_back(std::move(current));
    return out;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
    const auto& rows = a.tokens();
    const auto& cols = b.tokens();
    if (rows.empty() || cols.empty()) return 0;

    const std::size_t m = rows.size();
    const std::size_t words = (m + 63) / 64;

    // Position bitmask of every token of `a`.
    std::unordered_map<std::string_view, std::vector<std::uint64_t>> masks;
    for (std::size_t i = 0; i < m; ++i) {
        auto& mask = masks[rows[i]];
        if (mask.empty()) mask.assign(words, 0);
        mask[i / 64] |= std::uint64_t{1} << (i % 64);
    }

    // V' = (V + (V & M)) | (V & ~M); zero bits of V count LCS matches.
    std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
    for (const auto& token : cols) {
        const auto it = masks.find(token);
        if (it == masks.end()) continue;
        const auto& mask = it->second;
        std::uint64_t carry = 0;
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t u = v[w] & mask[w];
            const std::uint64_t keep = v[w] & ~mask[w];
            const std::uint64_t partial = v[w] + u;
            const std::uint64_t c1 = partial < v[w] ? 1 : 0;
            const std::uint64_t sum = partial + carry;
            const std::uint64_t c2 = sum < partial ? 1 : 0;
            carry = c1 | c2;
            v[w] = sum | keep;
        }
    }

    std::size_t zeros = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t word = ~v[w];
        if (w + 1 == words && m % 64 != 0) word &= (std::uint64_t{1} << (m % 64)) - 1;
        zeros += static_cast<std::size_t>(std::popcount(word));
    }
    return zeros;
}

double rouge_l(const TokenSequence& reference, const TokenSequence& candidate) {
    if (reference.empty() || candidate.empty()) return 0.0;
    const auto l = static_cast<double>(lcs_length(reference, candidate));
    return f_measure(l / static_cast<double>(candidate.size()),
                     l / static_cast<double>(reference.size()));
}

double token_f1(const TokenSequence& reference, const TokenSequence& candidate) {
    if (reference.empty() || candidate.empty()) return 0.0;
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& t : reference.tokens()) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : candidate.tokens()) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const auto o = static_cast<double>(overlap);
    return f_measure(o / static_cast<double>(candidate.size()),
                     o / static_cast<double>(reference.size()));
}

void CaptionTally::add(std::string_view reference, std::string_view candidate) {
    const auto ref = normalize(reference);
    const auto cand = normalize(candidate);
    rouge_sum_ += rouge_l(ref, cand);
    f1_sum_ += token_f1(ref, cand);
    ++pairs_;
}

void CaptionTally::merge(const CaptionTally& other) {
    rouge_sum_ += other.rouge_sum_;
    f1_sum_ += other.f1_sum_;
    pairs_ += other.pairs_;
}

CaptionScore CaptionTally::mean() const {
    if (pairs_ == 0) return {};
    const auto n = static_cast<double>(pairs_);
    return {rouge_sum_ / n, f1_sum_ / n};
}

CaptionScore score_matched_captions(const MatchResult& matches,
                                    std::span<const ActionSegment> pred_segments,
                                    std::span<const ActionSegment> gt_segments) {
    CaptionTally tally;
    for (const auto& pair : matches.pairs) {
        if (pair.pred_index >= pred_segments.size() || pair.gt_index >= gt_segments.size()) {
            throw InvalidArgument("match result does not belong to these segment lists");
        }
        tally.add(gt_segments[pair.gt_index].caption(), pred_segments[pair.pred_index].caption());
    }
    return tally.mean();
}

}  // namespace procassess
