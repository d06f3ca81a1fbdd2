#pragma once

#include "procassess/matching.hpp"
#include "procassess/temporal.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

/// Normalized caption tokens. Only `normalize` produces values of this type.
class TokenSequence {
public:
    TokenSequence() = default;

    [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
    [[nodiscard]] bool empty() const noexcept { return tokens_.empty(); }

    friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
    friend TokenSequence normalize(std::string_view text);

private:
    std::vector<std::string> tokens_;
};

/// Lowercase ASCII, turn every byte that is not a letter or digit into a
/// space, split on whitespace. Bytes >= 0x80 (UTF-8 sequences) count as letters.
[[nodiscard]] TokenSequence normalize(std::string_view text);

/// Longest common subsequence length, computed with a word-parallel bit-vector scan.
[[nodiscard]] std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

/// ROUGE-L F-measure with beta = 1.
[[nodiscard]] double rouge_l(const TokenSequence& reference, const TokenSequence& candidate);

/// Bag-of-words F1 using multiset intersection.
[[nodiscard]] double token_f1(const TokenSequence& reference, const TokenSequence& candidate);

struct CaptionScore {
    double rouge_l = 0.0;
    double token_f1 = 0.0;
};

/// Running sums over matched pairs; `mean()` is zeros when nothing was added.
class CaptionTally {
public:
    void add(std::string_view reference, std::string_view candidate);
    void merge(const CaptionTally& other);

    [[nodiscard]] std::size_t pairs() const noexcept { return pairs_; }
    [[nodiscard]] CaptionScore mean() const;

private:
    double rouge_sum_ = 0.0;
    double f1_sum_ = 0.0;
    std::size_t pairs_ = 0;
};

/// Mean caption scores over the matched pairs only; unmatched segments are ignored.
[[nodiscard]] CaptionScore score_matched_captions(const MatchResult& matches,
                                                  std::span<const ActionSegment> pred_segments,
                                                  std::span<const ActionSegment> gt_segments);

}  // namespace procassess
