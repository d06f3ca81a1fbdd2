#pragma once

// Brute-force reference implementations. Deliberately slow and simple; they
// share no code with the library beyond its value types.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Span = std::pair<double, double>;  // [start, end)

/// IoU by counting grid cells whose centre lies inside each interval.
double iou_grid(Span a, Span b, double resolution = 1e-3);

/// Covered gt cells over gt cells, same grid.
double coverage_grid(const std::vector<Span>& gt, const std::vector<Span>& pred, double resolution = 1e-3);

/// Closed-form IoU written independently of the library.
double iou_exact(Span a, Span b);

/// Size of the largest one-to-one assignment using only pairs with iou > 0 and
/// iou >= threshold. Tries every assignment; requires |preds|*|gts| <= 36.
std::size_t matching_exhaustive(const std::vector<Span>& preds, const std::vector<Span>& gts, double threshold);

/// Largest number of gt starts that can each be claimed by a distinct prediction
/// within `tolerance`. Exhaustive.
std::size_t hits_exhaustive(const std::vector<double>& preds, const std::vector<double>& gts, double tolerance);

/// Classic O(n*m) table.
std::size_t lcs_dp(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// F-measure from the DP LCS.
double rouge_l_dp(const std::vector<std::string>& ref, const std::vector<std::string>& cand);

/// Multiset intersection by sorting both sides.
std::size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b);

double token_f1_count(const std::vector<std::string>& ref, const std::vector<std::string>& cand);

}  // namespace oracle
