#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace oracle {

namespace {

bool inside(std::int64_t cell, double resolution, Span s) {
    const double centre = (static_cast<double>(cell) + 0.5) * resolution;
    return centre >= s.first && centre < s.second;
}

std::int64_t lo_cell(double t, double resolution) {
    return static_cast<std::int64_t>(std::floor(t / resolution)) - 1;
}

std::int64_t hi_cell(double t, double resolution) {
    return static_cast<std::int64_t>(std::ceil(t / resolution)) + 1;
}

double fmeasure(double overlap, std::size_t ref, std::size_t cand) {
    if (ref == 0 || cand == 0 || overlap == 0) return 0.0;
    const double p = overlap / static_cast<double>(cand);
    const double r = overlap / static_cast<double>(ref);
    return 2 * p * r / (p + r);
}

void assign(const std::vector<std::vector<bool>>& ok, std::size_t i, std::vector<bool>& used,
            std::size_t count, std::size_t& best) {
    if (i == ok.size()) {
        best = std::max(best, count);
        return;
    }
    if (count + (ok.size() - i) <= best) return;
    assign(ok, i + 1, used, count, best);
    for (std::size_t j = 0; j < used.size(); ++j) {
        if (!used[j] && ok[i][j]) {
            used[j] = true;
            assign(ok, i + 1, used, count + 1, best);
            used[j] = false;
        }
    }
}

std::size_t max_assignment(const std::vector<std::vector<bool>>& ok, std::size_t columns) {
    std::vector<bool> used(columns, false);
    std::size_t best = 0;
    assign(ok, 0, used, 0, best);
    return best;
}

}  // namespace

double iou_grid(Span a, Span b, double resolution) {
    const auto lo = lo_cell(std::min(a.first, b.first), resolution);
    const auto hi = hi_cell(std::max(a.second, b.second), resolution);
    std::int64_t inter = 0, uni = 0;
    for (auto c = lo; c <= hi; ++c) {
        const bool ia = inside(c, resolution, a), ib = inside(c, resolution, b);
        inter += ia && ib;
        uni += ia || ib;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double coverage_grid(const std::vector<Span>& gt, const std::vector<Span>& pred, double resolution) {
    if (gt.empty()) return 0.0;
    double lo_t = gt.front().first, hi_t = gt.front().second;
    for (const auto& s : gt) lo_t = std::min(lo_t, s.first), hi_t = std::max(hi_t, s.second);
    std::int64_t in_gt = 0, covered = 0;
    for (auto c = lo_cell(lo_t, resolution); c <= hi_cell(hi_t, resolution); ++c) {
        bool g = false, p = false;
        for (const auto& s : gt) g = g || inside(c, resolution, s);
        if (!g) continue;
        for (const auto& s : pred) p = p || inside(c, resolution, s);
        ++in_gt;
        covered += p;
    }
    return in_gt == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(in_gt);
}

double iou_exact(Span a, Span b) {
    double inter = std::min(a.second, b.second) - std::max(a.first, b.first);
    if (inter < 0) inter = 0;
    const double uni = (a.second - a.first) + (b.second - b.first) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::size_t matching_exhaustive(const std::vector<Span>& preds, const std::vector<Span>& gts, double threshold) {
    if (preds.size() * gts.size() > 36) throw std::invalid_argument("instance too large for exhaustive matching");
    std::vector<std::vector<bool>> ok(preds.size(), std::vector<bool>(gts.size()));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t j = 0; j < gts.size(); ++j) {
            const double v = iou_exact(preds[i], gts[j]);
            ok[i][j] = v > 0 && v + 1e-9 >= threshold;
        }
    }
    return max_assignment(ok, gts.size());
}

std::size_t hits_exhaustive(const std::vector<double>& preds, const std::vector<double>& gts, double tolerance) {
    std::vector<std::vector<bool>> ok(gts.size(), std::vector<bool>(preds.size()));
    for (std::size_t g = 0; g < gts.size(); ++g) {
        for (std::size_t p = 0; p < preds.size(); ++p) ok[g][p] = std::fabs(preds[p] - gts[g]) <= tolerance + 1e-9;
    }
    return max_assignment(ok, preds.size());
}

std::size_t lcs_dp(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
        }
    }
    return t[a.size()][b.size()];
}

double rouge_l_dp(const std::vector<std::string>& ref, const std::vector<std::string>& cand) {
    return fmeasure(static_cast<double>(lcs_dp(ref, cand)), ref.size(), cand.size());
}

std::size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0, n = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) ++n, ++i, ++j;
        else if (a[i] < b[j]) ++i;
        else ++j;
    }
    return n;
}

double token_f1_count(const std::vector<std::string>& ref, const std::vector<std::string>& cand) {
    return fmeasure(static_cast<double>(multiset_overlap(ref, cand)), ref.size(), cand.size());
}

}  // namespace oracle
