#include "procassess/matching.hpp"
#include "procassess/temporal.hpp"
#include "procassess/text_metrics.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace procassess;
using nlohmann::json;

namespace {

json load_cases() {
    return json::parse(testutil::slurp(std::filesystem::path(PROCASSESS_FIXTURES) / "oracle" / "oracle_cases.json"));
}

oracle::Span span(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
std::vector<oracle::Span> spans(const json& j) {
    std::vector<oracle::Span> out;
    for (const auto& s : j) out.push_back(span(s));
    return out;
}
std::vector<TimeInterval> intervals(const json& j) {
    std::vector<TimeInterval> out;
    for (const auto& s : j) out.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    return out;
}
TokenSequence tokens(const std::vector<std::string>& words) {
    std::string joined;
    for (const auto& w : words) joined += w + " ";
    return normalize(joined);
}

}  // namespace

// Each case is checked twice: once against its brute-force oracle, once against the library.
TEST(OracleCases, EveryCaseAgreesWithOracleAndLibrary) {
    const auto doc = load_cases();
    std::set<std::string> ids;
    for (const auto& c : doc.at("cases")) {
        const auto id = c.at("id").get<std::string>();
        SCOPED_TRACE(id);
        ASSERT_TRUE(ids.insert(id).second) << "duplicate case id";
        const auto op = c.at("op").get<std::string>();
        const auto& in = c.at("inputs");
        const auto& expected = c.at("expected");
        const double tol = c.at("tolerance").get<double>();

        if (op == "iou") {
            const auto a = span(in.at("a")), b = span(in.at("b"));
            EXPECT_NEAR(oracle::iou_grid(a, b), expected.get<double>(), 2e-3 / 4.0);
            EXPECT_NEAR(oracle::iou_exact(a, b), expected.get<double>(), tol);
            EXPECT_NEAR(iou(TimeInterval(a.first, a.second), TimeInterval(b.first, b.second)), expected.get<double>(), tol);
        } else if (op == "coverage") {
            EXPECT_NEAR(oracle::coverage_grid(spans(in.at("gt")), spans(in.at("pred"))), expected.get<double>(), 1e-3);
            EXPECT_NEAR(coverage_fraction(intervals(in.at("gt")), intervals(in.at("pred"))), expected.get<double>(), tol);
        } else if (op == "greedy_match") {
            const double th = in.at("threshold").get<double>();
            const auto want = expected.at("pairs").get<std::size_t>();
            EXPECT_EQ(oracle::matching_exhaustive(spans(in.at("preds")), spans(in.at("gts")), th), want);
            const auto m = greedy_match(intervals(in.at("preds")), intervals(in.at("gts")), th);
            ASSERT_EQ(m.pairs.size(), want);
            for (std::size_t k = 0; k < want; ++k) EXPECT_NEAR(m.pairs[k].iou, expected.at("ious").at(k).get<double>(), tol);
            EXPECT_EQ(m.unmatched_pred.size(), expected.at("unmatched_preds").get<std::size_t>());
            EXPECT_EQ(m.unmatched_gt.size(), expected.at("unmatched_gts").get<std::size_t>());
        } else if (op == "prf") {
            const double th = in.at("threshold").get<double>();
            std::size_t tp = 0, np = 0, ng = 0;
            std::vector<VideoIntervals> videos;
            for (const auto& v : in.at("videos")) {
                tp += oracle::matching_exhaustive(spans(v.at("preds")), spans(v.at("gts")), th);
                np += v.at("preds").size();
                ng += v.at("gts").size();
                videos.push_back({intervals(v.at("preds")), intervals(v.at("gts"))});
            }
            EXPECT_EQ(tp, expected.at("tp").get<std::size_t>());
            EXPECT_EQ(np - tp, expected.at("fp").get<std::size_t>());
            EXPECT_EQ(ng - tp, expected.at("fn").get<std::size_t>());
            const std::vector<double> ths{th};
            const auto r = prf_at_thresholds(videos, ths);
            ASSERT_EQ(r.size(), 1u);
            EXPECT_EQ(r[0].tp, expected.at("tp").get<std::size_t>());
            EXPECT_EQ(r[0].fp, expected.at("fp").get<std::size_t>());
            EXPECT_EQ(r[0].fn, expected.at("fn").get<std::size_t>());
            EXPECT_NEAR(r[0].precision, expected.at("precision").get<double>(), tol);
            EXPECT_NEAR(r[0].recall, expected.at("recall").get<double>(), tol);
            EXPECT_NEAR(r[0].f1, expected.at("f1").get<double>(), tol);
        } else if (op == "hit_ratio") {
            const auto preds = in.at("preds").get<std::vector<double>>();
            const auto gts = in.at("gts").get<std::vector<double>>();
            const double t = in.at("tolerance").get<double>();
            EXPECT_NEAR(static_cast<double>(oracle::hits_exhaustive(preds, gts, t)) / static_cast<double>(gts.size()),
                        expected.get<double>(), tol);
            const std::vector<double> tols{t};
            EXPECT_NEAR(hit_ratio(preds, gts, tols).at(0).ratio, expected.get<double>(), tol);
        } else if (op == "rouge_l") {
            const auto ref = in.at("ref").get<std::vector<std::string>>();
            const auto cand = in.at("cand").get<std::vector<std::string>>();
            EXPECT_NEAR(oracle::rouge_l_dp(ref, cand), expected.get<double>(), tol);
            EXPECT_NEAR(rouge_l(tokens(ref), tokens(cand)), expected.get<double>(), tol);
        } else if (op == "lcs") {
            const auto a = in.at("a").get<std::vector<std::string>>();
            const auto b = in.at("b").get<std::vector<std::string>>();
            EXPECT_EQ(oracle::lcs_dp(a, b), expected.get<std::size_t>());
            EXPECT_EQ(lcs_length(tokens(a), tokens(b)), expected.get<std::size_t>());
        } else if (op == "token_f1") {
            const auto ref = in.at("ref").get<std::vector<std::string>>();
            const auto cand = in.at("cand").get<std::vector<std::string>>();
            EXPECT_NEAR(oracle::token_f1_count(ref, cand), expected.get<double>(), tol);
            EXPECT_NEAR(token_f1(tokens(ref), tokens(cand)), expected.get<double>(), tol);
        } else {
            ADD_FAILURE() << "unknown op " << op;
        }
    }
    EXPECT_EQ(ids.size(), 10u);
}

TEST(OracleCases, TrivialAnchors) {
    EXPECT_DOUBLE_EQ(oracle::iou_grid({0, 1}, {0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(oracle::iou_grid({0, 1}, {2, 3}), 0.0);
    EXPECT_EQ(oracle::matching_exhaustive({}, {}, 0.5), 0u);
    EXPECT_EQ(oracle::matching_exhaustive({{0, 2}}, {{0, 2}}, 0.5), 1u);
    const std::vector<std::string> w{"x", "y", "z"};
    EXPECT_EQ(oracle::lcs_dp(w, w), 3u);
    EXPECT_EQ(oracle::lcs_dp(w, {"p", "q"}), 0u);
}
