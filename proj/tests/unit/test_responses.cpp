#include "procassess/errors.hpp"
#include "procassess/responses.hpp"

#include "generators.hpp"
#include "test_util.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace procassess;
using nlohmann::json;

TEST(ParseTime, AcceptedForms) {
    EXPECT_DOUBLE_EQ(*parse_time("12"), 12.0);
    EXPECT_DOUBLE_EQ(*parse_time("12.5"), 12.5);
    EXPECT_DOUBLE_EQ(*parse_time("12.5s"), 12.5);
    EXPECT_DOUBLE_EQ(*parse_time("4 seconds"), 4.0);
    EXPECT_DOUBLE_EQ(*parse_time("00:05"), 5.0);
    EXPECT_DOUBLE_EQ(*parse_time("01:30.5"), 90.5);
    EXPECT_DOUBLE_EQ(*parse_time("1:02:03"), 3723.0);
    EXPECT_DOUBLE_EQ(*parse_time("03:500"), 3.5);
}

TEST(ParseTime, RejectedForms) {
    for (const char* bad : {"", "abc", "0,5", "12,5s", "00:75", "1:5", ":30", "1:60:00", "1::2", "s"}) {
        EXPECT_FALSE(parse_time(bad).has_value()) << bad;
    }
}

TEST(SegmentList, WorkedExamples) {
    auto p = parse_segment_list("12.0 - 18.5: cleans the skin with an alcohol swab");
    ASSERT_EQ(p.segments.size(), 1u);
    EXPECT_DOUBLE_EQ(p.segments[0].interval().start(), 12.0);
    EXPECT_DOUBLE_EQ(p.segments[0].interval().end(), 18.5);
    EXPECT_EQ(p.segments[0].caption(), "cleans the skin with an alcohol swab");
    EXPECT_EQ(p.malformed_lines, 0u);

    p = parse_segment_list("00:05 to 00:09: dons sterile gloves");
    ASSERT_EQ(p.segments.size(), 1u);
    EXPECT_DOUBLE_EQ(p.segments[0].interval().start(), 5.0);
    EXPECT_DOUBLE_EQ(p.segments[0].interval().end(), 9.0);
    EXPECT_EQ(p.segments[0].caption(), "dons sterile gloves");
}

TEST(SegmentList, ProseLineCountsAsMalformed) {
    const auto p = parse_segment_list("0 - 3: wets hands\nThen the nurse dries them thoroughly.\n3 - 5: dries");
    EXPECT_EQ(p.segments.size(), 2u);
    EXPECT_EQ(p.malformed_lines, 1u);
    EXPECT_FALSE(p.failed());
}

TEST(SegmentList, StructuredWinsOverLines) {
    const auto p = parse_segment_list(
        "0 - 1: ignored\n{\"segments\": [{\"start\": 2, \"end\": 4, \"caption\": \"palpates vein\"}]}");
    EXPECT_TRUE(p.structured);
    ASSERT_EQ(p.segments.size(), 1u);
    EXPECT_EQ(p.segments[0].caption(), "palpates vein");
}

TEST(SegmentList, WrongTaskIsRejected) {
    RawModelResponse r;
    r.task = Task::order_correction;
    EXPECT_THROW((void)parse_segment_list(r), InvalidArgument);
}

TEST(SegmentList, FailedRequestYieldsNothing) {
    RawModelResponse r;
    r.task = Task::dense_caption;
    r.ok = false;
    r.text = "0 - 3: a";
    EXPECT_TRUE(parse_segment_list(r).failed());
}

TEST(ProcedureLabel, JsonAndLine) {
    EXPECT_EQ(*parse_procedure_label("{\"procedure\": \"venipuncture\", \"segments\": []}"), "venipuncture");
    EXPECT_EQ(*parse_procedure_label("Procedure: hand hygiene.\n0 - 2: wets"), "hand hygiene");
    EXPECT_FALSE(parse_procedure_label("0 - 2: wets").has_value());
}

TEST(OrderVerdict, StructuredIncorrect) {
    const auto p = parse_order_verdict("{\"is_correct\": false, \"misplaced\": [1, 3]}", 5);
    ASSERT_FALSE(p.abstained());
    EXPECT_FALSE(p.verdict->is_correct);
    EXPECT_EQ(p.verdict->misplaced, (std::vector<std::size_t>{1, 3}));
}

TEST(OrderVerdict, SentenceCorrectGivesIdentity) {
    const auto p = parse_order_verdict("The sequence is correct.", 4);
    ASSERT_FALSE(p.abstained());
    EXPECT_TRUE(p.verdict->is_correct);
    EXPECT_TRUE(p.verdict->misplaced.empty());
    EXPECT_EQ(*p.verdict->corrected_order, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(OrderVerdict, CorruptedTextAbstains) {
    const auto p = parse_order_verdict("\x01\x02 ##@@ lorem", 4);
    EXPECT_TRUE(p.abstained());
    EXPECT_FALSE(p.note.empty());
}

TEST(OrderVerdict, FailedRequestAbstains) {
    RawModelResponse r;
    r.task = Task::order_correction;
    r.ok = false;
    r.text = "{\"is_correct\": true}";
    const auto p = parse_order_verdict(r, 3);
    EXPECT_TRUE(p.abstained());
    EXPECT_EQ(p.note, "request failed");
}

TEST(MissingVerdict, ClaimWithoutCaptionAbstains) {
    EXPECT_TRUE(parse_missing_verdict("{\"has_missing\": true}").abstained());
    const auto p = parse_missing_verdict("{\"has_missing\": true, \"interval\": [3, 6], \"caption\": \"applies tourniquet\"}");
    ASSERT_FALSE(p.abstained());
    EXPECT_TRUE(p.verdict->has_missing);
    EXPECT_EQ(*p.verdict->predicted_caption, "applies tourniquet");
    EXPECT_DOUBLE_EQ(p.verdict->predicted_interval->start(), 3.0);
}

TEST(MissingVerdict, NoneMissing) {
    const auto p = parse_missing_verdict("{\"has_missing\": false}");
    ASSERT_FALSE(p.abstained());
    EXPECT_FALSE(p.verdict->has_missing);
}

// Every case in the corpus carries hand-derived expectations.
TEST(AdversarialCorpus, MatchesGolden) {
    const auto doc = json::parse(testutil::slurp(std::filesystem::path(PROCASSESS_FIXTURES) / "responses" / "adversarial.json"));
    const auto& cases = doc.at("cases");
    ASSERT_GE(cases.size(), 50u);
    for (const auto& c : cases) {
        const auto id = c.at("id").get<std::string>();
        const auto text = c.at("text").get<std::string>();
        const auto task = parse_task(c.at("task").get<std::string>());
        const auto& e = c.at("expect");
        SCOPED_TRACE(id);
        if (task == Task::dense_caption || task == Task::procedure_id) {
            const auto p = parse_segment_list(text);
            EXPECT_EQ(p.segments.size(), e.at("segments").get<std::size_t>());
            EXPECT_EQ(p.malformed_lines, e.at("malformed").get<std::size_t>());
            EXPECT_EQ(p.structured, e.at("structured").get<bool>());
        } else if (task == Task::order_correction) {
            const auto p = parse_order_verdict(text, c.at("segment_count").get<std::size_t>());
            ASSERT_EQ(p.abstained(), e.at("abstain").get<bool>());
            if (p.abstained()) continue;
            EXPECT_EQ(p.verdict->is_correct, e.at("is_correct").get<bool>());
            EXPECT_EQ(p.verdict->misplaced, e.at("misplaced").get<std::vector<std::size_t>>());
            if (e.contains("has_corrected_order")) {
                EXPECT_EQ(p.verdict->corrected_order.has_value(), e.at("has_corrected_order").get<bool>());
            }
        } else {
            const auto p = parse_missing_verdict(text);
            ASSERT_EQ(p.abstained(), e.at("abstain").get<bool>());
            if (p.abstained()) continue;
            EXPECT_EQ(p.verdict->has_missing, e.at("has_missing").get<bool>());
            if (e.contains("caption")) EXPECT_EQ(p.verdict->predicted_caption.value_or(""), e.at("caption").get<std::string>());
        }
    }
}

TEST(ParsersProperty, ArbitraryTextNeverThrows) {
    SplitMix64 rng(77);
    const std::string alphabet = "0123456789 .:-–to[](){}\"',;|\n\tsabcxyz_ismcorrect";
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const auto n = gen::count(rng, 0, 120);
        for (std::size_t k = 0; k < n; ++k) {
            s += rng.uniform(8) == 0 ? static_cast<char>(rng.uniform(256)) : alphabet[rng.uniform(alphabet.size())];
        }
        EXPECT_NO_THROW({
            (void)parse_segment_list(s);
            (void)parse_order_verdict(s, 4);
            (void)parse_missing_verdict(s);
            (void)parse_procedure_label(s);
        });
    }
}

TEST(ParsersProperty, RejectedLinesAccountForEveryNonBlankLine) {
    SplitMix64 rng(78);
    for (int i = 0; i < 300; ++i) {
        std::string text;
        std::size_t good = 0, bad = 0;
        const auto lines = gen::count(rng, 0, 8);
        for (std::size_t k = 0; k < lines; ++k) {
            if (rng.uniform(2) == 0) {
                const double a = static_cast<double>(rng.uniform(50));
                text += std::to_string(static_cast<int>(a)) + " - " + std::to_string(static_cast<int>(a) + 2) + ": step " +
                        gen::caption(rng, 4) + "\n";
                ++good;
            } else {
                text += "prose " + gen::caption(rng, 4) + "\n";
                ++bad;
            }
        }
        const auto p = parse_segment_list(text);
        ASSERT_EQ(p.segments.size(), good);
        ASSERT_EQ(p.malformed_lines, bad);
    }
}

TEST(Dump, RoundTrip) {
    testutil::TempDir dir("dump");
    RawModelResponse a{"dense_caption/v1", Task::dense_caption, "v1", "0 - 1: a\n\"quoted\"", true, "", 1, 200};
    RawModelResponse b{"order_correction/v1__swap", Task::order_correction, "v1", "", false, "HTTP 401", 1, 401};
    {
        std::ofstream out(dir / "d.jsonl");
        out << response_to_json_line(a) << "\n" << response_to_json_line(b) << "\n";
    }
    const auto back = read_dump(dir / "d.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].text, a.text);
    EXPECT_EQ(back[0].request_id, a.request_id);
    EXPECT_TRUE(back[0].ok);
    EXPECT_FALSE(back[1].ok);
    EXPECT_EQ(back[1].error, "HTTP 401");
    EXPECT_EQ(back[1].http_status, 401);
    EXPECT_EQ(back[1].task, Task::order_correction);
}

TEST(Dump, Errors) {
    EXPECT_THROW((void)read_dump("/nonexistent/dump.jsonl"), InputError);
    EXPECT_THROW((void)parse_dump_text("{not json\n"), ParseError);
    EXPECT_THROW((void)parse_dump_text("{\"schema\": \"other\"}\n"), ParseError);
    EXPECT_THROW((void)parse_dump_text(
                     "{\"schema\":\"procassess.dump\",\"schema_version\":1,\"request_id\":\"x\",\"task\":\"bogus\",\"status\":\"ok\"}\n"),
                 ParseError);
    EXPECT_TRUE(parse_dump_text("\n\n").empty());
}

TEST(RequestIds, Format) {
    EXPECT_EQ(make_request_id(Task::missing_event, "vid__mask"), "missing_event/vid__mask");
    EXPECT_THROW((void)parse_task("captioning"), InvalidArgument);
}
