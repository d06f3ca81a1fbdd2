#include "procassess/errors.hpp"
#include "procassess/perturb.hpp"
#include "procassess/prompt.hpp"
#include "procassess/responses.hpp"

#include <gtest/gtest.h>

using namespace procassess;

namespace {

AnnotationRecord venipuncture() {
    return AnnotationRecord("vp", "venipuncture", 12.0,
                            {ActionSegment(TimeInterval(0, 3), "applies tourniquet"),
                             ActionSegment(TimeInterval(3, 6), "cleans the site"),
                             ActionSegment(TimeInterval(6, 9), "inserts needle"),
                             ActionSegment(TimeInterval(9, 12), "removes needle")});
}

}  // namespace

TEST(Slots, RenderAndErrors) {
    const SlotValues v{{"a", "x"}, {"b", "y"}};
    EXPECT_EQ(render_slots("{{a}}-{{b}}-{{a}}", v), "x-y-x");
    EXPECT_EQ(render_slots("no slots { here }", v), "no slots { here }");
    EXPECT_THROW((void)render_slots("{{c}}", v), InvalidArgument);
    EXPECT_THROW((void)render_slots("{{a", v), InvalidArgument);
    try {
        (void)render_slots("hello {{who}}", v);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("who"), std::string::npos);
    }
}

TEST(Templates, DefaultsCoverEveryTask) {
    const auto set = default_prompt_set();
    EXPECT_EQ(set.size(), 4u);
    EXPECT_EQ(template_for(set, "missing_event").task, Task::missing_event);
    EXPECT_THROW((void)template_for(set, "captioning"), InvalidArgument);
    const auto slots = default_template(Task::order_correction).slots();
    EXPECT_NE(std::find(slots.begin(), slots.end(), "captions"), slots.end());
}

TEST(Templates, OverridesFromJson) {
    const auto set = parse_prompt_set(
        R"({"templates":{"dense_caption":{"system":"S","user":"Video {{video_id}} at {{fps}} fps","attachment":"none"}}})");
    const auto& t = template_for(set, "dense_caption");
    EXPECT_EQ(t.system, "S");
    EXPECT_EQ(t.attachment, AttachmentPolicy::none);
    EXPECT_EQ(template_for(set, "procedure_id").system, default_template(Task::procedure_id).system);
    const auto req = build_prompt(t, venipuncture(), std::filesystem::path("sb.png"), 2.0);
    EXPECT_EQ(req.user, "Video vp at 2 fps");
    EXPECT_FALSE(req.image.has_value());
    EXPECT_THROW((void)parse_prompt_set("{nope"), InputError);
    EXPECT_THROW((void)parse_prompt_set(R"({"templates":{"bogus":{"system":"","user":""}}})"), InputError);
    EXPECT_THROW((void)parse_prompt_set(R"({"templates":{"dense_caption":{"system":"","user":"{{unknown_slot}}"}}})"),
                 InputError);
}

TEST(PromptBuild, VideoLevelDoesNotLeakAnnotation) {
    const auto req = build_prompt(default_template(Task::dense_caption), venipuncture(), std::filesystem::path("vp.png"));
    EXPECT_EQ(req.request_id, "dense_caption/vp");
    EXPECT_EQ(*req.image, std::filesystem::path("vp.png"));
    EXPECT_EQ(req.user.find("tourniquet"), std::string::npos);
    EXPECT_EQ(req.system.find("venipuncture"), std::string::npos);
    EXPECT_THROW((void)build_prompt(default_template(Task::order_correction), venipuncture()), InvalidArgument);
}

TEST(PromptBuild, MissingEventListsPlaceholder) {
    auto s = gen_mask(venipuncture(), 3);
    const auto& m = *s.mask_truth();
    const auto req = build_prompt(default_template(Task::missing_event), s);
    EXPECT_EQ(req.request_id, "missing_event/" + s.sample_id);
    const auto line = std::to_string(m.masked_index) + ". " + std::string(kMaskPlaceholder) + "\n";
    EXPECT_NE(req.user.find(line), std::string::npos) << req.user;
    EXPECT_EQ(req.user.find(m.hidden_caption), std::string::npos);
}

TEST(PromptBuild, OrderListsShuffledCaptions) {
    const auto s = gen_swap(venipuncture(), 0, std::make_pair<std::size_t, std::size_t>(0, 2));
    const auto req = build_prompt(default_template(Task::order_correction), s);
    const auto first = req.user.find("0. inserts needle\n");
    const auto third = req.user.find("2. applies tourniquet\n");
    EXPECT_NE(first, std::string::npos) << req.user;
    EXPECT_NE(third, std::string::npos);
    EXPECT_LT(first, third);
    EXPECT_THROW((void)build_prompt(default_template(Task::order_correction), gen_mask(venipuncture(), 1)),
                 InvalidArgument);
}

TEST(Oracle, AnswersParseBackToTruth) {
    const auto rec = venipuncture();
    const auto segs = parse_segment_list(oracle_response(Task::dense_caption, rec));
    EXPECT_EQ(segs.segments, rec.segments());
    EXPECT_EQ(*parse_procedure_label(oracle_response(Task::procedure_id, rec)), "venipuncture");

    const auto mask = gen_mask(rec, 9);
    const auto mv = parse_missing_verdict(oracle_response(Task::missing_event, mask));
    ASSERT_FALSE(mv.abstained());
    EXPECT_EQ(*mv.verdict->predicted_caption, mask.mask_truth()->hidden_caption);
    EXPECT_EQ(*mv.verdict->predicted_interval, mask.mask_truth()->masked_interval);

    const auto keep = gen_keep(rec);
    EXPECT_FALSE(parse_missing_verdict(oracle_response(Task::missing_event, keep)).verdict->has_missing);

    const auto shift = gen_shift(rec);
    const auto ov = parse_order_verdict(oracle_response(Task::order_correction, shift), 4);
    ASSERT_FALSE(ov.abstained());
    EXPECT_FALSE(ov.verdict->is_correct);
    EXPECT_EQ(ov.verdict->misplaced, shift.order_truth()->misplaced_indices);
    EXPECT_EQ(*ov.verdict->corrected_order, shift.order_truth()->correct_order);
}
