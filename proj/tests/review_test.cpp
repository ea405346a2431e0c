#include "fixture_run.hpp"

#include "privstory/error.hpp"
#include "privstory/review.hpp"
#include "privstory/review_server.hpp"

#include <gtest/gtest.h>

#include <httplib.h>

#include <fstream>
#include <thread>

using namespace privstory;
namespace fs = std::filesystem;

namespace {

const Taxonomy &taxonomy() {
    static const Taxonomy t = privstory::testing::default_taxonomy();
    return t;
}

/// One annotated fixture run shared by every test in this file.
std::shared_ptr<const RunArtifacts> fixture_run() {
    static const std::shared_ptr<const RunArtifacts> run = [] {
        const RunConfig cfg = privstory::testing::build_fixture_run("review");
        return std::make_shared<const RunArtifacts>(RunArtifacts::load(cfg.run_dir, taxonomy()));
    }();
    return run;
}

std::string fixed_clock() { return "2024-01-01T00:00:00Z"; }

ReviewStore fresh_store(const std::string &name, ReviewStore::Clock clock = fixed_clock) {
    return ReviewStore(privstory::testing::scratch_dir(name), {fixture_run()}, std::move(clock));
}

int status_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const ReviewError &e) {
        return e.status();
    }
    return 0;
}

}  // namespace

TEST(Review, ItemsComeFromResponseZero) {
    const auto run = fixture_run();
    const auto items = review_items(*run);
    EXPECT_EQ(items.size(), 120u);
    std::size_t parsed = 0;
    for (const auto &item : items) {
        parsed += item.parsed ? 1 : 0;
        EXPECT_FALSE(item.story.empty());
    }
    EXPECT_LT(parsed, items.size());
    EXPECT_EQ(items.front().document_id, run->manifest.documents.front().id);
    EXPECT_EQ(items.front().story_index, 0u);
}

TEST(Review, SessionLifecycle) {
    ReviewStore store = fresh_store("lifecycle");
    const auto run = fixture_run();
    const ReviewSession s = store.create_session(run->run_id, "alice");
    EXPECT_EQ(s.session_id, session_id_for(run->run_id, "alice"));
    EXPECT_EQ(s.session_id.size(), 18u);
    EXPECT_EQ(s.pending_count(), 120u);
    EXPECT_EQ(s.created_at, "2024-01-01T00:00:00Z");
    EXPECT_EQ(status_of([&] { (void)store.create_session(run->run_id, "alice"); }), 409);
    EXPECT_EQ(status_of([&] { (void)store.create_session("nope", "bob"); }), 404);
    EXPECT_EQ(status_of([&] { (void)store.create_session(run->run_id, " "); }), 400);
    EXPECT_EQ(status_of([&] { (void)store.session("missing"); }), 404);

    const std::string doc = run->manifest.documents.front().id;
    store.record_story_judgment(s.session_id, doc, 0, true, false);
    const ReviewSession after = store.record_story_judgment(s.session_id, doc, 0, false, true);
    EXPECT_EQ(after.judged_count(), 1u);
    EXPECT_FALSE(after.judgment(doc, 0)->q1_accurate);
    ASSERT_EQ(after.audit.size(), 1u);
    EXPECT_NE(after.audit[0].find(doc), std::string::npos);
    EXPECT_EQ(status_of([&] { (void)store.record_story_judgment(s.session_id, doc, 999, true, true); }), 400);
    EXPECT_EQ(status_of([&] { (void)store.record_story_judgment(s.session_id, "ghost.md", 0, true, true); }), 400);
    EXPECT_EQ(status_of([&] { (void)store.complete_session(s.session_id); }), 409);

    store.record_document_judgment(s.session_id, doc, "Missing a sharing story.");
    store.record_preference(s.session_id, doc, 1, 0);
    EXPECT_NE(status_of([&] { (void)store.record_preference(s.session_id, doc, 1, 1); }), 0);
    EXPECT_NE(status_of([&] { (void)store.record_preference(s.session_id, doc, 0, 5); }), 0);
    const auto choices = store.preference_choices(run->run_id);
    ASSERT_EQ(choices.size(), 1u);
    EXPECT_EQ(choices[0].chosen_index, 1);
    EXPECT_EQ(choices[0].reviewer_id, "alice");

    for (const auto &item : review_items(*run)) {
        store.record_story_judgment(s.session_id, item.document_id, item.story_index, true, false);
    }
    const ReviewSession done = store.complete_session(s.session_id);
    EXPECT_EQ(done.status, SessionStatus::Complete);
    EXPECT_EQ(done.pending_count(), 0u);
    EXPECT_EQ(status_of([&] { (void)store.record_story_judgment(s.session_id, doc, 0, true, true); }), 409);
    EXPECT_EQ(store.sessions(run->run_id).size(), 1u);
    EXPECT_TRUE(store.sessions(std::string("other")).empty());
}

TEST(Review, ReportNeedsSessions) {
    ReviewStore store = fresh_store("empty");
    EXPECT_EQ(status_of([&] { (void)store.report(fixture_run()->run_id); }), 404);
    EXPECT_EQ(status_of([&] { (void)store.report("nope"); }), 404);
}

TEST(Review, PersistsAcrossRestart) {
    const fs::path dir = privstory::testing::scratch_dir("restart");
    const auto run = fixture_run();
    const std::string doc = run->manifest.documents.front().id;
    std::string sid;
    json before;
    {
        ReviewStore store(dir, {run}, fixed_clock);
        sid = store.create_session(run->run_id, "carol").session_id;
        store.record_story_judgment(sid, doc, 1, true, true);
        store.record_story_judgment(sid, doc, 1, true, false);
        store.record_document_judgment(sid, doc, "note");
        store.record_preference(sid, doc, 0, 1);
        before = store.session(sid).to_json();
    }
    // A torn trailing line from an interrupted append is skipped.
    {
        std::ofstream log(dir / "sessions" / (sid + ".jsonl"), std::ios::app);
        log << "{\"type\": \"story_judg";
    }
    ReviewStore reopened(dir, {run}, fixed_clock);
    EXPECT_EQ(reopened.session(sid).to_json().dump(), before.dump());
    EXPECT_EQ(reopened.session(sid).audit.size(), 1u);
}

TEST(Review, ScriptedTargetsReproduceCounts) {
    ReviewStore store = fresh_store("targets");
    const auto run = fixture_run();
    privstory::testing::record_review_targets(store, *run);
    const ReviewReport r = store.report(run->run_id);
    EXPECT_EQ(r.sessions, 2u);
    EXPECT_EQ(r.overall.stories, 120u);
    EXPECT_EQ(r.overall.all_yes, 41u);
    EXPECT_EQ(r.overall.at_least_one_yes, 88u);
    EXPECT_EQ(r.overall.all_no, 120u - 88u);
    EXPECT_EQ(r.overall.at_least_one_no, 120u - 41u);
    for (const auto &t : privstory::testing::review_targets()) {
        EXPECT_EQ(r.per_file_type.at(t.type).all_yes, t.both_yes) << file_type_key(t.type);
        EXPECT_EQ(r.per_file_type.at(t.type).at_least_one_yes, t.at_least_one_yes) << file_type_key(t.type);
    }
    EXPECT_EQ(r.per_file_type.at(FileType::SoftwareCodeSpec).stories, 41u);
    EXPECT_EQ(r.per_file_type.at(FileType::UserDeveloperGuide).stories, 55u);
    EXPECT_EQ(r.per_file_type.at(FileType::ArchitectureDbDesign).stories, 16u);
    EXPECT_EQ(r.per_file_type.at(FileType::Readme).stories, 8u);
    EXPECT_EQ(r.gold_stories, 93u);
    EXPECT_EQ(r.unmatched_gold.size(), 36u);
    ASSERT_EQ(r.q3_notes.size(), 1u);
    EXPECT_EQ(r.q3_notes[0].reviewer_id, "reviewer-a");

    const json j = r.to_json();
    EXPECT_EQ(j["overall"]["both_yes"], 41);
    EXPECT_EQ(j["overall"]["at_least_one_yes"], 88);
    EXPECT_EQ(j["unmatched_gold_stories"], 36);
    EXPECT_EQ(j["per_file_type"]["readme"]["at_least_one_yes"], 1);
}

// Property: the aggregation does not depend on the order sessions are given in.
TEST(Review, AggregationIgnoresSessionOrder) {
    ReviewStore store = fresh_store("order");
    const auto run = fixture_run();
    privstory::testing::record_review_targets(store, *run);
    auto sessions = store.sessions(run->run_id);
    const std::string forward = aggregate_review(*run, sessions).to_json().dump();
    std::reverse(sessions.begin(), sessions.end());
    EXPECT_EQ(aggregate_review(*run, sessions).to_json().dump(), forward);
}

TEST(Review, SingleSessionIsDegenerate) {
    ReviewStore store = fresh_store("single");
    const auto run = fixture_run();
    const std::string sid = store.create_session(run->run_id, "solo").session_id;
    std::size_t yes = 0;
    for (const auto &item : review_items(*run)) {
        const bool accurate = item.story_index % 2 == 0;
        yes += accurate ? 1 : 0;
        store.record_story_judgment(sid, item.document_id, item.story_index, accurate, false);
    }
    const ReviewReport r = store.report(run->run_id);
    EXPECT_EQ(r.overall.all_yes, yes);
    EXPECT_EQ(r.overall.at_least_one_yes, yes);
    EXPECT_EQ(r.overall.all_no, 120u - yes);
}

TEST(Review, RejectsSessionsFromAnotherRun) {
    ReviewSession stray;
    stray.session_id = "s-x";
    stray.run_id = "elsewhere";
    const std::vector<ReviewSession> sessions{stray};
    EXPECT_THROW((void)aggregate_review(*fixture_run(), sessions), ReviewError);
}

class ReviewHttp : public ::testing::Test {
  protected:
    void SetUp() override {
        ui_dir_ = privstory::testing::scratch_dir("ui");
        std::ofstream(ui_dir_ / "index.html") << "<html>review</html>";
        store_ = std::make_unique<ReviewStore>(privstory::testing::scratch_dir("http"),
                                               std::vector<std::shared_ptr<const RunArtifacts>>{fixture_run()},
                                               fixed_clock);
        ReviewServerOptions opts;
        opts.port = 0;
        opts.ui_dir = ui_dir_;
        server_ = std::make_unique<ReviewServer>(*store_, taxonomy(), opts);
        port_ = server_->bind();
        thread_ = std::thread([this] { server_->listen(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        for (int i = 0; i < 200 && !client_->Get("/runs"); ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    void TearDown() override {
        server_->stop();
        thread_.join();
    }

    json post(const std::string &path, const json &body, int expected) {
        auto res = client_->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(res);
        if (!res) {
            return {};
        }
        EXPECT_EQ(res->status, expected) << path << " " << res->body;
        return json::parse(res->body);
    }
    json get(const std::string &path, int expected = 200) {
        auto res = client_->Get(path);
        EXPECT_TRUE(res);
        if (!res) {
            return {};
        }
        EXPECT_EQ(res->status, expected) << path << " " << res->body;
        return json::parse(res->body);
    }

    fs::path ui_dir_;
    std::unique_ptr<ReviewStore> store_;
    std::unique_ptr<ReviewServer> server_;
    std::unique_ptr<httplib::Client> client_;
    std::thread thread_;
    int port_ = 0;
};

TEST_F(ReviewHttp, RunsAndDocuments) {
    const auto run = fixture_run();
    const json runs = get("/runs");
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs[0]["run_id"], run->run_id);
    EXPECT_EQ(runs[0]["documents"], 25);
    EXPECT_EQ(runs[0]["stories"], 120);
    EXPECT_EQ(get("/runs/" + run->run_id + "/documents").size(), 25u);
    get("/runs/nope/documents", 404);

    const std::string id = "budgetbee/analytics_client.ts";
    const json doc = get("/documents/" + id);
    EXPECT_EQ(doc["text"], run->manifest.find(id)->text);
    EXPECT_FALSE(doc["gold"].is_null());
    EXPECT_EQ(doc["responses"].size(), 2u);
    EXPECT_TRUE(doc["responses"][0].contains("rationale"));
    EXPECT_FALSE(doc["generated_stories"].empty());
    get("/documents/" + id + "?run=" + run->run_id);
    get("/documents/nowhere.md", 404);

    auto ui = client_->Get("/index.html");
    ASSERT_TRUE(ui);
    EXPECT_EQ(ui->status, 200);
    EXPECT_EQ(ui->body, "<html>review</html>");
}

TEST_F(ReviewHttp, SessionFlowMatchesStore) {
    const auto run = fixture_run();
    const json created = post("/sessions", {{"run_id", run->run_id}, {"reviewer_id", "dana"}}, 201);
    const std::string sid = created["session_id"];
    EXPECT_EQ(created["progress"]["total"], 120);
    post("/sessions", {{"run_id", run->run_id}, {"reviewer_id", "dana"}}, 409);
    post("/sessions", {{"run_id", "nope"}, {"reviewer_id", "erin"}}, 404);
    post("/sessions", {{"run_id", run->run_id}}, 400);
    auto bad = client_->Post("/sessions", "{not json", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    const std::string doc = run->manifest.documents.front().id;
    const json judged = post("/sessions/" + sid + "/judgments",
                             {{"document_id", doc}, {"story_index", 0}, {"q1_accurate", true}, {"q2_missing_behaviors", false}},
                             200);
    EXPECT_EQ(judged["progress"]["judged"], 1);
    post("/sessions/" + sid + "/judgments",
         {{"document_id", doc}, {"story_index", -1}, {"q1_accurate", true}, {"q2_missing_behaviors", false}}, 400);
    post("/sessions/" + sid + "/judgments", {{"document_id", doc}, {"q3_missing_stories", "Share location"}}, 200);
    post("/sessions/" + sid + "/preferences",
         {{"document_id", doc}, {"chosen_response_index", 1}, {"rejected_response_index", 0}}, 200);
    post("/sessions/" + sid + "/preferences",
         {{"document_id", doc}, {"chosen_response_index", 0}, {"rejected_response_index", 0}}, 400);
    post("/sessions/" + sid + "/complete", json::object(), 409);
    get("/sessions/missing", 404);

    // The server's view equals the store's view of the same session.
    EXPECT_EQ(get("/sessions/" + sid).dump(), store_->session(sid).to_json().dump());
    const json listed = get("/sessions?run_id=" + run->run_id);
    ASSERT_EQ(listed.size(), 1u);
    EXPECT_EQ(listed[0]["status"], "open");

    for (const auto &item : review_items(*run)) {
        store_->record_story_judgment(sid, item.document_id, item.story_index, item.story_index == 0, false);
    }
    EXPECT_EQ(post("/sessions/" + sid + "/complete", json::object(), 200)["status"], "complete");
    const json report = get("/runs/" + run->run_id + "/review-report");
    EXPECT_EQ(report["overall"]["stories"], 120);
    EXPECT_EQ(report["q3_missing_stories"].size(), 1u);
}

TEST_F(ReviewHttp, MatchesScriptedTargets) {
    privstory::testing::record_review_targets(*store_, *fixture_run());
    const json report = get("/runs/" + fixture_run()->run_id + "/review-report");
    EXPECT_EQ(report["overall"]["both_yes"], 41);
    EXPECT_EQ(report["overall"]["at_least_one_yes"], 88);
    EXPECT_EQ(report["gold_stories"], 93);
    EXPECT_EQ(report["unmatched_gold_stories"], 36);
}
