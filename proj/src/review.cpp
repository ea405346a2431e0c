#include "privstory/review.hpp"

#include "privstory/error.hpp"
#include "privstory/evaluator.hpp"
#include "privstory/log.hpp"
#include "privstory/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

namespace privstory {

namespace fs = std::filesystem;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

std::string session_id_for(const std::string &run_id, const std::string &reviewer_id) {
    return "s-" + sha256_hex(run_id + "\n" + reviewer_id).substr(0, 16);
}

std::size_t ReviewSession::judged_count() const {
    std::size_t n = 0;
    for (const auto &item : items) {
        n += story_judgments.contains({item.document_id, item.story_index}) ? 1 : 0;
    }
    return n;
}

const StoryJudgment *ReviewSession::judgment(const std::string &doc, std::size_t index) const {
    auto it = story_judgments.find({doc, index});
    return it == story_judgments.end() ? nullptr : &it->second;
}

json ReviewSession::to_json() const {
    json j;
    j["session_id"] = session_id;
    j["reviewer_id"] = reviewer_id;
    j["run_id"] = run_id;
    j["status"] = status == SessionStatus::Open ? "open" : "complete";
    j["created_at"] = created_at;
    j["progress"] = {{"judged", judged_count()}, {"total", items.size()}};
    json items_j = json::array();
    for (const auto &item : items) {
        json ji{{"document_id", item.document_id},
                {"story_index", item.story_index},
                {"story", item.story},
                {"parsed", item.parsed}};
        if (const auto *jd = judgment(item.document_id, item.story_index)) {
            ji["judgment"] = {{"q1_accurate", jd->q1_accurate},
                              {"q2_missing_behaviors", jd->q2_missing_behaviors},
                              {"timestamp", jd->timestamp}};
        } else {
            ji["judgment"] = nullptr;
        }
        items_j.push_back(std::move(ji));
    }
    j["items"] = std::move(items_j);
    json docs = json::array();
    for (const auto &[doc, dj] : document_judgments) {
        docs.push_back({{"document_id", doc}, {"q3_missing_stories", dj.q3_missing_stories}, {"timestamp", dj.timestamp}});
    }
    j["document_judgments"] = std::move(docs);
    json prefs = json::array();
    for (const auto &[doc, p] : preferences) {
        prefs.push_back({{"document_id", doc},
                         {"chosen_response_index", p.chosen_index},
                         {"rejected_response_index", p.rejected_index},
                         {"timestamp", p.timestamp}});
    }
    j["preferences"] = std::move(prefs);
    j["audit"] = audit;
    return j;
}

std::vector<ReviewItem> review_items(const RunArtifacts &run) {
    std::vector<ReviewItem> items;
    for (const auto &doc : run.manifest.documents) {
        const ParsedAnnotation *parsed = run.find_parsed(doc.id, kReviewedResponse);
        if (!parsed) {
            continue;
        }
        for (std::size_t i = 0; i < parsed->stories.size(); ++i) {
            items.push_back(ReviewItem{doc.id, i, parsed->stories[i].raw, parsed->stories[i].triple.has_value()});
        }
    }
    return items;
}

json ReviewReport::to_json() const {
    auto row_json = [](const ReviewRow &r) {
        return json{{"stories", r.stories},
                    {"both_yes", r.all_yes},
                    {"at_least_one_yes", r.at_least_one_yes},
                    {"both_no", r.all_no},
                    {"at_least_one_no", r.at_least_one_no},
                    {"accurate_missing_behaviors", r.accurate_missing_behaviors},
                    {"unparsed", r.unparsed}};
    };
    json j;
    j["run_id"] = run_id;
    j["sessions"] = sessions;
    j["overall"] = row_json(overall);
    json types = json::object();
    for (const auto &[type, row] : per_file_type) {
        types[std::string(file_type_key(type))] = row_json(row);
    }
    j["per_file_type"] = std::move(types);
    json notes = json::array();
    for (const auto &n : q3_notes) {
        notes.push_back(
            {{"session_id", n.session_id}, {"reviewer_id", n.reviewer_id}, {"document_id", n.document_id}, {"text", n.text}});
    }
    j["q3_missing_stories"] = std::move(notes);
    json unmatched = json::array();
    for (const auto &[doc, s] : unmatched_gold) {
        json js;
        privstory::to_json(js, s);
        unmatched.push_back({{"document_id", doc}, {"story", std::move(js)}});
    }
    j["gold_stories"] = gold_stories;
    j["unmatched_gold_stories"] = unmatched_gold.size();
    j["unmatched_gold"] = std::move(unmatched);
    return j;
}

ReviewReport aggregate_review(const RunArtifacts &run, std::span<const ReviewSession> sessions) {
    if (sessions.empty()) {
        throw ReviewError("no review sessions for run " + run.run_id, 404);
    }
    for (const auto &s : sessions) {
        if (s.run_id != run.run_id) {
            throw ReviewError("session " + s.session_id + " belongs to run " + s.run_id + ", not " + run.run_id);
        }
    }
    // Order-independent: iterate sessions sorted by id.
    std::vector<const ReviewSession *> ordered;
    for (const auto &s : sessions) {
        ordered.push_back(&s);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto *a, const auto *b) { return a->session_id < b->session_id; });

    ReviewReport report;
    report.run_id = run.run_id;
    report.sessions = sessions.size();
    for (const auto &item : review_items(run)) {
        const Document *doc = run.manifest.find(item.document_id);
        bool all_yes = true;
        bool any_yes = false;
        bool all_no = true;
        bool any_no = false;
        bool any_missing = false;
        for (const auto *s : ordered) {
            const StoryJudgment *j = s->judgment(item.document_id, item.story_index);
            if (!j) {
                all_yes = false;
                all_no = false;
                continue;
            }
            any_yes = any_yes || j->q1_accurate;
            any_no = any_no || !j->q1_accurate;
            all_yes = all_yes && j->q1_accurate;
            all_no = all_no && !j->q1_accurate;
            any_missing = any_missing || j->q2_missing_behaviors;
        }
        for (ReviewRow *row : {&report.overall, &report.per_file_type[doc->file_type]}) {
            ++row->stories;
            row->all_yes += all_yes ? 1 : 0;
            row->at_least_one_yes += any_yes ? 1 : 0;
            row->all_no += all_no ? 1 : 0;
            row->at_least_one_no += any_no ? 1 : 0;
            row->accurate_missing_behaviors += (any_yes && any_missing) ? 1 : 0;
            row->unparsed += item.parsed ? 0 : 1;
        }
    }
    for (const auto *s : ordered) {
        for (const auto &[doc, dj] : s->document_judgments) {
            if (!trim(dj.q3_missing_stories).empty()) {
                report.q3_notes.push_back({s->session_id, s->reviewer_id, doc, dj.q3_missing_stories});
            }
        }
    }
    for (const auto &doc : run.manifest.documents) {
        const GoldAnnotation *gold = run.manifest.find_gold(doc.id);
        if (!gold) {
            continue;
        }
        report.gold_stories += gold->stories.size();
        std::vector<StoryTriple> generated;
        if (const ParsedAnnotation *parsed = run.find_parsed(doc.id, kReviewedResponse)) {
            generated = parsed->triples();
        }
        for (auto &s : compare_stories(generated, gold->stories).unmatched_gold) {
            report.unmatched_gold.emplace_back(doc.id, std::move(s));
        }
    }
    return report;
}

ReviewStore::ReviewStore(fs::path data_dir, std::vector<std::shared_ptr<const RunArtifacts>> runs, Clock clock)
    : data_dir_(std::move(data_dir)), runs_(std::move(runs)), clock_(std::move(clock)) {
    if (!clock_) {
        clock_ = utc_timestamp;
    }
    const fs::path dir = data_dir_ / "sessions";
    fs::create_directories(dir);
    std::vector<fs::path> logs;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".jsonl") {
            logs.push_back(entry.path());
        }
    }
    std::sort(logs.begin(), logs.end());
    for (const auto &path : logs) {
        std::ifstream in(path);
        std::string line;
        std::optional<ReviewSession> session;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) {
                continue;
            }
            json event;
            try {
                event = json::parse(line);
            } catch (const json::parse_error &) {
                // A torn final line from a crash mid-append is dropped.
                log_warn(path.string() + ":" + std::to_string(line_no) + ": unreadable event skipped");
                continue;
            }
            if (!session) {
                if (event.value("type", "") != "created") {
                    throw ReviewError(path.string() + ": log does not start with a created event", 500);
                }
                session.emplace();
            }
            apply(*session, event);
        }
        if (session) {
            const std::string id = session->session_id;
            sessions_.emplace(id, std::move(*session));
        }
    }
}

std::shared_ptr<const RunArtifacts> ReviewStore::run(const std::string &run_id) const {
    for (const auto &r : runs_) {
        if (r->run_id == run_id) {
            return r;
        }
    }
    return nullptr;
}

fs::path ReviewStore::log_path(const std::string &session_id) const {
    return data_dir_ / "sessions" / (session_id + ".jsonl");
}

void ReviewStore::append(const std::string &session_id, const json &event) {
    std::ofstream out(log_path(session_id), std::ios::app | std::ios::binary);
    if (!out) {
        throw ReviewError("cannot write session log for " + session_id, 500);
    }
    out << event.dump() << '\n';
    out.flush();
    if (!out) {
        throw ReviewError("cannot write session log for " + session_id, 500);
    }
}

void ReviewStore::apply(ReviewSession &s, const json &event) {
    const std::string type = event.at("type").get<std::string>();
    const std::string ts = event.value("timestamp", std::string{});
    if (type == "created") {
        s.session_id = event.at("session_id").get<std::string>();
        s.reviewer_id = event.at("reviewer_id").get<std::string>();
        s.run_id = event.at("run_id").get<std::string>();
        s.created_at = ts;
        for (const auto &ji : event.at("items")) {
            s.items.push_back(ReviewItem{ji.at("document_id").get<std::string>(), ji.at("story_index").get<std::size_t>(),
                                         ji.at("story").get<std::string>(), ji.value("parsed", false)});
        }
    } else if (type == "story_judgment") {
        StoryJudgment j{event.at("document_id").get<std::string>(), event.at("story_index").get<std::size_t>(),
                        event.at("q1_accurate").get<bool>(), event.at("q2_missing_behaviors").get<bool>(), ts};
        const auto key = std::make_pair(j.document_id, j.story_index);
        if (auto it = s.story_judgments.find(key); it != s.story_judgments.end()) {
            s.audit.push_back("story " + j.document_id + "#" + std::to_string(j.story_index) + " " +
                              it->second.timestamp + " -> " + ts);
        }
        s.story_judgments[key] = std::move(j);
    } else if (type == "document_judgment") {
        DocumentJudgment j{event.at("document_id").get<std::string>(), event.at("q3_missing_stories").get<std::string>(),
                           ts};
        if (auto it = s.document_judgments.find(j.document_id); it != s.document_judgments.end()) {
            s.audit.push_back("document " + j.document_id + " " + it->second.timestamp + " -> " + ts);
        }
        s.document_judgments[j.document_id] = std::move(j);
    } else if (type == "preference") {
        PreferenceJudgment p{event.at("document_id").get<std::string>(), event.at("chosen_index").get<int>(),
                             event.at("rejected_index").get<int>(), ts};
        if (auto it = s.preferences.find(p.document_id); it != s.preferences.end()) {
            s.audit.push_back("preference " + p.document_id + " " + it->second.timestamp + " -> " + ts);
        }
        s.preferences[p.document_id] = std::move(p);
    } else if (type == "completed") {
        s.status = SessionStatus::Complete;
    } else {
        throw ReviewError("unknown session event type " + type, 500);
    }
}

ReviewSession ReviewStore::create_session(const std::string &run_id, const std::string &reviewer_id) {
    if (trim(reviewer_id).empty()) {
        throw ReviewError("reviewer_id is required");
    }
    const auto r = run(run_id);
    if (!r) {
        throw ReviewError("unknown run " + run_id, 404);
    }
    std::unique_lock lock(mutex_);
    const std::string id = session_id_for(run_id, reviewer_id);
    if (sessions_.contains(id)) {
        throw ReviewError("reviewer " + reviewer_id + " already has a session for run " + run_id, 409);
    }
    json items = json::array();
    for (const auto &item : review_items(*r)) {
        items.push_back({{"document_id", item.document_id},
                         {"story_index", item.story_index},
                         {"story", item.story},
                         {"parsed", item.parsed}});
    }
    const json event{{"type", "created"},
                     {"session_id", id},
                     {"reviewer_id", reviewer_id},
                     {"run_id", run_id},
                     {"timestamp", clock_()},
                     {"items", std::move(items)}};
    ReviewSession s;
    apply(s, event);
    append(id, event);
    return sessions_.emplace(id, std::move(s)).first->second;
}

ReviewSession ReviewStore::session(const std::string &session_id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw ReviewError("unknown session " + session_id, 404);
    }
    return it->second;
}

std::vector<ReviewSession> ReviewStore::sessions(const std::optional<std::string> &run_id) const {
    std::shared_lock lock(mutex_);
    std::vector<ReviewSession> out;
    for (const auto &[id, s] : sessions_) {
        if (!run_id || s.run_id == *run_id) {
            out.push_back(s);
        }
    }
    return out;
}

ReviewSession &ReviewStore::open_session(const std::string &session_id) {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw ReviewError("unknown session " + session_id, 404);
    }
    if (it->second.status != SessionStatus::Open) {
        throw ReviewError("session " + session_id + " is closed", 409);
    }
    return it->second;
}

ReviewSession ReviewStore::record_story_judgment(const std::string &session_id, const std::string &document_id,
                                                 std::size_t story_index, bool q1_accurate,
                                                 bool q2_missing_behaviors) {
    std::unique_lock lock(mutex_);
    ReviewSession &s = open_session(session_id);
    const bool exists = std::any_of(s.items.begin(), s.items.end(), [&](const ReviewItem &i) {
        return i.document_id == document_id && i.story_index == story_index;
    });
    if (!exists) {
        throw ReviewError("document " + document_id + " has no generated story " + std::to_string(story_index));
    }
    const json event{{"type", "story_judgment"},        {"document_id", document_id},
                     {"story_index", story_index},      {"q1_accurate", q1_accurate},
                     {"q2_missing_behaviors", q2_missing_behaviors}, {"timestamp", clock_()}};
    append(session_id, event);
    apply(s, event);
    return s;
}

ReviewSession ReviewStore::record_document_judgment(const std::string &session_id, const std::string &document_id,
                                                    const std::string &q3_missing_stories) {
    std::unique_lock lock(mutex_);
    ReviewSession &s = open_session(session_id);
    const auto r = run(s.run_id);
    if (!r || !r->manifest.find(document_id)) {
        throw ReviewError("document " + document_id + " is not part of run " + s.run_id);
    }
    const json event{{"type", "document_judgment"},
                     {"document_id", document_id},
                     {"q3_missing_stories", q3_missing_stories},
                     {"timestamp", clock_()}};
    append(session_id, event);
    apply(s, event);
    return s;
}

ReviewSession ReviewStore::record_preference(const std::string &session_id, const std::string &document_id,
                                             int chosen_index, int rejected_index) {
    std::unique_lock lock(mutex_);
    ReviewSession &s = open_session(session_id);
    if (chosen_index == rejected_index) {
        throw ReviewError("chosen and rejected response must differ");
    }
    const auto r = run(s.run_id);
    if (!r || !r->manifest.find(document_id)) {
        throw ReviewError("document " + document_id + " is not part of run " + s.run_id);
    }
    for (int idx : {chosen_index, rejected_index}) {
        if (!r->find_response(document_id, idx)) {
            throw ReviewError("document " + document_id + " has no response " + std::to_string(idx));
        }
    }
    const json event{{"type", "preference"},
                     {"document_id", document_id},
                     {"chosen_index", chosen_index},
                     {"rejected_index", rejected_index},
                     {"timestamp", clock_()}};
    append(session_id, event);
    apply(s, event);
    return s;
}

ReviewSession ReviewStore::complete_session(const std::string &session_id) {
    std::unique_lock lock(mutex_);
    ReviewSession &s = open_session(session_id);
    if (s.pending_count() > 0) {
        throw ReviewError("session " + session_id + " still has " + std::to_string(s.pending_count()) +
                          " unjudged stories", 409);
    }
    const json event{{"type", "completed"}, {"timestamp", clock_()}};
    append(session_id, event);
    apply(s, event);
    return s;
}

ReviewReport ReviewStore::report(const std::string &run_id) const {
    const auto r = run(run_id);
    if (!r) {
        throw ReviewError("unknown run " + run_id, 404);
    }
    const auto list = sessions(run_id);
    return aggregate_review(*r, list);
}

std::vector<PreferenceChoice> ReviewStore::preference_choices(const std::string &run_id) const {
    std::vector<PreferenceChoice> out;
    for (const auto &s : sessions(run_id)) {
        for (const auto &[doc, p] : s.preferences) {
            out.push_back(PreferenceChoice{s.session_id, s.reviewer_id, doc, p.chosen_index, p.rejected_index});
        }
    }
    return out;
}

}  // namespace privstory
