#include "privstory/review_server.hpp"

#include "privstory/error.hpp"
#include "privstory/log.hpp"

#include <httplib.h>

namespace privstory {

namespace {

void send_json(httplib::Response &res, const json &body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", "application/json");
}

json parse_body(const httplib::Request &req) {
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) {
            throw ReviewError("request body must be a JSON object");
        }
        return j;
    } catch (const json::parse_error &e) {
        throw ReviewError(std::string("malformed JSON body: ") + e.what());
    }
}

template <typename T>
T required(const json &j, const char *key) {
    if (!j.contains(key)) {
        throw ReviewError(std::string("missing field ") + key);
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ReviewError(std::string("field ") + key + " has the wrong type");
    }
}

json document_summary(const RunArtifacts &run, const Document &doc) {
    const ParsedAnnotation *parsed = run.find_parsed(doc.id, kReviewedResponse);
    json j{{"document_id", doc.id},
           {"file_type", file_type_key(doc.file_type)},
           {"stories", parsed ? parsed->stories.size() : 0},
           {"has_gold", run.manifest.find_gold(doc.id) != nullptr}};
    j["app_name"] = doc.app_name ? json(*doc.app_name) : json(nullptr);
    return j;
}

}  // namespace

struct ReviewServer::Impl {
    ReviewStore &store;
    const Taxonomy &taxonomy;
    ReviewServerOptions opts;
    httplib::Server server;
    int port = 0;

    Impl(ReviewStore &s, const Taxonomy &t, ReviewServerOptions o) : store(s), taxonomy(t), opts(std::move(o)) {
        routes();
    }

    std::shared_ptr<const RunArtifacts> run_or_404(const std::string &id) const {
        auto r = store.run(id);
        if (!r) {
            throw ReviewError("unknown run " + id, 404);
        }
        return r;
    }

    json document_detail(const RunArtifacts &run, const Document &doc) const {
        json j = document_summary(run, doc);
        j["run_id"] = run.run_id;
        j["text"] = doc.text;
        if (const GoldAnnotation *gold = run.manifest.find_gold(doc.id)) {
            json g;
            to_json(g, *gold);
            j["gold"] = std::move(g);
        } else {
            j["gold"] = nullptr;
        }
        json responses = json::array();
        for (const auto &[key, raw] : run.responses) {
            if (key.first != doc.id) {
                continue;
            }
            json r{{"response_index", key.second}, {"text", raw.text}, {"model_name", raw.model_name}};
            if (const ParsedAnnotation *p = run.find_parsed(doc.id, key.second)) {
                r["rationale"] = p->rationale;
                r["parsed"] = p->to_json(taxonomy);
            }
            responses.push_back(std::move(r));
        }
        j["responses"] = std::move(responses);
        json stories = json::array();
        if (const ParsedAnnotation *p = run.find_parsed(doc.id, kReviewedResponse)) {
            for (std::size_t i = 0; i < p->stories.size(); ++i) {
                stories.push_back({{"story_index", i},
                                   {"story", p->stories[i].raw},
                                   {"parsed", p->stories[i].triple.has_value()}});
            }
        }
        j["generated_stories"] = std::move(stories);
        return j;
    }

    void routes() {
        server.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const ReviewError &e) {
                send_json(res, json{{"error", e.what()}}, e.status());
            } catch (const Error &e) {
                send_json(res, json{{"error", e.what()}}, 400);
            } catch (const std::exception &e) {
                send_json(res, json{{"error", e.what()}}, 500);
            }
        });

        server.Get("/runs", [this](const httplib::Request &, httplib::Response &res) {
            json out = json::array();
            for (const auto &r : store.runs()) {
                out.push_back({{"run_id", r->run_id},
                               {"model_name", r->info.value("model_name", "")},
                               {"documents", r->manifest.documents.size()},
                               {"stories", review_items(*r).size()}});
            }
            send_json(res, out);
        });

        server.Get(R"(/runs/([^/]+)/documents)", [this](const httplib::Request &req, httplib::Response &res) {
            const auto r = run_or_404(req.matches[1]);
            json out = json::array();
            for (const auto &doc : r->manifest.documents) {
                out.push_back(document_summary(*r, doc));
            }
            send_json(res, out);
        });

        server.Get(R"(/runs/([^/]+)/review-report)", [this](const httplib::Request &req, httplib::Response &res) {
            send_json(res, store.report(req.matches[1]).to_json());
        });

        // Document ids are relative paths and may contain '/'.
        server.Get(R"(/documents/(.+))", [this](const httplib::Request &req, httplib::Response &res) {
            const std::string id = req.matches[1];
            std::shared_ptr<const RunArtifacts> run;
            if (req.has_param("run")) {
                run = run_or_404(req.get_param_value("run"));
            } else {
                for (const auto &r : store.runs()) {
                    if (r->manifest.find(id)) {
                        run = r;
                        break;
                    }
                }
            }
            const Document *doc = run ? run->manifest.find(id) : nullptr;
            if (!doc) {
                throw ReviewError("unknown document " + id, 404);
            }
            send_json(res, document_detail(*run, *doc));
        });

        server.Get("/sessions", [this](const httplib::Request &req, httplib::Response &res) {
            std::optional<std::string> run;
            if (req.has_param("run_id")) {
                run = req.get_param_value("run_id");
            }
            json out = json::array();
            for (const auto &s : store.sessions(run)) {
                out.push_back({{"session_id", s.session_id},
                               {"reviewer_id", s.reviewer_id},
                               {"run_id", s.run_id},
                               {"status", s.status == SessionStatus::Open ? "open" : "complete"},
                               {"progress", {{"judged", s.judged_count()}, {"total", s.items.size()}}}});
            }
            send_json(res, out);
        });

        server.Post("/sessions", [this](const httplib::Request &req, httplib::Response &res) {
            const json body = parse_body(req);
            const auto s = store.create_session(required<std::string>(body, "run_id"),
                                                required<std::string>(body, "reviewer_id"));
            send_json(res, s.to_json(), 201);
        });

        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
            send_json(res, store.session(req.matches[1]).to_json());
        });

        server.Post(R"(/sessions/([^/]+)/judgments)", [this](const httplib::Request &req, httplib::Response &res) {
            const json body = parse_body(req);
            const std::string sid = req.matches[1];
            const auto doc = required<std::string>(body, "document_id");
            ReviewSession s;
            if (body.contains("q3_missing_stories")) {
                s = store.record_document_judgment(sid, doc, required<std::string>(body, "q3_missing_stories"));
            } else {
                const auto index = required<long long>(body, "story_index");
                if (index < 0) {
                    throw ReviewError("story_index must be non-negative");
                }
                s = store.record_story_judgment(sid, doc, static_cast<std::size_t>(index),
                                                required<bool>(body, "q1_accurate"),
                                                required<bool>(body, "q2_missing_behaviors"));
            }
            send_json(res, s.to_json());
        });

        server.Post(R"(/sessions/([^/]+)/preferences)", [this](const httplib::Request &req, httplib::Response &res) {
            const json body = parse_body(req);
            const auto s = store.record_preference(req.matches[1], required<std::string>(body, "document_id"),
                                                   required<int>(body, "chosen_response_index"),
                                                   required<int>(body, "rejected_response_index"));
            send_json(res, s.to_json());
        });

        server.Post(R"(/sessions/([^/]+)/complete)", [this](const httplib::Request &req, httplib::Response &res) {
            send_json(res, store.complete_session(req.matches[1]).to_json());
        });

        if (opts.ui_dir) {
            if (!server.set_mount_point("/", opts.ui_dir->string())) {
                log_warn("review UI directory " + opts.ui_dir->string() + " not found; serving the API only");
            }
        }
    }
};

ReviewServer::ReviewServer(ReviewStore &store, const Taxonomy &taxonomy, ReviewServerOptions opts)
    : impl_(std::make_unique<Impl>(store, taxonomy, std::move(opts))) {}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind() {
    if (impl_->opts.port == 0) {
        impl_->port = impl_->server.bind_to_any_port(impl_->opts.host);
    } else if (impl_->server.bind_to_port(impl_->opts.host, impl_->opts.port)) {
        impl_->port = impl_->opts.port;
    } else {
        impl_->port = -1;
    }
    if (impl_->port <= 0) {
        throw ReviewError("cannot bind " + impl_->opts.host + ":" + std::to_string(impl_->opts.port), 500);
    }
    return impl_->port;
}

void ReviewServer::listen() { impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
}

}  // namespace privstory
