#include "privstory/pipeline.hpp"

#include "privstory/embedding.hpp"
#include "privstory/error.hpp"
#include "privstory/http.hpp"
#include "privstory/log.hpp"
#include "privstory/parser.hpp"
#include "privstory/review.hpp"
#include "privstory/run.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace privstory {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::optional<fs::path> optional_path(const json &j, const char *key, const fs::path &base) {
    if (auto it = j.find(key); it != j.end() && it->is_string()) {
        return resolve(base, it->get<std::string>());
    }
    return std::nullopt;
}

PromptMode parse_mode(const std::string &s) {
    if (s == "full") {
        return PromptMode::Full;
    }
    if (s == "base") {
        return PromptMode::Base;
    }
    throw ConfigError("template mode must be \"full\" or \"base\", got \"" + s + "\"");
}

Taxonomy load_taxonomy(const RunConfig &cfg) { return Taxonomy::load_file(cfg.taxonomy); }

Manifest load_run_manifest(const RunConfig &cfg) {
    const fs::path path = cfg.run_dir / run_layout::kManifest;
    if (!fs::exists(path)) {
        throw Error(cfg.run_dir.string() + " has no ingest outputs (missing " + run_layout::kManifest +
                    "); run the ingest stage first");
    }
    return Manifest::load(path);
}

std::unique_ptr<EmbeddingProvider> make_embedder(const RunConfig &cfg, const Manifest &m) {
    if (cfg.embedding == EmbeddingKind::Remote) {
        const std::string base = env_or_empty("PRIVSTORY_EMBEDDING_BASE_URL");
        if (base.empty()) {
            throw ConfigError("embedding provider \"remote\" needs PRIVSTORY_EMBEDDING_BASE_URL");
        }
        return std::make_unique<RemoteEmbedder>(base, env_or_empty("PRIVSTORY_EMBEDDING_API_KEY"), cfg.embedding_model);
    }
    std::vector<std::string> corpus;
    for (const auto &d : m.documents) {
        corpus.push_back(d.text);
    }
    return std::make_unique<TfidfEmbedder>(corpus);
}

std::vector<IclExample> icl_examples(const Document &doc, const Manifest &m, EmbeddingProvider &embedder,
                                     std::size_t k) {
    std::vector<IclExample> out;
    for (const auto &id : select_icl_examples(doc, m, embedder, k)) {
        out.push_back(IclExample{m.find(id), m.find_gold(id)});
    }
    return out;
}

void reset_dir(const fs::path &dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
}

}  // namespace

RunConfig RunConfig::from_json(const json &j, const fs::path &base_dir) {
    RunConfig cfg;
    try {
        cfg.taxonomy = resolve(base_dir, j.at("taxonomy").get<std::string>());
        cfg.manifest = optional_path(j, "manifest", base_dir);
        cfg.documents_root = optional_path(j, "documents_root", base_dir);
        cfg.hints = optional_path(j, "hints", base_dir);
        cfg.run_dir = resolve(base_dir, j.value("run_dir", std::string("run")));
        cfg.run_id = j.value("run_id", cfg.run_dir.filename().string());
        cfg.store = resolve(base_dir, j.value("store", std::string("replay")));
        cfg.parallelism = j.value("parallelism", std::size_t{4});
        if (auto t = j.find("template"); t != j.end()) {
            cfg.prompt.mode = parse_mode(t->value("mode", std::string("full")));
            cfg.prompt.icl_k = t->value("k", std::size_t{1});
            cfg.prompt.max_document_chars = t->value("max_document_chars", std::size_t{0});
            cfg.template_path = optional_path(*t, "template_path", base_dir);
        }
        if (cfg.template_path) {
            cfg.prompt.tmpl = PromptTemplate::load(*cfg.template_path);
        }
        cfg.model = ModelConfig::from_json(j.value("model", json::object()));
        if (auto s = j.find("split"); s != j.end()) {
            cfg.split = SplitSpec::from_json(*s);
        }
        if (auto e = j.find("export"); e != j.end()) {
            cfg.sft_mode = parse_mode(e->value("mode", std::string("base")));
        }
        if (auto e = j.find("embedding"); e != j.end()) {
            const auto kind = e->value("provider", std::string("tfidf"));
            if (kind == "tfidf") {
                cfg.embedding = EmbeddingKind::Tfidf;
            } else if (kind == "remote") {
                cfg.embedding = EmbeddingKind::Remote;
            } else {
                throw ConfigError("embedding provider must be \"tfidf\" or \"remote\"");
            }
            cfg.embedding_model = e->value("model_name", std::string{});
        }
        if (auto e = j.find("evaluation"); e != j.end()) {
            cfg.scoring.penalize_hallucinations = e->value("penalize_hallucinations", false);
            cfg.eval_response_index = e->value("response_index", 0);
        }
        cfg.review_data_dir = cfg.run_dir / "review";
        if (auto r = j.find("review"); r != j.end()) {
            if (auto d = optional_path(*r, "data_dir", base_dir)) {
                cfg.review_data_dir = *d;
            }
            cfg.review_host = r->value("host", cfg.review_host);
            cfg.review_port = r->value("port", cfg.review_port);
            cfg.review_ui_dir = optional_path(*r, "ui_dir", base_dir);
        }
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed run config: ") + e.what());
    }
    return cfg;
}

RunConfig RunConfig::load(const fs::path &path) {
    if (!fs::exists(path)) {
        throw ConfigError("config file " + path.string() + " does not exist");
    }
    json j;
    try {
        j = read_json_file(path);
    } catch (const json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    RunConfig cfg = from_json(j, fs::absolute(path).parent_path());
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (!fs::exists(taxonomy)) {
        throw ConfigError("taxonomy file " + taxonomy.string() + " does not exist");
    }
    if (manifest && !fs::exists(*manifest)) {
        throw ConfigError("manifest file " + manifest->string() + " does not exist");
    }
    if (documents_root && !fs::is_directory(*documents_root)) {
        throw ConfigError("documents_root " + documents_root->string() + " is not a directory");
    }
    if (hints && !fs::exists(*hints)) {
        throw ConfigError("hints file " + hints->string() + " does not exist");
    }
    if (!manifest && !documents_root) {
        throw ConfigError("config needs a manifest or a documents_root");
    }
    if (parallelism < 1) {
        throw ConfigError("parallelism must be at least 1");
    }
    if (prompt.mode == PromptMode::Full && prompt.icl_k < 1) {
        throw ConfigError("template.k must be at least 1 in full mode");
    }
    if (eval_response_index < 0) {
        throw ConfigError("evaluation.response_index must be non-negative");
    }
    if (run_id.empty()) {
        throw ConfigError("run_id is empty");
    }
    model.validate();
}

Manifest run_ingest(const RunConfig &cfg) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    Manifest m;
    if (cfg.documents_root) {
        const TypeHints hints = cfg.hints ? TypeHints::load(*cfg.hints) : TypeHints{};
        m = ingest_documents(*cfg.documents_root, hints);
        if (cfg.manifest) {
            attach_gold(m, Manifest::load(*cfg.manifest));
        }
    } else {
        m = Manifest::load(*cfg.manifest);
    }
    if (!m.taxonomy_version.empty() && m.taxonomy_version != taxonomy.version()) {
        throw CorpusError("gold was annotated against taxonomy " + m.taxonomy_version + " but the run uses " +
                          taxonomy.version());
    }
    m.taxonomy_version = taxonomy.version();
    if (auto violations = validate_gold(m, taxonomy); !violations.empty()) {
        std::string msg = fmt::format("{} gold annotation violation(s):", violations.size());
        for (const auto &v : violations) {
            msg += fmt::format("\n  {} {} \"{}\": {}", v.document_id, v.field, v.value, v.message);
        }
        throw CorpusError(msg);
    }
    fs::create_directories(cfg.run_dir);
    m.save(cfg.run_dir / run_layout::kManifest, true);
    json info{{"run_id", cfg.run_id},
              {"taxonomy_version", taxonomy.version()},
              {"documents", m.documents.size()},
              {"gold_documents", m.gold.size()}};
    json counts = json::object();
    for (const auto &[type, n] : m.count_by_type()) {
        counts[std::string(file_type_key(type))] = n;
    }
    info["documents_by_type"] = std::move(counts);
    write_json_file(cfg.run_dir / run_layout::kRunInfo, info);
    log_info(fmt::format("ingest: {} documents ({} with gold) -> {}", m.documents.size(), m.gold.size(),
                         cfg.run_dir.string()));
    return m;
}

void run_annotate(const RunConfig &cfg, const AnnotateOptions &opts) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const Manifest m = load_run_manifest(cfg);
    fs::remove(cfg.run_dir / run_layout::kAnnotateDone);
    reset_dir(cfg.run_dir / run_layout::kPrompts);
    reset_dir(cfg.run_dir / run_layout::kResponses);
    reset_dir(cfg.run_dir / run_layout::kParsed);

    std::unique_ptr<EmbeddingProvider> embedder;
    if (cfg.prompt.mode == PromptMode::Full) {
        embedder = make_embedder(cfg, m);
    }
    std::vector<PromptBundle> prompts;
    for (const auto &doc : m.documents) {
        std::vector<IclExample> examples;
        if (embedder) {
            examples = icl_examples(doc, m, *embedder, cfg.prompt.icl_k);
        }
        PromptBundle p = build_prompt(doc, taxonomy, examples, cfg.prompt);
        write_json_file(run_layout::prompt_path(cfg.run_dir, doc.id), json(p));
        log_debug(fmt::format("prompt {} (examples: {})", doc.id, fmt::join(p.icl_document_ids, ", ")));
        prompts.push_back(std::move(p));
    }

    std::shared_ptr<ChatProvider> provider =
        opts.provider ? opts.provider : make_provider(cfg.model, cfg.store, opts.record);
    const int per_doc = cfg.model.responses_per_document;
    const std::size_t jobs = prompts.size() * static_cast<std::size_t>(per_doc);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::vector<std::string> errors;
    std::atomic<std::size_t> parse_warnings{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const PromptBundle &p = prompts[job / per_doc];
            const int index = static_cast<int>(job % per_doc);
            try {
                const RawResponse r = provider->complete(p, cfg.model, index);
                write_json_file(run_layout::response_path(cfg.run_dir, p.document_id, index), json(r));
                const ParsedAnnotation parsed = parse_response(r.text, p.document_id, taxonomy, index);
                parse_warnings += parsed.warnings.size();
                for (const auto &w : parsed.warnings) {
                    log_debug(fmt::format("{}#{}: {}", p.document_id, index, w));
                }
                write_json_file(run_layout::parsed_path(cfg.run_dir, p.document_id, index), parsed.to_json(taxonomy));
            } catch (const std::exception &e) {
                std::lock_guard lock(error_mutex);
                errors.push_back(fmt::format("{} (response {}): {}", p.document_id, index, e.what()));
            }
        }
    };
    const std::size_t threads = std::min(cfg.parallelism, std::max<std::size_t>(jobs, 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end());
        std::string msg = fmt::format("annotate failed for {} of {} request(s):", errors.size(), jobs);
        for (const auto &e : errors) {
            msg += "\n  " + e;
        }
        throw Error(msg);
    }
    write_json_file(cfg.run_dir / run_layout::kAnnotateDone,
                    json{{"run_id", cfg.run_id},
                         {"model_name", cfg.model.model_name},
                         {"provider_kind", provider_kind_key(cfg.model.provider_kind)},
                         {"temperature", cfg.model.temperature},
                         {"template_version", prompts.empty() ? std::string{} : prompts.front().template_version},
                         {"taxonomy_version", taxonomy.version()},
                         {"responses_per_document", per_doc},
                         {"documents", prompts.size()},
                         {"parse_warnings", parse_warnings.load()}});
    log_info(fmt::format("annotate: {} response(s) for {} documents ({} parse warnings)", jobs, prompts.size(),
                         parse_warnings.load()));
}

EvalReport run_evaluate(const RunConfig &cfg) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const RunArtifacts run = RunArtifacts::load(cfg.run_dir, taxonomy);
    std::vector<DocumentScore> scores;
    for (const auto &doc : run.manifest.documents) {
        const GoldAnnotation *gold = run.manifest.find_gold(doc.id);
        if (!gold) {
            log_warn(doc.id + ": no gold annotation, not scored");
            continue;
        }
        const ParsedAnnotation *parsed = run.find_parsed(doc.id, cfg.eval_response_index);
        if (!parsed) {
            throw EvaluationError(fmt::format("{}: no parsed annotation for response {}", doc.id,
                                              cfg.eval_response_index));
        }
        scores.push_back(score_document(*parsed, *gold, taxonomy, cfg.scoring));
    }
    RunMetadata meta;
    meta.run_id = run.run_id;
    meta.model_name = run.info.value("model_name", std::string{});
    meta.template_version = run.info.value("template_version", std::string{});
    meta.taxonomy_version = taxonomy.version();
    meta.response_index = cfg.eval_response_index;
    meta.penalize_hallucinations = cfg.scoring.penalize_hallucinations;
    EvalReport report = aggregate(scores, run.manifest, meta);
    write_json_file(cfg.run_dir / run_layout::kReportJson, report.to_json());
    write_file_atomic(cfg.run_dir / run_layout::kReportCsv, report.to_csv());
    log_info(fmt::format("evaluate: {} documents, macro F1 {:.3f}, micro F1 {:.3f}", scores.size(),
                         round3(report.overall_macro.f1), round3(report.overall_micro.f1)));
    return report;
}

SftExport run_export_sft(const RunConfig &cfg) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const Manifest m = load_run_manifest(cfg);
    SftOptions opts;
    opts.prompt = cfg.prompt;
    opts.prompt.mode = cfg.sft_mode;
    std::unique_ptr<EmbeddingProvider> embedder;
    if (cfg.sft_mode == PromptMode::Full) {
        embedder = make_embedder(cfg, m);
        opts.icl_for = [&](const Document &doc) { return icl_examples(doc, m, *embedder, cfg.prompt.icl_k); };
    }
    SftExport sft = build_sft(m, taxonomy, cfg.split, opts);
    for (const auto &w : sft.warnings) {
        log_warn(w);
    }
    write_sft(sft, cfg.run_dir);
    log_info(fmt::format("export-sft: {} train record(s), {} held out", sft.train.size(), sft.heldout.size()));
    return sft;
}

std::vector<PreferenceRecord> run_export_dpo(const RunConfig &cfg) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    auto run = std::make_shared<const RunArtifacts>(RunArtifacts::load(cfg.run_dir, taxonomy));
    const ReviewStore store(cfg.review_data_dir, {run});
    const auto choices = store.preference_choices(run->run_id);
    const auto records = build_preferences(choices, *run);
    std::vector<json> rows;
    for (const auto &r : records) {
        rows.push_back(to_json_row(r));
    }
    write_jsonl(cfg.run_dir / run_layout::kPreferences, rows);
    if (records.empty()) {
        log_warn("export-dpo: no preference judgments recorded for run " + run->run_id);
    }
    log_info(fmt::format("export-dpo: {} preference record(s)", records.size()));
    return records;
}

TaxonomyCheck run_taxonomy_check(const RunConfig &cfg) {
    const Taxonomy taxonomy = load_taxonomy(cfg);
    TaxonomyCheck check;
    check.version = taxonomy.version();
    check.max_depth = taxonomy.max_depth();
    for (Category c : kCategories) {
        check.label_counts[static_cast<std::size_t>(c)] = taxonomy.label_count(c);
    }
    if (cfg.manifest) {
        check.violations = validate_gold(Manifest::load(*cfg.manifest), taxonomy);
    }
    return check;
}

}  // namespace privstory
