// privstory: command-line front end for the annotation pipeline.

#include "privstory/error.hpp"
#include "privstory/log.hpp"
#include "privstory/pipeline.hpp"
#include "privstory/review_server.hpp"
#include "privstory/run.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <iostream>

namespace {

privstory::ReviewServer *g_server = nullptr;

void handle_signal(int) {
    if (g_server) {
        g_server->stop();
    }
}

}  // namespace

int main(int argc, char **argv) {
    using namespace privstory;
    namespace fs = std::filesystem;

    CLI::App app{"Annotate software documentation with privacy behaviors and privacy stories"};
    app.require_subcommand(1);

    std::string config_path = "privstory.json";
    std::string run_dir;
    bool replay = false;
    bool record = false;
    bool verbose = false;
    app.add_option("--config", config_path, "Run configuration file")->capture_default_str();
    app.add_option("--run-dir", run_dir, "Override the configured run directory");
    auto *replay_flag = app.add_flag("--replay", replay, "Answer model requests from the replay store only");
    app.add_flag("--record", record, "Persist live model responses into the replay store")->excludes(replay_flag);
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    app.add_subcommand("ingest", "Scan documents, attach gold annotations, write the run manifest");
    app.add_subcommand("annotate", "Build prompts, query the model and parse responses");
    app.add_subcommand("evaluate", "Score parsed annotations against gold");
    app.add_subcommand("export-sft", "Write supervised fine-tuning pairs");
    app.add_subcommand("export-dpo", "Write preference pairs from review sessions");
    auto *serve = app.add_subcommand("review-serve", "Serve the review API and UI");
    std::optional<int> port;
    std::optional<std::string> data_dir;
    std::optional<std::string> host;
    std::optional<std::string> ui_dir;
    serve->add_option("--port", port, "Listening port (0 picks a free one)");
    serve->add_option("--data-dir", data_dir, "Directory holding session logs");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--ui-dir", ui_dir, "Static review UI bundle");
    app.add_subcommand("taxonomy-check", "Validate the taxonomy and gold annotations");

    CLI11_PARSE(app, argc, argv);
    set_verbose(verbose);
    const std::string stage = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = RunConfig::load(config_path);
        if (!run_dir.empty()) {
            cfg.run_dir = fs::absolute(run_dir);
        }
        if (replay) {
            cfg.model.provider_kind = ProviderKind::Replay;
        }
        if (stage == "ingest") {
            run_ingest(cfg);
        } else if (stage == "annotate") {
            AnnotateOptions opts;
            opts.record = record;
            run_annotate(cfg, opts);
        } else if (stage == "evaluate") {
            (void)run_evaluate(cfg);
        } else if (stage == "export-sft") {
            (void)run_export_sft(cfg);
        } else if (stage == "export-dpo") {
            (void)run_export_dpo(cfg);
        } else if (stage == "review-serve") {
            const Taxonomy taxonomy = Taxonomy::load_file(cfg.taxonomy);
            auto run = std::make_shared<const RunArtifacts>(RunArtifacts::load(cfg.run_dir, taxonomy));
            ReviewStore store(data_dir ? fs::path(*data_dir) : cfg.review_data_dir, {run});
            ReviewServerOptions opts;
            opts.host = host.value_or(cfg.review_host);
            opts.port = port.value_or(cfg.review_port);
            if (ui_dir) {
                opts.ui_dir = *ui_dir;
            } else {
                opts.ui_dir = cfg.review_ui_dir;
            }
            ReviewServer server(store, taxonomy, opts);
            const int bound = server.bind();
            g_server = &server;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            log_info(fmt::format("review-serve: run {} on http://{}:{}", run->run_id, opts.host, bound));
            server.listen();
            g_server = nullptr;
        } else if (stage == "taxonomy-check") {
            const TaxonomyCheck check = run_taxonomy_check(cfg);
            std::cerr << fmt::format("taxonomy {}: {} actions, {} data types, {} purposes, max depth {}\n",
                                     check.version, check.label_counts[0], check.label_counts[1],
                                     check.label_counts[2], check.max_depth);
            for (const auto &v : check.violations) {
                std::cerr << fmt::format("{}: {} \"{}\": {}\n", v.document_id, v.field, v.value, v.message);
            }
            if (!check.violations.empty()) {
                std::cerr << fmt::format("{} gold violation(s)\n", check.violations.size());
                return 1;
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "privstory " << stage << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
