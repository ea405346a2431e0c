#include "privstory/run.hpp"

#include "privstory/error.hpp"

namespace privstory {

namespace fs = std::filesystem;

namespace run_layout {

fs::path prompt_path(const fs::path &run, const std::string &doc) {
    return run / kPrompts / (artifact_stem(doc) + ".json");
}

fs::path response_path(const fs::path &run, const std::string &doc, int index) {
    return run / kResponses / (artifact_stem(doc) + "." + std::to_string(index) + ".json");
}

fs::path parsed_path(const fs::path &run, const std::string &doc, int index) {
    return run / kParsed / (artifact_stem(doc) + "." + std::to_string(index) + ".json");
}

}  // namespace run_layout

RunArtifacts RunArtifacts::load(const fs::path &dir, const Taxonomy &t) {
    RunArtifacts run;
    run.dir = dir;
    const fs::path done = dir / run_layout::kAnnotateDone;
    if (!fs::exists(done)) {
        throw Error(dir.string() + " has no annotate outputs (missing " + std::string(run_layout::kAnnotateDone) + ")");
    }
    run.info = read_json_file(done);
    run.run_id = run.info.value("run_id", dir.filename().string());
    run.manifest = Manifest::load(dir / run_layout::kManifest);
    const int responses = run.info.value("responses_per_document", 1);
    for (const auto &doc : run.manifest.documents) {
        if (auto p = run_layout::prompt_path(dir, doc.id); fs::exists(p)) {
            run.prompts.emplace(doc.id, read_json_file(p).get<PromptBundle>());
        }
        for (int i = 0; i < responses; ++i) {
            if (auto p = run_layout::response_path(dir, doc.id, i); fs::exists(p)) {
                run.responses.emplace(ResponseKey{doc.id, i}, read_json_file(p).get<RawResponse>());
            }
            if (auto p = run_layout::parsed_path(dir, doc.id, i); fs::exists(p)) {
                run.parsed.emplace(ResponseKey{doc.id, i}, ParsedAnnotation::from_json(read_json_file(p), t));
            }
        }
    }
    return run;
}

const ParsedAnnotation *RunArtifacts::find_parsed(const std::string &doc, int index) const {
    auto it = parsed.find({doc, index});
    return it == parsed.end() ? nullptr : &it->second;
}

const RawResponse *RunArtifacts::find_response(const std::string &doc, int index) const {
    auto it = responses.find({doc, index});
    return it == responses.end() ? nullptr : &it->second;
}

}  // namespace privstory
