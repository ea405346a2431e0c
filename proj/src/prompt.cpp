#include "privstory/prompt.hpp"

#include "privstory/error.hpp"
#include "privstory/log.hpp"
#include "privstory/story.hpp"
#include "privstory/text.hpp"

namespace privstory {

std::string_view tags::for_category(Category c) {
    switch (c) {
    case Category::Action:
        return kActions;
    case Category::DataType:
        return kDataTypes;
    case Category::Purpose:
        return kPurposes;
    }
    return kActions;
}

PromptTemplate PromptTemplate::from_json(const json &j) {
    PromptTemplate t;
    auto take = [&](const char *key, std::string &field) {
        if (auto it = j.find(key); it != j.end()) {
            field = it->get<std::string>();
        }
    };
    take("version", t.version);
    take("system", t.system);
    take("task", t.task);
    take("label_intro", t.label_intro);
    take("example_intro", t.example_intro);
    take("example_document_heading", t.example_document_heading);
    take("example_answer_heading", t.example_answer_heading);
    take("example_end", t.example_end);
    take("format_intro", t.format_intro);
    take("reasoning_description", t.reasoning_description);
    take("label_description", t.label_description);
    take("story_description", t.story_description);
    take("document_intro", t.document_intro);
    take("document_heading", t.document_heading);
    take("document_end", t.document_end);
    take("restate_intro", t.restate_intro);
    take("verify_instruction", t.verify_instruction);
    return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path &path) {
    try {
        return from_json(read_json_file(path));
    } catch (const json::exception &e) {
        throw PromptError(path.string() + ": " + e.what());
    }
}

void to_json(json &j, const PromptBundle &p) {
    j = json{{"document_id", p.document_id},
             {"system_text", p.system_text},
             {"user_text", p.user_text},
             {"icl_document_ids", p.icl_document_ids},
             {"tag_contract", p.tag_contract},
             {"taxonomy_version", p.taxonomy_version},
             {"template_version", p.template_version},
             {"warnings", p.warnings}};
}

void from_json(const json &j, PromptBundle &p) {
    p.document_id = j.at("document_id").get<std::string>();
    p.system_text = j.at("system_text").get<std::string>();
    p.user_text = j.at("user_text").get<std::string>();
    p.icl_document_ids = j.value("icl_document_ids", std::vector<std::string>{});
    p.tag_contract = j.value("tag_contract", std::vector<std::string>{});
    p.taxonomy_version = j.value("taxonomy_version", std::string{});
    p.template_version = j.value("template_version", std::string{});
    p.warnings = j.value("warnings", std::vector<std::string>{});
}

namespace {

std::string open_tag(std::string_view name) {
    return "<" + std::string(name) + ">";
}

std::string close_tag(std::string_view name) {
    return "</" + std::string(name) + ">";
}

void append_block(std::string &out, std::string_view tag, const std::vector<std::string> &lines) {
    out += open_tag(tag) + "\n";
    for (const auto &l : lines) {
        out += l + "\n";
    }
    out += close_tag(tag) + "\n";
}

// Cuts at a UTF-8 boundary at or below `limit`.
std::string_view utf8_prefix(std::string_view s, std::size_t limit) {
    if (s.size() <= limit) {
        return s;
    }
    std::size_t cut = limit;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) {
        --cut;
    }
    return s.substr(0, cut);
}

}  // namespace

std::string render_tagged_annotation(const GoldAnnotation &gold, const Taxonomy &t,
                                     const std::optional<std::string> &rationale) {
    std::string out;
    if (rationale) {
        out += open_tag(tags::kReasoning) + "\n" + *rationale + "\n" + close_tag(tags::kReasoning) + "\n";
    }
    for (Category c : kCategories) {
        std::vector<std::string> names;
        for (const auto &label : gold.labels(c)) {
            auto id = t.find_label(label, c);
            names.push_back(id ? t.node(*id).name : label);
        }
        append_block(out, tags::for_category(c), names);
    }
    std::vector<std::string> stories;
    for (const auto &s : gold.stories) {
        stories.push_back(render_story(s, t));
    }
    append_block(out, tags::kStories, stories);
    return out;
}

std::string render_label_lists(const Taxonomy &t) {
    std::string out;
    for (Category c : kCategories) {
        out += t.node(t.root(c)).name + ":\n";
        for (NodeId id : t.labels(c)) {
            const auto &node = t.node(id);
            out += std::string(static_cast<std::size_t>(2 * (node.depth - 1)), ' ') + "- " + node.name + "\n";
        }
    }
    return out;
}

PromptBundle build_prompt(const Document &doc, const Taxonomy &t, std::span<const IclExample> examples,
                          const PromptOptions &opts) {
    if (trim(doc.text).empty()) {
        throw PromptError(doc.id + ": document text is empty");
    }
    const PromptTemplate &tp = opts.tmpl;
    const bool full = opts.mode == PromptMode::Full;

    PromptBundle bundle;
    bundle.document_id = doc.id;
    bundle.system_text = tp.system;
    bundle.taxonomy_version = t.version();
    bundle.template_version = tp.version + (full ? "+full" : "+base");

    std::string text;
    // (1) task
    text += tp.task + "\n\n";
    // (2) labels
    text += tp.label_intro + "\n" + render_label_lists(t) + "\n";
    // (3) in-context examples
    if (full) {
        for (const auto &ex : examples) {
            if (!ex.document || !ex.gold) {
                throw PromptError(doc.id + ": incomplete in-context example");
            }
            if (ex.document->id == doc.id) {
                throw PromptError(doc.id + ": a document cannot be its own in-context example");
            }
            const auto violations = validate_annotation(*ex.gold, t);
            if (!violations.empty()) {
                throw PromptError("in-context example " + ex.document->id + " has invalid gold: " +
                                  violations.front().field + " \"" + violations.front().value + "\" " +
                                  violations.front().message);
            }
            bundle.icl_document_ids.push_back(ex.document->id);
            text += tp.example_intro + "\n" + tp.example_document_heading + "\n" + std::string(trim(ex.document->text)) +
                    "\n" + tp.example_answer_heading + "\n" + render_tagged_annotation(*ex.gold, t) + tp.example_end +
                    "\n\n";
        }
        // (4) format contract
        text += tp.format_intro + "\n";
        for (auto tag : tags::kContract) {
            bundle.tag_contract.emplace_back(tag);
            std::string description;
            if (tag == tags::kReasoning) {
                description = tp.reasoning_description;
            } else if (tag == tags::kStories) {
                description = tp.story_description;
            } else {
                description = tp.label_description;
            }
            text += open_tag(tag) + " ... " + close_tag(tag) + ": " + description + "\n";
        }
        text += "\n";
    }
    // (5) target document
    std::string_view body = trim(doc.text);
    if (opts.max_document_chars > 0 && body.size() > opts.max_document_chars) {
        body = utf8_prefix(body, opts.max_document_chars);
        bundle.warnings.push_back(doc.id + ": document truncated from " + std::to_string(trim(doc.text).size()) +
                                  " to " + std::to_string(body.size()) + " bytes");
        log_warn(bundle.warnings.back());
    }
    text += tp.document_intro + "\n" + tp.document_heading + "\n" + std::string(body) + "\n" + tp.document_end + "\n";
    // (6) restated task and verification
    if (full) {
        text += "\n" + tp.restate_intro + " " + tp.task + "\n" + tp.verify_instruction + "\n";
    }
    bundle.user_text = std::move(text);
    return bundle;
}

}  // namespace privstory
