#include "privstory/training_export.hpp"

#include "privstory/error.hpp"
#include "privstory/log.hpp"

#include <algorithm>
#include <set>

namespace privstory {

namespace fs = std::filesystem;

SplitSpec SplitSpec::from_json(const json &j) {
    SplitSpec s;
    s.train = j.value("train", std::vector<std::string>{});
    s.heldout = j.value("heldout", std::vector<std::string>{});
    return s;
}

ResolvedSplit resolve_split(const SplitSpec &spec, const Manifest &m) {
    std::set<std::string> heldout;
    for (const auto &id : spec.heldout) {
        if (!m.find(id)) {
            throw ExportError("held-out id " + id + " is not in the manifest");
        }
        if (!heldout.insert(id).second) {
            throw ExportError("held-out id " + id + " listed twice");
        }
    }
    std::set<std::string> train;
    for (const auto &id : spec.train) {
        if (!m.find(id)) {
            throw ExportError("train id " + id + " is not in the manifest");
        }
        if (heldout.contains(id)) {
            throw ExportError("document " + id + " is in both train and held-out splits");
        }
        train.insert(id);
    }
    ResolvedSplit out;
    for (const auto &d : m.documents) {
        if (heldout.contains(d.id)) {
            out.heldout.push_back(d.id);
        } else if (spec.train.empty() || train.contains(d.id)) {
            out.train.push_back(d.id);
        }
    }
    return out;
}

SftExport build_sft(const Manifest &m, const Taxonomy &t, const SplitSpec &split, const SftOptions &opts) {
    SftExport out;
    if (m.documents.empty()) {
        out.warnings.emplace_back("manifest has no documents; SFT file will be empty");
        log_warn(out.warnings.back());
    }
    const auto violations = validate_gold(m, t);
    if (!violations.empty()) {
        const auto &v = violations.front();
        throw ExportError("invalid gold: " + v.document_id + " " + v.field + " \"" + v.value + "\": " + v.message +
                          " (" + std::to_string(violations.size()) + " violation(s))");
    }
    const ResolvedSplit resolved = resolve_split(split, m);
    out.heldout = resolved.heldout;
    for (const auto &id : resolved.train) {
        const Document &doc = *m.find(id);
        const GoldAnnotation *gold = m.find_gold(id);
        if (!gold) {
            out.warnings.push_back(id + ": no gold annotation, skipped");
            log_warn(out.warnings.back());
            continue;
        }
        std::vector<IclExample> examples;
        if (opts.prompt.mode == PromptMode::Full && opts.icl_for) {
            examples = opts.icl_for(doc);
        }
        const PromptBundle bundle = build_prompt(doc, t, examples, opts.prompt);
        out.train.push_back(SftRecord{bundle.user_text, render_tagged_annotation(*gold, t), id, Split::Train});
    }
    return out;
}

json training_metadata() {
    return json{{"note", "Configuration used downstream for fine-tuning; this tool does not train."},
                {"stages", json::array({"sft", "dpo"})},
                {"batch_size", 2},
                {"gradient_accumulation_steps", 3},
                {"learning_rate", 5e-6},
                {"epochs", 3},
                {"lora_rank", 64},
                {"dpo_beta", 0.1},
                {"reasoning_tag", "R"}};
}

json to_json_row(const SftRecord &r) {
    return json{{"prompt", r.prompt}, {"completion", r.completion}, {"document_id", r.document_id}};
}

json to_json_row(const PreferenceRecord &r) {
    return json{{"prompt", r.prompt},
                {"chosen", r.chosen},
                {"rejected", r.rejected},
                {"document_id", r.document_id},
                {"reviewer_id", r.reviewer_id}};
}

void write_jsonl(const fs::path &path, const std::vector<json> &rows) {
    std::string out;
    for (const auto &row : rows) {
        out += row.dump() + "\n";
    }
    write_file_atomic(path, out);
}

void write_sft(const SftExport &sft, const fs::path &dir) {
    std::vector<json> rows;
    for (const auto &r : sft.train) {
        rows.push_back(to_json_row(r));
    }
    write_jsonl(dir / run_layout::kSft, rows);
    write_json_file(dir / run_layout::kSftHeldout, json{{"heldout", sft.heldout}});
    json meta = training_metadata();
    meta["train_records"] = sft.train.size();
    meta["heldout_documents"] = sft.heldout.size();
    write_json_file(dir / run_layout::kSftMeta, meta);
}

std::vector<PreferenceRecord> build_preferences(std::span<const PreferenceChoice> choices, const RunArtifacts &run) {
    std::vector<const PreferenceChoice *> ordered;
    for (const auto &c : choices) {
        ordered.push_back(&c);
    }
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto *a, const auto *b) {
        return std::tie(a->document_id, a->reviewer_id) < std::tie(b->document_id, b->reviewer_id);
    });
    std::vector<PreferenceRecord> out;
    for (const auto *c : ordered) {
        if (c->chosen_index == c->rejected_index) {
            throw ExportError(c->document_id + ": chosen and rejected are the same response (" +
                              std::to_string(c->chosen_index) + ")");
        }
        const RawResponse *chosen = run.find_response(c->document_id, c->chosen_index);
        const RawResponse *rejected = run.find_response(c->document_id, c->rejected_index);
        if (!chosen || !rejected) {
            throw ExportError(c->document_id + ": preference references a missing response (" +
                              std::to_string(chosen ? c->rejected_index : c->chosen_index) + ")");
        }
        if (chosen->text == rejected->text) {
            throw ExportError(c->document_id + ": chosen and rejected responses have identical text");
        }
        auto prompt = run.prompts.find(c->document_id);
        if (prompt == run.prompts.end()) {
            throw ExportError(c->document_id + ": no recorded prompt");
        }
        out.push_back(PreferenceRecord{prompt->second.user_text, chosen->text, rejected->text, c->reviewer_id,
                                       c->document_id});
    }
    return out;
}

}  // namespace privstory
