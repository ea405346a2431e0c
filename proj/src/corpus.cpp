#include "privstory/corpus.hpp"

#include "privstory/error.hpp"
#include "privstory/log.hpp"
#include "privstory/text.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <set>

namespace privstory {

namespace fs = std::filesystem;

std::string_view file_type_key(FileType f) {
    switch (f) {
    case FileType::SoftwareCodeSpec:
        return "software_code_spec";
    case FileType::UserDeveloperGuide:
        return "user_developer_guide";
    case FileType::ArchitectureDbDesign:
        return "architecture_db_design";
    case FileType::Readme:
        return "readme";
    }
    return "?";
}

std::string_view file_type_label(FileType f) {
    switch (f) {
    case FileType::SoftwareCodeSpec:
        return "Software & Code Spec";
    case FileType::UserDeveloperGuide:
        return "User & Developer Guides";
    case FileType::ArchitectureDbDesign:
        return "Architecture & DB Design Diagrams";
    case FileType::Readme:
        return "README";
    }
    return "?";
}

std::optional<FileType> parse_file_type(std::string_view key) {
    for (FileType f : kFileTypes) {
        if (key == file_type_key(f)) {
            return f;
        }
    }
    return std::nullopt;
}

const std::vector<std::string> &GoldAnnotation::labels(Category c) const {
    switch (c) {
    case Category::Action:
        return actions;
    case Category::DataType:
        return data_types;
    case Category::Purpose:
        return purposes;
    }
    return actions;
}

std::vector<std::string> &GoldAnnotation::labels(Category c) {
    return const_cast<std::vector<std::string> &>(std::as_const(*this).labels(c));
}

const Document *Manifest::find(std::string_view id) const {
    for (const auto &d : documents) {
        if (d.id == id) {
            return &d;
        }
    }
    return nullptr;
}

const GoldAnnotation *Manifest::find_gold(std::string_view id) const {
    auto it = gold.find(std::string(id));
    return it == gold.end() ? nullptr : &it->second;
}

std::map<FileType, std::size_t> Manifest::count_by_type() const {
    std::map<FileType, std::size_t> counts;
    for (const auto &d : documents) {
        ++counts[d.file_type];
    }
    return counts;
}

void to_json(json &j, const StoryTriple &s) {
    j = json{{"action", s.action}, {"data_types", s.data_types}, {"purposes", s.purposes}};
}

void from_json(const json &j, StoryTriple &s) {
    s.action = j.at("action").get<std::string>();
    s.data_types = j.at("data_types").get<std::vector<std::string>>();
    s.purposes = j.at("purposes").get<std::vector<std::string>>();
}

void to_json(json &j, const GoldAnnotation &g) {
    j = json{{"actions", g.actions}, {"data_types", g.data_types}, {"purposes", g.purposes}, {"stories", g.stories}};
}

void from_json(const json &j, GoldAnnotation &g) {
    g.actions = j.value("actions", std::vector<std::string>{});
    g.data_types = j.value("data_types", std::vector<std::string>{});
    g.purposes = j.value("purposes", std::vector<std::string>{});
    g.stories = j.value("stories", std::vector<StoryTriple>{});
}

json Manifest::to_json(const fs::path &base_dir, bool embed_text) const {
    json docs = json::array();
    for (const auto &d : documents) {
        json jd;
        jd["id"] = d.id;
        jd["path"] = d.path.is_absolute() ? fs::relative(d.path, base_dir).generic_string() : d.path.generic_string();
        jd["file_type"] = file_type_key(d.file_type);
        jd["app_name"] = d.app_name ? json(*d.app_name) : json(nullptr);
        if (embed_text) {
            jd["text"] = d.text;
        }
        docs.push_back(std::move(jd));
    }
    json jg = json::object();
    for (const auto &[id, g] : gold) {
        jg[id] = g;
    }
    json out;
    out["taxonomy_version"] = taxonomy_version;
    out["documents"] = std::move(docs);
    out["gold"] = std::move(jg);
    if (!warnings.empty()) {
        out["warnings"] = warnings;
    }
    return out;
}

Manifest Manifest::from_json(const json &j, const fs::path &base_dir) {
    Manifest m;
    try {
        m.taxonomy_version = j.value("taxonomy_version", std::string{});
        std::set<std::string> seen;
        for (const auto &jd : j.at("documents")) {
            Document d;
            d.id = jd.at("id").get<std::string>();
            if (!seen.insert(d.id).second) {
                throw CorpusError("duplicate document id " + d.id);
            }
            const fs::path stored = jd.at("path").get<std::string>();
            d.path = stored.is_absolute() ? stored : (base_dir / stored).lexically_normal();
            const auto type_key = jd.at("file_type").get<std::string>();
            auto type = parse_file_type(type_key);
            if (!type) {
                throw CorpusError(d.id + ": unknown file_type \"" + type_key + "\"");
            }
            d.file_type = *type;
            if (auto app = jd.find("app_name"); app != jd.end() && app->is_string()) {
                d.app_name = app->get<std::string>();
            }
            if (auto text = jd.find("text"); text != jd.end() && text->is_string()) {
                d.text = text->get<std::string>();
            } else {
                d.text = read_file(d.path);
            }
            if (trim(d.text).empty()) {
                throw CorpusError(d.id + ": document text is empty");
            }
            m.documents.push_back(std::move(d));
        }
        if (auto jg = j.find("gold"); jg != j.end()) {
            for (const auto &[id, value] : jg->items()) {
                GoldAnnotation g = value.get<GoldAnnotation>();
                g.document_id = id;
                m.gold.emplace(id, std::move(g));
            }
        }
        m.warnings = j.value("warnings", std::vector<std::string>{});
    } catch (const json::exception &e) {
        throw CorpusError(std::string("malformed manifest: ") + e.what());
    } catch (const CorpusError &) {
        throw;
    } catch (const Error &e) {
        throw CorpusError(e.what());
    }
    for (const auto &[id, g] : m.gold) {
        if (!m.find(id)) {
            throw CorpusError("gold annotation for unknown document " + id);
        }
    }
    return m;
}

Manifest Manifest::load(const fs::path &path) {
    json j;
    try {
        j = read_json_file(path);
    } catch (const Error &e) {
        throw CorpusError(e.what());
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return from_json(j, fs::absolute(base));
}

void Manifest::save(const fs::path &path, bool embed_text) const {
    const fs::path base = fs::absolute(path).parent_path();
    write_json_file(path, to_json(base, embed_text));
}

TypeHints TypeHints::from_json(const json &j) {
    TypeHints hints;
    const json &types = j.contains("file_types") ? j.at("file_types") : j;
    for (const auto &[pattern, value] : types.items()) {
        if (!value.is_string()) {
            continue;
        }
        auto type = parse_file_type(value.get<std::string>());
        if (!type) {
            throw CorpusError("hint \"" + pattern + "\": unknown file type " + value.dump());
        }
        hints.file_types.emplace_back(pattern, *type);
    }
    if (auto apps = j.find("app_names"); apps != j.end()) {
        for (const auto &[pattern, value] : apps->items()) {
            hints.app_names.emplace_back(pattern, value.get<std::string>());
        }
    }
    return hints;
}

TypeHints TypeHints::load(const fs::path &path) {
    try {
        return from_json(read_json_file(path));
    } catch (const json::exception &e) {
        throw CorpusError(path.string() + ": " + e.what());
    }
}

namespace {

bool glob_match(const std::string &pattern, const fs::path &relative) {
    const std::string rel = relative.generic_string();
    const std::string name = relative.filename().string();
    return fnmatch(pattern.c_str(), rel.c_str(), 0) == 0 || fnmatch(pattern.c_str(), name.c_str(), 0) == 0;
}

bool contains_any(const std::string &haystack, std::initializer_list<std::string_view> needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](std::string_view n) { return haystack.find(n) != std::string::npos; });
}

}  // namespace

std::optional<FileType> classify_by_name(const fs::path &relative) {
    const std::string name = to_lower(relative.filename().string());
    if (name.starts_with("readme")) {
        return FileType::Readme;
    }
    const std::string ext = to_lower(relative.extension().string());
    if (ext == ".puml" || ext == ".plantuml" || ext == ".uml" || ext == ".mmd" || ext == ".sql") {
        return FileType::ArchitectureDbDesign;
    }
    const std::string rel = to_lower(relative.generic_string());
    if (contains_any(rel, {"uml", "diagram", "architecture", "schema", "erd", "database", "data_model", "datamodel"})) {
        return FileType::ArchitectureDbDesign;
    }
    if (contains_any(rel, {"spec", "requirement", "srs", "design_doc"})) {
        return FileType::SoftwareCodeSpec;
    }
    if (contains_any(rel, {"guide", "manual", "tutorial", "howto", "handbook", "api"})) {
        return FileType::UserDeveloperGuide;
    }
    return std::nullopt;
}

Manifest ingest_documents(const fs::path &root_dir, const TypeHints &hints) {
    std::error_code ec;
    if (!fs::is_directory(root_dir, ec)) {
        throw CorpusError(root_dir.string() + " is not a readable directory");
    }
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root_dir, ec); it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (ec) {
            throw CorpusError("cannot scan " + root_dir.string() + ": " + ec.message());
        }
        if (it->is_regular_file() && !it->path().filename().string().starts_with('.')) {
            files.push_back(it->path());
        }
    }
    std::sort(files.begin(), files.end(), [&](const fs::path &a, const fs::path &b) {
        return a.lexically_relative(root_dir).generic_string() < b.lexically_relative(root_dir).generic_string();
    });

    Manifest m;
    const fs::path abs_root = fs::absolute(root_dir).lexically_normal();
    for (const auto &file : files) {
        const fs::path rel = file.lexically_relative(root_dir);
        const std::string id = rel.generic_string();
        std::string text;
        try {
            text = read_file(file);
        } catch (const Error &e) {
            throw CorpusError("unreadable file " + file.string() + ": " + e.what());
        }
        if (!is_valid_utf8(text)) {
            m.warnings.push_back(id + ": skipped, not valid UTF-8 text");
            log_warn(m.warnings.back());
            continue;
        }
        if (trim(text).empty()) {
            m.warnings.push_back(id + ": skipped, empty document");
            log_warn(m.warnings.back());
            continue;
        }
        Document d;
        d.id = id;
        d.path = abs_root / rel;
        d.text = std::move(text);
        std::optional<FileType> type;
        for (const auto &[pattern, hinted] : hints.file_types) {
            if (glob_match(pattern, rel)) {
                type = hinted;
                break;
            }
        }
        if (!type) {
            type = classify_by_name(rel);
        }
        if (!type) {
            m.warnings.push_back(id + ": no file-type hint matched, defaulting to user_developer_guide");
            log_warn(m.warnings.back());
            type = FileType::UserDeveloperGuide;
        }
        d.file_type = *type;
        for (const auto &[pattern, app] : hints.app_names) {
            if (glob_match(pattern, rel)) {
                d.app_name = app;
                break;
            }
        }
        m.documents.push_back(std::move(d));
    }
    return m;
}

void attach_gold(Manifest &target, const Manifest &source) {
    if (!source.taxonomy_version.empty()) {
        target.taxonomy_version = source.taxonomy_version;
    }
    for (auto &doc : target.documents) {
        if (const auto *g = source.find_gold(doc.id)) {
            target.gold[doc.id] = *g;
        }
        if (!doc.app_name) {
            if (const auto *src = source.find(doc.id); src && src->app_name) {
                doc.app_name = src->app_name;
            }
        }
    }
}

std::vector<GoldViolation> validate_annotation(const GoldAnnotation &g, const Taxonomy &t) {
    std::vector<GoldViolation> out;
    const std::string &id = g.document_id;
    for (Category c : kCategories) {
        const std::string field(category_key(c));
        for (const auto &label : g.labels(c)) {
            if (!t.find_label(label, c)) {
                const bool elsewhere = t.find_label(label).has_value();
                out.push_back(
                    {id, field, label, elsewhere ? "label belongs to another category" : "label not in taxonomy"});
            }
        }
    }
    for (std::size_t i = 0; i < g.stories.size(); ++i) {
        try {
            validate_story(g.stories[i], t);
        } catch (const StoryError &e) {
            out.push_back({id, "stories[" + std::to_string(i) + "]", g.stories[i].action, e.what()});
        }
    }
    return out;
}

std::vector<GoldViolation> validate_gold(const Manifest &m, const Taxonomy &t) {
    std::vector<GoldViolation> out;
    if (!m.taxonomy_version.empty() && m.taxonomy_version != t.version()) {
        out.push_back({"", "taxonomy_version", m.taxonomy_version,
                       "manifest targets taxonomy " + m.taxonomy_version + " but " + t.version() + " is loaded"});
    }
    for (const auto &[id, g] : m.gold) {
        if (!m.find(id)) {
            out.push_back({id, "document_id", id, "gold annotation for unknown document"});
        }
        auto found = validate_annotation(g, t);
        for (auto &v : found) {
            v.document_id = id;
        }
        out.insert(out.end(), found.begin(), found.end());
    }
    return out;
}

}  // namespace privstory
