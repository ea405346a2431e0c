#pragma once

#include "privstory/json_io.hpp"
#include "privstory/story.hpp"
#include "privstory/taxonomy.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace privstory {

enum class FileType { SoftwareCodeSpec, UserDeveloperGuide, ArchitectureDbDesign, Readme };

inline constexpr std::array<FileType, 4> kFileTypes{FileType::SoftwareCodeSpec, FileType::UserDeveloperGuide,
                                                    FileType::ArchitectureDbDesign, FileType::Readme};

/// File key: "software_code_spec", "user_developer_guide", "architecture_db_design", "readme".
[[nodiscard]] std::string_view file_type_key(FileType f);
[[nodiscard]] std::string_view file_type_label(FileType f);
[[nodiscard]] std::optional<FileType> parse_file_type(std::string_view key);

struct Document {
    std::string id;
    /// Absolute in memory; stored relative to the manifest directory.
    std::filesystem::path path;
    std::string text;
    FileType file_type = FileType::UserDeveloperGuide;
    std::optional<std::string> app_name;
};

struct GoldAnnotation {
    std::string document_id;
    std::vector<std::string> actions;
    std::vector<std::string> data_types;
    std::vector<std::string> purposes;
    std::vector<StoryTriple> stories;

    [[nodiscard]] const std::vector<std::string> &labels(Category c) const;
    [[nodiscard]] std::vector<std::string> &labels(Category c);
};

struct Manifest {
    std::vector<Document> documents;
    std::map<std::string, GoldAnnotation> gold;
    std::string taxonomy_version;
    /// Files skipped during ingest and similar non-fatal findings.
    std::vector<std::string> warnings;

    [[nodiscard]] const Document *find(std::string_view id) const;
    [[nodiscard]] const GoldAnnotation *find_gold(std::string_view id) const;
    [[nodiscard]] std::map<FileType, std::size_t> count_by_type() const;

    /// Loads a manifest file; relative document paths resolve against its directory.
    static Manifest load(const std::filesystem::path &path);
    /// With `embed_text`, document text is archived inline as well as referenced by path.
    void save(const std::filesystem::path &path, bool embed_text = false) const;

    [[nodiscard]] json to_json(const std::filesystem::path &base_dir, bool embed_text) const;
    static Manifest from_json(const json &j, const std::filesystem::path &base_dir);
};

/// Ordered glob patterns (fnmatch syntax, matched against the path relative to the root
/// and against the bare filename); first match wins.
struct TypeHints {
    std::vector<std::pair<std::string, FileType>> file_types;
    std::vector<std::pair<std::string, std::string>> app_names;

    static TypeHints load(const std::filesystem::path &path);
    static TypeHints from_json(const json &j);
};

/// Guesses a file type from the filename; nullopt when nothing matches.
[[nodiscard]] std::optional<FileType> classify_by_name(const std::filesystem::path &relative);

/// One Document per readable text file under `root_dir`, ordered by relative path.
/// Empty or non-UTF-8 files are skipped and noted in `Manifest::warnings`.
[[nodiscard]] Manifest ingest_documents(const std::filesystem::path &root_dir, const TypeHints &hints = {});

/// Copies gold (and missing app names) from `source` for documents present in `target`.
void attach_gold(Manifest &target, const Manifest &source);

struct GoldViolation {
    std::string document_id;
    std::string field;
    std::string value;
    std::string message;
};

[[nodiscard]] std::vector<GoldViolation> validate_gold(const Manifest &m, const Taxonomy &t);
/// Label and story checks for a single annotation.
[[nodiscard]] std::vector<GoldViolation> validate_annotation(const GoldAnnotation &g, const Taxonomy &t);

void to_json(json &j, const StoryTriple &s);
void from_json(const json &j, StoryTriple &s);
void to_json(json &j, const GoldAnnotation &g);
void from_json(const json &j, GoldAnnotation &g);

}  // namespace privstory
