#include "generators.hpp"

#include "privstory/corpus.hpp"
#include "privstory/error.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace privstory;
namespace fs = std::filesystem;

namespace {

void write(const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST(Corpus, FileTypeKeysRoundTrip) {
    for (FileType f : kFileTypes) {
        EXPECT_EQ(parse_file_type(file_type_key(f)), f);
    }
    EXPECT_FALSE(parse_file_type("novel"));
    EXPECT_EQ(file_type_label(FileType::Readme), "README");
}

TEST(Corpus, ClassifyByName) {
    EXPECT_EQ(classify_by_name("app/README.md"), FileType::Readme);
    EXPECT_EQ(classify_by_name("db/schema.sql"), FileType::ArchitectureDbDesign);
    EXPECT_EQ(classify_by_name("docs/architecture.md"), FileType::ArchitectureDbDesign);
    EXPECT_EQ(classify_by_name("docs/requirements_spec.md"), FileType::SoftwareCodeSpec);
    EXPECT_EQ(classify_by_name("docs/user_guide.md"), FileType::UserDeveloperGuide);
    EXPECT_FALSE(classify_by_name("src/Main.java"));
}

TEST(Corpus, IngestOrdersHintsAndSkips) {
    const fs::path root = privstory::testing::scratch_dir("ingest");
    write(root / "b/README.md", "# B\n");
    write(root / "a/Service.java", "class Service {}\n");
    write(root / "a/notes.txt", "free text\n");
    write(root / "a/empty.md", "  \n");
    write(root / "a/binary.bin", std::string("\xff\xfe\x00\x01", 4));
    write(root / ".hidden", "x");
    const TypeHints hints = TypeHints::from_json(json::parse(R"({"*.java": "software_code_spec", "a/*": "readme"})"));
    const Manifest m = ingest_documents(root, hints);
    ASSERT_EQ(m.documents.size(), 3u);
    EXPECT_EQ(m.documents[0].id, "a/Service.java");
    EXPECT_EQ(m.documents[0].file_type, FileType::SoftwareCodeSpec);
    // First matching hint wins, and hints beat the name heuristics.
    EXPECT_EQ(m.documents[1].id, "a/notes.txt");
    EXPECT_EQ(m.documents[1].file_type, FileType::Readme);
    EXPECT_EQ(m.documents[2].id, "b/README.md");
    EXPECT_EQ(m.documents[2].file_type, FileType::Readme);
    EXPECT_EQ(m.warnings.size(), 2u);
    EXPECT_TRUE(m.documents[0].path.is_absolute());
}

TEST(Corpus, IngestDefaultsUnmatchedToGuideWithWarning) {
    const fs::path root = privstory::testing::scratch_dir("ingest-default");
    write(root / "Main.java", "class Main {}\n");
    const Manifest m = ingest_documents(root);
    ASSERT_EQ(m.documents.size(), 1u);
    EXPECT_EQ(m.documents[0].file_type, FileType::UserDeveloperGuide);
    ASSERT_EQ(m.warnings.size(), 1u);
    EXPECT_NE(m.warnings[0].find("Main.java"), std::string::npos);
}

TEST(Corpus, IngestMissingRootThrows) {
    EXPECT_THROW((void)ingest_documents("/nonexistent/privstory-root"), CorpusError);
}

TEST(Corpus, ManifestRoundTripRelativePaths) {
    const fs::path dir = privstory::testing::scratch_dir("manifest");
    write(dir / "docs/a.md", "Alpha text\n");
    Manifest m;
    m.taxonomy_version = "v1";
    m.documents.push_back({"a.md", dir / "docs/a.md", "Alpha text\n", FileType::Readme, "Alpha"});
    m.gold["a.md"] = GoldAnnotation{"a.md", {"Collect"}, {"Location"}, {"Analytics"},
                                    {{"Collect", {"Location"}, {"Analytics"}}}};
    m.save(dir / "manifest.json");
    const json saved = read_json_file(dir / "manifest.json");
    EXPECT_EQ(saved["documents"][0]["path"], "docs/a.md");
    EXPECT_FALSE(saved["documents"][0].contains("text"));

    const Manifest back = Manifest::load(dir / "manifest.json");
    ASSERT_EQ(back.documents.size(), 1u);
    EXPECT_EQ(back.documents[0].text, "Alpha text\n");
    EXPECT_EQ(back.documents[0].app_name, "Alpha");
    ASSERT_TRUE(back.find_gold("a.md"));
    EXPECT_EQ(back.find_gold("a.md")->stories, m.gold["a.md"].stories);
    EXPECT_EQ(back.taxonomy_version, "v1");
}

TEST(Corpus, ManifestEmbeddedTextSurvivesMissingFile) {
    const fs::path dir = privstory::testing::scratch_dir("manifest-embed");
    Manifest m;
    m.documents.push_back({"gone.md", dir / "gone.md", "kept inline\n", FileType::Readme, std::nullopt});
    m.save(dir / "manifest.json", true);
    EXPECT_EQ(Manifest::load(dir / "manifest.json").documents[0].text, "kept inline\n");
}

TEST(Corpus, ManifestRejectsBadInput) {
    const fs::path dir = privstory::testing::scratch_dir("manifest-bad");
    write(dir / "a.md", "x\n");
    write(dir / "dup.json", R"({"documents": [{"id": "a", "path": "a.md", "file_type": "readme"},
                                             {"id": "a", "path": "a.md", "file_type": "readme"}]})");
    EXPECT_THROW((void)Manifest::load(dir / "dup.json"), CorpusError);
    write(dir / "type.json", R"({"documents": [{"id": "a", "path": "a.md", "file_type": "novel"}]})");
    EXPECT_THROW((void)Manifest::load(dir / "type.json"), CorpusError);
    write(dir / "orphan.json", R"({"documents": [], "gold": {"x": {"actions": []}}})");
    EXPECT_THROW((void)Manifest::load(dir / "orphan.json"), CorpusError);
    write(dir / "broken.json", "{");
    EXPECT_THROW((void)Manifest::load(dir / "broken.json"), CorpusError);
}

TEST(Corpus, ValidateGoldReportsEachViolation) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    Manifest m;
    m.documents.push_back({"d", "/d", "text", FileType::Readme, std::nullopt});
    m.gold["d"] = GoldAnnotation{"d", {"Collect", "Analytics"}, {"Location", "Biometric Aura"}, {"Analytics"},
                                 {{"Collect", {"Location"}, {"Analytics"}}, {"Collect", {}, {"Analytics"}}}};
    const auto v = validate_gold(m, t);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].field, "actions");
    EXPECT_EQ(v[0].message, "label belongs to another category");
    EXPECT_EQ(v[1].value, "Biometric Aura");
    EXPECT_EQ(v[1].message, "label not in taxonomy");
    EXPECT_EQ(v[2].field, "stories[1]");
}

TEST(Corpus, AttachGoldCopiesMatchingDocuments) {
    Manifest target;
    target.documents.push_back({"a", "/a", "x", FileType::Readme, std::nullopt});
    target.documents.push_back({"b", "/b", "y", FileType::Readme, std::nullopt});
    Manifest source;
    source.taxonomy_version = "v9";
    source.documents.push_back({"a", "/a", "x", FileType::Readme, "App"});
    source.gold["a"] = GoldAnnotation{"a", {"Collect"}, {}, {}, {}};
    attach_gold(target, source);
    EXPECT_EQ(target.gold.size(), 1u);
    EXPECT_EQ(target.documents[0].app_name, "App");
    EXPECT_EQ(target.taxonomy_version, "v9");
}

TEST(Corpus, FixtureCorpusShape) {
    const fs::path root = privstory::testing::fixture_dir();
    Manifest m = ingest_documents(root / "documents", TypeHints::load(root / "hints.json"));
    attach_gold(m, Manifest::load(root / "manifest.json"));
    EXPECT_TRUE(m.warnings.empty());
    ASSERT_EQ(m.documents.size(), 25u);
    const auto counts = m.count_by_type();
    EXPECT_EQ(counts.at(FileType::SoftwareCodeSpec), 8u);
    EXPECT_EQ(counts.at(FileType::UserDeveloperGuide), 9u);
    EXPECT_EQ(counts.at(FileType::ArchitectureDbDesign), 6u);
    EXPECT_EQ(counts.at(FileType::Readme), 2u);
    std::array<std::size_t, 3> labels{};
    std::size_t stories = 0;
    for (const auto &[id, g] : m.gold) {
        for (Category c : kCategories) {
            labels[static_cast<std::size_t>(c)] += g.labels(c).size();
        }
        stories += g.stories.size();
    }
    EXPECT_EQ(m.gold.size(), 25u);
    EXPECT_EQ(labels, (std::array<std::size_t, 3>{50, 60, 61}));
    EXPECT_EQ(stories, 93u);
    EXPECT_TRUE(validate_gold(m, privstory::testing::default_taxonomy()).empty());
    // Ingest types agree with the manifest's declared types.
    const Manifest declared = Manifest::load(root / "manifest.json");
    for (const auto &d : declared.documents) {
        ASSERT_TRUE(m.find(d.id)) << d.id;
        EXPECT_EQ(m.find(d.id)->file_type, d.file_type) << d.id;
    }
}
