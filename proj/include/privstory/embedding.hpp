#pragma once

#include "privstory/corpus.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privstory {

struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_tag;

    [[nodiscard]] std::size_t dimension() const noexcept { return values.size(); }
};

/// Cosine similarity; throws EmbeddingError on dimension mismatch or a zero vector.
[[nodiscard]] double cosine(const EmbeddingVector &u, const EmbeddingVector &v);

class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    [[nodiscard]] virtual std::string tag() const = 0;
    /// One vector per input text, same order. Inputs must be non-empty.
    [[nodiscard]] virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

/// Single-text convenience; rejects empty text.
[[nodiscard]] EmbeddingVector embed(std::string_view text, EmbeddingProvider &provider);

/// Lower-cased alphanumeric runs.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

/// Deterministic local embedder over a vocabulary fitted on a corpus.
/// Coordinates follow the sorted vocabulary; out-of-vocabulary tokens are ignored.
class TfidfEmbedder final : public EmbeddingProvider {
  public:
    enum class Weighting { TermFrequency, TfIdf };

    explicit TfidfEmbedder(std::span<const std::string> corpus, Weighting weighting = Weighting::TfIdf);

    [[nodiscard]] std::string tag() const override;
    [[nodiscard]] std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

    [[nodiscard]] std::span<const std::string> vocabulary() const noexcept { return vocabulary_; }

  private:
    Weighting weighting_;
    std::vector<std::string> vocabulary_;
    std::map<std::string, std::size_t, std::less<>> position_;
    std::vector<double> idf_;
};

/// Embeddings endpoint speaking the common `POST {base}/embeddings` schema.
class RemoteEmbedder final : public EmbeddingProvider {
  public:
    RemoteEmbedder(std::string base_url, std::string api_key, std::string model,
                   std::chrono::seconds timeout = std::chrono::seconds(60));

    [[nodiscard]] std::string tag() const override { return "remote:" + model_; }
    [[nodiscard]] std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  private:
    std::string base_url_;
    std::string api_key_;
    std::string model_;
    std::chrono::seconds timeout_;
};

struct IclCandidate {
    std::string document_id;
    EmbeddingVector vector;
};

/// Top-k candidates by cosine to `target`, excluding `exclude_id`; ties go to the
/// lexicographically smallest id. Zero vectors rank with similarity 0.
[[nodiscard]] std::vector<std::string> rank_icl_candidates(const EmbeddingVector &target,
                                                           std::span<const IclCandidate> candidates,
                                                           std::string_view exclude_id, std::size_t k);

/// Most similar gold-annotated document in `pool` other than `target`.
/// Throws PromptError when no eligible candidate exists.
[[nodiscard]] std::string select_icl_example(const Document &target, const Manifest &pool,
                                             EmbeddingProvider &provider);

[[nodiscard]] std::vector<std::string> select_icl_examples(const Document &target, const Manifest &pool,
                                                           EmbeddingProvider &provider, std::size_t k);

}  // namespace privstory
