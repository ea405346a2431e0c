#include "privstory/embedding.hpp"

#include "privstory/error.hpp"
#include "privstory/http.hpp"
#include "privstory/json_io.hpp"
#include "privstory/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace privstory {

double cosine(const EmbeddingVector &u, const EmbeddingVector &v) {
    if (u.values.size() != v.values.size()) {
        throw EmbeddingError("cosine: dimension mismatch (" + std::to_string(u.values.size()) + " vs " +
                             std::to_string(v.values.size()) + ")");
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw EmbeddingError("cosine: zero vector");
    }
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

EmbeddingVector embed(std::string_view text, EmbeddingProvider &provider) {
    if (trim(text).empty()) {
        throw EmbeddingError("cannot embed empty text");
    }
    const std::string owned(text);
    auto out = provider.embed_batch(std::span<const std::string>(&owned, 1));
    if (out.size() != 1) {
        throw EmbeddingError("provider " + provider.tag() + " returned " + std::to_string(out.size()) + " vectors");
    }
    return std::move(out.front());
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        tokens.push_back(std::move(cur));
    }
    return tokens;
}

TfidfEmbedder::TfidfEmbedder(std::span<const std::string> corpus, Weighting weighting) : weighting_(weighting) {
    std::map<std::string, std::size_t, std::less<>> df;
    for (const auto &doc : corpus) {
        auto tokens = tokenize(doc);
        std::set<std::string> unique(tokens.begin(), tokens.end());
        for (const auto &tok : unique) {
            ++df[tok];
        }
    }
    const auto n = static_cast<double>(corpus.size());
    for (const auto &[tok, count] : df) {
        position_.emplace(tok, vocabulary_.size());
        vocabulary_.push_back(tok);
        // smoothed idf, strictly positive
        idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
}

std::string TfidfEmbedder::tag() const {
    return std::string(weighting_ == Weighting::TfIdf ? "tfidf" : "tf") + ":" + std::to_string(vocabulary_.size());
}

std::vector<EmbeddingVector> TfidfEmbedder::embed_batch(std::span<const std::string> texts) {
    if (vocabulary_.empty()) {
        throw EmbeddingError("tf-idf embedder has an empty vocabulary");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto &text : texts) {
        if (trim(text).empty()) {
            throw EmbeddingError("cannot embed empty text");
        }
        EmbeddingVector v;
        v.provider_tag = tag();
        v.values.assign(vocabulary_.size(), 0.0);
        for (const auto &tok : tokenize(text)) {
            if (auto it = position_.find(tok); it != position_.end()) {
                v.values[it->second] += 1.0;
            }
        }
        if (weighting_ == Weighting::TfIdf) {
            for (std::size_t i = 0; i < v.values.size(); ++i) {
                v.values[i] *= idf_[i];
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::string api_key, std::string model,
                               std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_(std::move(model)), timeout_(timeout) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
    for (const auto &t : texts) {
        if (trim(t).empty()) {
            throw EmbeddingError("cannot embed empty text");
        }
    }
    json request{{"model", model_}, {"input", json::array()}};
    for (const auto &t : texts) {
        request["input"].push_back(t);
    }
    HttpResponse response;
    try {
        response = post_json(base_url_, "/embeddings", request.dump(), api_key_, timeout_);
    } catch (const GatewayError &e) {
        throw EmbeddingError(std::string("embedding endpoint: ") + e.what());
    }
    if (response.status != 200) {
        throw EmbeddingError("embedding endpoint returned HTTP " + std::to_string(response.status) + ": " +
                             response.body.substr(0, 200));
    }
    std::vector<EmbeddingVector> out(texts.size());
    try {
        const auto body = json::parse(response.body);
        const auto &data = body.at("data");
        if (data.size() != texts.size()) {
            throw EmbeddingError("embedding endpoint returned " + std::to_string(data.size()) + " vectors for " +
                                 std::to_string(texts.size()) + " inputs");
        }
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t index = data[i].value("index", i);
            if (index >= out.size()) {
                throw EmbeddingError("embedding endpoint returned out-of-range index");
            }
            out[index].values = data[i].at("embedding").get<std::vector<double>>();
            out[index].provider_tag = tag();
        }
    } catch (const json::exception &e) {
        throw EmbeddingError(std::string("malformed embedding response: ") + e.what());
    }
    std::size_t dim = 0;
    for (const auto &v : out) {
        if (v.values.empty() || (dim != 0 && v.values.size() != dim)) {
            throw EmbeddingError("embedding endpoint returned inconsistent dimensions");
        }
        dim = v.values.size();
        for (double x : v.values) {
            if (!std::isfinite(x)) {
                throw EmbeddingError("embedding endpoint returned a non-finite value");
            }
        }
    }
    return out;
}

namespace {

double similarity_or_zero(const EmbeddingVector &a, const EmbeddingVector &b) {
    const bool a_zero = std::all_of(a.values.begin(), a.values.end(), [](double x) { return x == 0.0; });
    const bool b_zero = std::all_of(b.values.begin(), b.values.end(), [](double x) { return x == 0.0; });
    if (a_zero || b_zero) {
        return 0.0;
    }
    return cosine(a, b);
}

}  // namespace

std::vector<std::string> rank_icl_candidates(const EmbeddingVector &target, std::span<const IclCandidate> candidates,
                                             std::string_view exclude_id, std::size_t k) {
    std::vector<std::pair<double, const std::string *>> scored;
    for (const auto &c : candidates) {
        if (c.document_id == exclude_id) {
            continue;
        }
        // Quantized so cosines equal up to rounding noise tie and fall back to the id.
        scored.emplace_back(std::round(similarity_or_zero(target, c.vector) * 1e12) / 1e12, &c.document_id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return *a.second < *b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) {
        out.push_back(*scored[i].second);
    }
    return out;
}

std::vector<std::string> select_icl_examples(const Document &target, const Manifest &pool,
                                             EmbeddingProvider &provider, std::size_t k) {
    std::vector<std::string> texts;
    std::vector<std::string> ids;
    for (const auto &d : pool.documents) {
        if (d.id != target.id && pool.find_gold(d.id)) {
            ids.push_back(d.id);
            texts.push_back(d.text);
        }
    }
    if (ids.empty()) {
        throw PromptError("no gold-annotated example document available for " + target.id);
    }
    texts.push_back(target.text);
    auto vectors = provider.embed_batch(texts);
    std::vector<IclCandidate> candidates;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        candidates.push_back({ids[i], std::move(vectors[i])});
    }
    return rank_icl_candidates(vectors.back(), candidates, target.id, k);
}

std::string select_icl_example(const Document &target, const Manifest &pool, EmbeddingProvider &provider) {
    return select_icl_examples(target, pool, provider, 1).front();
}

}  // namespace privstory
