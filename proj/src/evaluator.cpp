#include "privstory/evaluator.hpp"

#include "privstory/assignment.hpp"
#include "privstory/error.hpp"
#include "privstory/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <set>

namespace privstory {

Prf prf(const Rational &credit, std::size_t predicted, std::size_t gold) {
    Prf out;
    out.precision = safe_div(credit, Rational(predicted));
    out.recall = safe_div(credit, Rational(gold));
    const Rational sum = out.precision + out.recall;
    out.f1 = sum == 0 ? Rational(0) : 2 * out.precision * out.recall / sum;
    return out;
}

CategoryScore score_category(std::span<const NodeId> predicted, std::span<const NodeId> gold, const Taxonomy &t) {
    CategoryScore out;
    const NodeId *first = !predicted.empty() ? &predicted.front() : (!gold.empty() ? &gold.front() : nullptr);
    if (first) {
        out.category = t.node(*first).category;
    }
    for (auto span : {predicted, gold}) {
        for (NodeId id : span) {
            const auto &node = t.node(id);
            if (node.is_root()) {
                throw EvaluationError("category root \"" + node.name + "\" cannot be scored");
            }
            if (node.category != out.category) {
                throw EvaluationError("category mismatch: \"" + node.name + "\" is a " +
                                      std::string(category_name(node.category)) + ", expected " +
                                      std::string(category_name(out.category)));
            }
        }
    }
    out.prediction_count = predicted.size();
    out.gold_count = gold.size();

    // Integer weights: credit scaled by lcm(1..max_depth+1) so every 1/(1+d) is exact.
    std::int64_t scale = 1;
    for (int k = 2; k <= t.max_depth() + 1; ++k) {
        scale = std::lcm(scale, static_cast<std::int64_t>(k));
    }
    std::vector<std::vector<std::int64_t>> weights(predicted.size(), std::vector<std::int64_t>(gold.size(), 0));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (std::size_t j = 0; j < gold.size(); ++j) {
            if (auto d = t.tree_distance(predicted[i], gold[j])) {
                weights[i][j] = scale / (1 + *d);
            }
        }
    }
    const auto assignment = max_weight_assignment(weights);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i]) {
            const NodeId g = gold[*assignment[i]];
            Pairing p{predicted[i], g, t.credit(predicted[i], g), t.node(predicted[i]).name, t.node(g).name};
            out.credit_sum += p.credit;
            out.pairings.push_back(std::move(p));
        }
    }
    out.scores = prf(out.credit_sum, out.prediction_count, out.gold_count);
    return out;
}

namespace {

struct StoryKey {
    std::string action;
    std::set<std::string> data_types;
    std::set<std::string> purposes;
    friend auto operator<=>(const StoryKey &, const StoryKey &) = default;
};

StoryKey key_of(const StoryTriple &s) {
    StoryKey k;
    k.action = normalize_name(s.action);
    for (const auto &d : s.data_types) {
        k.data_types.insert(normalize_name(d));
    }
    for (const auto &p : s.purposes) {
        k.purposes.insert(normalize_name(p));
    }
    return k;
}

}  // namespace

StoryComparison compare_stories(std::span<const StoryTriple> parsed, std::span<const StoryTriple> gold) {
    StoryComparison out;
    out.parsed_count = parsed.size();
    out.gold_count = gold.size();
    std::vector<bool> gold_used(gold.size(), false);
    std::vector<StoryKey> gold_keys;
    for (const auto &g : gold) {
        gold_keys.push_back(key_of(g));
    }
    // Exact equality is an equivalence relation, so first-fit matching is optimal.
    for (const auto &p : parsed) {
        const StoryKey k = key_of(p);
        bool found = false;
        for (std::size_t j = 0; j < gold.size(); ++j) {
            if (!gold_used[j] && gold_keys[j] == k) {
                gold_used[j] = true;
                found = true;
                break;
            }
        }
        if (found) {
            ++out.matched;
            out.matched_stories.push_back(p);
        } else {
            out.unmatched_parsed.push_back(p);
        }
    }
    for (std::size_t j = 0; j < gold.size(); ++j) {
        if (!gold_used[j]) {
            out.unmatched_gold.push_back(gold[j]);
        }
    }
    out.precision = safe_div(Rational(out.matched), Rational(out.parsed_count));
    out.recall = safe_div(Rational(out.matched), Rational(out.gold_count));
    return out;
}

DocumentScore score_document(const ParsedAnnotation &parsed, const GoldAnnotation &gold, const Taxonomy &t,
                             const ScoringOptions &opts) {
    DocumentScore out;
    out.document_id = parsed.document_id;
    for (Category c : kCategories) {
        const auto idx = static_cast<std::size_t>(c);
        std::vector<NodeId> gold_nodes;
        for (const auto &label : gold.labels(c)) {
            auto id = t.find_label(label, c);
            if (!id) {
                throw EvaluationError(gold.document_id + ": gold " + std::string(category_name(c)) + " \"" + label +
                                      "\" is not in the taxonomy");
            }
            if (std::find(gold_nodes.begin(), gold_nodes.end(), *id) == gold_nodes.end()) {
                gold_nodes.push_back(*id);
            }
        }
        CategoryScore cs = score_category(parsed.matched[idx], gold_nodes, t);
        cs.category = c;
        if (opts.penalize_hallucinations) {
            cs.prediction_count += parsed.hallucinated[idx].size();
            cs.scores = prf(cs.credit_sum, cs.prediction_count, cs.gold_count);
        }
        out.credit_sum += cs.credit_sum;
        out.prediction_count += cs.prediction_count;
        out.gold_count += cs.gold_count;
        out.matched_labels += parsed.matched[idx].size();
        out.hallucinated_labels += parsed.hallucinated[idx].size();
        out.categories[idx] = std::move(cs);
    }
    out.micro = prf(out.credit_sum, out.prediction_count, out.gold_count);
    const auto triples = parsed.triples();
    out.stories = compare_stories(triples, gold.stories);
    return out;
}

namespace {

Prf mean_of(const std::vector<const Prf *> &items) {
    Prf m;
    if (items.empty()) {
        return m;
    }
    for (const Prf *p : items) {
        m.precision += p->precision;
        m.recall += p->recall;
        m.f1 += p->f1;
    }
    const Rational n(items.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

json prf_json(const Prf &p) {
    return json{{"precision", round3(p.precision)}, {"recall", round3(p.recall)}, {"f1", round3(p.f1)}};
}

std::string fmt3(const Rational &r) {
    return fmt::format("{:.3f}", round3(r));
}

}  // namespace

EvalReport aggregate(std::span<const DocumentScore> scores, const Manifest &manifest, const RunMetadata &metadata) {
    EvalReport report;
    report.metadata = metadata;
    for (const auto &s : scores) {
        const Document *doc = manifest.find(s.document_id);
        if (!doc) {
            throw EvaluationError("score for unknown document " + s.document_id);
        }
        report.per_document.emplace_back(doc->file_type, s);
    }
    std::sort(report.per_document.begin(), report.per_document.end(),
              [](const auto &a, const auto &b) { return a.second.document_id < b.second.document_id; });

    std::map<FileType, std::vector<const Prf *>> by_type;
    std::vector<const Prf *> all;
    std::array<std::vector<const Prf *>, 3> by_category;
    Rational credit;
    std::size_t predicted = 0;
    std::size_t gold = 0;
    std::array<Rational, 3> cat_credit;
    std::array<std::size_t, 3> cat_pred{};
    std::array<std::size_t, 3> cat_gold{};
    std::size_t story_matched = 0;
    std::size_t story_parsed = 0;
    std::size_t story_gold = 0;
    std::size_t matched_labels = 0;
    std::size_t hallucinated = 0;
    for (const auto &[type, s] : report.per_document) {
        by_type[type].push_back(&s.micro);
        all.push_back(&s.micro);
        credit += s.credit_sum;
        predicted += s.prediction_count;
        gold += s.gold_count;
        for (std::size_t c = 0; c < 3; ++c) {
            by_category[c].push_back(&s.categories[c].scores);
            cat_credit[c] += s.categories[c].credit_sum;
            cat_pred[c] += s.categories[c].prediction_count;
            cat_gold[c] += s.categories[c].gold_count;
        }
        story_matched += s.stories.matched;
        story_parsed += s.stories.parsed_count;
        story_gold += s.stories.gold_count;
        matched_labels += s.matched_labels;
        hallucinated += s.hallucinated_labels;
    }
    for (const auto &[type, items] : by_type) {
        report.per_file_type[type] = FileTypeScore{items.size(), mean_of(items)};
    }
    for (std::size_t c = 0; c < 3; ++c) {
        report.per_category[c].micro = prf(cat_credit[c], cat_pred[c], cat_gold[c]);
        report.per_category[c].macro = mean_of(by_category[c]);
    }
    report.overall_micro = prf(credit, predicted, gold);
    report.overall_macro = mean_of(all);
    report.story_precision = safe_div(Rational(story_matched), Rational(story_parsed));
    report.story_recall = safe_div(Rational(story_matched), Rational(story_gold));
    report.hallucination_rate = safe_div(Rational(hallucinated), Rational(matched_labels + hallucinated));
    return report;
}

json EvalReport::to_json() const {
    json j;
    j["metadata"] = {{"run_id", metadata.run_id},
                     {"model_name", metadata.model_name},
                     {"template_version", metadata.template_version},
                     {"taxonomy_version", metadata.taxonomy_version},
                     {"response_index", metadata.response_index},
                     {"penalize_hallucinations", metadata.penalize_hallucinations}};
    j["documents"] = per_document.size();
    // Headline numbers follow the per-file averaging (macro); micro is pooled.
    j["overall"] = {{"macro", prf_json(overall_macro)}, {"micro", prf_json(overall_micro)}};
    json cats = json::object();
    for (Category c : kCategories) {
        const auto &agg = per_category[static_cast<std::size_t>(c)];
        cats[std::string(category_key(c))] = {{"macro", prf_json(agg.macro)}, {"micro", prf_json(agg.micro)}};
    }
    j["per_category"] = std::move(cats);
    json types = json::object();
    for (const auto &[type, score] : per_file_type) {
        types[std::string(file_type_key(type))] = {{"label", file_type_label(type)},
                                                   {"documents", score.documents},
                                                   {"f1", round3(score.mean.f1)},
                                                   {"precision", round3(score.mean.precision)},
                                                   {"recall", round3(score.mean.recall)}};
    }
    j["per_file_type"] = std::move(types);
    j["stories"] = {{"precision", round3(story_precision)}, {"recall", round3(story_recall)}};
    j["hallucination_rate"] = round3(hallucination_rate);
    json docs = json::array();
    for (const auto &[type, s] : per_document) {
        json jd;
        jd["document_id"] = s.document_id;
        jd["file_type"] = file_type_key(type);
        jd["overall"] = prf_json(s.micro);
        jd["credit_sum"] = to_string(s.credit_sum);
        jd["prediction_count"] = s.prediction_count;
        jd["gold_count"] = s.gold_count;
        json jc = json::object();
        for (Category c : kCategories) {
            const auto &cs = s.category(c);
            json pairs = json::array();
            for (const auto &p : cs.pairings) {
                pairs.push_back({{"predicted", p.predicted_name}, {"gold", p.gold_name}, {"credit", to_string(p.credit)}});
            }
            jc[std::string(category_key(c))] = {{"precision", round3(cs.scores.precision)},
                                                {"recall", round3(cs.scores.recall)},
                                                {"f1", round3(cs.scores.f1)},
                                                {"credit_sum", to_string(cs.credit_sum)},
                                                {"prediction_count", cs.prediction_count},
                                                {"gold_count", cs.gold_count},
                                                {"pairings", std::move(pairs)}};
        }
        jd["categories"] = std::move(jc);
        jd["stories"] = {{"parsed", s.stories.parsed_count},
                         {"gold", s.stories.gold_count},
                         {"matched", s.stories.matched},
                         {"precision", round3(s.stories.precision)},
                         {"recall", round3(s.stories.recall)}};
        jd["hallucinated_labels"] = s.hallucinated_labels;
        docs.push_back(std::move(jd));
    }
    j["per_document"] = std::move(docs);
    return j;
}

std::string EvalReport::to_csv() const {
    std::string out =
        "document_id,file_type,a_precision,a_recall,a_f1,dt_precision,dt_recall,dt_f1,p_precision,p_recall,p_f1,"
        "precision,recall,f1,hallucinated_labels,story_precision,story_recall\n";
    for (const auto &[type, s] : per_document) {
        std::string id = s.document_id;
        if (id.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : id) {
                quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
            }
            id = quoted + "\"";
        }
        out += id + "," + std::string(file_type_key(type));
        for (Category c : kCategories) {
            const auto &sc = s.category(c).scores;
            out += "," + fmt3(sc.precision) + "," + fmt3(sc.recall) + "," + fmt3(sc.f1);
        }
        out += "," + fmt3(s.micro.precision) + "," + fmt3(s.micro.recall) + "," + fmt3(s.micro.f1);
        out += "," + std::to_string(s.hallucinated_labels) + "," + fmt3(s.stories.precision) + "," +
               fmt3(s.stories.recall) + "\n";
    }
    return out;
}

}  // namespace privstory
