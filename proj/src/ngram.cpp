#include "sfiles/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "sfiles/dataset.hpp"
#include "sfiles/errors.hpp"
#include "sfiles/rng.hpp"
#include "sfiles/tokens.hpp"

namespace sfiles {

TokenSequence to_token_sequence(std::string_view sfiles) {
    TokenSequence seq;
    seq.tokens.push_back(kBosToken);
    for (const Token& tok : tokenize(sfiles)) {
        seq.tokens.push_back(tok.text);
    }
    seq.tokens.push_back(kEosToken);
    return seq;
}

double cross_entropy(std::span<const double> probabilities) {
    if (probabilities.empty()) {
        throw DomainError("perplexity of an empty probability list is undefined");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0) || p > 1.0) {
            throw DomainError("next-token probabilities must lie in (0, 1]");
        }
        total += std::log(p);
    }
    return -total / static_cast<double>(probabilities.size());
}

double perplexity(std::span<const double> probabilities) {
    return std::exp(cross_entropy(probabilities));
}

NgramModel::NgramModel(std::uint32_t order, double alpha) : order_(order), alpha_(alpha) {
    if (order_ < 1) {
        throw ConfigError("model order must be at least 1");
    }
    if (!(alpha_ > 0.0)) {
        throw ConfigError("smoothing parameter must be positive");
    }
    vocab_.insert(kUnkToken);
}

void NgramModel::add_sequence(const TokenSequence& seq) {
    const auto& t = seq.tokens;
    if (t.size() < 2 || t.front() != kBosToken || t.back() != kEosToken) {
        throw DataError("token sequence must be framed by begin/end sentinels");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] == kBosToken || (t[i] == kEosToken && i + 1 != t.size())) {
            throw DataError("sentinels may appear only at the sequence ends");
        }
        vocab_.insert(t[i]);
        const std::size_t ctx_len = std::min<std::size_t>(order_ - 1, i);
        std::string key;
        for (std::size_t k = i - ctx_len; k < i; ++k) {
            key += t[k];
            key += '\x1f';
        }
        ++counts_[key][t[i]];
        ++context_totals_[key];
    }
}

const std::string& NgramModel::fold(const std::string& token) const {
    static const std::string unk = kUnkToken;
    return vocab_.count(token) != 0 ? token : unk;
}

std::string NgramModel::context_key(std::span<const std::string> context) const {
    const std::size_t ctx_len = std::min<std::size_t>(order_ - 1, context.size());
    std::string key;
    for (std::size_t k = context.size() - ctx_len; k < context.size(); ++k) {
        const std::string& tok = context[k];
        key += tok == kBosToken ? tok : fold(tok);
        key += '\x1f';
    }
    return key;
}

double NgramModel::probability(std::span<const std::string> context,
                               const std::string& token) const {
    const std::string key = context_key(context);
    const std::string& folded = fold(token);
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    const auto ctx_it = counts_.find(key);
    if (ctx_it != counts_.end()) {
        const auto tok_it = ctx_it->second.find(folded);
        if (tok_it != ctx_it->second.end()) {
            count = tok_it->second;
        }
        total = context_totals_.at(key);
    }
    const double v = static_cast<double>(vocab_.size());
    return (static_cast<double>(count) + alpha_) / (static_cast<double>(total) + alpha_ * v);
}

std::vector<double> NgramModel::sequence_probabilities(const TokenSequence& seq) const {
    const auto& t = seq.tokens;
    if (t.size() < 2 || t.front() != kBosToken || t.back() != kEosToken) {
        throw DataError("token sequence must be framed by begin/end sentinels");
    }
    std::vector<double> probs;
    probs.reserve(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        probs.push_back(probability(std::span<const std::string>(t.data(), i), t[i]));
    }
    return probs;
}

double NgramModel::corpus_perplexity(const std::vector<TokenSequence>& corpus) const {
    if (corpus.empty()) {
        throw DataError("cannot evaluate an empty corpus");
    }
    double log_total = 0.0;
    std::size_t n = 0;
    for (const TokenSequence& seq : corpus) {
        for (double p : sequence_probabilities(seq)) {
            log_total += std::log(p);
            ++n;
        }
    }
    return std::exp(-log_total / static_cast<double>(n));
}

NgramModel train_ngram(const std::vector<TokenSequence>& corpus, std::uint32_t order,
                       double alpha) {
    if (corpus.empty()) {
        throw DataError("cannot train on an empty corpus");
    }
    NgramModel model(order, alpha);
    for (const TokenSequence& seq : corpus) {
        model.add_sequence(seq);
    }
    return model;
}

double eval_corpus(const NgramModel& model, const std::vector<TokenSequence>& corpus) {
    return model.corpus_perplexity(corpus);
}

namespace {

std::vector<TokenSequence> to_sequences(const std::vector<std::string>& lines) {
    std::vector<TokenSequence> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        out.push_back(to_token_sequence(line));
    }
    return out;
}

ExperimentArm evaluate_arm(const std::vector<std::string>& train_lines,
                           const std::vector<TokenSequence>& val,
                           const std::vector<TokenSequence>& test, bool augmented,
                           std::uint32_t order, double alpha) {
    const std::vector<TokenSequence> train = to_sequences(train_lines);
    const NgramModel model = train_ngram(train, order, alpha);
    ExperimentArm arm;
    arm.augmented = augmented;
    arm.train_lines = train_lines.size();
    arm.vocab_size = model.vocab_size();
    arm.train_perplexity = model.corpus_perplexity(train);
    arm.val_perplexity = model.corpus_perplexity(val);
    arm.test_perplexity = model.corpus_perplexity(test);
    return arm;
}

}  // namespace

ExperimentReport run_experiment(const std::vector<std::string>& train,
                                const std::vector<std::string>& val,
                                const std::vector<std::string>& test,
                                const std::optional<AugmentationConfig>& aug_cfg,
                                std::uint32_t order, double alpha) {
    if (train.empty() || val.empty() || test.empty()) {
        throw DataError("all three corpora must be non-empty");
    }
    const std::set<std::string> train_set(train.begin(), train.end());
    for (const auto& line : val) {
        if (train_set.count(line) != 0) {
            throw ConfigError("corpora overlap: a validation line also appears in train");
        }
    }
    std::set<std::string> val_set(val.begin(), val.end());
    for (const auto& line : test) {
        if (train_set.count(line) != 0 || val_set.count(line) != 0) {
            throw ConfigError("corpora overlap: a test line also appears in train or val");
        }
    }

    ExperimentReport report;
    report.order = order;
    report.alpha = alpha;
    report.train_lines = train.size();
    report.val_lines = val.size();
    report.test_lines = test.size();

    const std::vector<TokenSequence> val_seq = to_sequences(val);
    const std::vector<TokenSequence> test_seq = to_sequences(test);
    report.plain = evaluate_arm(train, val_seq, test_seq, false, order, alpha);

    if (aug_cfg) {
        std::vector<CorpusLine> lines;
        lines.reserve(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            lines.push_back({i + 1, train[i]});
        }
        AugmentOutcome augmented = augment_corpus(lines, *aug_cfg);
        if (!augmented.failures.empty()) {
            throw DataError("training corpus contains invalid lines; augmentation aborted");
        }
        report.augmented = evaluate_arm(augmented.lines, val_seq, test_seq, true, order, alpha);
        report.has_augmented_arm = true;
    } else {
        report.augmented = report.plain;
    }
    return report;
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json arm_json = nlohmann::json::object();
    auto arm_to_json = [](const ExperimentArm& arm) {
        return nlohmann::json{{"augmented", arm.augmented},
                              {"train_lines", arm.train_lines},
                              {"vocab_size", arm.vocab_size},
                              {"train_pp", arm.train_perplexity},
                              {"val_pp", arm.val_perplexity},
                              {"test_pp", arm.test_perplexity},
                              {"train_test_gap", arm.test_perplexity - arm.train_perplexity}};
    };
    nlohmann::json doc{{"order", report.order},
                       {"alpha", report.alpha},
                       {"corpus", {{"train_lines", report.train_lines},
                                   {"val_lines", report.val_lines},
                                   {"test_lines", report.test_lines}}},
                       {"arms", {{"plain", arm_to_json(report.plain)},
                                 {"augmented", report.has_augmented_arm
                                                   ? arm_to_json(report.augmented)
                                                   : arm_to_json(report.plain)}}}};
    return doc.dump(2);
}

}  // namespace sfiles
