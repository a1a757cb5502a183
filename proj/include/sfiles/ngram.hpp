#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfiles/augment.hpp"

namespace sfiles {

inline constexpr const char* kBosToken = "<bos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kUnkToken = "<unk>";

/// Token lexemes of one string framed by begin/end sentinels.
struct TokenSequence {
    std::vector<std::string> tokens;
};

/// tokenize + sentinel framing. Throws ParseError on invalid input.
TokenSequence to_token_sequence(std::string_view sfiles);

/// exp of the negative mean natural log of the given next-token
/// probabilities. Throws DomainError on an empty list or values outside
/// (0, 1].
double perplexity(std::span<const double> probabilities);

/// Negative mean natural log; perplexity == exp(cross_entropy).
double cross_entropy(std::span<const double> probabilities);

/// Count-based next-token model with additive smoothing. Every conditional
/// distribution over the vocabulary sums to 1.
class NgramModel {
public:
    NgramModel(std::uint32_t order, double alpha);

    std::uint32_t order() const { return order_; }
    double alpha() const { return alpha_; }
    std::size_t vocab_size() const { return vocab_.size(); }

    void add_sequence(const TokenSequence& seq);

    /// P(token | context); unknown tokens fall back to the <unk> slot.
    double probability(std::span<const std::string> context, const std::string& token) const;

    std::vector<double> sequence_probabilities(const TokenSequence& seq) const;

    /// Token-weighted perplexity over a corpus (Σ log p pooled over all
    /// predicted tokens).
    double corpus_perplexity(const std::vector<TokenSequence>& corpus) const;

private:
    std::string context_key(std::span<const std::string> context) const;
    const std::string& fold(const std::string& token) const;

    std::uint32_t order_;
    double alpha_;
    std::set<std::string> vocab_;
    std::map<std::string, std::map<std::string, std::uint64_t>> counts_;
    std::map<std::string, std::uint64_t> context_totals_;
};

/// Trains an additive-smoothed model. Throws DataError on an empty corpus.
NgramModel train_ngram(const std::vector<TokenSequence>& corpus, std::uint32_t order,
                       double alpha);

double eval_corpus(const NgramModel& model, const std::vector<TokenSequence>& corpus);

struct ExperimentArm {
    bool augmented = false;
    std::size_t train_lines = 0;
    std::size_t vocab_size = 0;
    double train_perplexity = 0.0;
    double val_perplexity = 0.0;
    double test_perplexity = 0.0;
};

struct ExperimentReport {
    std::uint32_t order = 0;
    double alpha = 0.0;
    std::size_t train_lines = 0;
    std::size_t val_lines = 0;
    std::size_t test_lines = 0;
    ExperimentArm plain;
    ExperimentArm augmented;
    bool has_augmented_arm = false;
};

/// Trains and evaluates the model on (train, val, test), once on the plain
/// training lines and once on their augmented version when aug_cfg is set.
/// The corpora must be disjoint (as produced by split_corpus).
ExperimentReport run_experiment(const std::vector<std::string>& train,
                                const std::vector<std::string>& val,
                                const std::vector<std::string>& test,
                                const std::optional<AugmentationConfig>& aug_cfg,
                                std::uint32_t order, double alpha);

std::string report_to_json(const ExperimentReport& report);

}  // namespace sfiles
