#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfiles/augment.hpp"

namespace sfiles {

/// One corpus line and the outcome of processing it.
struct CorpusRecord {
    std::size_t line_no = 0;  // physical line number in the source file
    std::string raw;
    std::string canonical;  // filled when ok
    bool ok = true;
    std::string error;
    std::size_t error_position = 0;
};

struct CorpusLine {
    std::size_t line_no = 0;
    std::string text;
};

/// Reads a line-oriented corpus, skipping blank lines and '#' comments.
std::vector<CorpusLine> read_corpus_lines(std::istream& in);

/// Exact split ratio.
struct Fraction {
    long long num = 0;
    long long den = 1;
};

/// Parses "0.8", ".5" or "8" into an exact fraction. Throws ConfigError.
Fraction parse_fraction(const std::string& text);

struct SplitSpec {
    Fraction train_fraction;
    Fraction val_fraction;
    Fraction test_fraction;
    std::uint64_t seed = 0;
};

/// Builds a spec from three ratio strings. Plain integers are treated as
/// weights and normalized; fractions must sum to exactly 1.
SplitSpec make_split_spec(const std::string& train, const std::string& val,
                          const std::string& test, std::uint64_t seed);

struct AugmentOutcome {
    std::vector<std::string> lines;       // original line followed by its variants
    std::vector<CorpusRecord> failures;   // invalid lines, omitted from output
    std::size_t records_in = 0;
    std::size_t records_ok = 0;
};

/// Augments every valid line with at most cfg.max_augmentations variants.
/// Per-line seeds derive from (cfg.seed, line_no), so output is identical
/// under any worker count.
AugmentOutcome augment_corpus(const std::vector<CorpusLine>& lines,
                              const AugmentationConfig& cfg);

struct CanonicalizeOutcome {
    std::vector<std::string> lines;
    std::vector<CorpusRecord> failures;
};

CanonicalizeOutcome canonicalize_corpus(const std::vector<CorpusLine>& lines);

struct SplitResult {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
};

/// Disjoint, exhaustive partition by seeded shuffle with largest-remainder
/// rounding of the split sizes.
SplitResult split_corpus(const std::vector<CorpusLine>& lines, const SplitSpec& spec);

struct ValidationReport {
    std::vector<CorpusRecord> records;
    std::size_t ok_count = 0;
    std::size_t error_count = 0;
};

ValidationReport validate_corpus(const std::vector<CorpusLine>& lines);

/// Marker comment written at the top of augmented corpora so that split
/// refuses to run on them unless forced.
extern const char* const kAugmentedMarker;

}  // namespace sfiles
