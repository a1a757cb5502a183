#include "sfiles/dataset.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>

#include "parallel.hpp"
#include "sfiles/errors.hpp"
#include "sfiles/rng.hpp"
#include "sfiles/serializer.hpp"

namespace sfiles {

const char* const kAugmentedMarker = "# sfiles-forge augmented corpus";

std::vector<CorpusLine> read_corpus_lines(std::istream& in) {
    std::vector<CorpusLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::size_t last = line.find_last_not_of(" \t");
        out.push_back({line_no, line.substr(first, last - first + 1)});
    }
    return out;
}

namespace {

long long gcd_ll(long long a, long long b) {
    while (b != 0) {
        const long long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

Fraction reduce(Fraction f) {
    const long long g = gcd_ll(f.num, f.den);
    if (g != 0) {
        f.num /= g;
        f.den /= g;
    }
    return f;
}

Fraction add(Fraction a, Fraction b) {
    return reduce({a.num * b.den + b.num * a.den, a.den * b.den});
}

}  // namespace

Fraction parse_fraction(const std::string& text) {
    if (text.empty()) {
        throw ConfigError("empty split ratio");
    }
    const std::size_t dot = text.find('.');
    long long num = 0;
    long long den = 1;
    const std::string digits = dot == std::string::npos ? text : text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || digits.size() > 9 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ConfigError("split ratio '" + text + "' is not a non-negative number");
    }
    for (char c : digits) {
        num = num * 10 + (c - '0');
    }
    if (dot != std::string::npos) {
        for (std::size_t i = dot + 1; i < text.size(); ++i) {
            den *= 10;
        }
    }
    return reduce({num, den});
}

SplitSpec make_split_spec(const std::string& train, const std::string& val,
                          const std::string& test, std::uint64_t seed) {
    SplitSpec spec;
    spec.train_fraction = parse_fraction(train);
    spec.val_fraction = parse_fraction(val);
    spec.test_fraction = parse_fraction(test);
    spec.seed = seed;
    Fraction sum = add(add(spec.train_fraction, spec.val_fraction), spec.test_fraction);
    if (sum.num != sum.den) {
        // plain integers act as weights
        const bool integral = spec.train_fraction.den == 1 && spec.val_fraction.den == 1 &&
                              spec.test_fraction.den == 1;
        const long long total = sum.num;
        if (!integral || total <= 0) {
            throw ConfigError("split ratios must sum to exactly 1");
        }
        spec.train_fraction = reduce({spec.train_fraction.num, total});
        spec.val_fraction = reduce({spec.val_fraction.num, total});
        spec.test_fraction = reduce({spec.test_fraction.num, total});
    }
    return spec;
}

AugmentOutcome augment_corpus(const std::vector<CorpusLine>& lines,
                              const AugmentationConfig& cfg) {
    AugmentOutcome outcome;
    outcome.records_in = lines.size();
    std::vector<std::vector<std::string>> blocks(lines.size());
    std::vector<CorpusRecord> failures(lines.size());
    detail::parallel_for(lines.size(), [&](std::size_t i) {
        const CorpusLine& line = lines[i];
        AugmentationConfig local = cfg;
        local.seed = mix64(cfg.seed, line.line_no);
        try {
            const AugmentationSet set = augment(line.text, local);
            std::vector<std::string>& block = blocks[i];
            std::set<std::string> seen;
            auto push = [&](const std::string& s) {
                if (seen.insert(s).second) {
                    block.push_back(s);
                }
            };
            push(line.text);
            if (local.include_canonical) {
                push(set.canonical);
            }
            for (const auto& v : set.variants) {
                push(v);
            }
        } catch (const ParseError& err) {
            failures[i] = {line.line_no, line.text, "", false, err.what(), err.position()};
        }
    });
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!failures[i].ok && !failures[i].error.empty()) {
            outcome.failures.push_back(std::move(failures[i]));
            continue;
        }
        ++outcome.records_ok;
        for (auto& s : blocks[i]) {
            outcome.lines.push_back(std::move(s));
        }
    }
    return outcome;
}

CanonicalizeOutcome canonicalize_corpus(const std::vector<CorpusLine>& lines) {
    CanonicalizeOutcome outcome;
    std::vector<CorpusRecord> records(lines.size());
    detail::parallel_for(lines.size(), [&](std::size_t i) {
        CorpusRecord& rec = records[i];
        rec.line_no = lines[i].line_no;
        rec.raw = lines[i].text;
        try {
            rec.canonical = canonicalize(lines[i].text);
        } catch (const ParseError& err) {
            rec.ok = false;
            rec.error = err.what();
            rec.error_position = err.position();
        }
    });
    for (auto& rec : records) {
        if (rec.ok) {
            outcome.lines.push_back(std::move(rec.canonical));
        } else {
            outcome.failures.push_back(std::move(rec));
        }
    }
    return outcome;
}

SplitResult split_corpus(const std::vector<CorpusLine>& lines, const SplitSpec& spec) {
    auto in_range = [](const Fraction& f) {
        return f.num >= 0 && f.den > 0 && f.num <= f.den;
    };
    if (!in_range(spec.train_fraction) || !in_range(spec.val_fraction) ||
        !in_range(spec.test_fraction)) {
        throw ConfigError("split fractions must lie in [0, 1]");
    }
    Fraction sum = add(add(spec.train_fraction, spec.val_fraction), spec.test_fraction);
    if (sum.num != sum.den) {
        throw ConfigError("split ratios must sum to exactly 1");
    }

    const std::size_t n = lines.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(spec.seed, 0x73706c69u);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    const Fraction fractions[3] = {spec.train_fraction, spec.val_fraction, spec.test_fraction};
    std::size_t counts[3];
    long long rem_num[3];
    for (int k = 0; k < 3; ++k) {
        const long long total = static_cast<long long>(n) * fractions[k].num;
        counts[k] = static_cast<std::size_t>(total / fractions[k].den);
        rem_num[k] = total % fractions[k].den;  // remainder over fractions[k].den
    }
    std::size_t assigned = counts[0] + counts[1] + counts[2];
    while (assigned < n) {
        int best = -1;
        for (int k = 0; k < 3; ++k) {
            if (rem_num[k] == 0) {
                continue;
            }
            if (best < 0 ||
                rem_num[k] * fractions[best].den > rem_num[best] * fractions[k].den) {
                best = k;
            }
        }
        if (best < 0) {
            best = 0;
        }
        ++counts[best];
        rem_num[best] = 0;
        ++assigned;
    }

    SplitResult result;
    std::size_t idx = 0;
    for (int k = 0; k < 3; ++k) {
        auto& bucket = k == 0 ? result.train : k == 1 ? result.val : result.test;
        for (std::size_t i = 0; i < counts[k]; ++i, ++idx) {
            bucket.push_back(lines[order[idx]].text);
        }
    }
    return result;
}

ValidationReport validate_corpus(const std::vector<CorpusLine>& lines) {
    ValidationReport report;
    report.records.resize(lines.size());
    detail::parallel_for(lines.size(), [&](std::size_t i) {
        CorpusRecord& rec = report.records[i];
        rec.line_no = lines[i].line_no;
        rec.raw = lines[i].text;
        try {
            rec.canonical = canonicalize(lines[i].text);
        } catch (const ParseError& err) {
            rec.ok = false;
            rec.error = err.what();
            rec.error_position = err.position();
        }
    });
    for (const auto& rec : report.records) {
        rec.ok ? ++report.ok_count : ++report.error_count;
    }
    return report;
}

}  // namespace sfiles
