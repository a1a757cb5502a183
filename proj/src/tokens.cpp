#include "sfiles/tokens.hpp"

#include <cctype>

#include "sfiles/errors.hpp"

namespace sfiles {

namespace {

constexpr long kMaxStreamNumber = 999999999L;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

// Characters that delimit the notation and may not appear in names.
bool is_delimiter(char c) {
    switch (c) {
        case '(':
        case ')':
        case '{':
        case '}':
        case '[':
        case ']':
        case '<':
        case '>':
        case '&':
        case '|':
        case '%':
            return true;
        default:
            return false;
    }
}

std::string printable(char c) {
    if (is_space(c)) {
        return "whitespace";
    }
    return std::string(1, c);
}

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {
        begin_ = 0;
        end_ = text_.size();
        while (begin_ < end_ && is_space(text_[begin_])) {
            ++begin_;
        }
        while (end_ > begin_ && is_space(text_[end_ - 1])) {
            --end_;
        }
        pos_ = begin_;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < end_) {
            out.push_back(next());
        }
        return out;
    }

private:
    bool done() const { return pos_ >= end_; }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < end_ ? text_[pos_ + ahead] : '\0';
    }

    Token make(TokenKind kind, std::size_t start) {
        Token t;
        t.kind = kind;
        t.begin = start;
        t.end = pos_;
        t.text = std::string(text_.substr(start, pos_ - start));
        return t;
    }

    [[noreturn]] void fail(std::size_t position, std::string expected, std::string found = "") {
        throw ParseError(position, std::move(expected), std::move(found));
    }

    Token next() {
        const std::size_t start = pos_;
        const char c = text_[pos_];
        switch (c) {
            case '(':
                return scan_name(start, ')', TokenKind::Unit);
            case '{':
                return scan_name(start, '}', TokenKind::Tag);
            case '[':
                ++pos_;
                return make(TokenKind::BranchOpen, start);
            case ']':
                ++pos_;
                return make(TokenKind::BranchClose, start);
            case '<':
                return scan_after_angle(start);
            case '&':
                ++pos_;
                if (peek() == '|') {
                    ++pos_;
                    return make(TokenKind::IncomingClose, start);
                }
                return make(TokenKind::IncomingSep, start);
            case 'n':
                if (peek(1) == '|') {
                    pos_ += 2;
                    return make(TokenKind::SubprocessSep, start);
                }
                fail(start, "a token", printable(c));
            case '%':
            default:
                if (c == '%' || is_digit(c)) {
                    Token t = scan_number(start, TokenKind::RecycleMark);
                    return t;
                }
                if (is_space(c)) {
                    fail(start, "no internal whitespace", "whitespace");
                }
                fail(start, "a token", printable(c));
        }
    }

    Token scan_name(std::size_t start, char closer, TokenKind kind) {
        ++pos_;  // opener
        const std::size_t name_start = pos_;
        while (!done() && text_[pos_] != closer) {
            const char c = text_[pos_];
            if (is_delimiter(c) || is_space(c)) {
                fail(pos_, std::string("'") + closer + "' to close the name started at offset " +
                               std::to_string(start),
                     printable(c));
            }
            if (kind == TokenKind::Unit && is_digit(c)) {
                fail(pos_, "a unit category without digits", printable(c));
            }
            ++pos_;
        }
        if (done()) {
            fail(pos_, std::string("'") + closer + "' to terminate " +
                           (kind == TokenKind::Unit ? "unit" : "tag"));
        }
        if (pos_ == name_start) {
            fail(pos_, kind == TokenKind::Unit ? "a non-empty unit category" : "a non-empty tag name");
        }
        std::string name(text_.substr(name_start, pos_ - name_start));
        ++pos_;  // closer
        Token t = make(kind, start);
        t.name = std::move(name);
        return t;
    }

    Token scan_after_angle(std::size_t start) {
        ++pos_;  // '<'
        if (peek() == '&' && peek(1) == '|') {
            pos_ += 2;
            return make(TokenKind::IncomingOpen, start);
        }
        if (done()) {
            fail(pos_, "a recycle number or '&|' after '<'");
        }
        if (!is_digit(peek()) && peek() != '%') {
            fail(pos_, "a recycle number or '&|' after '<'", printable(peek()));
        }
        return scan_number(start, TokenKind::RecycleRef);
    }

    // Stream numbers are a single digit, or '%' followed by digits.
    Token scan_number(std::size_t start, TokenKind kind) {
        long value = 0;
        if (peek() == '%') {
            ++pos_;
            const std::size_t digits_start = pos_;
            while (!done() && is_digit(peek())) {
                value = value * 10 + (peek() - '0');
                if (value > kMaxStreamNumber) {
                    fail(digits_start, "a recycle number below 10^9");
                }
                ++pos_;
            }
            if (pos_ == digits_start) {
                fail(pos_, "digits after '%'", done() ? "" : printable(peek()));
            }
        } else {
            value = peek() - '0';
            ++pos_;
        }
        if (value == 0) {
            fail(start, "a positive recycle number", "0");
        }
        Token t = make(kind, start);
        t.number = value;
        return t;
    }

    std::string_view text_;
    std::size_t begin_ = 0;
    std::size_t end_ = 0;
    std::size_t pos_ = 0;
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Unit: return "unit";
        case TokenKind::Tag: return "tag";
        case TokenKind::BranchOpen: return "branch-open";
        case TokenKind::BranchClose: return "branch-close";
        case TokenKind::IncomingOpen: return "incoming-open";
        case TokenKind::IncomingSep: return "incoming-sep";
        case TokenKind::IncomingClose: return "incoming-close";
        case TokenKind::RecycleRef: return "recycle-ref";
        case TokenKind::RecycleMark: return "recycle-mark";
        case TokenKind::SubprocessSep: return "subprocess-sep";
    }
    return "unknown";
}

std::vector<Token> tokenize(std::string_view text) {
    return Scanner(text).run();
}

}  // namespace sfiles
