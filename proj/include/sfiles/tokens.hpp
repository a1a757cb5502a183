#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sfiles {

enum class TokenKind {
    Unit,           // (name)
    Tag,            // {name}
    BranchOpen,     // [
    BranchClose,    // ]
    IncomingOpen,   // <&|
    IncomingSep,    // &
    IncomingClose,  // &|
    RecycleRef,     // <n
    RecycleMark,    // n
    SubprocessSep,  // n|
};

const char* token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;       // exact lexeme as written
    std::string name;       // unit category or tag name, when applicable
    long number = 0;        // recycle stream number, when applicable
    std::size_t begin = 0;  // [begin, end) offsets into the input string
    std::size_t end = 0;
};

/// Splits an SFILES string into tokens. Surrounding whitespace is ignored;
/// concatenating the lexemes reproduces the trimmed input exactly.
/// Throws ParseError on unknown characters or unterminated constructs.
std::vector<Token> tokenize(std::string_view text);

}  // namespace sfiles
