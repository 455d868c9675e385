// Comment-aware Verilog/SystemVerilog tokenizer.
//
// Produces a token stream plus the comment spans that were skipped over,
// so downstream passes can scan comments (autogeneration / license keyword
// checks) and build token sets (near-duplicate detection, n-gram training)
// from a single lex of each file.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace vcf::lexer {

enum class TokenKind {
    Keyword,
    Identifier,
    Number,
    StringLiteral,
    Operator,
    Punctuation,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line;    // 1-based
    int column;  // 1-based
    std::size_t begin;  // byte offset, half-open [begin, end)
    std::size_t end;
};

enum class CommentKind { Line, Block };

struct CommentSpan {
    CommentKind kind;
    std::string text;  // delimiters included
    std::size_t begin;
    std::size_t end;
};

struct LexOutput {
    std::vector<Token> tokens;
    std::vector<CommentSpan> comments;
    std::size_t code_char_count = 0;  // non-whitespace chars outside comments
    bool unterminated_block_comment = false;
};

// Replaces invalid UTF-8 sequences with U+FFFD. Never fails.
std::string sanitize_utf8(std::string_view bytes);

// Tokenizes `text`. Total: every byte lands in exactly one of
// {comment, token, whitespace}; string literals are never comments.
LexOutput lex(std::string_view text);

// Each comment span replaced by a single space. Idempotent.
std::string strip_comments(std::string_view text);

// Distinct token texts, comments excluded.
std::unordered_set<std::string> token_set(const LexOutput& lex);

// Keyword table covers IEEE 1364-2005 plus common SystemVerilog keywords.
bool is_keyword(std::string_view word);

}  // namespace vcf::lexer
