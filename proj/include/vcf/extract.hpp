// Module/function snippet extraction. Works on the lexer's token stream, so
// `module` inside a comment or string never starts a snippet. Each snippet is
// split into a definition (through the first `;` at parenthesis depth 0) and
// a body (the remainder through the matching end keyword).

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vcf/lexer.hpp"

namespace vcf::extract {

enum class SnippetKind { Module, Function };

struct Snippet {
    std::string snippet_id;
    SnippetKind kind;
    std::string name;
    std::string definition_text;
    std::string body_text;
    std::string file_id;
    int line_begin = 0;  // inclusive
    int line_end = 0;
    int nesting_depth = 0;  // 0 = top level; functions inside modules nest
};

std::string kind_name(SnippetKind kind);

// Emits one snippet per module/macromodule/function construct, including
// functions nested inside modules. Malformed constructs (no matching end
// keyword, or no header `;`) are skipped and reported via `audit`.
std::vector<Snippet> extract_snippets(
    const lexer::LexOutput& lex, const std::string& source,
    const std::string& file_id,
    const std::function<void(const std::string&)>& audit = nullptr);

}  // namespace vcf::extract
