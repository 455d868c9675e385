#include "vcf/extract.hpp"

#include <cctype>
#include <optional>

#include "vcf/hash.hpp"

namespace vcf::extract {
namespace {

using lexer::Token;
using lexer::TokenKind;

bool is_start_keyword(const Token& tok, SnippetKind& kind_out) {
    if (tok.kind != TokenKind::Keyword) return false;
    if (tok.text == "module" || tok.text == "macromodule") {
        kind_out = SnippetKind::Module;
        return true;
    }
    if (tok.text == "function") {
        kind_out = SnippetKind::Function;
        return true;
    }
    return false;
}

bool same_family_start(const Token& tok, SnippetKind kind) {
    if (tok.kind != TokenKind::Keyword) return false;
    if (kind == SnippetKind::Module)
        return tok.text == "module" || tok.text == "macromodule";
    return tok.text == "function";
}

bool family_end(const Token& tok, SnippetKind kind) {
    if (tok.kind != TokenKind::Keyword) return false;
    return tok.text == (kind == SnippetKind::Module ? "endmodule"
                                                    : "endfunction");
}

// Matching end keyword index via depth counter, or nullopt if unbalanced.
std::optional<std::size_t> find_end(const std::vector<Token>& toks,
                                    std::size_t start, SnippetKind kind) {
    int depth = 1;
    for (std::size_t j = start + 1; j < toks.size(); ++j) {
        if (same_family_start(toks[j], kind)) ++depth;
        else if (family_end(toks[j], kind) && --depth == 0) return j;
    }
    return std::nullopt;
}

// First `;` at parenthesis depth 0 within (start, end).
std::optional<std::size_t> find_header_semicolon(
    const std::vector<Token>& toks, std::size_t start, std::size_t end) {
    int paren = 0;
    for (std::size_t j = start + 1; j < end; ++j) {
        const std::string& t = toks[j].text;
        if (t == "(") ++paren;
        else if (t == ")") --paren;
        else if (t == ";" && paren == 0) return j;
    }
    return std::nullopt;
}

// Module name: first identifier after the keyword. Function name: the
// identifier right before the port `(` or, with no ports, before the `;`
// (skips the return type tokens in between).
std::string construct_name(const std::vector<Token>& toks, std::size_t start,
                           std::size_t semi, SnippetKind kind) {
    if (kind == SnippetKind::Module) {
        for (std::size_t j = start + 1; j < semi; ++j)
            if (toks[j].kind == TokenKind::Identifier) return toks[j].text;
        return "";
    }
    std::size_t stop = semi;
    for (std::size_t j = start + 1; j < semi; ++j) {
        if (toks[j].text == "(") {
            stop = j;
            break;
        }
    }
    for (std::size_t j = stop; j-- > start + 1;)
        if (toks[j].kind == TokenKind::Identifier) return toks[j].text;
    return "";
}

}  // namespace

std::string kind_name(SnippetKind kind) {
    return kind == SnippetKind::Module ? "module" : "function";
}

std::vector<Snippet> extract_snippets(
    const lexer::LexOutput& lex, const std::string& source,
    const std::string& file_id,
    const std::function<void(const std::string&)>& audit) {
    const std::vector<Token>& toks = lex.tokens;
    std::vector<Snippet> out;
    std::vector<std::pair<std::size_t, std::size_t>> regions;  // token ranges

    for (std::size_t i = 0; i < toks.size(); ++i) {
        SnippetKind kind;
        if (!is_start_keyword(toks[i], kind)) continue;

        auto end = find_end(toks, i, kind);
        if (!end) {
            if (audit)
                audit("unterminated " + kind_name(kind) + " at line " +
                      std::to_string(toks[i].line) + " in " + file_id);
            continue;
        }
        auto semi = find_header_semicolon(toks, i, *end);
        if (!semi) {
            if (audit)
                audit("headerless " + kind_name(kind) + " at line " +
                      std::to_string(toks[i].line) + " in " + file_id);
            continue;
        }

        Snippet s;
        s.kind = kind;
        s.name = construct_name(toks, i, *semi, kind);
        s.file_id = file_id;
        s.line_begin = toks[i].line;
        s.line_end = toks[*end].line;
        s.definition_text =
            source.substr(toks[i].begin, toks[*semi].end - toks[i].begin);
        // Body starts at the first token after the header `;`; leading
        // whitespace between header and body is interior whitespace.
        std::size_t body_begin = toks[*semi + 1].begin;
        s.body_text = source.substr(body_begin, toks[*end].end - body_begin);
        s.snippet_id = file_id + ":" + kind_name(kind) + ":" +
                       std::to_string(toks[i].begin);
        out.push_back(std::move(s));
        regions.emplace_back(i, *end);
    }

    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = 0; b < out.size(); ++b)
            if (a != b && regions[b].first < regions[a].first &&
                regions[a].second < regions[b].second)
                ++out[a].nesting_depth;
    return out;
}

}  // namespace vcf::extract
