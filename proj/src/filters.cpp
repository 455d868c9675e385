#include "vcf/filters.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace vcf::filters {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

bool contains_ci(const std::string& haystack_lower,
                 const std::string& needle_lower) {
    return haystack_lower.find(needle_lower) != std::string::npos;
}

long count_lines(const std::string& text) {
    if (text.empty()) return 0;
    long lines = 1;
    for (char c : text)
        if (c == '\n') ++lines;
    if (text.back() == '\n') --lines;  // trailing newline is not a new line
    return std::max(lines, 1L);
}

long max_line_len(const std::string& text) {
    long best = 0, cur = 0;
    for (char c : text) {
        if (c == '\n') {
            best = std::max(best, cur);
            cur = 0;
        } else {
            ++cur;  // tabs count as one character
        }
    }
    return std::max(best, cur);
}

}  // namespace

std::string reason_name(Reason r) {
    switch (r) {
        case Reason::Autogenerated: return "autogenerated";
        case Reason::LicenseNotice: return "license_notice";
        case Reason::TooManyLines: return "too_many_lines";
        case Reason::LineTooLong: return "line_too_long";
        case Reason::TooSmall: return "too_small";
        case Reason::EmptyAfterComments: return "empty_after_comments";
        case Reason::Passed: return "passed";
    }
    return "passed";
}

Reason reason_from_name(const std::string& name) {
    if (name == "autogenerated") return Reason::Autogenerated;
    if (name == "license_notice") return Reason::LicenseNotice;
    if (name == "too_many_lines") return Reason::TooManyLines;
    if (name == "line_too_long") return Reason::LineTooLong;
    if (name == "too_small") return Reason::TooSmall;
    if (name == "empty_after_comments") return Reason::EmptyAfterComments;
    if (name == "passed") return Reason::Passed;
    throw std::invalid_argument("unknown filter reason: " + name);
}

void FilterConfig::validate() const {
    if (autogen_keywords.empty() || license_blacklist.empty() ||
        license_whitelist.empty())
        throw std::invalid_argument("filter keyword lists must be non-empty");
    if (max_lines <= 1 || max_line_length <= 0 || min_code_chars < 0)
        throw std::invalid_argument("filter thresholds out of range");
}

std::optional<std::string> scan_autogenerated(
    const std::vector<lexer::CommentSpan>& comments,
    const std::vector<std::string>& keywords) {
    for (const std::string& kw : keywords) {
        for (const lexer::CommentSpan& c : comments) {
            if (contains_ci(lower(c.text), kw)) return kw;
        }
    }
    return std::nullopt;
}

std::optional<std::string> scan_license_notice(
    const std::vector<lexer::CommentSpan>& comments,
    const std::vector<std::string>& blacklist,
    const std::vector<std::string>& whitelist) {
    std::optional<std::string> hit;
    std::string all;
    for (const lexer::CommentSpan& c : comments) {
        all += lower(c.text);
        all += '\n';
    }
    for (const std::string& kw : blacklist) {
        if (contains_ci(all, kw)) {
            hit = kw;
            break;
        }
    }
    if (!hit) return std::nullopt;
    for (const std::string& kw : whitelist)
        if (contains_ci(all, kw)) return std::nullopt;
    return hit;
}

std::optional<SizeVerdict> size_filter(const std::string& text,
                                       const lexer::LexOutput& lex,
                                       const FilterConfig& cfg) {
    long lines = count_lines(text);
    if (lines > cfg.max_lines)
        return SizeVerdict{Reason::TooManyLines,
                           std::to_string(lines) + " lines"};
    long longest = max_line_len(text);
    if (longest > cfg.max_line_length)
        return SizeVerdict{Reason::LineTooLong,
                           "line of " + std::to_string(longest) + " chars"};
    long code = static_cast<long>(lex.code_char_count);
    if (code < cfg.min_code_chars)
        return SizeVerdict{Reason::TooSmall,
                           std::to_string(code) + " code chars"};
    if (code == 0)
        return SizeVerdict{Reason::EmptyAfterComments, "0 code chars"};
    return std::nullopt;
}

FilterResult apply_filters(const std::vector<ingest::SourceFile>& files,
                           const FilterConfig& cfg) {
    cfg.validate();
    FilterResult result;
    for (const ingest::SourceFile& file : files) {
        lexer::LexOutput lx = lexer::lex(file.content);
        FilterDecision d;
        d.file_id = file.file_id;

        if (auto kw = scan_autogenerated(lx.comments, cfg.autogen_keywords)) {
            d.kept = false;
            d.reason = Reason::Autogenerated;
            d.evidence = *kw;
        } else if (auto lic = scan_license_notice(lx.comments,
                                                  cfg.license_blacklist,
                                                  cfg.license_whitelist)) {
            d.kept = false;
            d.reason = Reason::LicenseNotice;
            d.evidence = *lic;
        } else if (auto size = size_filter(file.content, lx, cfg)) {
            d.kept = false;
            d.reason = size->reason;
            d.evidence = size->evidence;
        } else {
            d.kept = true;
            d.reason = Reason::Passed;
        }

        if (d.kept) result.kept.push_back(file);
        result.decisions.push_back(std::move(d));
    }
    return result;
}

}  // namespace vcf::filters
