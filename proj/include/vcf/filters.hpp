// File-level anomaly filters: autogeneration keywords, contradictory
// license notices, size thresholds, and comment-only emptiness. Every file
// gets exactly one decision with a reason code and the matched evidence.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vcf/ingest.hpp"
#include "vcf/lexer.hpp"

namespace vcf::filters {

enum class Reason {
    Autogenerated,
    LicenseNotice,
    TooManyLines,
    LineTooLong,
    TooSmall,
    EmptyAfterComments,
    Passed,
};

std::string reason_name(Reason r);
Reason reason_from_name(const std::string& name);

struct FilterDecision {
    std::string file_id;
    bool kept = false;
    Reason reason = Reason::Passed;
    std::string evidence;  // matched keyword or offending measurement
};

struct FilterConfig {
    std::vector<std::string> autogen_keywords{
        "automatically generated", "auto-generated", "autogenerated",
        "generated by", "do not edit"};
    std::vector<std::string> license_blacklist{
        "general public license", "gpl", "all rights reserved"};
    std::vector<std::string> license_whitelist{
        "mit license", "apache license", "bsd license",
        "permission is hereby granted"};
    long max_lines = 10000;
    long max_line_length = 1000;
    long min_code_chars = 20;

    void validate() const;  // throws std::invalid_argument
};

// First keyword (case-insensitive substring) found in any comment.
std::optional<std::string> scan_autogenerated(
    const std::vector<lexer::CommentSpan>& comments,
    const std::vector<std::string>& keywords);

// Dropped iff a blacklist keyword matches and no whitelist keyword does.
// Returns the blacklist evidence when dropping.
std::optional<std::string> scan_license_notice(
    const std::vector<lexer::CommentSpan>& comments,
    const std::vector<std::string>& blacklist,
    const std::vector<std::string>& whitelist);

struct SizeVerdict {
    Reason reason;
    std::string evidence;
};

// too_many_lines, then line_too_long, then too_small / empty_after_comments.
std::optional<SizeVerdict> size_filter(const std::string& text,
                                       const lexer::LexOutput& lex,
                                       const FilterConfig& cfg);

struct FilterResult {
    std::vector<ingest::SourceFile> kept;
    std::vector<FilterDecision> decisions;  // one per input, input order
};

FilterResult apply_filters(const std::vector<ingest::SourceFile>& files,
                           const FilterConfig& cfg);

}  // namespace vcf::filters
