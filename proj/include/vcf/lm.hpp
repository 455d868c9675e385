// Backoff n-gram language model over Verilog tokens. Scoring is stupid
// backoff: relative frequency at the longest stored context, multiplied by
// a fixed alpha per backoff step, bottoming out at an add-one-smoothed
// unigram distribution. Scores above the unigram floor are unnormalized, so
// perplexity is reported as backoff perplexity.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace vcf::lm {

inline const std::string kUnk = "<unk>";
inline const std::string kSep = "<|sep|>";

struct NGramModel {
    int order = 4;
    long min_count = 2;
    double backoff_alpha = 0.4;

    std::vector<std::string> id_to_token;           // id -> token text
    std::unordered_map<std::string, int> token_ids;  // token text -> id

    struct CountTable {
        std::map<int, long> next;  // next-token id -> count
        long total = 0;
    };
    // context key: ids joined as "a,b,c" ("" = unigram table).
    std::unordered_map<std::string, CountTable> counts;

    std::string fingerprint;  // config fingerprint of the producing pipeline

    int token_id(const std::string& token) const;  // UNK for unknown
    std::size_t vocab_size() const { return id_to_token.size(); }
};

// Documents are token streams; SEP is appended after each document.
// Tokens with corpus frequency < min_count train as UNK.
NGramModel train(const std::vector<std::vector<std::string>>& documents,
                 int order, long min_count, double backoff_alpha);

// Natural-log stupid-backoff score of `next` after `context`.
double log_prob(const NGramModel& model,
                const std::vector<std::string>& context,
                const std::string& next);

// exp(mean negative log score) over the stream; history truncated to
// order-1. Throws on an empty stream.
double perplexity_stream(const NGramModel& model,
                         const std::vector<std::string>& tokens);

// SEP inserted after every document, then scored as one stream.
double perplexity(const NGramModel& model,
                  const std::vector<std::vector<std::string>>& documents);

enum class StopReason { EndKeyword, Budget, Eof };

struct CompletionResult {
    std::vector<std::string> tokens;
    StopReason stop_reason = StopReason::Budget;
    std::string detokenized_text;
};

// Greedy argmax continuation of `definition`; ties break to the
// lexicographically smallest token. Stops on the end keyword matching the
// definition's kind (endmodule/endfunction), on SEP, or at max_tokens.
CompletionResult complete_greedy(const NGramModel& model,
                                 const std::string& definition,
                                 int max_tokens);

// Spaces between tokens, newline after `;`, `begin`, `end`.
std::string detokenize(const std::vector<std::string>& tokens);

void save_model(const NGramModel& model, const std::string& path);
NGramModel load_model(const std::string& path);

}  // namespace vcf::lm
