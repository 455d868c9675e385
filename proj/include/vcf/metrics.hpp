// Text-overlap metrics for completion evaluation: corpus-level BLEU with
// brevity penalty, mean-over-pairs ROUGE-L (LCS F-score) and chrF
// (character n-gram F-score, recall-weighted), plus report assembly.
//
// BLEU and ROUGE-L tokenize with the Verilog lexer; chrF is character-level
// with whitespace removed. Both choices are recorded in the report.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vcf::metrics {

struct EvalPair {
    std::string snippet_id;
    std::string hypothesis;
    std::string reference;
};

struct BleuResult {
    double value = 0.0;  // smoothed where a corpus n-gram count was zero
    double raw = 0.0;    // unsmoothed
    bool smoothed = false;
};

// Corpus-level BLEU over lexer tokens, uniform weights over 1..max_n,
// brevity penalty exp(min(0, 1 - ref_len/hyp_len)). Zero corpus match
// counts for an order switch that order's precision to add-one smoothing.
BleuResult bleu(const std::vector<EvalPair>& pairs, int max_n = 4);

// LCS F-score for one pair, over lexer tokens.
double rouge_l(const EvalPair& pair);
double rouge_l_corpus(const std::vector<EvalPair>& pairs);

// Character n-gram F-score in [0, 100], whitespace removed.
double chrf(const EvalPair& pair, int n_max = 6, double beta = 2.0);
double chrf_corpus(const std::vector<EvalPair>& pairs, int n_max = 6,
                   double beta = 2.0);

struct PairScores {
    std::string snippet_id;
    double rouge_l = 0.0;
    double chrf = 0.0;
};

struct MetricReport {
    std::string subset;
    std::string model_id;
    std::optional<double> perplexity;
    BleuResult bleu;
    double rouge_l = 0.0;
    double chrf = 0.0;
    std::size_t pair_count = 0;
    std::vector<PairScores> per_pair;
    std::string tokenization = "verilog-lexer";
    std::string aggregation = "corpus-bleu, mean rouge-l/chrf";
};

// predictions: snippet_id -> completion. Every reference id without a
// prediction scores as an empty hypothesis; a prediction whose id has no
// reference is a fatal input error.
MetricReport evaluate_completions(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& references,
    std::optional<double> perplexity, const std::string& subset,
    const std::string& model_id);

// Aligned plain-text table with Perplexity, BLEU, ROUGE-L, chrF columns.
std::string render_report_table(const std::vector<MetricReport>& rows);

}  // namespace vcf::metrics
