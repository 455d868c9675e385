#include "vcf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "vcf/lexer.hpp"

namespace vcf::metrics {
namespace {

std::vector<std::string> tokenize(const std::string& text) {
    lexer::LexOutput lx = lexer::lex(text);
    std::vector<std::string> out;
    out.reserve(lx.tokens.size());
    for (const lexer::Token& t : lx.tokens) out.push_back(t.text);
    return out;
}

using NGramCounts = std::map<std::vector<std::string>, long>;

NGramCounts ngram_counts(const std::vector<std::string>& toks, int n) {
    NGramCounts counts;
    if (static_cast<int>(toks.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size();
         ++i)
        ++counts[{toks.begin() + static_cast<long>(i),
                  toks.begin() + static_cast<long>(i) + n}];
    return counts;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string remove_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

std::map<std::string, long> char_ngrams(const std::string& s, int n) {
    std::map<std::string, long> counts;
    if (static_cast<int>(s.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i)
        ++counts[s.substr(i, static_cast<std::size_t>(n))];
    return counts;
}

template <typename K>
long clipped_matches(const std::map<K, long>& hyp,
                     const std::map<K, long>& ref) {
    long matches = 0;
    for (const auto& [gram, count] : hyp) {
        auto it = ref.find(gram);
        if (it != ref.end()) matches += std::min(count, it->second);
    }
    return matches;
}

template <typename K>
long total_count(const std::map<K, long>& counts) {
    long total = 0;
    for (const auto& [gram, count] : counts) total += count;
    return total;
}

}  // namespace

BleuResult bleu(const std::vector<EvalPair>& pairs, int max_n) {
    if (pairs.empty()) throw std::invalid_argument("bleu: no pairs");

    std::vector<long> matches(static_cast<std::size_t>(max_n), 0);
    std::vector<long> totals(static_cast<std::size_t>(max_n), 0);
    long hyp_len = 0, ref_len = 0;

    for (const EvalPair& pair : pairs) {
        std::vector<std::string> hyp = tokenize(pair.hypothesis);
        std::vector<std::string> ref = tokenize(pair.reference);
        hyp_len += static_cast<long>(hyp.size());
        ref_len += static_cast<long>(ref.size());
        for (int n = 1; n <= max_n; ++n) {
            NGramCounts h = ngram_counts(hyp, n);
            NGramCounts r = ngram_counts(ref, n);
            auto idx = static_cast<std::size_t>(n - 1);
            matches[idx] += clipped_matches(h, r);
            totals[idx] += total_count(h);
        }
    }

    BleuResult result;
    if (hyp_len == 0) return result;

    double bp = std::exp(std::min(
        0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)));

    double log_sum_raw = 0.0, log_sum_smooth = 0.0;
    bool raw_zero = false;
    for (int n = 0; n < max_n; ++n) {
        auto idx = static_cast<std::size_t>(n);
        if (matches[idx] == 0) {
            raw_zero = true;
            result.smoothed = true;
            log_sum_smooth += std::log(
                static_cast<double>(matches[idx] + 1) /
                static_cast<double>(totals[idx] + 1));
        } else {
            double p = static_cast<double>(matches[idx]) /
                       static_cast<double>(totals[idx]);
            log_sum_raw += std::log(p);
            log_sum_smooth += std::log(p);
        }
    }
    result.raw = raw_zero ? 0.0 : bp * std::exp(log_sum_raw / max_n);
    result.value = bp * std::exp(log_sum_smooth / max_n);
    if (!raw_zero) result.value = result.raw;
    return result;
}

double rouge_l(const EvalPair& pair) {
    std::vector<std::string> hyp = tokenize(pair.hypothesis);
    std::vector<std::string> ref = tokenize(pair.reference);
    if (hyp.empty() || ref.empty()) return 0.0;
    double lcs = static_cast<double>(lcs_length(hyp, ref));
    double p = lcs / static_cast<double>(hyp.size());
    double r = lcs / static_cast<double>(ref.size());
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double rouge_l_corpus(const std::vector<EvalPair>& pairs) {
    if (pairs.empty()) return 0.0;
    double sum = 0.0;
    for (const EvalPair& pair : pairs) sum += rouge_l(pair);
    return sum / static_cast<double>(pairs.size());
}

double chrf(const EvalPair& pair, int n_max, double beta) {
    std::string hyp = remove_whitespace(pair.hypothesis);
    std::string ref = remove_whitespace(pair.reference);

    double p_sum = 0.0, r_sum = 0.0;
    int orders = 0;
    for (int n = 1; n <= n_max; ++n) {
        std::map<std::string, long> h = char_ngrams(hyp, n);
        std::map<std::string, long> r = char_ngrams(ref, n);
        long h_total = total_count(h);
        long r_total = total_count(r);
        if (h_total == 0 && r_total == 0) continue;  // order skipped
        ++orders;
        if (h_total == 0 || r_total == 0) continue;  // contributes 0
        long m = clipped_matches(h, r);
        p_sum += static_cast<double>(m) / static_cast<double>(h_total);
        r_sum += static_cast<double>(m) / static_cast<double>(r_total);
    }
    if (orders == 0) return 0.0;
    double p_bar = p_sum / orders;
    double r_bar = r_sum / orders;
    double denom = beta * beta * p_bar + r_bar;
    if (denom == 0.0) return 0.0;
    return 100.0 * (1.0 + beta * beta) * p_bar * r_bar / denom;
}

double chrf_corpus(const std::vector<EvalPair>& pairs, int n_max,
                   double beta) {
    if (pairs.empty()) return 0.0;
    double sum = 0.0;
    for (const EvalPair& pair : pairs) sum += chrf(pair, n_max, beta);
    return sum / static_cast<double>(pairs.size());
}

MetricReport evaluate_completions(
    const std::map<std::string, std::string>& predictions,
    const std::map<std::string, std::string>& references,
    std::optional<double> perplexity, const std::string& subset,
    const std::string& model_id) {
    std::vector<std::string> unresolved;
    for (const auto& [id, text] : predictions)
        if (!references.contains(id)) unresolved.push_back(id);
    if (!unresolved.empty()) {
        std::ostringstream msg;
        msg << "predictions with no matching reference:";
        for (const std::string& id : unresolved) msg << " " << id;
        throw std::invalid_argument(msg.str());
    }

    std::vector<EvalPair> pairs;
    pairs.reserve(references.size());
    for (const auto& [id, ref] : references) {
        auto it = predictions.find(id);
        pairs.push_back(
            {id, it == predictions.end() ? std::string() : it->second, ref});
    }

    MetricReport report;
    report.subset = subset;
    report.model_id = model_id;
    report.perplexity = perplexity;
    report.pair_count = pairs.size();
    if (!pairs.empty()) {
        report.bleu = bleu(pairs);
        report.rouge_l = rouge_l_corpus(pairs);
        report.chrf = chrf_corpus(pairs);
        for (const EvalPair& pair : pairs)
            report.per_pair.push_back(
                {pair.snippet_id, rouge_l(pair), chrf(pair)});
    }
    return report;
}

std::string render_report_table(const std::vector<MetricReport>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-24s %-12s %10s %8s %8s %8s\n",
                  "Model", "Subset", "Perplexity", "BLEU", "ROUGE-L", "chrF");
    out << line;
    for (const MetricReport& r : rows) {
        std::string ppl = r.perplexity
                              ? [&] {
                                    char buf[32];
                                    std::snprintf(buf, sizeof(buf), "%.2f",
                                                  *r.perplexity);
                                    return std::string(buf);
                                }()
                              : std::string("-");
        std::snprintf(line, sizeof(line), "%-24s %-12s %10s %8.4f %8.4f %8.2f\n",
                      r.model_id.c_str(), r.subset.c_str(), ppl.c_str(),
                      r.bleu.value, r.rouge_l, r.chrf);
        out << line;
    }
    return out.str();
}

}  // namespace vcf::metrics
