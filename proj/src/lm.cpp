#include "vcf/lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vcf/lexer.hpp"

using nlohmann::json;

namespace vcf::lm {
namespace {

std::string context_key(const std::vector<int>& ids, std::size_t begin,
                        std::size_t end) {
    std::string key;
    for (std::size_t i = begin; i < end; ++i) {
        if (!key.empty()) key.push_back(',');
        key += std::to_string(ids[i]);
    }
    return key;
}

}  // namespace

int NGramModel::token_id(const std::string& token) const {
    auto it = token_ids.find(token);
    return it == token_ids.end() ? 0 : it->second;  // 0 = UNK
}

NGramModel train(const std::vector<std::vector<std::string>>& documents,
                 int order, long min_count, double backoff_alpha) {
    if (order < 1) throw std::invalid_argument("train: order must be >= 1");
    if (documents.empty())
        throw std::invalid_argument("train: empty corpus");

    NGramModel model;
    model.order = order;
    model.min_count = min_count;
    model.backoff_alpha = backoff_alpha;

    std::map<std::string, long> freq;
    for (const auto& doc : documents) {
        for (const std::string& tok : doc) ++freq[tok];
        ++freq[kSep];  // one per document boundary
    }

    // ids: UNK=0, SEP=1, then qualifying tokens in lexicographic order.
    model.id_to_token = {kUnk, kSep};
    model.token_ids = {{kUnk, 0}, {kSep, 1}};
    for (const auto& [tok, count] : freq) {
        if (tok == kUnk || tok == kSep) continue;
        if (count < min_count) continue;
        model.token_ids.emplace(tok, static_cast<int>(model.id_to_token.size()));
        model.id_to_token.push_back(tok);
    }

    std::vector<int> stream;
    for (const auto& doc : documents) {
        for (const std::string& tok : doc) stream.push_back(model.token_id(tok));
        stream.push_back(1);  // SEP
    }

    for (std::size_t t = 0; t < stream.size(); ++t) {
        for (int k = 0; k < order; ++k) {
            if (static_cast<std::size_t>(k) > t) break;
            std::string key =
                context_key(stream, t - static_cast<std::size_t>(k), t);
            auto& table = model.counts[key];
            ++table.next[stream[t]];
            ++table.total;
        }
    }
    return model;
}

double log_prob(const NGramModel& model,
                const std::vector<std::string>& context,
                const std::string& next) {
    std::vector<int> ctx;
    std::size_t max_ctx = static_cast<std::size_t>(model.order - 1);
    std::size_t start = context.size() > max_ctx ? context.size() - max_ctx : 0;
    for (std::size_t i = start; i < context.size(); ++i)
        ctx.push_back(model.token_id(context[i]));
    int next_id = model.token_id(next);

    // Longest stored suffix; all shorter suffixes of a stored context are
    // stored too, so alpha applies only once per subsequent shortening.
    std::size_t begin = 0;
    while (begin < ctx.size() &&
           !model.counts.contains(context_key(ctx, begin, ctx.size())))
        ++begin;

    double log_alpha_steps = 0.0;
    for (;;) {
        if (begin == ctx.size()) {
            const auto& unigram = model.counts.at("");
            auto it = unigram.next.find(next_id);
            long c = it == unigram.next.end() ? 0 : it->second;
            double p = static_cast<double>(c + 1) /
                       static_cast<double>(unigram.total +
                                           static_cast<long>(model.vocab_size()));
            return std::log(p) + log_alpha_steps;
        }
        const auto& table =
            model.counts.at(context_key(ctx, begin, ctx.size()));
        auto it = table.next.find(next_id);
        if (it != table.next.end())
            return std::log(static_cast<double>(it->second) /
                            static_cast<double>(table.total)) +
                   log_alpha_steps;
        log_alpha_steps += std::log(model.backoff_alpha);
        ++begin;
    }
}

double perplexity_stream(const NGramModel& model,
                         const std::vector<std::string>& tokens) {
    if (tokens.empty())
        throw std::invalid_argument("perplexity: empty stream");
    double sum = 0.0;
    std::size_t max_ctx = static_cast<std::size_t>(model.order - 1);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        std::size_t start = t > max_ctx ? t - max_ctx : 0;
        std::vector<std::string> history(tokens.begin() + static_cast<long>(start),
                                         tokens.begin() + static_cast<long>(t));
        sum += log_prob(model, history, tokens[t]);
    }
    return std::exp(-sum / static_cast<double>(tokens.size()));
}

double perplexity(const NGramModel& model,
                  const std::vector<std::vector<std::string>>& documents) {
    std::vector<std::string> stream;
    for (const auto& doc : documents) {
        stream.insert(stream.end(), doc.begin(), doc.end());
        stream.push_back(kSep);
    }
    return perplexity_stream(model, stream);
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i];
        if (i + 1 == tokens.size()) break;
        if (tokens[i] == ";" || tokens[i] == "begin" || tokens[i] == "end")
            out.push_back('\n');
        else
            out.push_back(' ');
    }
    return out;
}

CompletionResult complete_greedy(const NGramModel& model,
                                 const std::string& definition,
                                 int max_tokens) {
    if (max_tokens < 1)
        throw std::invalid_argument("complete_greedy: max_tokens must be >= 1");
    lexer::LexOutput lx = lexer::lex(definition);
    if (lx.tokens.empty())
        throw std::invalid_argument("complete_greedy: definition has no tokens");

    bool is_function = false, is_module = false;
    for (const lexer::Token& t : lx.tokens) {
        if (t.kind != lexer::TokenKind::Keyword) continue;
        if (t.text == "function") { is_function = true; break; }
        if (t.text == "module" || t.text == "macromodule") {
            is_module = true;
            break;
        }
    }

    std::vector<std::string> context;
    for (const lexer::Token& t : lx.tokens) context.push_back(t.text);

    CompletionResult result;
    result.stop_reason = StopReason::Budget;
    for (int step = 0; step < max_tokens; ++step) {
        // Full-vocabulary argmax under the backoff score; ties break to the
        // lexicographically smallest token. UNK is never emitted.
        double best_score = -std::numeric_limits<double>::infinity();
        std::string best;
        for (std::size_t id = 1; id < model.id_to_token.size(); ++id) {
            const std::string& cand = model.id_to_token[id];
            double s = log_prob(model, context, cand);
            if (s > best_score || (s == best_score && cand < best)) {
                best_score = s;
                best = cand;
            }
        }
        if (best == kSep) {
            result.stop_reason = StopReason::Eof;
            break;
        }
        result.tokens.push_back(best);
        context.push_back(best);
        if ((is_module && best == "endmodule") ||
            (is_function && best == "endfunction") ||
            (!is_module && !is_function &&
             (best == "endmodule" || best == "endfunction"))) {
            result.stop_reason = StopReason::EndKeyword;
            break;
        }
    }
    result.detokenized_text = detokenize(result.tokens);
    return result;
}

void save_model(const NGramModel& model, const std::string& path) {
    json counts = json::object();
    for (const auto& [key, table] : model.counts) {
        json next = json::object();
        for (const auto& [id, count] : table.next)
            next[std::to_string(id)] = count;
        counts[key] = {{"total", table.total}, {"next", std::move(next)}};
    }
    json j{{"schema_version", 1},
           {"stage", "train-lm"},
           {"fingerprint", model.fingerprint},
           {"order", model.order},
           {"min_count", model.min_count},
           {"backoff_alpha", model.backoff_alpha},
           {"vocab", model.id_to_token},
           {"counts", std::move(counts)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump() << "\n";
}

NGramModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    NGramModel model;
    model.order = j.at("order").get<int>();
    model.min_count = j.at("min_count").get<long>();
    model.backoff_alpha = j.at("backoff_alpha").get<double>();
    model.fingerprint = j.value("fingerprint", "");
    model.id_to_token = j.at("vocab").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < model.id_to_token.size(); ++i)
        model.token_ids.emplace(model.id_to_token[i], static_cast<int>(i));
    for (const auto& [key, table] : j.at("counts").items()) {
        NGramModel::CountTable t;
        t.total = table.at("total").get<long>();
        for (const auto& [id, count] : table.at("next").items())
            t.next.emplace(std::stoi(id), count.get<long>());
        model.counts.emplace(key, std::move(t));
    }
    return model;
}

}  // namespace vcf::lm
