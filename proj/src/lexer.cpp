#include "vcf/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace vcf::lexer {
namespace {

const std::unordered_set<std::string_view>& keyword_table() {
    // IEEE 1364-2005 keywords plus the SystemVerilog additions that show up
    // in open-source RTL and verification code.
    static const std::unordered_set<std::string_view> kw = {
        // Verilog-2005
        "always", "and", "assign", "automatic", "begin", "buf", "bufif0",
        "bufif1", "case", "casex", "casez", "cell", "cmos", "config",
        "deassign", "default", "defparam", "design", "disable", "edge",
        "else", "end", "endcase", "endconfig", "endfunction", "endgenerate",
        "endmodule", "endprimitive", "endspecify", "endtable", "endtask",
        "event", "for", "force", "forever", "fork", "function", "generate",
        "genvar", "highz0", "highz1", "if", "ifnone", "incdir", "include",
        "initial", "inout", "input", "instance", "integer", "join", "large",
        "liblist", "library", "localparam", "macromodule", "medium", "module",
        "nand", "negedge", "nmos", "nor", "noshowcancelled", "not", "notif0",
        "notif1", "or", "output", "parameter", "pmos", "posedge", "primitive",
        "pull0", "pull1", "pulldown", "pullup", "pulsestyle_ondetect",
        "pulsestyle_onevent", "rcmos", "real", "realtime", "reg", "release",
        "repeat", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1",
        "scalared", "showcancelled", "signed", "small", "specify",
        "specparam", "strong0", "strong1", "supply0", "supply1", "table",
        "task", "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1",
        "triand", "trior", "trireg", "unsigned", "use", "uwire", "vectored",
        "wait", "wand", "weak0", "weak1", "while", "wire", "wor", "xnor",
        "xor",
        // common SystemVerilog
        "alias", "always_comb", "always_ff", "always_latch", "assert",
        "assume", "before", "bind", "bins", "binsof", "bit", "break", "byte",
        "chandle", "class", "clocking", "const", "constraint", "context",
        "continue", "cover", "covergroup", "coverpoint", "cross", "dist",
        "do", "endclass", "endclocking", "endgroup", "endinterface",
        "endpackage", "endprogram", "endproperty", "endsequence", "enum",
        "expect", "export", "extends", "extern", "final", "first_match",
        "foreach", "forkjoin", "iff", "ignore_bins", "illegal_bins",
        "import", "inside", "int", "interface", "intersect", "join_any",
        "join_none", "local", "logic", "longint", "matches", "modport",
        "new", "null", "package", "packed", "priority", "program",
        "property", "protected", "pure", "rand", "randc", "randcase",
        "randsequence", "ref", "return", "sequence", "shortint", "shortreal",
        "solve", "static", "string", "struct", "super", "tagged", "this",
        "throughout", "timeprecision", "timeunit", "type", "typedef",
        "union", "unique", "var", "virtual", "void", "wait_order",
        "wildcard", "with", "within",
    };
    return kw;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
}

// Multi-character operators, longest first per leading character.
const std::array<std::string_view, 38> kOperators = {
    "<<<=", ">>>=", "===", "!==", "<<<", ">>>", "<->", "<<=", ">>=",
    "**",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "<<",  ">>",
    "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",  "++",  "--",
    "->",  "::",  "+:",  "-:",  "~&",  "~|",  "~^",  "^~",  "##",  "@@",
};

bool is_punct_char(char c) {
    switch (c) {
        case '(': case ')': case '[': case ']': case '{': case '}':
        case ';': case ',': case '.': case ':': case '#': case '@':
        case '?':
            return true;
        default:
            return false;
    }
}

bool is_op_char(char c) {
    switch (c) {
        case '+': case '-': case '*': case '/': case '%': case '=':
        case '<': case '>': case '&': case '|': case '^': case '~':
        case '!':
            return true;
        default:
            return false;
    }
}

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    LexOutput run() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (is_space(c)) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() &&
                       (text_[pos_ + 1] == '/' || text_[pos_ + 1] == '*')) {
                scan_comment();
            } else if (c == '"') {
                scan_string();
            } else if (c == '\\') {
                scan_escaped_identifier();
            } else if (is_ident_start(c)) {
                scan_word();
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '\'' && based_digit_follows())) {
                scan_number();
            } else if (c == '`') {
                scan_directive();
            } else if (is_op_char(c)) {
                scan_operator();
            } else if (is_punct_char(c)) {
                emit(TokenKind::Punctuation, pos_, pos_ + 1);
            } else {
                // Unknown byte (e.g. replacement-character bytes). Treated
                // as a one-byte operator token so totality holds.
                emit(TokenKind::Operator, pos_, pos_ + 1);
            }
        }
        return std::move(out_);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_n(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) advance();
    }

    void emit(TokenKind kind, std::size_t begin, std::size_t end) {
        Token tok;
        tok.kind = kind;
        tok.text = std::string(text_.substr(begin, end - begin));
        tok.line = line_;
        tok.column = col_;
        tok.begin = begin;
        tok.end = end;
        out_.tokens.push_back(std::move(tok));
        for (std::size_t i = begin; i < end; ++i)
            if (!is_space(text_[i])) ++out_.code_char_count;
        advance_n(end - begin);
    }

    void scan_comment() {
        std::size_t begin = pos_;
        if (text_[pos_ + 1] == '/') {
            std::size_t end = pos_;
            while (end < text_.size() && text_[end] != '\n') ++end;
            out_.comments.push_back({CommentKind::Line,
                                     std::string(text_.substr(begin, end - begin)),
                                     begin, end});
            advance_n(end - begin);
        } else {
            std::size_t end = text_.find("*/", pos_ + 2);
            if (end == std::string_view::npos) {
                end = text_.size();
                out_.unterminated_block_comment = true;
            } else {
                end += 2;
            }
            out_.comments.push_back({CommentKind::Block,
                                     std::string(text_.substr(begin, end - begin)),
                                     begin, end});
            advance_n(end - begin);
        }
    }

    void scan_string() {
        std::size_t end = pos_ + 1;
        while (end < text_.size()) {
            if (text_[end] == '\\' && end + 1 < text_.size()) {
                end += 2;
                continue;
            }
            if (text_[end] == '"' || text_[end] == '\n') {
                ++end;
                break;
            }
            ++end;
        }
        emit(TokenKind::StringLiteral, pos_, std::min(end, text_.size()));
    }

    void scan_escaped_identifier() {
        // "\" up to the next whitespace is one identifier.
        std::size_t end = pos_ + 1;
        while (end < text_.size() && !is_space(text_[end])) ++end;
        if (end == pos_ + 1) {
            emit(TokenKind::Operator, pos_, end);
        } else {
            emit(TokenKind::Identifier, pos_, end);
        }
    }

    void scan_word() {
        std::size_t end = pos_;
        while (end < text_.size() && is_ident_char(text_[end])) ++end;
        std::string_view word = text_.substr(pos_, end - pos_);
        emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier,
             pos_, end);
    }

    bool based_digit_follows() const {
        // '<base><digits> form with no size prefix, e.g. 'b0101.
        if (pos_ + 1 >= text_.size()) return false;
        char b = static_cast<char>(
            std::tolower(static_cast<unsigned char>(text_[pos_ + 1])));
        return b == 'b' || b == 'o' || b == 'd' || b == 'h' || b == 's';
    }

    static bool is_based_digit(char c) {
        return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' ||
               c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?';
    }

    void scan_number() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[end])) ||
                text_[end] == '_'))
            ++end;
        if (end < text_.size() && text_[end] == '\'') {
            // sized or unsized based literal: [size]'[s]base digits
            std::size_t p = end + 1;
            if (p < text_.size() &&
                (text_[p] == 's' || text_[p] == 'S'))
                ++p;
            if (p < text_.size()) {
                char b = static_cast<char>(
                    std::tolower(static_cast<unsigned char>(text_[p])));
                if (b == 'b' || b == 'o' || b == 'd' || b == 'h') {
                    ++p;
                    while (p < text_.size() && is_based_digit(text_[p])) ++p;
                    emit(TokenKind::Number, pos_, p);
                    return;
                }
            }
        }
        // decimal / real
        if (end < text_.size() && text_[end] == '.' && end + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[end + 1]))) {
            ++end;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) ||
                    text_[end] == '_'))
                ++end;
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t p = end + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[p]))) {
                ++p;
                while (p < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[p])))
                    ++p;
                end = p;
            }
        }
        emit(TokenKind::Number, pos_, end);
    }

    void scan_directive() {
        // `define, `include, `WIDTH ... lexed as a single identifier token.
        std::size_t end = pos_ + 1;
        while (end < text_.size() && is_ident_char(text_[end])) ++end;
        emit(TokenKind::Identifier, pos_, end);
    }

    void scan_operator() {
        std::string_view rest = text_.substr(pos_);
        for (std::string_view op : kOperators) {
            if (rest.starts_with(op)) {
                emit(TokenKind::Operator, pos_, pos_ + op.size());
                return;
            }
        }
        emit(TokenKind::Operator, pos_, pos_ + 1);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    LexOutput out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return keyword_table().contains(word);
}

std::string sanitize_utf8(std::string_view bytes) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        else {
            out += kReplacement;
            ++i;
            continue;
        }
        bool ok = i + len <= bytes.size();
        for (std::size_t k = 1; ok && k < len; ++k)
            ok = (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
        if (ok) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out += kReplacement;
            ++i;
        }
    }
    return out;
}

LexOutput lex(std::string_view text) {
    return Scanner(text).run();
}

std::string strip_comments(std::string_view text) {
    LexOutput out = lex(text);
    std::string result;
    result.reserve(text.size());
    std::size_t pos = 0;
    for (const CommentSpan& span : out.comments) {
        result.append(text.substr(pos, span.begin - pos));
        result.push_back(' ');
        pos = span.end;
    }
    result.append(text.substr(pos));
    return result;
}

std::unordered_set<std::string> token_set(const LexOutput& lex) {
    std::unordered_set<std::string> set;
    set.reserve(lex.tokens.size());
    for (const Token& tok : lex.tokens) set.insert(tok.text);
    return set;
}

}  // namespace vcf::lexer
