#include "stratum/spec_lang.hpp"

#include <cctype>
#include <limits>
#include <set>
#include <sstream>

namespace stratum {

std::string_view to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::ingestion: return "ingestion";
        case ComponentKind::stream: return "stream";
        case ComponentKind::batch: return "batch";
        case ComponentKind::inference: return "inference";
        case ComponentKind::visualization: return "visualization";
    }
    return "?";
}

std::string_view to_string(GpuNeed gpu) {
    return gpu == GpuNeed::required ? "required" : "none";
}

std::string_view to_string(TierHint tier) {
    switch (tier) {
        case TierHint::edge: return "edge";
        case TierHint::fog: return "fog";
        case TierHint::cloud: return "cloud";
        case TierHint::any: return "any";
    }
    return "?";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
    for (auto kind : {ComponentKind::ingestion, ComponentKind::stream, ComponentKind::batch,
                      ComponentKind::inference, ComponentKind::visualization}) {
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

std::optional<TierHint> parse_tier_hint(std::string_view text) {
    for (auto tier : {TierHint::edge, TierHint::fog, TierHint::cloud, TierHint::any}) {
        if (to_string(tier) == text) return tier;
    }
    return std::nullopt;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool version_char(char c) { return ident_char(c) || c == '.'; }

}  // namespace

bool is_identifier(std::string_view text) {
    if (text.empty() || !ident_start(text.front())) return false;
    for (char c : text) {
        if (!ident_char(c)) return false;
    }
    return true;
}

bool is_version(std::string_view text) {
    if (text.empty() || !ident_char(text.front())) return false;
    for (char c : text) {
        if (!version_char(c)) return false;
    }
    return true;
}

const Component* PipelineSpec::find(std::string_view component) const {
    for (const auto& c : components) {
        if (c.name == component) return &c;
    }
    return nullptr;
}

std::optional<std::size_t> PipelineSpec::index_of(std::string_view component) const {
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].name == component) return i;
    }
    return std::nullopt;
}

ParseError::ParseError(int line, int column, std::string message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace {

enum class TokenKind { ident, number, lbrace, rbrace, colon, arrow, at, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

std::string describe(const Token& tok) {
    switch (tok.kind) {
        case TokenKind::end: return "end of input";
        case TokenKind::ident: return "identifier '" + tok.text + "'";
        case TokenKind::number: return "number '" + tok.text + "'";
        default: return "'" + tok.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) {}

    Token next() {
        skip_trivia();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= src_.size()) return tok;

        const char c = src_[pos_];
        if (ident_start(c)) {
            tok.kind = TokenKind::ident;
            while (pos_ < src_.size() && ident_char(src_[pos_])) tok.text += advance();
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '.'))) {
            tok.kind = TokenKind::number;
            tok.text += advance();
            while (pos_ < src_.size()) {
                const char d = src_[pos_];
                const bool exp_sign = (d == '-' || d == '+') && !tok.text.empty() &&
                                      (tok.text.back() == 'e' || tok.text.back() == 'E');
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '.' || exp_sign) {
                    tok.text += advance();
                } else {
                    break;
                }
            }
            if (!parse_decimal(tok.text)) {
                throw ParseError(tok.line, tok.column, "malformed number '" + tok.text + "'");
            }
            return tok;
        }
        switch (c) {
            case '{': tok.kind = TokenKind::lbrace; break;
            case '}': tok.kind = TokenKind::rbrace; break;
            case ':': tok.kind = TokenKind::colon; break;
            case '@': tok.kind = TokenKind::at; break;
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    tok.kind = TokenKind::arrow;
                    tok.text = "->";
                    advance();
                    advance();
                    return tok;
                }
                [[fallthrough]];
            default:
                throw ParseError(tok.line, tok.column,
                                 std::string("unexpected character '") + c + "'");
        }
        tok.text = std::string(1, advance());
        return tok;
    }

    /// Versions may start with a digit and contain dots, so they get their own rule.
    Token next_version() {
        skip_trivia();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        while (pos_ < src_.size() && version_char(src_[pos_])) tok.text += advance();
        if (tok.text.empty()) {
            if (pos_ >= src_.size()) {
                throw ParseError(tok.line, tok.column, "expected model version, found end of input");
            }
            throw ParseError(tok.line, tok.column, "expected model version");
        }
        tok.kind = TokenKind::ident;
        return tok;
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view source) : lexer_(source) { bump(); }

    PipelineSpec parse() {
        PipelineSpec spec;
        expect_keyword("pipeline");
        spec.name = expect(TokenKind::ident, "pipeline name").text;
        expect(TokenKind::lbrace, "'{'");
        while (current_.kind != TokenKind::rbrace) {
            if (current_.kind == TokenKind::ident && current_.text == "component") {
                spec.components.push_back(parse_component());
            } else if (current_.kind == TokenKind::ident && current_.text == "flow") {
                spec.flows.push_back(parse_flow());
            } else if (current_.kind == TokenKind::ident) {
                fail(current_, "unknown keyword '" + current_.text + "'");
            } else {
                fail(current_, "expected 'component', 'flow' or '}', found " + describe(current_));
            }
        }
        bump();
        if (current_.kind != TokenKind::end) {
            fail(current_, "unexpected " + describe(current_) + " after pipeline body");
        }
        return spec;
    }

private:
    [[noreturn]] static void fail(const Token& at, const std::string& message) {
        throw ParseError(at.line, at.column, message);
    }

    void bump() { current_ = lexer_.next(); }

    Token expect(TokenKind kind, const std::string& what) {
        if (current_.kind != kind) fail(current_, "expected " + what + ", found " + describe(current_));
        Token tok = current_;
        bump();
        return tok;
    }

    void expect_keyword(std::string_view keyword) {
        if (current_.kind != TokenKind::ident || current_.text != keyword) {
            fail(current_, "expected '" + std::string(keyword) + "', found " + describe(current_));
        }
        bump();
    }

    Quantity number_value(const Token& tok) {
        if (tok.kind != TokenKind::number) fail(tok, "expected a number, found " + describe(tok));
        return *parse_decimal(tok.text);
    }

    Component parse_component() {
        const Token keyword = current_;
        bump();
        Component c;
        c.name = expect(TokenKind::ident, "component name").text;
        expect(TokenKind::lbrace, "'{'");

        std::set<std::string> seen;
        std::optional<Token> model_key;
        while (current_.kind != TokenKind::rbrace) {
            const Token key = expect(TokenKind::ident, "property name or '}'");
            if (!seen.insert(key.text).second) fail(key, "duplicate property '" + key.text + "'");
            expect(TokenKind::colon, "':'");

            if (key.text == "model") {
                model_key = key;
                ModelRef ref;
                ref.name = expect(TokenKind::ident, "model name").text;
                if (current_.kind != TokenKind::at) {
                    fail(current_, "expected '@' after model name, found " + describe(current_));
                }
                ref.version = lexer_.next_version().text;
                bump();
                c.model = std::move(ref);
                continue;
            }

            const Token value = current_;
            bump();
            if (key.text == "kind") {
                auto kind = value.kind == TokenKind::ident ? parse_component_kind(value.text) : std::nullopt;
                if (!kind) fail(value, "invalid component kind " + describe(value));
                c.kind = *kind;
            } else if (key.text == "cpu") {
                c.cpu = number_value(value);
                if (c.cpu <= 0) fail(value, "cpu must be > 0");
            } else if (key.text == "mem") {
                const Quantity mem = number_value(value);
                if (!is_integer(mem) || mem <= 0) fail(value, "mem must be an integer > 0");
                if (mem > Quantity(std::numeric_limits<std::int64_t>::max())) fail(value, "mem out of range");
                c.mem_mb = static_cast<std::int64_t>(boost::multiprecision::numerator(mem));
            } else if (key.text == "gpu") {
                if (value.kind != TokenKind::ident || (value.text != "required" && value.text != "none")) {
                    fail(value, "gpu must be 'required' or 'none'");
                }
                c.gpu = value.text == "required" ? GpuNeed::required : GpuNeed::none;
            } else if (key.text == "tier_hint") {
                auto tier = value.kind == TokenKind::ident ? parse_tier_hint(value.text) : std::nullopt;
                if (!tier) fail(value, "tier_hint must be edge, fog, cloud or any");
                c.tier_hint = *tier;
            } else if (key.text == "replicas") {
                const Quantity replicas = number_value(value);
                if (!is_integer(replicas) || replicas < 1 || replicas > 1'000'000) {
                    fail(value, "replicas must be an integer >= 1");
                }
                c.replicas = static_cast<int>(boost::multiprecision::numerator(replicas));
            } else if (key.text == "rate") {
                c.rate = number_value(value);
                if (c.rate < 0) fail(value, "rate must be >= 0");
            } else if (key.text == "service_rate") {
                c.service_rate = number_value(value);
                if (c.service_rate <= 0) fail(value, "service_rate must be > 0");
            } else {
                fail(key, "unknown keyword '" + key.text + "'");
            }
        }
        bump();

        for (const char* required : {"kind", "cpu", "mem"}) {
            if (!seen.count(required)) {
                fail(keyword, "component '" + c.name + "' is missing required property '" + required + "'");
            }
        }
        if (c.kind == ComponentKind::inference && !c.model) {
            fail(keyword, "inference component '" + c.name + "' is missing required property 'model'");
        }
        if (c.kind != ComponentKind::inference && c.model) {
            fail(*model_key, "model is only allowed on inference components");
        }
        return c;
    }

    Flow parse_flow() {
        bump();
        Flow f;
        f.src = expect(TokenKind::ident, "flow source").text;
        expect(TokenKind::arrow, "'->'");
        f.dst = expect(TokenKind::ident, "flow destination").text;
        if (current_.kind != TokenKind::lbrace) return f;
        bump();
        std::set<std::string> seen;
        while (current_.kind != TokenKind::rbrace) {
            const Token key = expect(TokenKind::ident, "property name or '}'");
            if (!seen.insert(key.text).second) fail(key, "duplicate property '" + key.text + "'");
            expect(TokenKind::colon, "':'");
            const Token value = current_;
            bump();
            if (key.text == "max_latency_ms") {
                f.max_latency_ms = number_value(value);
                if (*f.max_latency_ms <= 0) fail(value, "max_latency_ms must be > 0");
            } else {
                fail(key, "unknown keyword '" + key.text + "'");
            }
        }
        bump();
        return f;
    }

    Lexer lexer_;
    Token current_;
};

}  // namespace

PipelineSpec parse_spec(std::string_view source) {
    return Parser(source).parse();
}

std::string pretty_print(const PipelineSpec& spec) {
    const Component defaults;
    std::ostringstream out;
    out << "pipeline " << spec.name << " {\n";
    for (const auto& c : spec.components) {
        out << "  component " << c.name << " {\n";
        out << "    kind: " << to_string(c.kind) << "\n";
        out << "    cpu: " << format_decimal(c.cpu) << "\n";
        out << "    mem: " << c.mem_mb << "\n";
        if (c.gpu != defaults.gpu) out << "    gpu: " << to_string(c.gpu) << "\n";
        if (c.tier_hint != defaults.tier_hint) out << "    tier_hint: " << to_string(c.tier_hint) << "\n";
        if (c.replicas != defaults.replicas) out << "    replicas: " << c.replicas << "\n";
        if (c.rate != defaults.rate) out << "    rate: " << format_decimal(c.rate) << "\n";
        if (c.service_rate != defaults.service_rate) {
            out << "    service_rate: " << format_decimal(c.service_rate) << "\n";
        }
        if (c.model) out << "    model: " << c.model->str() << "\n";
        out << "  }\n";
    }
    for (const auto& f : spec.flows) {
        out << "  flow " << f.src << " -> " << f.dst;
        if (f.max_latency_ms) {
            out << " {\n    max_latency_ms: " << format_decimal(*f.max_latency_ms) << "\n  }";
        }
        out << "\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace stratum
