#include "tsm/frontend.hpp"

#include "check.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace tsm {

namespace {

constexpr std::array<std::string_view, 22> kHardKeywords = {
    "model", "enum", "record", "var",  "init", "action", "rule", "on",    "when", "observe", "invariant",
    "true",  "false", "none",  "and",  "or",   "not",    "in",   "where", "set",  "it",      "meta"};
// Type names are reserved everywhere except as record field names.
constexpr std::array<std::string_view, 4> kTypeKeywords = {"bool", "int", "id", "list"};
constexpr std::array<std::string_view, 9> kDeclKeywords = {"enum",    "record",    "var",  "init", "action",
                                                           "rule",    "observe",   "invariant", "meta"};

bool contains(auto const& words, std::string_view w) { return std::find(words.begin(), words.end(), w) != words.end(); }

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind { Name, Int, String, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::int64_t number = 0;
    int line = 1, col = 1, endLine = 1, endCol = 1;

    [[nodiscard]] bool is(std::string_view punctOrWord) const {
        return (kind == Kind::Punct || kind == Kind::Name) && text == punctOrWord;
    }
};

class Lexer {
public:
    Lexer(std::string_view src, std::string file, std::vector<Diagnostic>& diags)
        : src_(src), file_(std::move(file)), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipSpaceAndComments();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Token::Kind::End;
                t.endLine = line_;
                t.endCol = col_;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (isAlpha(c)) {
                const std::size_t start = pos_;
                while (pos_ < src_.size() && (isAlpha(src_[pos_]) || isDigit(src_[pos_]) || src_[pos_] == '_')) advance();
                t.kind = Token::Kind::Name;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (isDigit(c)) {
                const std::size_t start = pos_;
                while (pos_ < src_.size() && isDigit(src_[pos_])) advance();
                t.kind = Token::Kind::Int;
                t.text = std::string(src_.substr(start, pos_ - start));
                t.number = 0;
                for (char d : t.text) {
                    if (t.number > (std::numeric_limits<std::int64_t>::max() - (d - '0')) / 10) {
                        error(t, "integer literal out of range");
                        t.number = 0;
                        break;
                    }
                    t.number = t.number * 10 + (d - '0');
                }
            } else if (c == '"') {
                advance();
                t.kind = Token::Kind::String;
                bool closed = false;
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    char ch = src_[pos_];
                    advance();
                    if (ch == '"') {
                        closed = true;
                        break;
                    }
                    if (ch == '\\' && pos_ < src_.size() && src_[pos_] != '\n') {
                        ch = src_[pos_];
                        advance();
                        if (ch == 'n') ch = '\n';
                    }
                    t.text += ch;
                }
                if (!closed) error(t, "unterminated string");
            } else {
                static constexpr std::array<std::string_view, 6> kTwo = {":=", "=>", "==", "!=", "<=", ">="};
                const std::string_view rest = src_.substr(pos_);
                t.kind = Token::Kind::Punct;
                bool matched = false;
                for (auto op : kTwo) {
                    if (rest.substr(0, 2) == op) {
                        t.text = std::string(op);
                        advance();
                        advance();
                        matched = true;
                        break;
                    }
                }
                if (!matched) {
                    if (std::string_view("{}()[],:.<>+-@").find(c) == std::string_view::npos) {
                        const std::size_t start = pos_;
                        advance();
                        // Swallow the rest of a multi-byte sequence.
                        while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
                        t.endLine = line_;
                        t.endCol = col_;
                        error(t, "unexpected character '" + std::string(src_.substr(start, pos_ - start)) + "'");
                        continue;
                    }
                    t.text = std::string(1, c);
                    advance();
                }
            }
            t.endLine = line_;
            t.endCol = col_;
            out.push_back(std::move(t));
        }
    }

private:
    static bool isAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
    static bool isDigit(char c) { return c >= '0' && c <= '9'; }

    void advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++col_;
        }
    }

    void skipSpaceAndComments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    void error(const Token& t, std::string message) {
        SourceSpan span{file_, t.line, t.col, line_, std::max(col_, t.col + 1)};
        diags_.push_back({Severity::Error, codes::kLex, span, std::move(message), std::nullopt});
    }

    std::string_view src_;
    std::string file_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct SyntaxError {
    Diagnostic diagnostic;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

    Model parseModel(std::vector<Diagnostic>& diags);
    ExprPtr parseStandaloneExpr(std::vector<Diagnostic>& diags);

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool atEnd() const { return peek().kind == Token::Kind::End; }
    bool accept(std::string_view text) {
        if (peek().is(text)) {
            next();
            return true;
        }
        return false;
    }

    SourceSpan spanOf(const Token& t) const { return {file_, t.line, t.col, t.endLine, t.endCol}; }
    SourceSpan spanFrom(const Token& first) const {
        const Token& last = toks_[pos_ > 0 ? pos_ - 1 : 0];
        return {file_, first.line, first.col, last.endLine, last.endCol};
    }
    static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
        return {a.file, a.startLine, a.startCol, b.endLine, b.endCol};
    }

    [[noreturn]] void fail(const Token& at, std::string message, const char* code = codes::kSyntax) const {
        throw SyntaxError{{Severity::Error, code, spanOf(at), std::move(message), std::nullopt}};
    }
    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Token::Kind::End: return "end of input";
            case Token::Kind::String: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }
    void expect(std::string_view text) {
        if (!accept(text)) fail(peek(), "expected '" + std::string(text) + "', found " + describe(peek()));
    }

    /// A user identifier; `allowTypeWords` admits bool/int/id/list (field names).
    const Token& name(const char* what, bool allowTypeWords = false) {
        const Token& t = peek();
        if (t.kind != Token::Kind::Name) fail(t, std::string("expected ") + what + ", found " + describe(t));
        if (contains(kHardKeywords, t.text) || (!allowTypeWords && contains(kTypeKeywords, t.text)))
            fail(t, std::string("keyword '") + t.text + "' cannot be used as " + what);
        return next();
    }

    TypeExpr parseType();
    FieldDecl parseField(bool allowTypeWords);
    void parseDecl(Model& m);
    void recover();

    ExprPtr parseExpr() { return parseOr(); }
    ExprPtr parseOr();
    ExprPtr parseAnd();
    ExprPtr parseNot();
    ExprPtr parseCompare();
    ExprPtr parseAdd();
    ExprPtr parsePostfix();
    ExprPtr parsePrimary();
    ExprPtr parseCall(const Token& fn);
    ExprPtr parseBraced(const Token& open);

    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
};

std::shared_ptr<Expr> node(Expr::Kind kind, SourceSpan span) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->span = std::move(span);
    return e;
}

Model Parser::parseModel(std::vector<Diagnostic>& diags) {
    Model m;
    try {
        if (!peek().is("model")) fail(peek(), "a model file starts with 'model <Name>'", codes::kModelHeader);
        next();
        const Token& n = name("model name");
        m.name = n.text;
        m.nameSpan = spanOf(n);
    } catch (const SyntaxError& e) {
        diags.push_back(e.diagnostic);
        recover();
    }
    while (!atEnd()) {
        const std::size_t before = pos_;
        try {
            parseDecl(m);
        } catch (const SyntaxError& e) {
            diags.push_back(e.diagnostic);
            if (pos_ == before) next();
            recover();
        }
    }
    return m;
}

void Parser::recover() {
    while (!atEnd()) {
        const Token& t = peek();
        if (t.kind == Token::Kind::Name && contains(kDeclKeywords, t.text)) return;
        next();
    }
}

TypeExpr Parser::parseType() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Name) fail(t, "expected a type, found " + describe(t));
    if (accept("bool")) return TypeExpr::boolean();
    if (accept("int")) return TypeExpr::integer();
    if (accept("id")) return TypeExpr::id();
    if (accept("list")) {
        expect("<");
        TypeExpr elem = parseType();
        expect(">");
        return TypeExpr::list(std::move(elem));
    }
    return TypeExpr::named(name("a type name").text);
}

FieldDecl Parser::parseField(bool allowTypeWords) {
    const Token& start = peek();
    FieldDecl f;
    f.name = name("a field name", allowTypeWords).text;
    expect(":");
    f.type = parseType();
    f.span = spanFrom(start);
    return f;
}

void Parser::parseDecl(Model& m) {
    const Token& kw = peek();
    if (kw.kind != Token::Kind::Name || !contains(kDeclKeywords, kw.text))
        fail(kw, "expected a declaration (enum, record, var, init, action, rule, observe, invariant), found " +
                     describe(kw));
    next();
    if (kw.text == "enum") {
        EnumDecl e;
        e.name = name("an enum name").text;
        expect("{");
        do {
            e.members.push_back(name("an enum member").text);
        } while (accept(","));
        expect("}");
        e.span = spanFrom(kw);
        m.types.enums.push_back(std::move(e));
    } else if (kw.text == "record") {
        RecordDecl r;
        r.name = name("a record name").text;
        expect("{");
        do {
            r.fields.push_back(parseField(true));
        } while (accept(","));
        expect("}");
        r.span = spanFrom(kw);
        m.types.records.push_back(std::move(r));
    } else if (kw.text == "var") {
        VarDecl v;
        v.name = name("a variable name").text;
        expect(":");
        v.type = parseType();
        v.span = spanFrom(kw);
        m.stateVars.push_back(std::move(v));
    } else if (kw.text == "init") {
        InitAssign i;
        i.var = name("a variable name").text;
        expect(":=");
        i.value = parseExpr();
        i.span = spanFrom(kw);
        m.init.push_back(std::move(i));
    } else if (kw.text == "action") {
        ActionSig a;
        a.name = name("an action name").text;
        if (accept("(")) {
            do {
                a.params.push_back(parseField(false));
            } while (accept(","));
            expect(")");
        }
        a.span = spanFrom(kw);
        m.actions.push_back(std::move(a));
    } else if (kw.text == "rule") {
        Rule r;
        r.label = name("a rule label").text;
        expect(":");
        expect("on");
        const Token& action = name("an action name");
        r.action = action.text;
        r.actionSpan = spanOf(action);
        if (accept("when")) r.guard = parseExpr();
        expect("=>");
        do {
            const Token& target = peek();
            Update u;
            u.var = name("a variable name").text;
            expect(":=");
            u.value = parseExpr();
            u.span = spanFrom(target);
            r.updates.push_back(std::move(u));
        } while (accept(","));
        while (peek().is("@")) {
            const Token& at = next();
            if (!peek().is("impl")) fail(peek(), "unknown annotation; only @impl is supported");
            next();
            expect("(");
            if (peek().kind != Token::Kind::String) fail(peek(), "@impl expects a string");
            if (r.implLink) fail(at, "rule has more than one @impl annotation");
            r.implLink = next().text;
            expect(")");
        }
        r.span = spanFrom(kw);
        m.rules.push_back(std::move(r));
    } else if (kw.text == "observe") {
        expect("(");
        do {
            const Token& start = peek();
            ObserveOutput o;
            o.name = name("an output name").text;
            expect(":");
            o.value = parseExpr();
            o.span = spanFrom(start);
            m.observe.push_back(std::move(o));
        } while (accept(","));
        expect(")");
    } else if (kw.text == "invariant") {
        Invariant inv;
        inv.name = name("an invariant name").text;
        expect(":");
        inv.condition = parseExpr();
        inv.span = spanFrom(kw);
        m.invariants.push_back(std::move(inv));
    } else {  // meta
        const std::string key = name("a metadata key").text;
        expect(":=");
        if (peek().kind != Token::Kind::String) fail(peek(), "meta values are strings");
        if (m.meta.count(key)) fail(kw, "meta " + key + " declared twice", codes::kDuplicate);
        m.meta[key] = next().text;
    }
}

ExprPtr Parser::parseStandaloneExpr(std::vector<Diagnostic>& diags) {
    try {
        ExprPtr e = parseExpr();
        if (!atEnd()) fail(peek(), "unexpected " + describe(peek()) + " after expression");
        return e;
    } catch (const SyntaxError& e) {
        diags.push_back(e.diagnostic);
        return nullptr;
    }
}

ExprPtr Parser::parseOr() {
    ExprPtr lhs = parseAnd();
    while (peek().is("or")) {
        next();
        ExprPtr rhs = parseAnd();
        auto e = node(Expr::Kind::Or, join(lhs->span, rhs->span));
        e->operands = {lhs, rhs};
        lhs = e;
    }
    return lhs;
}

ExprPtr Parser::parseAnd() {
    ExprPtr lhs = parseNot();
    while (peek().is("and")) {
        next();
        ExprPtr rhs = parseNot();
        auto e = node(Expr::Kind::And, join(lhs->span, rhs->span));
        e->operands = {lhs, rhs};
        lhs = e;
    }
    return lhs;
}

ExprPtr Parser::parseNot() {
    if (peek().is("not")) {
        const Token& kw = next();
        ExprPtr operand = parseNot();
        auto e = node(Expr::Kind::Not, join(spanOf(kw), operand->span));
        e->operands = {operand};
        return e;
    }
    return parseCompare();
}

ExprPtr Parser::parseCompare() {
    ExprPtr lhs = parseAdd();
    static constexpr std::array<std::pair<std::string_view, CompareOp>, 6> kOps = {{{"==", CompareOp::Eq},
                                                                                   {"!=", CompareOp::Ne},
                                                                                   {"<=", CompareOp::Le},
                                                                                   {">=", CompareOp::Ge},
                                                                                   {"<", CompareOp::Lt},
                                                                                   {">", CompareOp::Gt}}};
    const Token& t = peek();
    if (t.kind == Token::Kind::Punct) {
        for (const auto& [text, op] : kOps) {
            if (t.text != text) continue;
            next();
            ExprPtr rhs = parseAdd();
            auto e = node(Expr::Kind::Compare, join(lhs->span, rhs->span));
            e->cmp = op;
            e->operands = {lhs, rhs};
            return e;
        }
    }
    const bool negated = t.is("not") && peek(1).is("in");
    if (t.is("in") || negated) {
        if (negated) next();
        next();
        const Token& open = peek();
        expect("{");
        auto e = node(Expr::Kind::InSet, {});
        e->negated = negated;
        e->operands.push_back(lhs);
        if (!peek().is("}")) {
            do {
                e->operands.push_back(parseAdd());
            } while (accept(","));
        }
        if (e->operands.size() < 2) fail(open, "set literal needs at least one member");
        expect("}");
        e->span = spanFrom(open);
        e->span.startLine = lhs->span.startLine;
        e->span.startCol = lhs->span.startCol;
        return e;
    }
    return lhs;
}

ExprPtr Parser::parseAdd() {
    ExprPtr lhs = parsePostfix();
    while (peek().is("+") || peek().is("-")) {
        const bool add = next().text == "+";
        ExprPtr rhs = parsePostfix();
        auto e = node(Expr::Kind::Arith, join(lhs->span, rhs->span));
        e->arith = add ? ArithOp::Add : ArithOp::Sub;
        e->operands = {lhs, rhs};
        lhs = e;
    }
    return lhs;
}

ExprPtr Parser::parsePostfix() {
    ExprPtr base = parsePrimary();
    while (peek().is(".")) {
        next();
        const Token& field = name("a field name", true);
        auto e = node(Expr::Kind::FieldAccess, join(base->span, spanOf(field)));
        e->name = field.text;
        e->operands = {base};
        base = e;
    }
    return base;
}

ExprPtr Parser::parsePrimary() {
    const Token& t = peek();
    switch (t.kind) {
        case Token::Kind::Int: next(); return Expr::literal(Value(t.number), spanOf(t));
        case Token::Kind::String: fail(t, "string values are not supported in expressions");
        case Token::Kind::End: fail(t, "expected an expression, found end of input");
        case Token::Kind::Punct: {
            if (t.is("-") && peek(1).kind == Token::Kind::Int) {
                next();
                const Token& n = next();
                return Expr::literal(Value(-n.number), join(spanOf(t), spanOf(n)));
            }
            if (t.is("(")) {
                next();
                ExprPtr inner = parseExpr();
                expect(")");
                return inner;
            }
            if (t.is(".")) {
                next();
                const Token& field = name("a field name", true);
                auto e = node(Expr::Kind::FieldAccess, join(spanOf(t), spanOf(field)));
                e->name = field.text;
                e->operands = {node(Expr::Kind::It, spanOf(t))};
                return e;
            }
            if (t.is("[")) {
                next();
                auto e = node(Expr::Kind::ListLit, {});
                if (!peek().is("]")) {
                    do {
                        e->operands.push_back(parseExpr());
                    } while (accept(","));
                }
                expect("]");
                e->span = spanFrom(t);
                return e;
            }
            if (t.is("{")) return parseBraced(next());
            fail(t, "expected an expression, found " + describe(t));
        }
        case Token::Kind::Name: break;
    }
    if (t.text == "true" || t.text == "false") {
        next();
        return Expr::literal(Value(t.text == "true"), spanOf(t));
    }
    if (t.text == "none") {
        next();
        return Expr::literal(Value::none(), spanOf(t));
    }
    if (t.text == "it") {
        next();
        return node(Expr::Kind::It, spanOf(t));
    }
    if (peek(1).is("(")) return parseCall(next());
    const Token& n = name("an expression");
    return Expr::var(n.text, spanOf(n));
}

ExprPtr Parser::parseCall(const Token& fn) {
    expect("(");
    auto e = node(Expr::Kind::Call, {});
    e->name = fn.text;
    if (!peek().is(")")) {
        do {
            e->operands.push_back(parseExpr());
        } while (accept(","));
    }
    if (accept("where")) e->where = parseExpr();
    if (accept("set")) {
        e->setField = name("a field name", true).text;
        expect(":=");
        e->setValue = parseExpr();
    }
    expect(")");
    e->span = spanFrom(fn);
    return e;
}

ExprPtr Parser::parseBraced(const Token& open) {
    // Record literal `{name: expr, ...}`; set literals only follow `in`.
    auto e = node(Expr::Kind::RecordLit, {});
    do {
        const Token& field = name("a field name", true);
        expect(":");
        e->fieldNames.push_back(field.text);
        e->operands.push_back(parseExpr());
    } while (accept(","));
    expect("}");
    e->span = spanFrom(open);
    return e;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

bool sameType(const TypeExpr& a, const TypeExpr& b) { return a == b; }

bool sameOpt(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return sameExpr(*a, *b);
}

} // namespace

bool isKeyword(std::string_view word) { return contains(kHardKeywords, word) || contains(kTypeKeywords, word); }

ParseResult parse(std::string_view source, std::string_view file) {
    ParseResult result;
    Lexer lexer(source, std::string(file), result.diagnostics);
    Parser parser(lexer.run(), std::string(file));
    Model raw = parser.parseModel(result.diagnostics);
    if (hasErrors(result.diagnostics)) return result;

    Model resolved;
    auto diags = detail::checkModel(raw, &resolved);
    for (auto& d : diags) result.diagnostics.push_back(std::move(d));
    if (!hasErrors(result.diagnostics)) result.model = std::move(resolved);
    return result;
}

ParseResult parseFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({Severity::Error, codes::kLex, SourceSpan{path, 1, 1, 1, 1}, "cannot read " + path, std::nullopt});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

std::string formatModel(const Model& m) {
    std::ostringstream out;
    out << "model " << m.name << "\n";
    auto section = [&](bool nonEmpty) {
        if (nonEmpty) out << "\n";
    };
    section(!m.meta.empty());
    for (const auto& [key, value] : m.meta) out << "meta " << key << " := " << quote(value) << "\n";
    section(!m.types.enums.empty());
    for (const auto& e : m.types.enums) {
        out << "enum " << e.name << " { ";
        for (std::size_t i = 0; i < e.members.size(); ++i) out << (i ? ", " : "") << e.members[i];
        out << " }\n";
    }
    section(!m.types.records.empty());
    for (const auto& r : m.types.records) {
        out << "record " << r.name << " { ";
        for (std::size_t i = 0; i < r.fields.size(); ++i)
            out << (i ? ", " : "") << r.fields[i].name << ": " << r.fields[i].type.str();
        out << " }\n";
    }
    section(!m.stateVars.empty());
    for (const auto& v : m.stateVars) out << "var " << v.name << ": " << v.type.str() << "\n";
    section(!m.init.empty());
    for (const auto& i : m.init) out << "init " << i.var << " := " << (i.value ? formatExpr(*i.value) : "?") << "\n";
    section(!m.actions.empty());
    for (const auto& a : m.actions) {
        out << "action " << a.name;
        if (!a.params.empty()) {
            out << "(";
            for (std::size_t i = 0; i < a.params.size(); ++i)
                out << (i ? ", " : "") << a.params[i].name << ": " << a.params[i].type.str();
            out << ")";
        }
        out << "\n";
    }
    section(!m.observe.empty());
    if (!m.observe.empty()) {
        out << "observe (";
        for (std::size_t i = 0; i < m.observe.size(); ++i)
            out << (i ? ", " : "") << m.observe[i].name << ": " << formatExpr(*m.observe[i].value);
        out << ")\n";
    }
    section(!m.invariants.empty());
    for (const auto& inv : m.invariants) out << "invariant " << inv.name << ": " << formatExpr(*inv.condition) << "\n";
    section(!m.rules.empty());
    for (const auto& r : m.rules) {
        out << "rule " << r.label << ": on " << r.action;
        if (r.guard) out << " when " << formatExpr(*r.guard);
        out << " =>";
        for (std::size_t i = 0; i < r.updates.size(); ++i)
            out << (i ? ", " : " ") << r.updates[i].var << " := " << formatExpr(*r.updates[i].value);
        if (r.implLink) out << " @impl(" << quote(*r.implLink) << ")";
        out << "\n";
    }
    return out.str();
}

bool sameModel(const Model& a, const Model& b) {
    if (a.name != b.name || a.meta != b.meta) return false;
    if (a.types.enums.size() != b.types.enums.size() || a.types.records.size() != b.types.records.size()) return false;
    for (std::size_t i = 0; i < a.types.enums.size(); ++i)
        if (a.types.enums[i].name != b.types.enums[i].name || a.types.enums[i].members != b.types.enums[i].members)
            return false;
    auto sameFields = [](const std::vector<FieldDecl>& x, const std::vector<FieldDecl>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].name != y[i].name || !sameType(x[i].type, y[i].type)) return false;
        return true;
    };
    for (std::size_t i = 0; i < a.types.records.size(); ++i)
        if (a.types.records[i].name != b.types.records[i].name ||
            !sameFields(a.types.records[i].fields, b.types.records[i].fields))
            return false;
    if (a.stateVars.size() != b.stateVars.size()) return false;
    for (std::size_t i = 0; i < a.stateVars.size(); ++i)
        if (a.stateVars[i].name != b.stateVars[i].name || !sameType(a.stateVars[i].type, b.stateVars[i].type))
            return false;
    if (a.init.size() != b.init.size()) return false;
    for (std::size_t i = 0; i < a.init.size(); ++i)
        if (a.init[i].var != b.init[i].var || !sameOpt(a.init[i].value, b.init[i].value)) return false;
    if (a.actions.size() != b.actions.size()) return false;
    for (std::size_t i = 0; i < a.actions.size(); ++i)
        if (a.actions[i].name != b.actions[i].name || !sameFields(a.actions[i].params, b.actions[i].params))
            return false;
    if (a.rules.size() != b.rules.size()) return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const Rule& x = a.rules[i];
        const Rule& y = b.rules[i];
        if (x.label != y.label || x.action != y.action || x.implLink != y.implLink || !sameOpt(x.guard, y.guard) ||
            x.updates.size() != y.updates.size())
            return false;
        for (std::size_t j = 0; j < x.updates.size(); ++j)
            if (x.updates[j].var != y.updates[j].var || !sameOpt(x.updates[j].value, y.updates[j].value)) return false;
    }
    if (a.observe.size() != b.observe.size()) return false;
    for (std::size_t i = 0; i < a.observe.size(); ++i)
        if (a.observe[i].name != b.observe[i].name || !sameOpt(a.observe[i].value, b.observe[i].value)) return false;
    if (a.invariants.size() != b.invariants.size()) return false;
    for (std::size_t i = 0; i < a.invariants.size(); ++i)
        if (a.invariants[i].name != b.invariants[i].name || !sameOpt(a.invariants[i].condition, b.invariants[i].condition))
            return false;
    return true;
}

std::optional<Value> parseValue(std::string_view text, const TypeExpr& type, const TypeTable& types,
                                std::string* error) {
    std::vector<Diagnostic> diags;
    Lexer lexer(text, "<value>", diags);
    Parser parser(lexer.run(), "<value>");
    ExprPtr expr = diags.empty() ? parser.parseStandaloneExpr(diags) : nullptr;
    auto failWith = [&](std::string message) -> std::optional<Value> {
        if (error) *error = std::move(message);
        return std::nullopt;
    };
    if (!expr) return failWith(diags.empty() ? "malformed value" : diags.front().message);

    TypeScope scope{&types, {}, true};
    auto typed = typecheck(*expr, scope, &type);
    if (!typed.ok()) return failWith(typed.diagnostics.front().message);
    if (!(typed.typed->type == type))
        return failWith("expected " + type.str() + ", found " + typed.typed->type.str());
    std::function<bool(const Expr&)> literalTree = [&](const Expr& e) {
        if (e.kind == Expr::Kind::Literal) return true;
        if (e.kind != Expr::Kind::RecordLit && e.kind != Expr::Kind::ListLit) return false;
        return std::all_of(e.operands.begin(), e.operands.end(), [&](const ExprPtr& o) { return literalTree(*o); });
    };
    if (!literalTree(*typed.typed->expr)) return failWith("'" + std::string(text) + "' is not a value");
    return eval(*typed.typed->expr, Bindings{});
}

} // namespace tsm
