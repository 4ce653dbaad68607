#include <cctype>
#include <functional>
#include <optional>
#include <set>

#include "sepkit/syntax.hpp"

namespace sepkit {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

const std::set<std::string> kKeywords{"null", "true",  "false", "skip",   "error",
                                      "alloc", "free", "emp",   "exists", "empX"};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    static const char* kMulti[] = {":=", "|->", "!->", "#->", "&&", "||", "!=", "<="};
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
                ++i;
            }
            while (i < s.size() && s[i] == '\'') {
                ++i;
            }
            std::string text = s.substr(start, i - start);
            out.push_back({text == "_" ? Tok::Sym : Tok::Ident, text, start});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                ++i;
            }
            if (i - start > 6) {
                throw ParseError("numeric literal too large", start);
            }
            out.push_back({Tok::Number, s.substr(start, i - start), start});
            continue;
        }
        bool matched = false;
        for (const char* m : kMulti) {
            const std::string ms(m);
            if (s.compare(i, ms.size(), ms) == 0) {
                out.push_back({Tok::Sym, ms, i});
                i += ms.size();
                matched = true;
                break;
            }
        }
        if (matched) {
            continue;
        }
        if (std::string("()[]{};+-*=<!?.,").find(c) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, c), i});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    // ---- token helpers -------------------------------------------------
    const Token& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at_sym(const std::string& s, std::size_t k = 0) const {
        return peek(k).kind == Tok::Sym && peek(k).text == s;
    }
    bool at_kw(const std::string& s, std::size_t k = 0) const {
        return peek(k).kind == Tok::Ident && peek(k).text == s;
    }
    bool at_name(std::size_t k = 0) const {
        return peek(k).kind == Tok::Ident && kKeywords.count(peek(k).text) == 0;
    }
    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        throw ParseError(what + (t.kind == Tok::End ? " but found end of input" : " near '" + t.text + "'"),
                         t.pos);
    }
    void expect_sym(const std::string& s) {
        if (!at_sym(s)) {
            fail("expected '" + s + "'");
        }
        ++pos_;
    }
    void expect_kw(const std::string& s) {
        if (!at_kw(s)) {
            fail("expected '" + s + "'");
        }
        ++pos_;
    }
    std::string expect_name() {
        if (!at_name()) {
            fail("expected a variable name");
        }
        return toks_[pos_++].text;
    }
    std::string expect_program_var() {
        const std::size_t at = peek().pos;
        std::string n = expect_name();
        if (DomainConfig::is_logical_name(n)) {
            throw ParseError("commands may only mention program variables, not '" + n + "'", at);
        }
        return n;
    }
    void expect_end() {
        if (peek().kind != Tok::End) {
            fail("unexpected trailing input");
        }
    }

    // Runs `f`; on ParseError restores the position and returns nullopt.
    template <class F>
    auto attempt(F f) -> std::optional<decltype(f())> {
        const std::size_t saved = pos_;
        try {
            return f();
        } catch (const ParseError&) {
            pos_ = saved;
            return std::nullopt;
        }
    }

    // ---- expressions ---------------------------------------------------
    ExprPtr term() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return e_const(std::stoi(t.text));
        }
        if (at_kw("null")) {
            ++pos_;
            return e_null();
        }
        if (at_name()) {
            ++pos_;
            return e_var(t.text);
        }
        if (at_sym("(")) {
            ++pos_;
            ExprPtr e = expr();
            expect_sym(")");
            return e;
        }
        fail("expected an expression");
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (at_sym("+") || at_sym("-")) {
            const bool add = at_sym("+");
            ++pos_;
            ExprPtr r = term();
            e = add ? e_add(e, r) : e_sub(e, r);
        }
        return e;
    }

    // The right-hand side of an assignment, where `+` may instead separate
    // the choice branches of the enclosing command.  A `+` is read as
    // addition only when what follows is a term that does not itself start
    // a command or a guard.
    ExprPtr assign_rhs() {
        ExprPtr e = term();
        for (;;) {
            if (at_sym("-")) {
                ++pos_;
                e = e_sub(e, term());
                continue;
            }
            if (!at_sym("+")) {
                return e;
            }
            const std::size_t saved = pos_;
            ++pos_;
            auto r = attempt([&] { return term(); });
            if (r && !starts_command_tail()) {
                e = e_add(e, *r);
                continue;
            }
            pos_ = saved;
            return e;
        }
    }

    bool starts_command_tail() const {
        static const std::set<std::string> kTail{":=", "?", "=", "!=", "<", "<=", "&&", "||", "(", "[", "|->"};
        return peek().kind == Tok::Sym && kTail.count(peek().text) != 0;
    }

    // ---- boolean guards ------------------------------------------------
    std::optional<CmpOp> cmp_op() {
        static const std::pair<const char*, CmpOp> kOps[] = {
            {"=", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<", CmpOp::Lt}, {"<=", CmpOp::Le}};
        for (const auto& [s, op] : kOps) {
            if (at_sym(s)) {
                ++pos_;
                return op;
            }
        }
        return std::nullopt;
    }

    BoolPtr bool_atom() {
        if (at_sym("!")) {
            ++pos_;
            return b_not(bool_atom());
        }
        if (at_kw("true")) {
            ++pos_;
            return b_true();
        }
        if (at_kw("false")) {
            ++pos_;
            return b_false();
        }
        if (at_sym("(")) {
            auto inner = attempt([&] {
                ++pos_;
                BoolPtr b = bool_or();
                expect_sym(")");
                return b;
            });
            if (inner) {
                return *inner;
            }
        }
        ExprPtr l = expr();
        auto op = cmp_op();
        if (!op) {
            fail("expected a comparison operator");
        }
        return b_cmp(l, *op, expr());
    }

    BoolPtr bool_and() {
        BoolPtr b = bool_atom();
        while (at_sym("&&")) {
            ++pos_;
            b = b_and(b, bool_atom());
        }
        return b;
    }

    BoolPtr bool_or() {
        BoolPtr b = bool_and();
        while (at_sym("||")) {
            ++pos_;
            b = b_or(b, bool_and());
        }
        return b;
    }

    // ---- commands ------------------------------------------------------
    CmdPtr cmd_primary() {
        if (at_kw("skip")) {
            ++pos_;
            return c_skip();
        }
        if (at_kw("error")) {
            ++pos_;
            expect_sym("(");
            expect_sym(")");
            return c_error();
        }
        if (at_kw("free")) {
            ++pos_;
            expect_sym("(");
            std::string x = expect_program_var();
            expect_sym(")");
            return c_free(x);
        }
        if (at_sym("[")) {
            const std::size_t at = peek().pos;
            ++pos_;
            std::string x = expect_program_var();
            expect_sym("]");
            expect_sym(":=");
            std::string y = expect_program_var();
            if (x == y) {
                throw ParseError("store requires distinct variables", at);
            }
            return c_store(x, y);
        }
        if (at_name() && at_sym(":=", 1)) {
            const std::size_t at = peek().pos;
            std::string x = expect_program_var();
            ++pos_;
            if (at_kw("alloc")) {
                ++pos_;
                expect_sym("(");
                expect_sym(")");
                return c_alloc(x);
            }
            if (at_sym("[")) {
                ++pos_;
                std::string y = expect_program_var();
                expect_sym("]");
                if (x == y) {
                    throw ParseError("load requires distinct variables", at);
                }
                return c_load(x, y);
            }
            ExprPtr e = assign_rhs();
            check_program_expr(*e, at);
            return c_assign(x, e);
        }
        if (at_sym("(")) {
            auto inner = attempt([&] {
                ++pos_;
                CmdPtr c = cmd_seq();
                expect_sym(")");
                return c;
            });
            if (inner && !at_sym("?")) {
                return *inner;
            }
            if (inner) {
                fail("unexpected '?' after a command");
            }
        }
        const std::size_t at = peek().pos;
        BoolPtr b = bool_or();
        expect_sym("?");
        for (const auto& v : free_vars(*b)) {
            if (DomainConfig::is_logical_name(v)) {
                throw ParseError("commands may only mention program variables, not '" + v + "'", at);
            }
        }
        return c_assume(b);
    }

    static void check_program_expr(const Expr& e, std::size_t at) {
        for (const auto& v : free_vars(e)) {
            if (DomainConfig::is_logical_name(v)) {
                throw ParseError("commands may only mention program variables, not '" + v + "'", at);
            }
        }
    }

    CmdPtr cmd_postfix() {
        CmdPtr c = cmd_primary();
        while (at_sym("*")) {
            ++pos_;
            c = c_star(c);
        }
        return c;
    }

    CmdPtr cmd_choice() {
        CmdPtr c = cmd_postfix();
        while (at_sym("+")) {
            ++pos_;
            c = c_choice(c, cmd_postfix());
        }
        return c;
    }

    CmdPtr cmd_seq() {
        CmdPtr c = cmd_choice();
        while (at_sym(";")) {
            ++pos_;
            c = c_seq(c, cmd_choice());
        }
        return c;
    }

    // ---- assertions ----------------------------------------------------
    std::vector<std::string> name_list(const std::string& close) {
        std::vector<std::string> xs;
        while (!at_sym(close)) {
            xs.push_back(expect_name());
            if (at_sym(",")) {
                ++pos_;
            }
        }
        return xs;
    }

    AstPtr ast_atom() {
        if (at_kw("exists")) {
            ++pos_;
            std::vector<std::string> xs;
            xs.push_back(expect_name());
            while (at_sym(",") || at_name()) {
                if (at_sym(",")) {
                    ++pos_;
                }
                xs.push_back(expect_name());
            }
            expect_sym(".");
            return a_exists(std::move(xs), ast_or());
        }
        if (at_kw("true")) {
            ++pos_;
            return a_true();
        }
        if (at_kw("false")) {
            ++pos_;
            return a_false();
        }
        if (at_kw("emp")) {
            ++pos_;
            return a_emp();
        }
        if (at_kw("empX")) {
            ++pos_;
            expect_sym("{");
            auto xs = name_list("}");
            expect_sym("}");
            return a_emp_vars(std::move(xs));
        }
        if (at_name()) {
            if (at_sym("|->", 1)) {
                std::string x = expect_name();
                ++pos_;
                if (at_sym("_")) {
                    ++pos_;
                    return a_points_to(x, nullptr);
                }
                return a_points_to(x, expr());
            }
            if (at_sym("!->", 1)) {
                std::string x = expect_name();
                ++pos_;
                return a_not_points_to(x);
            }
            if (at_sym("#->", 1)) {
                std::string x = expect_name();
                ++pos_;
                return a_reserved(x);
            }
        }
        if (at_sym("(")) {
            auto inner = attempt([&] {
                ++pos_;
                AstPtr a = ast_or();
                expect_sym(")");
                return a;
            });
            if (inner) {
                return *inner;
            }
        }
        ExprPtr l = expr();
        auto op = cmp_op();
        if (!op) {
            fail("expected an assertion");
        }
        return a_cmp(l, *op, expr());
    }

    AstPtr ast_sep() {
        AstPtr a = ast_atom();
        while (at_sym("*")) {
            ++pos_;
            a = a_sep(a, ast_atom());
        }
        return a;
    }

    AstPtr ast_and() {
        AstPtr a = ast_sep();
        while (at_sym("&&")) {
            ++pos_;
            a = a_and(a, ast_sep());
        }
        return a;
    }

    AstPtr ast_or() {
        AstPtr a = ast_and();
        while (at_sym("||")) {
            ++pos_;
            a = a_or(a, ast_and());
        }
        return a;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

template <class T, class F>
T parse_whole(const std::string& text, F f) {
    Parser p(text);
    T r = f(p);
    p.expect_end();
    return r;
}

} // namespace

ExprPtr parse_expr(const std::string& text) {
    return parse_whole<ExprPtr>(text, [](Parser& p) { return p.expr(); });
}

BoolPtr parse_bool(const std::string& text) {
    return parse_whole<BoolPtr>(text, [](Parser& p) { return p.bool_or(); });
}

CmdPtr parse_command(const std::string& text) {
    return parse_whole<CmdPtr>(text, [](Parser& p) { return p.cmd_seq(); });
}

AstPtr parse_assertion(const std::string& text) {
    return parse_whole<AstPtr>(text, [](Parser& p) { return p.ast_or(); });
}

} // namespace sepkit
