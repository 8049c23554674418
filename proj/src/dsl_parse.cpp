#include "linred/dsl.hpp"

#include <cctype>
#include <set>

namespace linred {

namespace {

/* -------------------------------------------------------------------------- */
/* Lexer                                                                      */
/* -------------------------------------------------------------------------- */

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
};

std::vector<Token> lex(std::string_view src)
{
    static const char* const two_char[] = {"<=", ">=", "==", "!=", "->", "&&", "||"};
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;

    auto advance = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; ++j, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }

        Token t;
        t.line = line;
        t.col = col;
        if (src.substr(i, 4) == "s.t.") {
            t.kind = Tok::Sym;
            t.text = "s.t.";
            advance(4);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() &&
                    std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            bool dot = false;
            while (j < src.size() &&
                   (std::isdigit(static_cast<unsigned char>(src[j])) || (src[j] == '.' && !dot))) {
                dot = dot || src[j] == '.';
                ++j;
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (src.substr(i, 3) == "<->") {
            t.kind = Tok::Sym;
            t.text = "<->";
            advance(3);
        } else {
            t.kind = Tok::Sym;
            for (const char* s : two_char) {
                if (src.substr(i, 2) == s) {
                    t.text = s;
                    break;
                }
            }
            if (t.text.empty()) {
                if (std::string_view("()[],;:+-*/<>=!").find(c) == std::string_view::npos)
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
                t.text = std::string(1, c);
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }

    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

const std::set<std::string>& keywords()
{
    static const std::set<std::string> k = {
        "var", "assert", "binary", "real", "int", "in", "true", "false", "and", "or",
        "not", "implies", "iff", "max", "min", "abs", "minimize", "maximize",
    };
    return k;
}

/* -------------------------------------------------------------------------- */
/* Parser                                                                     */
/* -------------------------------------------------------------------------- */

class Parser {
public:
    explicit Parser(std::string_view text) : d_toks(lex(text)) {}

    PredicateSpec parse_spec()
    {
        PredicateSpec spec;
        while (!at_end()) {
            if (is_ident("var")) {
                parse_decl();
            } else if (is_ident("assert")) {
                next();
                ExprPtr p = parse_bool_expr();
                expect(";");
                spec.predicate = spec.predicate ? ex::land(spec.predicate, p) : p;
            } else {
                fail_parse("expected 'var' or 'assert'");
            }
        }
        if (!spec.predicate)
            throw ParseError(peek().line, peek().col, "specification has no 'assert'");
        spec.decls = d_decls;
        return spec;
    }

    ModelSpec parse_model()
    {
        ModelSpec model;
        bool have_objective = false;
        bool in_constraints = false;
        while (!at_end()) {
            if (is_ident("var")) {
                parse_decl();
            } else if (!have_objective && (is_ident("min") || is_ident("max") ||
                                           is_ident("minimize") || is_ident("maximize"))) {
                model.sense = (peek().text.rfind("min", 0) == 0) ? Sense::Minimize
                                                                 : Sense::Maximize;
                next();
                const Token& at = peek();
                model.objective = parse_expr();
                if (model.objective->is_bool())
                    throw TypeError(at.line, at.col, "objective must be arithmetic");
                have_objective = true;
                if (is_sym("s.t.")) {
                    next();
                    in_constraints = true;
                } else {
                    expect(";");
                }
            } else if (have_objective && !in_constraints && is_sym("s.t.")) {
                next();
                in_constraints = true;
            } else if (in_constraints) {
                model.constraints.push_back(parse_bool_expr());
                expect(";");
            } else {
                fail_parse(have_objective ? "expected 's.t.' or 'var'"
                                          : "expected 'var', 'min' or 'max'");
            }
        }
        if (!have_objective)
            throw ParseError(peek().line, peek().col, "model has no objective");
        model.decls = d_decls;
        return model;
    }

private:
    std::vector<Token> d_toks;
    std::size_t d_pos = 0;
    std::vector<VarDecl> d_decls;

    const Token& peek(std::size_t ahead = 0) const
    {
        return d_toks[std::min(d_pos + ahead, d_toks.size() - 1)];
    }
    const Token& next() { return d_toks[d_pos < d_toks.size() - 1 ? d_pos++ : d_pos]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is_sym(std::string_view s, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
    }
    bool is_ident(std::string_view s) const
    {
        return peek().kind == Tok::Ident && peek().text == s;
    }

    [[noreturn]] void fail_parse(const std::string& what) const
    {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.col, what + ", got " + got);
    }

    void expect(std::string_view s)
    {
        if (!is_sym(s))
            fail_parse("expected '" + std::string(s) + "'");
        next();
    }

    std::string expect_name()
    {
        const Token& t = peek();
        if (t.kind != Tok::Ident || keywords().count(t.text))
            fail_parse("expected identifier");
        next();
        return t.text;
    }

    Rational parse_constant()
    {
        const Token& at = peek();
        ExprPtr e = parse_additive();
        auto aff = e->is_bool() ? std::nullopt : to_affine(*e);
        if (!aff || !aff->coeffs.empty())
            throw TypeError(at.line, at.col, "bound must be a constant");
        return aff->constant;
    }

    void parse_decl()
    {
        next(); // var
        std::vector<std::pair<std::string, Token>> names;
        do {
            Token at = peek();
            names.emplace_back(expect_name(), at);
            if (!is_sym(","))
                break;
            next();
        } while (true);
        expect(":");

        const Token kind_tok = peek();
        Domain dom;
        if (is_ident("binary")) {
            next();
            dom = Domain::binary();
        } else if (is_ident("real") || is_ident("int")) {
            bool integer = peek().text == "int";
            next();
            if (!is_ident("in"))
                throw TypeError(kind_tok.line, kind_tok.col,
                                "variable of kind '" + kind_tok.text + "' needs bounds 'in [lo, hi]'");
            next();
            expect("[");
            Token lo_tok = peek();
            Rational lo = parse_constant();
            expect(",");
            Token hi_tok = peek();
            Rational hi = parse_constant();
            expect("]");
            if (lo > hi)
                throw TypeError(lo_tok.line, lo_tok.col,
                                "empty domain: lower bound " + to_string(lo) +
                                    " exceeds upper bound " + to_string(hi));
            if (integer && (!is_integer(lo) || !is_integer(hi)))
                throw TypeError(lo_tok.line, lo_tok.col, "int bounds must be integers");
            dom = integer ? Domain::integer(lo, hi) : Domain::real(lo, hi);
            (void)hi_tok;
        } else {
            fail_parse("expected 'binary', 'real' or 'int'");
        }
        expect(";");

        for (auto& [name, at] : names) {
            for (const auto& d : d_decls)
                if (d.name == name)
                    throw TypeError(at.line, at.col, "duplicate variable '" + name + "'");
            d_decls.push_back(VarDecl{name, dom});
        }
    }

    ExprPtr parse_bool_expr()
    {
        const Token& at = peek();
        ExprPtr e = parse_expr();
        if (!e->is_bool())
            throw TypeError(at.line, at.col, "expected a Boolean condition");
        return e;
    }

    static void want_bool(const ExprPtr& e, const Token& at, std::string_view op)
    {
        if (!e->is_bool())
            throw TypeError(at.line, at.col,
                            "operator '" + std::string(op) + "' needs Boolean operands");
    }

    static void want_arith(const ExprPtr& e, const Token& at, std::string_view op)
    {
        if (e->is_bool())
            throw TypeError(at.line, at.col,
                            "operator '" + std::string(op) + "' needs arithmetic operands");
    }

    ExprPtr parse_expr() { return parse_iff(); }

    ExprPtr parse_iff()
    {
        ExprPtr lhs = parse_implies();
        while (is_sym("<->") || is_ident("iff")) {
            Token op = next();
            ExprPtr rhs = parse_implies();
            want_bool(lhs, op, op.text);
            want_bool(rhs, op, op.text);
            lhs = ex::iff(lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_implies()
    {
        ExprPtr lhs = parse_or();
        if (is_sym("->") || is_ident("implies")) {
            Token op = next();
            ExprPtr rhs = parse_implies();
            want_bool(lhs, op, op.text);
            want_bool(rhs, op, op.text);
            return ex::implies(lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_or()
    {
        ExprPtr lhs = parse_and();
        while (is_sym("||") || is_ident("or")) {
            Token op = next();
            ExprPtr rhs = parse_and();
            want_bool(lhs, op, op.text);
            want_bool(rhs, op, op.text);
            lhs = ex::lor(lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_and()
    {
        ExprPtr lhs = parse_not();
        while (is_sym("&&") || is_ident("and")) {
            Token op = next();
            ExprPtr rhs = parse_not();
            want_bool(lhs, op, op.text);
            want_bool(rhs, op, op.text);
            lhs = ex::land(lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_not()
    {
        if (is_sym("!") || is_ident("not")) {
            Token op = next();
            ExprPtr arg = parse_not();
            want_bool(arg, op, op.text);
            return ex::lnot(arg);
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp()
    {
        ExprPtr lhs = parse_additive();
        static const std::pair<const char*, CmpOp> ops[] = {
            {"<=", CmpOp::Le}, {"<", CmpOp::Lt}, {"=", CmpOp::Eq}, {"==", CmpOp::Eq},
            {"!=", CmpOp::Ne}, {">=", CmpOp::Ge}, {">", CmpOp::Gt},
        };
        for (const auto& [text, op] : ops) {
            if (is_sym(text)) {
                Token at = next();
                ExprPtr rhs = parse_additive();
                want_arith(lhs, at, at.text);
                want_arith(rhs, at, at.text);
                return ex::cmp(op, lhs, rhs);
            }
        }
        return lhs;
    }

    ExprPtr parse_additive()
    {
        ExprPtr lhs = parse_term();
        while (is_sym("+") || is_sym("-")) {
            Token op = next();
            ExprPtr rhs = parse_term();
            want_arith(lhs, op, op.text);
            want_arith(rhs, op, op.text);
            lhs = op.text == "+" ? ex::add(lhs, rhs) : ex::sub(lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_term()
    {
        ExprPtr lhs = parse_unary();
        while (is_sym("*") || is_sym("/")) {
            Token op = next();
            ExprPtr rhs = parse_unary();
            want_arith(lhs, op, op.text);
            want_arith(rhs, op, op.text);
            if (op.text == "*") {
                lhs = ex::mul(lhs, rhs);
                continue;
            }
            auto divisor = to_affine(*rhs);
            if (!divisor || !divisor->coeffs.empty())
                throw TypeError(op.line, op.col, "division only by a constant");
            if (divisor->constant == 0)
                throw TypeError(op.line, op.col, "division by zero");
            Rational inv = 1 / divisor->constant;
            if (lhs->op == Op::Const)
                lhs = ex::constant(lhs->value * inv);
            else
                lhs = ex::mul(ex::constant(inv), lhs);
        }
        return lhs;
    }

    ExprPtr parse_unary()
    {
        if (is_sym("-")) {
            Token op = next();
            if (peek().kind == Tok::Number) {
                // "-3" is a literal, not a negation node
                Token t = next();
                return ex::constant(-parse_rational(t.text));
            }
            ExprPtr arg = parse_unary();
            want_arith(arg, op, "-");
            return ex::neg(arg);
        }
        return parse_primary();
    }

    ExprPtr parse_primary()
    {
        const Token t = peek();
        if (t.kind == Tok::Number) {
            next();
            return ex::constant(parse_rational(t.text));
        }
        if (is_sym("(")) {
            next();
            ExprPtr e = parse_expr();
            expect(")");
            return e;
        }
        if (t.kind != Tok::Ident)
            fail_parse("expected an expression");

        if (t.text == "true" || t.text == "false") {
            next();
            return ex::boolean(t.text == "true");
        }
        if ((t.text == "max" || t.text == "min" || t.text == "abs") && is_sym("(", 1)) {
            next();
            next();
            std::vector<ExprPtr> args;
            if (!is_sym(")")) {
                do {
                    const Token at = peek();
                    ExprPtr a = parse_expr();
                    want_arith(a, at, t.text);
                    args.push_back(a);
                    if (!is_sym(","))
                        break;
                    next();
                } while (true);
            }
            expect(")");
            if (t.text == "abs") {
                if (args.size() != 1)
                    throw TypeError(t.line, t.col, "abs takes exactly one argument");
                return ex::abs(args[0]);
            }
            if (args.empty())
                throw TypeError(t.line, t.col, t.text + " needs at least one argument");
            return t.text == "max" ? ex::max(std::move(args)) : ex::min(std::move(args));
        }
        if (keywords().count(t.text))
            fail_parse("expected an expression");

        next();
        for (std::size_t i = 0; i < d_decls.size(); ++i)
            if (d_decls[i].name == t.text)
                return ex::var(i);
        throw TypeError(t.line, t.col, "undeclared variable '" + t.text + "'");
    }
};

} // namespace

PredicateSpec parse_spec(std::string_view text)
{
    return Parser(text).parse_spec();
}

ModelSpec parse_model(std::string_view text)
{
    return Parser(text).parse_model();
}

} // namespace linred
