#pragma once

#include "linred/dsl.hpp"
#include "linred/rational.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace linred::smt {

enum class Sort { Bool, Int, Real };

// S-expression used for building scripts and for reading solver responses.
// Number nodes carry an exact value and the sort it is rendered at.
struct SExpr {
    enum class Kind { Atom, Number, List };

    Kind kind = Kind::Atom;
    std::string atom;
    Rational number;
    Sort number_sort = Sort::Int;
    std::vector<SExpr> items;

    static SExpr sym(std::string name);
    static SExpr num(Rational value, Sort sort);
    static SExpr list(std::vector<SExpr> items);
    static SExpr app(std::string head, std::vector<SExpr> args);

    bool is_atom(std::string_view s) const { return kind == Kind::Atom && atom == s; }
};

// Sorted arithmetic/Boolean term; the helpers below insert to_real where sorts mix.
struct Term {
    SExpr expr;
    Sort sort = Sort::Real;
};

Term constant(const Rational& value);
Term symbol(std::string name, Sort sort);
Term coerce(Term t, Sort target);
Term add(std::vector<Term> terms);
Term negate(Term t);
Term subtract(Term a, Term b);
Term scale(const Rational& factor, Term t);
Term multiply(Term a, Term b);
Term ite(SExpr cond, Term a, Term b);
SExpr compare(CmpOp op, Term a, Term b);
SExpr conj(std::vector<SExpr> parts);
SExpr disj(std::vector<SExpr> parts);
SExpr negation(SExpr p);

struct Declaration {
    std::string name;
    Sort sort = Sort::Real;
};

class Script {
public:
    void declare(std::string name, Sort sort);
    void add_assertion(SExpr assertion);

    const std::vector<Declaration>& declarations() const { return d_decls; }
    const std::vector<SExpr>& assertions() const { return d_assertions; }

    void set_logic(std::string logic) { d_logic = std::move(logic); }
    const std::optional<std::string>& logic_override() const { return d_logic; }

    bool want_model = true;

private:
    std::vector<Declaration> d_decls;
    std::vector<SExpr> d_assertions;
    std::optional<std::string> d_logic;
};

// QF_{L,N}{I}{R}A chosen from the declarations and a structural product scan.
std::string derive_logic(const Script& script);
std::string logic_of(const Script& script);

// True if some (* ...) application has two or more non-literal factors.
bool has_nonlinear_product(const SExpr& e);

std::string render(const SExpr& e, bool mixed_logic);
std::string serialize_query(const Script& script);
std::string serialize_model_request(const Script& script);
std::string serialize(const Script& script);

/* -------------------------------------------------------------------------- */
/* Solver responses                                                           */
/* -------------------------------------------------------------------------- */

class SmtParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<SExpr> read_sexprs(std::string_view text);
Rational parse_model_value(const SExpr& value);
Rational parse_model_value(std::string_view text);
std::map<std::string, Rational> parse_get_value(std::string_view response);

struct Sat {
    std::map<std::string, Rational> model;
};
struct Unsat {};
struct Unknown {
    std::string reason;
};
struct SolverFailure {
    std::string diagnostic;
};

using Verdict = std::variant<Sat, Unsat, Unknown, SolverFailure>;

std::string describe(const Verdict& v);

struct SolverConfig {
    std::vector<std::string> argv = {"z3", "-in"};
    double timeout_s = 60.0;
    std::optional<std::string> logic_override;
};

// One fresh solver process per call.
Verdict run_solver(const Script& script, const SolverConfig& config);

} // namespace linred::smt
