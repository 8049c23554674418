#pragma once

#include "linred/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linred {

/* -------------------------------------------------------------------------- */
/* Declarations                                                               */
/* -------------------------------------------------------------------------- */

enum class DomainKind { Real, Int, Binary };

struct Domain {
    DomainKind kind = DomainKind::Real;
    Rational lo;
    Rational hi;

    static Domain real(Rational lo, Rational hi);
    static Domain integer(Rational lo, Rational hi);
    static Domain binary();

    bool contains(const Rational& v) const;
    bool is_finite() const { return kind != DomainKind::Real; }

    bool operator==(const Domain&) const = default;
};

struct VarDecl {
    std::string name;
    Domain domain;

    bool operator==(const VarDecl&) const = default;
};

/* -------------------------------------------------------------------------- */
/* Expressions                                                                */
/* -------------------------------------------------------------------------- */

enum class Op {
    Const,
    BoolConst,
    Var,
    Add,
    Sub,
    Neg,
    Mul,
    Max,
    Min,
    Abs,
    Cmp,
    And,
    Or,
    Not,
    Implies,
    Iff,
};

enum class CmpOp { Le, Lt, Eq, Ne, Ge, Gt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Arithmetic and Boolean nodes share one type;
// is_bool() tells them apart and the parser guarantees well-typed trees.
struct Expr {
    Op op = Op::Const;
    Rational value;        // Const
    bool truth = false;    // BoolConst
    std::size_t var = 0;   // Var: index into the declaration list
    CmpOp cmp = CmpOp::Le; // Cmp
    std::vector<ExprPtr> args;

    bool is_bool() const;
};

namespace ex {
ExprPtr constant(Rational v);
ExprPtr boolean(bool b);
ExprPtr var(std::size_t index);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr max(std::vector<ExprPtr> args);
ExprPtr min(std::vector<ExprPtr> args);
ExprPtr abs(ExprPtr a);
ExprPtr cmp(CmpOp op, ExprPtr a, ExprPtr b);
ExprPtr land(ExprPtr a, ExprPtr b);
ExprPtr lor(ExprPtr a, ExprPtr b);
ExprPtr lnot(ExprPtr a);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr iff(ExprPtr a, ExprPtr b);
} // namespace ex

bool same_structure(const Expr& a, const Expr& b);

// Sorted, deduplicated variable indices referenced by the expression.
std::vector<std::size_t> free_vars(const Expr& e);

// Rewrites variable indices through `mapping` (old index -> new index).
ExprPtr remap_vars(const ExprPtr& e, const std::map<std::size_t, std::size_t>& mapping);

// True if some Mul node has a non-constant operand on both sides.
bool has_var_product(const Expr& e);

/* -------------------------------------------------------------------------- */
/* Specifications                                                             */
/* -------------------------------------------------------------------------- */

struct PredicateSpec {
    std::vector<VarDecl> decls;
    ExprPtr predicate;
};

enum class Sense { Minimize, Maximize };

struct ModelSpec {
    Sense sense = Sense::Minimize;
    ExprPtr objective;
    std::vector<ExprPtr> constraints;
    std::vector<VarDecl> decls;
    // Index of the variable introduced by lift_objective, if any.
    std::optional<std::size_t> lifted_objective;
};

/* -------------------------------------------------------------------------- */
/* Errors                                                                     */
/* -------------------------------------------------------------------------- */

class DslError : public std::runtime_error {
public:
    DslError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return d_line; }
    std::size_t column() const { return d_column; }
    const std::string& detail() const { return d_detail; }

private:
    std::size_t d_line;
    std::size_t d_column;
    std::string d_detail;
};

class ParseError : public DslError {
    using DslError::DslError;
};

class TypeError : public DslError {
    using DslError::DslError;
};

/* -------------------------------------------------------------------------- */
/* Operations                                                                 */
/* -------------------------------------------------------------------------- */

PredicateSpec parse_spec(std::string_view text);
ModelSpec parse_model(std::string_view text);

std::string print_expr(const Expr& e, std::span<const VarDecl> decls);
std::string print_decl(const VarDecl& decl);
std::string print_spec(const PredicateSpec& spec);
std::string print_model(const ModelSpec& model);

bool eval_predicate(const Expr& phi, std::span<const Rational> y);
Rational eval_arith(const Expr& e, std::span<const Rational> y);

// Throws std::invalid_argument if the valuation does not fit the domains.
void check_valuation(std::span<const VarDecl> decls, std::span<const Rational> y);

struct Affine {
    std::map<std::size_t, Rational> coeffs; // zero coefficients are dropped
    Rational constant;
};

// Affine form of an arithmetic expression, or nullopt if it is not affine.
std::optional<Affine> to_affine(const Expr& e);

struct Interval {
    Rational lo;
    Rational hi;
};

// Interval enclosure of an arithmetic expression over the declared boxes.
Interval interval_of(const Expr& e, std::span<const VarDecl> decls);

} // namespace linred
