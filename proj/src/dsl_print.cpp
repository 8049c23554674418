#include "linred/dsl.hpp"

#include <sstream>

namespace linred {

namespace {

std::string constant_text(const Rational& v)
{
    // Fractions are parenthesized so "x * 5/3" cannot reparse as "(x * 5) / 3".
    return v < 0 || !is_integer(v) ? "(" + to_string(v) + ")" : to_string(v);
}

const char* cmp_text(CmpOp op)
{
    switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

void print_into(std::ostream& os, const Expr& e, std::span<const VarDecl> decls)
{
    auto binary = [&](const char* op) {
        os << '(';
        print_into(os, *e.args[0], decls);
        os << ' ' << op << ' ';
        print_into(os, *e.args[1], decls);
        os << ')';
    };
    auto call = [&](const char* fn) {
        os << fn << '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                os << ", ";
            print_into(os, *e.args[i], decls);
        }
        os << ')';
    };

    switch (e.op) {
    case Op::Const: os << constant_text(e.value); break;
    case Op::BoolConst: os << (e.truth ? "true" : "false"); break;
    case Op::Var: os << decls[e.var].name; break;
    case Op::Add: binary("+"); break;
    case Op::Sub: binary("-"); break;
    case Op::Mul: binary("*"); break;
    case Op::Neg:
        os << "(-";
        if (e.args[0]->op == Op::Const && is_integer(e.args[0]->value) && e.args[0]->value >= 0) {
            os << '(' << to_string(e.args[0]->value) << ')';
        } else {
            print_into(os, *e.args[0], decls);
        }
        os << ')';
        break;
    case Op::Max: call("max"); break;
    case Op::Min: call("min"); break;
    case Op::Abs: call("abs"); break;
    case Op::Cmp: binary(cmp_text(e.cmp)); break;
    case Op::And: binary("and"); break;
    case Op::Or: binary("or"); break;
    case Op::Implies: binary("->"); break;
    case Op::Iff: binary("<->"); break;
    case Op::Not:
        os << "(not ";
        print_into(os, *e.args[0], decls);
        os << ')';
        break;
    }
}

void print_decls(std::ostream& os, const std::vector<VarDecl>& decls)
{
    for (const auto& d : decls)
        os << print_decl(d) << '\n';
}

} // namespace

std::string print_expr(const Expr& e, std::span<const VarDecl> decls)
{
    std::ostringstream os;
    print_into(os, e, decls);
    return os.str();
}

std::string print_decl(const VarDecl& decl)
{
    std::string out = "var " + decl.name + ": ";
    switch (decl.domain.kind) {
    case DomainKind::Binary:
        return out + "binary;";
    case DomainKind::Int:
        out += "int";
        break;
    case DomainKind::Real:
        out += "real";
        break;
    }
    return out + " in [" + to_string(decl.domain.lo) + ", " + to_string(decl.domain.hi) + "];";
}

std::string print_spec(const PredicateSpec& spec)
{
    std::ostringstream os;
    print_decls(os, spec.decls);
    os << "assert " << print_expr(*spec.predicate, spec.decls) << ";\n";
    return os.str();
}

std::string print_model(const ModelSpec& model)
{
    std::ostringstream os;
    print_decls(os, model.decls);
    os << (model.sense == Sense::Minimize ? "min " : "max ")
       << print_expr(*model.objective, model.decls) << " s.t.\n";
    for (const auto& c : model.constraints)
        os << "  " << print_expr(*c, model.decls) << ";\n";
    return os.str();
}

} // namespace linred
