#include "hflz/common.hpp"

#include <cctype>

namespace hflz {

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

std::string describe(const SourcePos& pos)
{
    return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.col);
}

std::string arith_symbol(ArithOp op)
{
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    }
    return "?";
}

BigInt eval_arith(ArithOp op, const BigInt& a, const BigInt& b)
{
    switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    }
    return 0;
}

std::string pred_symbol(PredOp op)
{
    switch (op) {
    case PredOp::Eq: return "=";
    case PredOp::Neq: return "!=";
    case PredOp::Lt: return "<";
    case PredOp::Le: return "<=";
    case PredOp::Gt: return ">";
    case PredOp::Ge: return ">=";
    case PredOp::Even: return "even";
    case PredOp::Odd: return "odd";
    }
    return "?";
}

PredOp negate(PredOp op)
{
    switch (op) {
    case PredOp::Eq: return PredOp::Neq;
    case PredOp::Neq: return PredOp::Eq;
    case PredOp::Lt: return PredOp::Ge;
    case PredOp::Le: return PredOp::Gt;
    case PredOp::Gt: return PredOp::Le;
    case PredOp::Ge: return PredOp::Lt;
    case PredOp::Even: return PredOp::Odd;
    case PredOp::Odd: return PredOp::Even;
    }
    return op;
}

std::size_t pred_arity(PredOp op) { return (op == PredOp::Even || op == PredOp::Odd) ? 1 : 2; }

bool pred_is_infix(PredOp op) { return pred_arity(op) == 2; }

bool eval_pred(PredOp op, const std::vector<BigInt>& args)
{
    if (args.size() != pred_arity(op))
        fail(ErrorKind::Type, "predicate " + pred_symbol(op) + " applied to wrong number of arguments");
    switch (op) {
    case PredOp::Eq: return args[0] == args[1];
    case PredOp::Neq: return args[0] != args[1];
    case PredOp::Lt: return args[0] < args[1];
    case PredOp::Le: return args[0] <= args[1];
    case PredOp::Gt: return args[0] > args[1];
    case PredOp::Ge: return args[0] >= args[1];
    case PredOp::Even: return (args[0] % 2) == 0;
    case PredOp::Odd: return (args[0] % 2) != 0;
    }
    return false;
}

std::string to_string(const BigInt& v) { return v.str(); }

std::string sanitize_ident(const std::string& s)
{
    std::string out;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        out += (std::isalnum(u) || c == '_') ? c : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "s" + out;
    return out;
}

}  // namespace hflz
