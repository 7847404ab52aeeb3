#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hflz {

using BigInt = boost::multiprecision::cpp_int;

enum class ErrorKind { Syntax, Type, Semantic, Usage, Budget, Unsupported };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

struct SourcePos {
    int line = 0;
    int col = 0;
};

std::string describe(const SourcePos& pos);

enum class ArithOp { Add, Sub, Mul };
enum class PredOp { Eq, Neq, Lt, Le, Gt, Ge, Even, Odd };

std::string arith_symbol(ArithOp op);
BigInt eval_arith(ArithOp op, const BigInt& a, const BigInt& b);

std::string pred_symbol(PredOp op);
PredOp negate(PredOp op);
std::size_t pred_arity(PredOp op);
bool pred_is_infix(PredOp op);
bool eval_pred(PredOp op, const std::vector<BigInt>& args);

std::string to_string(const BigInt& v);

// Identifier-safe rendering of an arbitrary name.
std::string sanitize_ident(const std::string& s);

}  // namespace hflz
