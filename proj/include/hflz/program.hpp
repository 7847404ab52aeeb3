#pragma once

#include "hflz/common.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hflz {

struct SimpleType;
using SimpleTypePtr = std::shared_ptr<const SimpleType>;

struct SimpleType {
    enum class Kind { Unit, Int, Arrow };
    Kind kind = Kind::Unit;
    SimpleTypePtr arg;
    SimpleTypePtr res;

    static SimpleTypePtr unit();
    static SimpleTypePtr integer();
    static SimpleTypePtr arrow(SimpleTypePtr a, SimpleTypePtr r);
};

bool equal(const SimpleType& a, const SimpleType& b);
std::string to_string(const SimpleType& t);
// Argument types of a curried function type, result is always unit for programs.
std::vector<SimpleTypePtr> arg_types(const SimpleTypePtr& t);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Unit, Var, Int, Arith, If, Event, App, NonDet, Abs };
    Kind kind = Kind::Unit;
    std::string name;             // Var: identifier, Event: label
    BigInt value;                 // Int
    ArithOp arith = ArithOp::Add; // Arith
    PredOp pred = PredOp::Eq;     // If
    std::vector<TermPtr> args;    // If: predicate arguments
    TermPtr lhs;                  // Arith lhs, App fun, NonDet left, If then, Event body, Abs body
    TermPtr rhs;                  // Arith rhs, App arg, NonDet right, If else
    std::vector<std::string> params;  // Abs
    SourcePos pos;
};

namespace term {
TermPtr unit(SourcePos pos = {});
TermPtr var(const std::string& name, SourcePos pos = {});
TermPtr integer(const BigInt& v, SourcePos pos = {});
TermPtr arith(ArithOp op, TermPtr a, TermPtr b, SourcePos pos = {});
TermPtr ite(PredOp p, std::vector<TermPtr> args, TermPtr then_branch, TermPtr else_branch, SourcePos pos = {});
TermPtr event(const std::string& label, TermPtr body, SourcePos pos = {});
TermPtr app(TermPtr f, TermPtr a, SourcePos pos = {});
TermPtr apps(TermPtr f, const std::vector<TermPtr>& args);
TermPtr nondet(TermPtr a, TermPtr b, SourcePos pos = {});
TermPtr abs(std::vector<std::string> params, TermPtr body, SourcePos pos = {});
}  // namespace term

// Flattens an application spine into head and arguments.
void spine(const TermPtr& t, TermPtr& head, std::vector<TermPtr>& args);

bool equal(const Term& a, const Term& b);
std::string to_string(const Term& t);

struct Definition {
    std::string name;
    std::vector<std::string> params;
    TermPtr body;
    SourcePos pos;
};

struct Program {
    std::vector<Definition> defs;
    std::string main = "main";

    const Definition* find(const std::string& name) const;
    Definition* find(const std::string& name);
    std::vector<std::string> events() const;
};

bool equal(const Program& a, const Program& b);
std::string print_program(const Program& p);

using TypeEnv = std::map<std::string, SimpleTypePtr>;

struct ProgramTyping {
    TypeEnv globals;
    std::map<std::string, TypeEnv> locals;  // per definition: parameter types
    std::unordered_map<const Term*, std::vector<SimpleTypePtr>> abs_params;
};

Program parse_program(const std::string& text);
TypeEnv typecheck_program(const Program& p);
ProgramTyping infer_program_types(const Program& p);
// Type of a subterm of a typechecked program, given the local variable types.
SimpleTypePtr type_of_term(const ProgramTyping& typing, const TypeEnv& locals, const Term& t);

struct NormalizeOptions {
    bool lift_lambdas = true;
};
Program normalize_program(const Program& p, NormalizeOptions opts = {});
Program instrument_total(const Program& p, const std::string& dummy);

// Free variables of a term that are not global function names.
std::vector<std::string> free_locals(const Term& t, const Program& p);
TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& sub);
std::string fresh_name(const std::string& base, const std::vector<std::string>& taken);

}  // namespace hflz
