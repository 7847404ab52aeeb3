#pragma once

#include "hflz/common.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace hflz {

struct HflType;
using HflTypePtr = std::shared_ptr<const HflType>;

struct HflType {
    enum class Kind { Prop, Int, Arrow };
    Kind kind = Kind::Prop;
    HflTypePtr arg;
    HflTypePtr res;

    static HflTypePtr prop();
    static HflTypePtr integer();
    static HflTypePtr arrow(HflTypePtr a, HflTypePtr r);
    static HflTypePtr arrows(const std::vector<HflTypePtr>& args, HflTypePtr r);
};

bool equal(const HflType& a, const HflType& b);
std::string to_string(const HflType& t);
std::vector<HflTypePtr> arg_types(const HflTypePtr& t);
// Order: 0 for Prop and Int, 1 + max(order(arg), order(res) - 1) style as usual.
int order(const HflType& t);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { True, False, Int, Arith, Pred, Or, And, Var, Diamond, Box, Mu, Nu, Lambda, App };
    Kind kind = Kind::True;
    std::string name;             // Var, binder name, modal label
    BigInt value;                 // Int
    ArithOp arith = ArithOp::Add; // Arith
    PredOp pred = PredOp::Eq;     // Pred
    std::vector<FormulaPtr> args; // Pred arguments
    FormulaPtr lhs;               // Arith/Or/And left, App function, body of modal/binder
    FormulaPtr rhs;               // Arith/Or/And right, App argument
    HflTypePtr type;              // Mu/Nu: type of the variable, Lambda: parameter type (null = to infer)
};

namespace fml {
FormulaPtr tt();
FormulaPtr ff();
FormulaPtr integer(const BigInt& v);
FormulaPtr arith(ArithOp op, FormulaPtr a, FormulaPtr b);
FormulaPtr pred(PredOp p, std::vector<FormulaPtr> args);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr var(const std::string& x);
FormulaPtr diamond(const std::string& a, FormulaPtr body);
FormulaPtr box(const std::string& a, FormulaPtr body);
FormulaPtr mu(const std::string& x, HflTypePtr t, FormulaPtr body);
FormulaPtr nu(const std::string& x, HflTypePtr t, FormulaPtr body);
FormulaPtr lam(const std::string& x, HflTypePtr t, FormulaPtr body);
FormulaPtr app(FormulaPtr f, FormulaPtr a);
FormulaPtr apps(FormulaPtr f, const std::vector<FormulaPtr>& args);
// p(args) => body, i.e. not p(args) \/ body
FormulaPtr implies(PredOp p, const std::vector<FormulaPtr>& args, FormulaPtr body);
}  // namespace fml

void spine(const FormulaPtr& f, FormulaPtr& head, std::vector<FormulaPtr>& args);

bool is_fixpoint_free(const Formula& f);
std::set<std::string> free_vars(const Formula& f);
// Capture-avoiding simultaneous substitution.
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, FormulaPtr>& sub);
bool alpha_equal(const Formula& a, const Formula& b);
// Syntactic equality including binder names.
bool equal(const Formula& a, const Formula& b);

using HflEnv = std::map<std::string, HflTypePtr>;
HflTypePtr typecheck_formula(const HflEnv& env, const Formula& f);

FormulaPtr dual_formula(const FormulaPtr& f);

std::string to_string(const Formula& f);
FormulaPtr parse_formula(const std::string& text);

enum class Fix { Mu, Nu };
std::string to_string(Fix f);

struct Equation {
    std::string var;
    std::vector<std::pair<std::string, HflTypePtr>> params;
    Fix fix = Fix::Mu;
    FormulaPtr rhs;  // body under the parameters, type Prop

    HflTypePtr type() const;
    // \params. rhs
    FormulaPtr as_lambda() const;
};

struct Hes {
    std::vector<Equation> equations;
    FormulaPtr main;

    int index_of(const std::string& var) const;
};

// Priority of the i-th equation (0-based): 2(n-1-i), plus one for mu.
int priority(const Hes& h, std::size_t i);

// Environment of equation variables; throws if the system is ill-typed.
HflEnv typecheck_hes(const Hes& h);
FormulaPtr hes_to_formula(const Hes& h);
Hes formula_to_hes(const FormulaPtr& f);
Hes normalize_hes(const Hes& h);
Hes dual_hes(const Hes& h);
bool alpha_equal(const Hes& a, const Hes& b);

enum class Quantifier { Exists, Forall };
FormulaPtr encode_quantifier(Quantifier q, const std::string& x, const FormulaPtr& body, const HflEnv& env = {});

std::string print_hes(const Hes& h);
// Missing parameter and binder types are inferred, defaulting to Prop.
Hes parse_hes(const std::string& text);

}  // namespace hflz
