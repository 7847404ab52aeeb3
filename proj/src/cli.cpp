#include "hflz/cli.hpp"

#include "hflz/checker.hpp"
#include "hflz/intertype.hpp"
#include "hflz/opsem.hpp"
#include "hflz/translate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hflz {

namespace {

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool stdin_used = false;

    std::string read(const std::string& path)
    {
        if (path == "-") {
            if (stdin_used) fail(ErrorKind::Usage, "standard input can be read only once");
            stdin_used = true;
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
        std::ifstream f(path);
        if (!f) fail(ErrorKind::Usage, "cannot open '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    void emit(const std::string& text, const std::string& out_path)
    {
        if (out_path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(out_path);
        if (!f) fail(ErrorKind::Usage, "cannot write '" + out_path + "'");
        f << text;
    }
};

int exit_code(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Valid: return kExitValid;
    case Verdict::Kind::Invalid: return kExitInvalid;
    case Verdict::Kind::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

Program load_program(Io& io, const std::string& path)
{
    Program p = normalize_program(parse_program(io.read(path)));
    typecheck_program(p);
    return p;
}

struct TranslateOpts {
    std::string mode;
    std::string event;
    std::string automaton;
    std::string priorities;
    std::string total;
    bool canonical = false;
};

void add_translate_options(CLI::App* cmd, TranslateOpts& o)
{
    cmd->add_option("--mode", o.mode, "may, must, path, csa or temporal")
        ->required()
        ->check(CLI::IsMember({"may", "must", "path", "csa", "temporal"}));
    cmd->add_option("--event", o.event, "watched event (may, must)");
    cmd->add_option("--automaton", o.automaton, "deterministic automaton (path) or parity automaton (temporal)");
    cmd->add_option("--priorities", o.priorities, "priority file, lines '<function> <n>' (csa)");
    cmd->add_option("--total", o.total, "make the program total with this event before the temporal reduction");
    cmd->add_flag("--canonical", o.canonical, "temporal: keep every canonical copy");
}

struct Prepared {
    Program program;
    ParityAutomaton automaton;
};

Prepared prepare_temporal(Io& io, const Program& p, const TranslateOpts& o)
{
    if (o.automaton.empty()) fail(ErrorKind::Usage, "--mode temporal needs --automaton");
    Prepared r{p, parse_parity_automaton(io.read(o.automaton))};
    if (!o.total.empty()) {
        r.program = instrument_total(p, o.total);
        r.automaton = ignore_event(r.automaton, o.total);
    }
    return r;
}

Hes translate(Io& io, const Program& p, const TranslateOpts& o)
{
    if (o.mode == "may" || o.mode == "must") {
        if (o.event.empty()) fail(ErrorKind::Usage, "--mode " + o.mode + " needs --event");
        return o.mode == "may" ? translate_may(p, o.event) : translate_must(p, o.event);
    }
    if (o.mode == "path") {
        if (!o.automaton.empty())
            for (const auto& w : validate_det_automaton(parse_det_automaton(io.read(o.automaton))))
                io.err << "warning: " << w << '\n';
        return translate_path(p);
    }
    if (o.mode == "csa") {
        if (o.priorities.empty()) fail(ErrorKind::Usage, "--mode csa needs --priorities");
        return translate_csa(p, parse_priorities(io.read(o.priorities)));
    }
    Prepared t = prepare_temporal(io, p, o);
    return temporal_pipeline(t.program, t.automaton, {o.canonical});
}

struct CheckOpts {
    std::string backend = "game";
    std::size_t budget = kDefaultBudget;
    std::string dump;
};

void add_check_options(CLI::App* cmd, CheckOpts& o)
{
    cmd->add_option("--backend", o.backend, "game, denotational or both")
        ->check(CLI::IsMember({"game", "denotational", "both"}))
        ->capture_default_str();
    cmd->add_option("--budget", o.budget, "game node budget")->capture_default_str();
    cmd->add_option("--dump-game", o.dump, "write the game as an edge list");
}

std::string state_set(const Lts& l, const std::set<StateId>& s)
{
    std::string out = "{";
    for (StateId q : s) out += (out.size() > 1 ? ", " : "") + l.names[q];
    return out + "}";
}

int run_check(Io& io, const Lts& lts, const Hes& h, const CheckOpts& o)
{
    typecheck_hes(h);
    if (!o.dump.empty()) {
        GroundGame gg = ground_game(lts, h, o.budget);
        std::ofstream f(o.dump);
        if (!f) fail(ErrorKind::Usage, "cannot write '" + o.dump + "'");
        f << print_game(gg.game);
    }
    Verdict v;
    if (o.backend == "game") {
        v = eval_hflz(lts, h, o.budget);
    } else {
        std::set<StateId> sat;
        try {
            sat = denotational_check(lts, h);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Budget) throw;
            io.err << "denotational: " << e.what() << '\n';
            v.reason = "budget";
        }
        if (v.reason.empty()) {
            io.out << "states " << state_set(lts, sat) << '\n';
            v.kind = sat.count(lts.init) ? Verdict::Kind::Valid : Verdict::Kind::Invalid;
        }
        if (o.backend == "both") {
            Verdict g = eval_hflz(lts, h, o.budget);
            io.out << "game " << to_string(g.kind) << '\n';
            if (v.reason.empty() && g.kind != Verdict::Kind::Unknown && g.kind != v.kind)
                fail(ErrorKind::Semantic, "backends disagree");
            if (!v.reason.empty()) v = g;
        }
    }
    io.out << to_string(v.kind);
    if (v.kind == Verdict::Kind::Unknown && !v.reason.empty()) io.out << " (" << v.reason << ')';
    io.out << "\nRESULT " << to_string(v.kind) << '\n';
    return exit_code(v.kind);
}

std::string typing_report(const Program& p)
{
    TypeEnv env = typecheck_program(p);
    std::ostringstream os;
    for (const auto& d : p.defs) os << d.name << " : " << to_string(*env.at(d.name)) << '\n';
    return os.str();
}

std::string typing_report(const Hes& h)
{
    HflEnv env = typecheck_hes(h);
    std::ostringstream os;
    for (const auto& e : h.equations) os << e.var << " : " << to_string(*env.at(e.var)) << '\n';
    return os.str();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    Io io{in, out, err};
    CLI::App app{"Reductions from program verification to higher-order fixpoint logic model checking", "hflz"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string file, file2, out_path;
    bool as_hes = false;

    auto* parse = app.add_subcommand("parse", "Parse and pretty-print a program (or an HES with --hes)");
    parse->add_option("file", file)->required();
    parse->add_flag("--hes", as_hes, "input is an HES");
    parse->add_option("--out", out_path);

    auto* typecheck = app.add_subcommand("typecheck", "Infer simple types");
    typecheck->add_option("file", file)->required();
    typecheck->add_flag("--hes", as_hes, "input is an HES");

    int steps = 10000;
    std::string choices;
    auto* run = app.add_subcommand("run", "Reduce main, resolving <> by a choice string of L and R");
    run->add_option("file", file)->required();
    run->add_option("--choices", choices, "e.g. LRR");
    run->add_option("--steps", steps, "reduction step bound")->capture_default_str();

    int depth = 20;
    auto* traces = app.add_subcommand("traces", "Enumerate event traces up to a number of reduction steps");
    traces->add_option("file", file)->required();
    traces->add_option("--depth", depth)->capture_default_str();

    TranslateOpts topts;
    std::string emit = "hes";
    auto* translate_cmd = app.add_subcommand("translate", "Translate a program to an HES");
    translate_cmd->add_option("file", file)->required();
    add_translate_options(translate_cmd, topts);
    translate_cmd->add_option("--emit", emit, "temporal: hes, program or priorities")
        ->check(CLI::IsMember({"hes", "program", "priorities"}))
        ->capture_default_str();
    translate_cmd->add_option("--out", out_path);

    CheckOpts copts;
    auto* check = app.add_subcommand("check", "Model-check an HES against an LTS");
    check->add_option("lts", file, "LTS file")->required();
    check->add_option("hes", file2, "HES file")->required();
    add_check_options(check, copts);

    TranslateOpts vopts;
    CheckOpts vcopts;
    auto* verify = app.add_subcommand("verify", "Translate a program and check the result");
    verify->add_option("file", file)->required();
    add_translate_options(verify, vopts);
    add_check_options(verify, vcopts);

    auto* dual = app.add_subcommand("dual", "Print the De Morgan dual of an HES");
    dual->add_option("file", file)->required();
    dual->add_option("--out", out_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitValid : kExitError;
    }

    try {
        if (parse->parsed()) {
            std::string text = io.read(file);
            io.emit(as_hes ? print_hes(parse_hes(text)) : print_program(parse_program(text)), out_path);
        } else if (typecheck->parsed()) {
            std::string text = io.read(file);
            out << (as_hes ? typing_report(parse_hes(text)) : typing_report(normalize_program(parse_program(text))));
        } else if (run->parsed()) {
            Program p = load_program(io, file);
            std::vector<Choice> pi;
            for (char c : choices) {
                if (c != 'L' && c != 'R') fail(ErrorKind::Usage, "choices are L and R");
                pi.push_back(c == 'L' ? Choice::L : Choice::R);
            }
            ChoiceRun r = reduce_with_choice(p, term::var(p.main), pi, steps);
            out << "trace " << trace_to_string(r.events) << '\n';
            out << "steps " << r.steps << '\n';
            switch (r.status) {
            case ChoiceRun::Status::NormalForm: out << "status normal-form\n"; break;
            case ChoiceRun::Status::Exhausted: out << "status choices-exhausted\n"; break;
            case ChoiceRun::Status::StepBound: out << "status step-bound\n"; break;
            }
        } else if (traces->parsed()) {
            Program p = load_program(io, file);
            TraceSet ts = enumerate_traces(p, depth);
            for (const auto& t : ts.finite) out << trace_to_string(t) << (ts.maximal.count(t) ? " ." : "") << '\n';
        } else if (translate_cmd->parsed()) {
            Program p = load_program(io, file);
            if (emit != "hes" && topts.mode != "temporal")
                fail(ErrorKind::Usage, "--emit " + emit + " applies to --mode temporal only");
            if (emit == "hes") {
                io.emit(print_hes(translate(io, p, topts)), out_path);
            } else {
                Prepared t = prepare_temporal(io, p, topts);
                InterResult r = infer_intersection_transform(t.program, t.automaton, {topts.canonical});
                io.emit(emit == "program" ? print_program(r.program) : print_priorities(r.omega), out_path);
            }
        } else if (check->parsed()) {
            Lts lts = parse_lts(io.read(file));
            Hes h = parse_hes(io.read(file2));
            return run_check(io, lts, h, copts);
        } else if (verify->parsed()) {
            Program p = load_program(io, file);
            Lts lts = trivial_lts();
            if (vopts.mode == "path") {
                if (vopts.automaton.empty()) fail(ErrorKind::Usage, "--mode path needs --automaton");
                lts = det_automaton_to_lts(parse_det_automaton(io.read(vopts.automaton)));
                vopts.automaton.clear();
            }
            return run_check(io, lts, translate(io, p, vopts), vcopts);
        } else if (dual->parsed()) {
            io.emit(print_hes(dual_hes(parse_hes(io.read(file)))), out_path);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitValid;
}

}  // namespace hflz
