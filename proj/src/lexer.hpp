#pragma once

#include "hflz/common.hpp"

#include <string>
#include <vector>

namespace hflz::detail {

struct Token {
    enum class Kind { Ident, Int, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    SourcePos pos;
};

// Tokenizer shared by the program, formula and automaton readers.
// `symbols` lists punctuation, longest first wins.
std::vector<Token> tokenize(const std::string& text, const std::vector<std::string>& symbols);

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t k = 0) const
    {
        std::size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    Token next()
    {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool is(const std::string& sym, std::size_t k = 0) const
    {
        const Token& t = peek(k);
        return (t.kind == Token::Kind::Symbol || t.kind == Token::Kind::Ident) && t.text == sym;
    }
    bool is_symbol(const std::string& sym, std::size_t k = 0) const
    {
        const Token& t = peek(k);
        return t.kind == Token::Kind::Symbol && t.text == sym;
    }
    bool accept(const std::string& sym)
    {
        if (!is(sym)) return false;
        next();
        return true;
    }
    Token expect(const std::string& sym)
    {
        if (!is(sym)) error("expected '" + sym + "'");
        return next();
    }
    Token expect_ident()
    {
        if (peek().kind != Token::Kind::Ident) error("expected identifier");
        return next();
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    std::size_t mark() const { return pos_; }
    void reset(std::size_t m) { pos_ = m; }

    [[noreturn]] void error(const std::string& msg) const
    {
        const Token& t = peek();
        std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        fail(ErrorKind::Syntax, "syntax error at " + describe(t.pos) + ": " + msg + ", found " + found);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace hflz::detail
