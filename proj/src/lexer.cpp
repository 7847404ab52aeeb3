#include "lexer.hpp"

#include <algorithm>
#include <cctype>

namespace hflz::detail {

std::vector<Token> tokenize(const std::string& text, const std::vector<std::string>& symbols_in)
{
    std::vector<std::string> symbols = symbols_in;
    std::sort(symbols.begin(), symbols.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '(' && i + 1 < text.size() && text[i + 1] == '*') {
            SourcePos start{line, col};
            int depth = 0;
            while (i < text.size()) {
                if (text.compare(i, 2, "(*") == 0) {
                    ++depth;
                    advance(2);
                } else if (text.compare(i, 2, "*)") == 0) {
                    --depth;
                    advance(2);
                    if (depth == 0) break;
                } else {
                    advance(1);
                }
            }
            if (depth != 0) fail(ErrorKind::Syntax, "syntax error at " + describe(start) + ": unterminated comment");
            continue;
        }
        SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\''))
                ++j;
            out.push_back({Token::Kind::Ident, text.substr(i, j - i), pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({Token::Kind::Int, text.substr(i, j - i), pos});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (const auto& s : symbols) {
            if (text.compare(i, s.size(), s) == 0) {
                out.push_back({Token::Kind::Symbol, s, pos});
                advance(s.size());
                matched = true;
                break;
            }
        }
        if (!matched)
            fail(ErrorKind::Syntax, "syntax error at " + describe(pos) + ": unexpected character '" +
                                        std::string(1, c) + "'");
    }
    out.push_back({Token::Kind::End, "", {line, col}});
    return out;
}

}  // namespace hflz::detail
