#pragma once

#include <cctype>
#include <sstream>
#include <string>

#include "qseries/etaq.hpp"

namespace qseries {

// Text grammar for eta expressions:
//
//   expr   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := rational | 'q^(' integer '/24)' | 'eta(' level ')' ['^' integer]
//
// e.g.  "8 * q^(-12/24) * eta(4)^11 * eta(12)^5 * eta(2)^-5".
// Whitespace is insignificant.  Formatting emits exactly this shape.

inline std::string format_eta_quotient(const EtaQuotient& q) {
    std::ostringstream os;
    bool emitted = false;
    if (q.scalar != 1 || (q.qshift == 0 && q.levels.empty())) {
        os << q.scalar.get_str();
        emitted = true;
    }
    if (q.qshift != 0) {
        if (emitted) os << " * ";
        os << "q^(" << q.qshift << "/24)";
        emitted = true;
    }
    for (const auto& [t, r] : q.levels) {
        if (emitted) os << " * ";
        os << "eta(" << t << ")";
        if (r != 1) os << "^" << r;
        emitted = true;
    }
    return os.str();
}

inline std::string format_eta_expression(const EtaExpression& e) {
    if (e.terms.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
        if (i > 0) out += " + ";
        out += format_eta_quotient(e.terms[i]);
    }
    return out;
}

namespace detail {

class EtaParser {
  public:
    explicit EtaParser(std::string text) : text_(std::move(text)) {}

    EtaExpression parse() {
        EtaExpression expr;
        expr.terms.push_back(parse_term());
        skip_ws();
        while (peek() == '+') {
            ++pos_;
            expr.terms.push_back(parse_term());
            skip_ws();
        }
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return expr;
    }

  private:
    EtaQuotient parse_term() {
        EtaQuotient q;
        parse_factor(q);
        skip_ws();
        while (peek() == '*') {
            ++pos_;
            parse_factor(q);
            skip_ws();
        }
        q.normalize();
        return q;
    }

    void parse_factor(EtaQuotient& q) {
        skip_ws();
        if (match_keyword("eta(")) {
            const long long level = parse_integer();
            expect(')');
            long long exp = 1;
            if (peek() == '^') {
                ++pos_;
                exp = parse_integer();
            }
            if (level <= 0) fail("eta level must be positive");
            q.levels[level] += exp;
            return;
        }
        if (match_keyword("q^(")) {
            const long long num = parse_integer();
            expect('/');
            if (!match_keyword("24")) fail("q-power denominator must be 24");
            expect(')');
            q.qshift += num;
            return;
        }
        // rational scalar: [-]digits[/digits]
        const std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        if (!std::isdigit(peek())) fail("expected a factor (rational, q^(p/24), or eta(t)^r)");
        while (std::isdigit(peek())) ++pos_;
        if (peek() == '/') {
            ++pos_;
            if (!std::isdigit(peek())) fail("expected denominator digits");
            while (std::isdigit(peek())) ++pos_;
        }
        q.scalar *= rat_from_string(text_.substr(start, pos_ - start));
    }

    long long parse_integer() {
        skip_ws();
        const std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        if (!std::isdigit(peek())) fail("expected an integer");
        while (std::isdigit(peek())) ++pos_;
        return std::stoll(text_.substr(start, pos_ - start));
    }

    bool match_keyword(const std::string& kw) {
        skip_ws();
        if (text_.compare(pos_, kw.size(), kw) == 0) {
            pos_ += kw.size();
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw support_error("eta expression parse error at position " + std::to_string(pos_) +
                            ": " + msg);
    }

    std::string text_;
    std::size_t pos_{0};
};

} // namespace detail

inline EtaExpression parse_eta_expression(const std::string& text) {
    return detail::EtaParser(text).parse();
}

} // namespace qseries
