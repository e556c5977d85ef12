#include "biconf/scalar.hpp"

#include <charconv>
#include <stdexcept>

namespace biconf {

std::string_view mode_name(Mode mode) {
    return mode == Mode::exact ? "exact" : "float";
}

Mode parse_mode(std::string_view name) {
    if (name == "exact") {
        return Mode::exact;
    }
    if (name == "float") {
        return Mode::floating;
    }
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

namespace {

bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    for (char ch : s) {
        if (ch < '0' || ch > '9') {
            return false;
        }
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' || den.front() == '+') {
        throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
    }
    // GMP rejects a leading '+'.
    const std::string n(num.front() == '+' ? num.substr(1) : num);
    mpz_class p(n, 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) {
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& q) {
    return q.get_str(10);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace biconf
