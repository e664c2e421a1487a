#include "gptsteer/rational.hpp"

#include <cctype>
#include <sstream>

namespace gptsteer {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
        throw StructuralError("malformed rational '" + std::string(text) + "'");
    }
    const boost::multiprecision::mpz_int n(std::string(num[0] == '+' ? num.substr(1) : num));
    const boost::multiprecision::mpz_int d{std::string(den)};
    if (d == 0) throw StructuralError("zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
}

std::string to_string(const Rational& value) {
    std::ostringstream out;
    out << boost::multiprecision::numerator(value) << '/' << boost::multiprecision::denominator(value);
    return out.str();
}

Vector parse_vector(std::string_view text) {
    std::vector<Rational> parts;
    while (true) {
        const auto comma = text.find(',');
        parts.push_back(parse_rational(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parts[i];
    return v;
}

std::string to_string(const Vector& v) {
    std::string out = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += to_string(v(i));
    }
    return out + ")";
}

Vector make_vector(std::initializer_list<Rational> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const auto& x : values) v(i++) = x;
    return v;
}

Vector unit_vector(Eigen::Index size, Eigen::Index index) {
    Vector v = Vector::Zero(size);
    v(index) = 1;
    return v;
}

}  // namespace gptsteer
