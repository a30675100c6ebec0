#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "errors.hpp"

namespace exhom {

using Rational = boost::multiprecision::cpp_rational;

// Parse "p/q" or "p" (arbitrary precision, q > 0 after normalization).
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) fail(errc::schema, "empty rational literal");
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        boost::multiprecision::cpp_int num(s.substr(0, slash));
        boost::multiprecision::cpp_int den(s.substr(slash + 1));
        if (den == 0) fail(errc::schema, "zero denominator in rational literal '" + s + "'");
        return Rational(num, den);
    } catch (const error&) {
        throw;
    } catch (const std::exception&) {
        fail(errc::schema, "bad rational literal '" + s + "'");
    }
}

// Serialize as "p/q", "/q" omitted when q = 1.
inline std::string rational_str(const Rational& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) out += "/" + denominator(r).str();
    return out;
}

}  // namespace exhom
