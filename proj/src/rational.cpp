#include "sparre/rational.hpp"

#include <stdexcept>

namespace sparre {

Rational rational_parse(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::runtime_error("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::runtime_error("rational_parse: cannot parse '" + text + "'");
    }
}

}  // namespace sparre
