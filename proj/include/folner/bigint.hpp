#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace folner {

// Arbitrary precision throughout: pattern ranks run to tens of kilobits and
// iterated pairing indices outgrow 64 bits already for UT(4,Z) tiles.
using bigint = boost::multiprecision::cpp_int;

// bit length of n >= 0, with bitlen(0) == 1 so that "0" is one binary digit
inline std::size_t bitlen(const bigint& n) {
    if (n == 0) return 1;
    return boost::multiprecision::msb(n) + 1;
}

inline bigint pow2(std::size_t e) {
    return bigint(1) << e;
}

}  // namespace folner
