#include "sparselab/dyadic_rational.hpp"

#include "sparselab/errors.hpp"

#include <cmath>

namespace sparselab {

namespace {

using u128 = unsigned __int128;

// Aligns both numerators to the larger shift; values stay below 2^127 for all
// grids the library accepts (shift <= 63).
std::pair<u128, u128> aligned(const DyadicRational& a, const DyadicRational& b) {
    const unsigned s = a.shift() > b.shift() ? a.shift() : b.shift();
    return {static_cast<u128>(a.numerator()) << (s - a.shift()),
            static_cast<u128>(b.numerator()) << (s - b.shift())};
}

} // namespace

DyadicRational::DyadicRational(std::uint64_t num, unsigned shift) : num_(num), shift_(shift) {
    if (shift > 63) throw InvalidInput("dyadic rational shift exceeds 63");
    normalize();
}

void DyadicRational::normalize() {
    if (num_ == 0) {
        shift_ = 0;
        return;
    }
    while (shift_ > 0 && (num_ & 1u) == 0) {
        num_ >>= 1;
        --shift_;
    }
}

double DyadicRational::to_double() const noexcept {
    return std::ldexp(static_cast<double>(num_), -static_cast<int>(shift_));
}

std::string DyadicRational::to_string() const {
    if (shift_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::uint64_t{1} << shift_);
}

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    const unsigned s = a.shift_ > b.shift_ ? a.shift_ : b.shift_;
    auto [x, y] = aligned(a, b);
    u128 sum = x + y;
    unsigned shift = s;
    while (shift > 0 && (sum & 1u) == 0) {
        sum >>= 1;
        --shift;
    }
    if (sum >> 64) throw InvalidInput("dyadic rational overflow");
    return {static_cast<std::uint64_t>(sum), shift};
}

DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
    u128 prod = static_cast<u128>(a.num_) * b.num_;
    unsigned shift = a.shift_ + b.shift_;
    while (shift > 0 && (prod & 1u) == 0) {
        prod >>= 1;
        --shift;
    }
    if ((prod >> 64) || shift > 63) throw InvalidInput("dyadic rational overflow");
    return {static_cast<std::uint64_t>(prod), shift};
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    auto [x, y] = aligned(a, b);
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

} // namespace sparselab
