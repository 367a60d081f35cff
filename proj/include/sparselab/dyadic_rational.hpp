#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace sparselab {

/// Nonnegative dyadic rational num / 2^shift, kept in lowest terms.
///
/// Every measure and measure ratio on the finite tree is of this form, so the
/// sparseness and decay audits compare them exactly.
class DyadicRational {
public:
    constexpr DyadicRational() = default;
    DyadicRational(std::uint64_t num, unsigned shift);

    static DyadicRational one() { return {1, 0}; }
    static DyadicRational half() { return {1, 1}; }
    static DyadicRational pow2_neg(unsigned k) { return {1, k}; }

    std::uint64_t numerator() const noexcept { return num_; }
    unsigned shift() const noexcept { return shift_; }
    double to_double() const noexcept;
    std::string to_string() const;

    friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b);
    friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b);
    friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);
    friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
        return a.num_ == b.num_ && a.shift_ == b.shift_;
    }

private:
    void normalize();

    std::uint64_t num_ = 0;
    unsigned shift_ = 0;
};

} // namespace sparselab
