#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace blockloc {

/// One 4-state logic bit.
enum class Bit : uint8_t { Zero = 0, One = 1, X = 2, Z = 3 };

char bit_char(Bit b);
Bit bit_from_char(char c); // '0' '1' 'x' 'X' 'z' 'Z'

/// Fixed-width 4-state vector. bits[0] is the LSB.
///
/// Operator semantics are pessimistic: an X or Z bit taking part in an
/// operation makes the affected result bits X (0 & X yields X, not 0).
/// Comparisons, arithmetic and shifts with any X/Z input yield all-X.
class SignalValue {
public:
    SignalValue() = default;
    explicit SignalValue(int width, Bit fill = Bit::X) : bits_(width, fill) {}

    static SignalValue from_uint(uint64_t value, int width);
    /// Parse "0b..."/plain binary (MSB first), truncating/zero-extending to width.
    static SignalValue from_bin(const std::string& msb_first, int width);

    int width() const { return static_cast<int>(bits_.size()); }
    Bit bit(int i) const { return bits_[i]; }
    void set_bit(int i, Bit b) { bits_[i] = b; }

    bool has_unknown() const;
    bool is_all_known() const { return !has_unknown(); }

    /// Value as unsigned; only meaningful when fully known and width <= 64.
    uint64_t to_uint() const;

    /// Truth of the vector: One if any bit is 1, Zero if all bits are 0,
    /// X if unknown bits could change the answer.
    Bit truth() const;

    std::string to_bin() const; // MSB first
    std::string to_hex() const; // per-nibble, 'x'/'z' where any bit unknown

    bool operator==(const SignalValue& other) const { return bits_ == other.bits_; }
    bool operator!=(const SignalValue& other) const { return !(*this == other); }

private:
    std::vector<Bit> bits_;
};

// Width rules: bitwise ops extend to the max operand width; comparisons and
// reductions yield width 1; arithmetic wraps at the max operand width.
SignalValue sv_not(const SignalValue& a);
SignalValue sv_and(const SignalValue& a, const SignalValue& b);
SignalValue sv_or(const SignalValue& a, const SignalValue& b);
SignalValue sv_xor(const SignalValue& a, const SignalValue& b);
SignalValue sv_eq(const SignalValue& a, const SignalValue& b);
SignalValue sv_ne(const SignalValue& a, const SignalValue& b);
SignalValue sv_lt(const SignalValue& a, const SignalValue& b); // unsigned
SignalValue sv_le(const SignalValue& a, const SignalValue& b);
SignalValue sv_gt(const SignalValue& a, const SignalValue& b);
SignalValue sv_ge(const SignalValue& a, const SignalValue& b);
SignalValue sv_add(const SignalValue& a, const SignalValue& b);
SignalValue sv_sub(const SignalValue& a, const SignalValue& b);
SignalValue sv_mul(const SignalValue& a, const SignalValue& b);
SignalValue sv_div(const SignalValue& a, const SignalValue& b); // /0 -> all-X
SignalValue sv_mod(const SignalValue& a, const SignalValue& b);
SignalValue sv_shl(const SignalValue& a, const SignalValue& amount);
SignalValue sv_shr(const SignalValue& a, const SignalValue& amount);
SignalValue sv_neg(const SignalValue& a);
SignalValue sv_logical_not(const SignalValue& a);
SignalValue sv_logical_and(const SignalValue& a, const SignalValue& b);
SignalValue sv_logical_or(const SignalValue& a, const SignalValue& b);
SignalValue sv_reduce_and(const SignalValue& a);
SignalValue sv_reduce_or(const SignalValue& a);
SignalValue sv_reduce_xor(const SignalValue& a);
SignalValue sv_concat(const std::vector<SignalValue>& parts); // parts[0] is the MSB side
SignalValue sv_resize(const SignalValue& a, int width);       // zero-extend / truncate
SignalValue sv_select(const SignalValue& a, int msb, int lsb);
/// casez/casex-style match against a literal pattern; mask bit 0 = wildcard.
SignalValue sv_wildcard_eq(const SignalValue& a, const SignalValue& pattern,
                           const std::vector<bool>& care_mask);

} // namespace blockloc
