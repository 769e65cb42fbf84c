#include "blockloc/fourstate.hpp"

#include <algorithm>
#include <cassert>

namespace blockloc {

namespace {

bool known(Bit b) { return b == Bit::Zero || b == Bit::One; }

int max_width(const SignalValue& a, const SignalValue& b) {
    return std::max(a.width(), b.width());
}

Bit get_ext(const SignalValue& v, int i) {
    return i < v.width() ? v.bit(i) : Bit::Zero;
}

} // namespace

char bit_char(Bit b) {
    switch (b) {
    case Bit::Zero: return '0';
    case Bit::One: return '1';
    case Bit::X: return 'x';
    case Bit::Z: return 'z';
    }
    return 'x';
}

Bit bit_from_char(char c) {
    switch (c) {
    case '0': return Bit::Zero;
    case '1': return Bit::One;
    case 'z':
    case 'Z': return Bit::Z;
    default: return Bit::X;
    }
}

SignalValue SignalValue::from_uint(uint64_t value, int width) {
    SignalValue v(width, Bit::Zero);
    for (int i = 0; i < width && i < 64; ++i)
        v.bits_[i] = ((value >> i) & 1) ? Bit::One : Bit::Zero;
    return v;
}

SignalValue SignalValue::from_bin(const std::string& msb_first, int width) {
    SignalValue v(width, Bit::Zero);
    int n = static_cast<int>(msb_first.size());
    for (int i = 0; i < width; ++i) {
        int src = n - 1 - i;
        if (src >= 0)
            v.bits_[i] = bit_from_char(msb_first[src]);
    }
    // VCD-style padding: leading x/z extends as x/z.
    if (n > 0 && width > n) {
        Bit top = bit_from_char(msb_first[0]);
        if (top == Bit::X || top == Bit::Z)
            for (int i = n; i < width; ++i) v.bits_[i] = top;
    }
    return v;
}

bool SignalValue::has_unknown() const {
    return std::any_of(bits_.begin(), bits_.end(), [](Bit b) { return !known(b); });
}

uint64_t SignalValue::to_uint() const {
    uint64_t out = 0;
    for (int i = 0; i < width() && i < 64; ++i)
        if (bits_[i] == Bit::One) out |= (uint64_t{1} << i);
    return out;
}

Bit SignalValue::truth() const {
    bool any_unknown = false;
    for (Bit b : bits_) {
        if (b == Bit::One) return Bit::One;
        if (!known(b)) any_unknown = true;
    }
    return any_unknown ? Bit::X : Bit::Zero;
}

std::string SignalValue::to_bin() const {
    std::string out;
    out.reserve(bits_.size());
    for (int i = width() - 1; i >= 0; --i) out.push_back(bit_char(bits_[i]));
    return out.empty() ? "0" : out;
}

std::string SignalValue::to_hex() const {
    std::string out;
    for (int nib = (width() + 3) / 4 - 1; nib >= 0; --nib) {
        int val = 0;
        bool unknown = false;
        bool all_z = true;
        for (int k = 3; k >= 0; --k) {
            int i = nib * 4 + k;
            Bit b = i < width() ? bits_[i] : Bit::Zero;
            if (b != Bit::Z) all_z = false;
            if (!known(b)) unknown = true;
            val = (val << 1) | (b == Bit::One ? 1 : 0);
        }
        if (unknown)
            out.push_back(all_z ? 'z' : 'x');
        else
            out.push_back("0123456789abcdef"[val]);
    }
    return out.empty() ? "0" : out;
}

namespace {

SignalValue bitwise(const SignalValue& a, const SignalValue& b, Bit (*op)(Bit, Bit)) {
    int w = max_width(a, b);
    SignalValue out(w);
    for (int i = 0; i < w; ++i) out.set_bit(i, op(get_ext(a, i), get_ext(b, i)));
    return out;
}

Bit bit_and(Bit a, Bit b) {
    if (!known(a) || !known(b)) return Bit::X;
    return (a == Bit::One && b == Bit::One) ? Bit::One : Bit::Zero;
}
Bit bit_or(Bit a, Bit b) {
    if (!known(a) || !known(b)) return Bit::X;
    return (a == Bit::One || b == Bit::One) ? Bit::One : Bit::Zero;
}
Bit bit_xor(Bit a, Bit b) {
    if (!known(a) || !known(b)) return Bit::X;
    return (a != b) ? Bit::One : Bit::Zero;
}

SignalValue bool_result(Bit b) {
    SignalValue v(1);
    v.set_bit(0, b);
    return v;
}

} // namespace

SignalValue sv_not(const SignalValue& a) {
    SignalValue out(a.width());
    for (int i = 0; i < a.width(); ++i) {
        Bit b = a.bit(i);
        out.set_bit(i, known(b) ? (b == Bit::One ? Bit::Zero : Bit::One) : Bit::X);
    }
    return out;
}

SignalValue sv_and(const SignalValue& a, const SignalValue& b) { return bitwise(a, b, bit_and); }
SignalValue sv_or(const SignalValue& a, const SignalValue& b) { return bitwise(a, b, bit_or); }
SignalValue sv_xor(const SignalValue& a, const SignalValue& b) { return bitwise(a, b, bit_xor); }

SignalValue sv_eq(const SignalValue& a, const SignalValue& b) {
    if (a.has_unknown() || b.has_unknown()) return bool_result(Bit::X);
    int w = max_width(a, b);
    for (int i = 0; i < w; ++i)
        if (get_ext(a, i) != get_ext(b, i)) return bool_result(Bit::Zero);
    return bool_result(Bit::One);
}

SignalValue sv_ne(const SignalValue& a, const SignalValue& b) {
    SignalValue eq = sv_eq(a, b);
    return known(eq.bit(0)) ? sv_logical_not(eq) : eq;
}

namespace {

// -1 a<b, 0 equal, 1 a>b; 2 when unknown
int cmp_unsigned(const SignalValue& a, const SignalValue& b) {
    if (a.has_unknown() || b.has_unknown()) return 2;
    int w = max_width(a, b);
    for (int i = w - 1; i >= 0; --i) {
        Bit x = get_ext(a, i), y = get_ext(b, i);
        if (x != y) return x == Bit::One ? 1 : -1;
    }
    return 0;
}

} // namespace

SignalValue sv_lt(const SignalValue& a, const SignalValue& b) {
    int c = cmp_unsigned(a, b);
    return bool_result(c == 2 ? Bit::X : (c < 0 ? Bit::One : Bit::Zero));
}
SignalValue sv_le(const SignalValue& a, const SignalValue& b) {
    int c = cmp_unsigned(a, b);
    return bool_result(c == 2 ? Bit::X : (c <= 0 ? Bit::One : Bit::Zero));
}
SignalValue sv_gt(const SignalValue& a, const SignalValue& b) {
    int c = cmp_unsigned(a, b);
    return bool_result(c == 2 ? Bit::X : (c > 0 ? Bit::One : Bit::Zero));
}
SignalValue sv_ge(const SignalValue& a, const SignalValue& b) {
    int c = cmp_unsigned(a, b);
    return bool_result(c == 2 ? Bit::X : (c >= 0 ? Bit::One : Bit::Zero));
}

namespace {

SignalValue arith(const SignalValue& a, const SignalValue& b,
                  uint64_t (*op)(uint64_t, uint64_t, bool&)) {
    int w = max_width(a, b);
    if (a.has_unknown() || b.has_unknown()) return SignalValue(w, Bit::X);
    if (w <= 64) {
        bool invalid = false;
        uint64_t r = op(a.to_uint(), b.to_uint(), invalid);
        if (invalid) return SignalValue(w, Bit::X);
        return SignalValue::from_uint(w < 64 ? (r & ((uint64_t{1} << w) - 1)) : r, w);
    }
    // Wide arithmetic: bit-serial add/sub only; wider mul/div is out of scope
    // for the supported designs.
    SignalValue out(w, Bit::X);
    return out;
}

} // namespace

SignalValue sv_add(const SignalValue& a, const SignalValue& b) {
    return arith(a, b, [](uint64_t x, uint64_t y, bool&) { return x + y; });
}
SignalValue sv_sub(const SignalValue& a, const SignalValue& b) {
    return arith(a, b, [](uint64_t x, uint64_t y, bool&) { return x - y; });
}
SignalValue sv_mul(const SignalValue& a, const SignalValue& b) {
    return arith(a, b, [](uint64_t x, uint64_t y, bool&) { return x * y; });
}
SignalValue sv_div(const SignalValue& a, const SignalValue& b) {
    return arith(a, b, [](uint64_t x, uint64_t y, bool& invalid) -> uint64_t {
        if (y == 0) { invalid = true; return 0; }
        return x / y;
    });
}
SignalValue sv_mod(const SignalValue& a, const SignalValue& b) {
    return arith(a, b, [](uint64_t x, uint64_t y, bool& invalid) -> uint64_t {
        if (y == 0) { invalid = true; return 0; }
        return x % y;
    });
}

SignalValue sv_shl(const SignalValue& a, const SignalValue& amount) {
    if (a.has_unknown() || amount.has_unknown()) return SignalValue(a.width(), Bit::X);
    uint64_t n = amount.to_uint();
    SignalValue out(a.width(), Bit::Zero);
    for (int i = 0; i < a.width(); ++i) {
        int64_t src = static_cast<int64_t>(i) - static_cast<int64_t>(n);
        if (src >= 0 && src < a.width()) out.set_bit(i, a.bit(static_cast<int>(src)));
    }
    return out;
}

SignalValue sv_shr(const SignalValue& a, const SignalValue& amount) {
    if (a.has_unknown() || amount.has_unknown()) return SignalValue(a.width(), Bit::X);
    uint64_t n = amount.to_uint();
    SignalValue out(a.width(), Bit::Zero);
    for (int i = 0; i < a.width(); ++i) {
        uint64_t src = static_cast<uint64_t>(i) + n;
        if (src < static_cast<uint64_t>(a.width())) out.set_bit(i, a.bit(static_cast<int>(src)));
    }
    return out;
}

SignalValue sv_neg(const SignalValue& a) {
    return sv_sub(SignalValue::from_uint(0, a.width()), a);
}

SignalValue sv_logical_not(const SignalValue& a) {
    Bit t = a.truth();
    if (!known(t)) return bool_result(Bit::X);
    return bool_result(t == Bit::One ? Bit::Zero : Bit::One);
}

SignalValue sv_logical_and(const SignalValue& a, const SignalValue& b) {
    return bool_result(bit_and(a.truth(), b.truth()));
}

SignalValue sv_logical_or(const SignalValue& a, const SignalValue& b) {
    return bool_result(bit_or(a.truth(), b.truth()));
}

SignalValue sv_reduce_and(const SignalValue& a) {
    Bit acc = Bit::One;
    for (int i = 0; i < a.width(); ++i) acc = bit_and(acc, a.bit(i));
    return bool_result(acc);
}

SignalValue sv_reduce_or(const SignalValue& a) {
    Bit acc = Bit::Zero;
    for (int i = 0; i < a.width(); ++i) acc = bit_or(acc, a.bit(i));
    return bool_result(acc);
}

SignalValue sv_reduce_xor(const SignalValue& a) {
    Bit acc = Bit::Zero;
    for (int i = 0; i < a.width(); ++i) acc = bit_xor(acc, a.bit(i));
    return bool_result(acc);
}

SignalValue sv_concat(const std::vector<SignalValue>& parts) {
    int total = 0;
    for (const auto& p : parts) total += p.width();
    SignalValue out(total, Bit::Zero);
    int pos = 0; // filling from LSB: last part first
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        for (int i = 0; i < it->width(); ++i) out.set_bit(pos + i, it->bit(i));
        pos += it->width();
    }
    return out;
}

SignalValue sv_resize(const SignalValue& a, int width) {
    SignalValue out(width, Bit::Zero);
    for (int i = 0; i < width && i < a.width(); ++i) out.set_bit(i, a.bit(i));
    return out;
}

SignalValue sv_select(const SignalValue& a, int msb, int lsb) {
    assert(msb >= lsb);
    SignalValue out(msb - lsb + 1, Bit::X);
    for (int i = lsb; i <= msb; ++i)
        out.set_bit(i - lsb, (i >= 0 && i < a.width()) ? a.bit(i) : Bit::X);
    return out;
}

SignalValue sv_wildcard_eq(const SignalValue& a, const SignalValue& pattern,
                           const std::vector<bool>& care_mask) {
    int w = pattern.width();
    bool unknown = false;
    for (int i = 0; i < w; ++i) {
        if (!care_mask[i]) continue;
        Bit x = get_ext(a, i);
        Bit p = pattern.bit(i);
        if (!known(x)) { unknown = true; continue; }
        if (x != p) return sv_logical_not(SignalValue::from_uint(1, 1)); // 0
    }
    if (unknown) {
        SignalValue v(1);
        v.set_bit(0, Bit::X);
        return v;
    }
    return SignalValue::from_uint(1, 1);
}

} // namespace blockloc
