#include "zpdyn/padic.hpp"

#include <limits>
#include <sstream>

namespace zpdyn {

bool is_prime(u64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (u64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

Prime::Prime(int p) : v(p) {
    if (p < 2 || !is_prime(static_cast<u64>(p)))
        throw precondition_error("p must be a prime >= 2, got " + std::to_string(p));
}

u64 pow_u64(int p, int e) {
    if (e < 0) throw precondition_error("negative exponent");
    u64 r = 1;
    const u64 lim = u64(1) << 63;
    for (int i = 0; i < e; ++i) {
        if (r >= lim / static_cast<u64>(p))
            throw precondition_error("p^" + std::to_string(e) + " does not fit in 64 bits");
        r *= static_cast<u64>(p);
    }
    return r;
}

int max_mod_exp(int p) {
    const u64 lim = u64(1) << 31;
    u64 r = 1;
    int m = 0;
    while (r < lim / static_cast<u64>(p)) {
        r *= static_cast<u64>(p);
        ++m;
    }
    return m;
}

int digit_of(u64 value, int k, int p) {
    for (int i = 0; i < k; ++i) value /= static_cast<u64>(p);
    return static_cast<int>(value % static_cast<u64>(p));
}

PadicInt::PadicInt(Prime p, int precision) : p_(p.v) {
    if (precision < 1) throw precondition_error("precision must be >= 1");
    d_.assign(static_cast<size_t>(precision), 0);
}

PadicInt PadicInt::from_integer(i64 v, Prime p, int precision) {
    PadicInt r(p, precision);
    // Digit-by-digit Euclidean steps; works for negative v without ever
    // needing p^N as an integer.
    for (int i = 0; i < precision; ++i) {
        i64 d = v % p.v;
        if (d < 0) d += p.v;
        r.d_[static_cast<size_t>(i)] = static_cast<int>(d);
        v = (v - d) / p.v;
    }
    return r;
}

PadicInt PadicInt::from_digits(Prime p, std::vector<int> digits) {
    if (digits.empty()) throw precondition_error("precision must be >= 1");
    for (int d : digits)
        if (d < 0 || d >= p.v)
            throw precondition_error("digit " + std::to_string(d) + " out of range for base " +
                                     std::to_string(p.v));
    PadicInt r(p, static_cast<int>(digits.size()));
    r.d_ = std::move(digits);
    return r;
}

int PadicInt::digit(int i) const {
    if (i < 0 || i >= precision()) throw precondition_error("digit index out of range");
    return d_[static_cast<size_t>(i)];
}

void PadicInt::check_same_shape(const PadicInt& o) const {
    if (p_ != o.p_)
        throw precondition_error("operands live in different Z_p (p=" + std::to_string(p_) +
                                 " vs p=" + std::to_string(o.p_) + ")");
    if (precision() != o.precision())
        throw precondition_error("mixed precision: " + std::to_string(precision()) + " vs " +
                                 std::to_string(o.precision()) + " digits");
}

PadicInt PadicInt::add(const PadicInt& o) const {
    check_same_shape(o);
    PadicInt r(Prime(p_), precision());
    int carry = 0;
    for (int i = 0; i < precision(); ++i) {
        int s = d_[static_cast<size_t>(i)] + o.d_[static_cast<size_t>(i)] + carry;
        carry = s >= p_ ? 1 : 0;
        r.d_[static_cast<size_t>(i)] = s % p_;
    }
    return r; // carry out of digit N-1 is truncated: arithmetic mod p^N
}

PadicInt PadicInt::neg() const {
    PadicInt r(Prime(p_), precision());
    // p's complement: find the lowest nonzero digit, then flip the rest.
    int i = 0;
    while (i < precision() && d_[static_cast<size_t>(i)] == 0) ++i;
    if (i == precision()) return r;
    r.d_[static_cast<size_t>(i)] = p_ - d_[static_cast<size_t>(i)];
    for (++i; i < precision(); ++i)
        r.d_[static_cast<size_t>(i)] = (p_ - 1) - d_[static_cast<size_t>(i)];
    return r;
}

PadicInt PadicInt::mul(const PadicInt& o) const {
    check_same_shape(o);
    const int n = precision();
    // Column sums fit easily: n * (p-1)^2 + carry stays far below 2^63.
    std::vector<u64> col(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        if (d_[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; i + j < n; ++j)
            col[static_cast<size_t>(i + j)] +=
                static_cast<u64>(d_[static_cast<size_t>(i)]) *
                static_cast<u64>(o.d_[static_cast<size_t>(j)]);
    }
    PadicInt r(Prime(p_), n);
    u64 carry = 0;
    for (int i = 0; i < n; ++i) {
        u64 s = col[static_cast<size_t>(i)] + carry;
        r.d_[static_cast<size_t>(i)] = static_cast<int>(s % static_cast<u64>(p_));
        carry = s / static_cast<u64>(p_);
    }
    return r;
}

int PadicInt::valuation() const {
    for (int i = 0; i < precision(); ++i)
        if (d_[static_cast<size_t>(i)] != 0) return i;
    return precision();
}

u64 PadicInt::value_mod(int k) const {
    if (k < 0 || k > precision())
        throw precondition_error("value_mod: k=" + std::to_string(k) + " exceeds precision " +
                                 std::to_string(precision()));
    u64 r = 0, pk = 1;
    for (int i = 0; i < k; ++i) {
        r += pk * static_cast<u64>(d_[static_cast<size_t>(i)]);
        pk *= static_cast<u64>(p_); // pow_u64-style overflow guard
        if (i + 1 < k && pk > (u64(1) << 62))
            throw precondition_error("value_mod: p^k does not fit in 64 bits");
    }
    return r;
}

Residue PadicInt::reduce(int k) const {
    if (k < 1 || k > precision())
        throw precondition_error("reduce: level must be in [1, precision]");
    return Residue{value_mod(k), k};
}

std::string PadicInt::str() const {
    std::ostringstream os;
    for (int i = 0; i < precision(); ++i) {
        if (i) os << ',';
        os << d_[static_cast<size_t>(i)];
    }
    os << " (base " << p_ << ")";
    return os.str();
}

PadicInt PadicInt::parse(const std::string& s) {
    auto bp = s.find(" (base ");
    if (bp == std::string::npos || s.back() != ')')
        throw parse_error("expected \"d0,d1,... (base p)\", got \"" + s + "\"");
    std::string digits = s.substr(0, bp);
    std::string base = s.substr(bp + 7, s.size() - bp - 8);
    int p = 0;
    try {
        p = std::stoi(base);
    } catch (const std::exception&) {
        throw parse_error("bad base in \"" + s + "\"");
    }
    std::vector<int> d;
    std::istringstream is(digits);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            d.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw parse_error("bad digit \"" + tok + "\"");
        }
    }
    if (d.empty()) throw parse_error("no digits in \"" + s + "\"");
    try {
        return from_digits(Prime(p), std::move(d));
    } catch (const precondition_error& e) {
        throw parse_error(e.what());
    }
}

u64 inv_mod_p(u64 u, Prime p) {
    u %= static_cast<u64>(p.v);
    if (u == 0) throw precondition_error("inv_mod_p: argument divisible by p");
    // Fermat: u^(p-2) mod p.
    u64 r = 1, b = u;
    int e = p.v - 2;
    while (e > 0) {
        if (e & 1) r = r * b % static_cast<u64>(p.v);
        b = b * b % static_cast<u64>(p.v);
        e >>= 1;
    }
    return r;
}

} // namespace zpdyn
