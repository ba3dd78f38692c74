#include "zpdyn/perm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace zpdyn {

PermP::PermP(Prime p, std::vector<int> images) : p_(p.v), img_(std::move(images)) {
    if (static_cast<int>(img_.size()) != p_)
        throw precondition_error("permutation needs exactly p=" + std::to_string(p_) + " images");
    std::vector<char> seen(static_cast<size_t>(p_), 0);
    for (int v : img_) {
        if (v < 0 || v >= p_ || seen[static_cast<size_t>(v)])
            throw precondition_error("images are not a bijection on {0..p-1}");
        seen[static_cast<size_t>(v)] = 1;
    }
}

PermP PermP::identity(Prime p) {
    std::vector<int> img(static_cast<size_t>(p.v));
    std::iota(img.begin(), img.end(), 0);
    return PermP(p, std::move(img));
}

PermP PermP::shift(Prime p, int a) {
    std::vector<int> img(static_cast<size_t>(p.v));
    a %= p.v;
    if (a < 0) a += p.v;
    for (int x = 0; x < p.v; ++x) img[static_cast<size_t>(x)] = (x + a) % p.v;
    return PermP(p, std::move(img));
}

PermP PermP::inverse() const {
    std::vector<int> inv(static_cast<size_t>(p_));
    for (int x = 0; x < p_; ++x) inv[static_cast<size_t>(img_[static_cast<size_t>(x)])] = x;
    return PermP(Prime(p_), std::move(inv));
}

PermP compose(const PermP& g, const PermP& f) {
    if (g.p() != f.p()) throw precondition_error("composing permutations of different degree");
    std::vector<int> img(static_cast<size_t>(g.p()));
    for (int x = 0; x < g.p(); ++x) img[static_cast<size_t>(x)] = g(f(x));
    return PermP(Prime(g.p()), std::move(img));
}

PermP PermP::pow(i64 n) const {
    PermP base = n < 0 ? inverse() : *this;
    u64 e = n < 0 ? static_cast<u64>(-n) : static_cast<u64>(n);
    e %= order(); // cheap for these sizes and keeps e small
    PermP r = identity(Prime(p_));
    while (e > 0) {
        if (e & 1) r = compose(base, r);
        base = compose(base, base);
        e >>= 1;
    }
    return r;
}

CycleType PermP::cycle_type() const {
    std::vector<char> seen(static_cast<size_t>(p_), 0);
    CycleType out;
    for (int s = 0; s < p_; ++s) {
        if (seen[static_cast<size_t>(s)]) continue;
        int len = 0, x = s;
        while (!seen[static_cast<size_t>(x)]) {
            seen[static_cast<size_t>(x)] = 1;
            x = img_[static_cast<size_t>(x)];
            ++len;
        }
        out.push_back(len);
    }
    std::sort(out.begin(), out.end(), std::greater<int>());
    return out;
}

u64 PermP::order() const {
    u64 o = 1;
    for (int len : cycle_type()) o = std::lcm(o, static_cast<u64>(len));
    return o;
}

bool PermP::is_transitive() const {
    // one orbit == the orbit of 0 has full length
    int x = img_[0], len = 1;
    while (x != 0) {
        x = img_[static_cast<size_t>(x)];
        ++len;
    }
    return len == p_;
}

PermP PermP::conjugate_by(const PermP& g) const {
    return compose(g, compose(*this, g.inverse()));
}

std::string PermP::cycle_string() const {
    std::vector<char> seen(static_cast<size_t>(p_), 0);
    std::ostringstream os;
    for (int s = 0; s < p_; ++s) {
        if (seen[static_cast<size_t>(s)]) continue;
        os << '(';
        int x = s;
        bool first = true;
        while (!seen[static_cast<size_t>(x)]) {
            seen[static_cast<size_t>(x)] = 1;
            if (!first) os << ' ';
            os << x;
            first = false;
            x = img_[static_cast<size_t>(x)];
        }
        os << ')';
    }
    return os.str();
}

} // namespace zpdyn
