#include "zpdyn/expr.hpp"

#include <cctype>
#include <sstream>

namespace zpdyn {

ExprPtr Expr::constant(i64 v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->cval = v;
    return e;
}
ExprPtr Expr::var() {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    return e;
}
static ExprPtr binary(Expr::Kind k, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
}
ExprPtr Expr::add(ExprPtr l, ExprPtr r) { return binary(Kind::Add, std::move(l), std::move(r)); }
ExprPtr Expr::sub(ExprPtr l, ExprPtr r) { return binary(Kind::Sub, std::move(l), std::move(r)); }
ExprPtr Expr::mul(ExprPtr l, ExprPtr r) { return binary(Kind::Mul, std::move(l), std::move(r)); }
ExprPtr Expr::compose(ExprPtr outer, ExprPtr inner) {
    return binary(Kind::Compose, std::move(outer), std::move(inner));
}
ExprPtr Expr::diff(ExprPtr h) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Diff;
    e->a = std::move(h);
    return e;
}
ExprPtr Expr::affine(i64 c, std::vector<i64> a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Affine;
    e->affine_c = c;
    e->affine_a = std::move(a);
    return e;
}

static u64 wrap_mod(i64 v, u64 pm) {
    i64 r = v % static_cast<i64>(pm);
    if (r < 0) r += static_cast<i64>(pm);
    return static_cast<u64>(r);
}

static u64 eval(const Expr& e, u64 x, int p, u64 pm) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return wrap_mod(e.cval, pm);
    case Expr::Kind::Var:
        return x;
    case Expr::Kind::Add:
        return (eval(*e.a, x, p, pm) + eval(*e.b, x, p, pm)) % pm;
    case Expr::Kind::Sub:
        return (eval(*e.a, x, p, pm) + pm - eval(*e.b, x, p, pm)) % pm;
    case Expr::Kind::Mul:
        return eval(*e.a, x, p, pm) * eval(*e.b, x, p, pm) % pm;
    case Expr::Kind::Compose:
        return eval(*e.a, eval(*e.b, x, p, pm), p, pm);
    case Expr::Kind::Diff:
        // h is 1-Lipschitz, so h(x+1) mod p^m only needs x+1 mod p^m
        return (eval(*e.a, (x + 1) % pm, p, pm) + pm - eval(*e.a, x, p, pm)) % pm;
    case Expr::Kind::Affine: {
        u64 r = wrap_mod(e.affine_c, pm);
        u64 pk = 1;
        u64 rest = x;
        for (size_t k = 0; pk < pm; ++k) {
            u64 d = rest % static_cast<u64>(p);
            rest /= static_cast<u64>(p);
            u64 ak = k < e.affine_a.size() ? wrap_mod(e.affine_a[k], pm) : 1;
            r = (r + ak * pk % pm * d) % pm;
            pk *= static_cast<u64>(p);
        }
        return r;
    }
    }
    throw error("unreachable expression kind");
}

u64 expr_eval_mod(const Expr& e, u64 x, int p, int m) {
    if (m == 0) return 0;
    u64 pm = pow_u64(p, m);
    return eval(e, x % pm, p, pm);
}

// ----- parsing -----

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;

    explicit Parser(const std::string& src) : s(src) {}

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool eat_compose() {
        skip();
        // U+2218 RING OPERATOR, encoded e2 88 98
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xe2 &&
            static_cast<unsigned char>(s[i + 1]) == 0x88 &&
            static_cast<unsigned char>(s[i + 2]) == 0x98) {
            i += 3;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw parse_error("expression parse error at offset " + std::to_string(i) + ": " + what);
    }
    bool at_int() {
        skip();
        if (i >= s.size()) return false;
        if (std::isdigit(static_cast<unsigned char>(s[i]))) return true;
        return s[i] == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    }
    i64 integer() {
        skip();
        size_t start = i;
        if (i < s.size() && s[i] == '-') ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start || (s[start] == '-' && i == start + 1)) fail("expected integer");
        try {
            return std::stoll(s.substr(start, i - start));
        } catch (const std::exception&) {
            fail("integer literal out of range");
        }
    }
    bool keyword(const char* kw) {
        skip();
        size_t n = std::char_traits<char>::length(kw);
        if (s.compare(i, n, kw) == 0) {
            i += n;
            return true;
        }
        return false;
    }

    ExprPtr atom() {
        skip();
        if (i >= s.size()) fail("unexpected end of input");
        if (at_int()) return Expr::constant(integer());
        if (keyword("diff")) {
            if (!eat('(')) fail("expected '(' after diff");
            ExprPtr h = expression();
            if (!eat(')')) fail("expected ')'");
            return Expr::diff(std::move(h));
        }
        if (keyword("affine")) {
            if (!eat('(')) fail("expected '(' after affine");
            i64 c = integer();
            if (!eat(',')) fail("expected ',' in affine");
            if (!eat('[')) fail("expected '[' in affine");
            std::vector<i64> a;
            a.push_back(integer());
            while (eat(',')) a.push_back(integer());
            if (!eat(']')) fail("expected ']' in affine");
            if (!eat(')')) fail("expected ')'");
            return Expr::affine(c, std::move(a));
        }
        if (s[i] == 'x') {
            ++i;
            return Expr::var();
        }
        if (eat('(')) {
            ExprPtr e = expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + s[i] + "'");
    }

    ExprPtr composition() {
        ExprPtr e = atom();
        while (eat_compose()) e = Expr::compose(std::move(e), atom());
        return e;
    }

    ExprPtr term() {
        ExprPtr e = composition();
        while (eat('*')) e = Expr::mul(std::move(e), composition());
        return e;
    }

    ExprPtr expression() {
        ExprPtr e = term();
        for (;;) {
            skip();
            if (eat('+')) {
                e = Expr::add(std::move(e), term());
            } else if (i < s.size() && s[i] == '-') {
                // at operator position '-' is always binary subtraction
                ++i;
                e = Expr::sub(std::move(e), term());
            } else {
                break;
            }
        }
        return e;
    }
};

} // namespace

ExprPtr parse_expr(const std::string& src) {
    Parser p(src);
    ExprPtr e = p.expression();
    p.skip();
    if (p.i != src.size()) p.fail("trailing input");
    return e;
}

std::string expr_to_string(const Expr& e) {
    std::ostringstream os;
    switch (e.kind) {
    case Expr::Kind::Const:
        os << e.cval;
        break;
    case Expr::Kind::Var:
        os << 'x';
        break;
    case Expr::Kind::Add:
        os << '(' << expr_to_string(*e.a) << '+' << expr_to_string(*e.b) << ')';
        break;
    case Expr::Kind::Sub:
        os << '(' << expr_to_string(*e.a) << '-' << expr_to_string(*e.b) << ')';
        break;
    case Expr::Kind::Mul:
        os << '(' << expr_to_string(*e.a) << '*' << expr_to_string(*e.b) << ')';
        break;
    case Expr::Kind::Compose:
        os << '(' << expr_to_string(*e.a) << "∘" << expr_to_string(*e.b) << ')';
        break;
    case Expr::Kind::Diff:
        os << "diff(" << expr_to_string(*e.a) << ')';
        break;
    case Expr::Kind::Affine: {
        os << "affine(" << e.affine_c << ",[";
        for (size_t k = 0; k < e.affine_a.size(); ++k) {
            if (k) os << ',';
            os << e.affine_a[k];
        }
        os << "])";
        break;
    }
    }
    return os.str();
}

} // namespace zpdyn
