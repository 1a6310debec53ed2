#include "subopt/symx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace subopt {

namespace detail {

struct Atom {
    AtomKind kind;
    std::string name;  // param name
    ParamKind pkind = ParamKind::coefficient;
    Expr arg;          // transcendental argument
    std::string key;
    std::set<std::string> params;
};

namespace {

std::mutex& table_mutex() {
    static std::mutex m;
    return m;
}

std::unordered_map<std::string, std::unique_ptr<Atom>>& table() {
    static std::unordered_map<std::string, std::unique_ptr<Atom>> t;
    return t;
}

const Atom* intern(AtomKind kind, const std::string& name, ParamKind pk, const Expr& arg) {
    std::string key;
    switch (kind) {
        case AtomKind::param: key = name; break;
        case AtomKind::exp: key = "exp(" + arg.str() + ")"; break;
        case AtomKind::sin: key = "sin(" + arg.str() + ")"; break;
        case AtomKind::cos: key = "cos(" + arg.str() + ")"; break;
    }
    std::lock_guard<std::mutex> lock(table_mutex());
    auto& t = table();
    auto it = t.find(key);
    if (it != t.end()) return it->second.get();
    auto a = std::make_unique<Atom>();
    a->kind = kind;
    a->name = name;
    a->pkind = pk;
    a->arg = arg;
    a->key = key;
    if (kind == AtomKind::param)
        a->params.insert(name);
    else
        a->params = arg.params();
    const Atom* out = a.get();
    t.emplace(key, std::move(a));
    return out;
}

int degree(const Mono& m) {
    int d = 0;
    for (auto& f : m) d += f.exp;
    return d;
}

// graded lex, smaller key is more significant
int mono_cmp(const Mono& a, const Mono& b) {
    int da = degree(a), db = degree(b);
    if (da != db) return da < db ? -1 : 1;
    size_t i = 0, j = 0;
    for (;;) {
        if (i == a.size() && j == b.size()) return 0;
        if (i == a.size()) return -1;
        if (j == b.size()) return 1;
        if (a[i].atom == b[j].atom) {
            if (a[i].exp != b[j].exp) return a[i].exp < b[j].exp ? -1 : 1;
            ++i;
            ++j;
            continue;
        }
        return a[i].atom->key < b[j].atom->key ? 1 : -1;
    }
}

bool mono_eq(const Mono& a, const Mono& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].atom != b[i].atom || a[i].exp != b[i].exp) return false;
    return true;
}

bool key_less(const Atom* a, const Atom* b) { return a->key < b->key; }

void insert_factor(Mono& m, const Atom* a, int e) {
    auto it = std::lower_bound(m.begin(), m.end(), a,
                               [](const Factor& f, const Atom* x) { return key_less(f.atom, x); });
    if (it != m.end() && it->atom == a) {
        it->exp += e;
        if (it->exp == 0) m.erase(it);
    } else if (e != 0) {
        m.insert(it, Factor{a, e});
    }
}

const Atom* exp_atom_of(const Mono& m) {
    for (auto& f : m)
        if (f.atom->kind == AtomKind::exp) return f.atom;
    return nullptr;
}

Mono without_exp(const Mono& m) {
    Mono out;
    for (auto& f : m)
        if (f.atom->kind != AtomKind::exp) out.push_back(f);
    return out;
}

void canon(Poly& p) {
    std::sort(p.begin(), p.end(), [](const Term& a, const Term& b) { return mono_cmp(a.mono, b.mono) > 0; });
    Poly out;
    for (auto& t : p) {
        if (!out.empty() && mono_eq(out.back().mono, t.mono))
            out.back().coef += t.coef;
        else
            out.push_back(t);
        if (out.back().coef == 0) out.pop_back();
    }
    // a zero coefficient popped above may hide an equal monomial following it
    Poly out2;
    for (auto& t : out) {
        if (!out2.empty() && mono_eq(out2.back().mono, t.mono)) {
            out2.back().coef += t.coef;
            if (out2.back().coef == 0) out2.pop_back();
        } else {
            out2.push_back(t);
        }
    }
    p.swap(out2);
}

Mono mono_mul(const Mono& a, const Mono& b);

// cos^2 -> 1 - sin^2 for equal arguments
void trig_reduce(Poly& p) {
    for (int guard = 0; guard < 64; ++guard) {
        bool changed = false;
        Poly next;
        for (auto& t : p) {
            const Atom* hit = nullptr;
            for (auto& f : t.mono)
                if (f.atom->kind == AtomKind::cos && f.exp >= 2) {
                    hit = f.atom;
                    break;
                }
            if (!hit) {
                next.push_back(t);
                continue;
            }
            changed = true;
            Mono base = t.mono;
            insert_factor(base, hit, -2);
            const Atom* s = intern(AtomKind::sin, "", ParamKind::coefficient, hit->arg);
            next.push_back(Term{base, t.coef});
            Mono with = base;
            insert_factor(with, s, 2);
            next.push_back(Term{with, -t.coef});
        }
        p.swap(next);
        canon(p);
        if (!changed) return;
    }
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    out.reserve(a.size() * b.size());
    for (auto& x : a)
        for (auto& y : b) out.push_back(Term{mono_mul(x.mono, y.mono), x.coef * y.coef});
    canon(out);
    trig_reduce(out);
    return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a;
    out.insert(out.end(), b.begin(), b.end());
    canon(out);
    return out;
}

Poly poly_neg(const Poly& a) {
    Poly out = a;
    for (auto& t : out) t.coef = -t.coef;
    return out;
}

Poly poly_scale(const Poly& a, const Rational& q) {
    if (q == 0) return {};
    Poly out = a;
    for (auto& t : out) t.coef *= q;
    return out;
}

Poly poly_one() { return Poly{Term{Mono{}, Rational(1)}}; }

bool poly_eq(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].coef != b[i].coef || !mono_eq(a[i].mono, b[i].mono)) return false;
    return true;
}

bool poly_is_one(const Poly& p) { return p.size() == 1 && p[0].mono.empty() && p[0].coef == 1; }

Poly poly_from_atom(const Atom* a) { return Poly{Term{Mono{Factor{a, 1}}, Rational(1)}}; }

// divides term monomials; exp parts combine freely
std::optional<Mono> mono_div(const Mono& a, const Mono& b) {
    Mono out;
    for (auto& f : a)
        if (f.atom->kind != AtomKind::exp) out.push_back(f);
    for (auto& f : b) {
        if (f.atom->kind == AtomKind::exp) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const Factor& g) { return g.atom == f.atom; });
        if (it == out.end() || it->exp < f.exp) return std::nullopt;
        it->exp -= f.exp;
        if (it->exp == 0) out.erase(it);
    }
    const Atom* ea = exp_atom_of(a);
    const Atom* eb = exp_atom_of(b);
    if (ea || eb) {
        Expr arg = (ea ? ea->arg : Expr(0)) - (eb ? eb->arg : Expr(0));
        if (!arg.is_structurally_zero())
            insert_factor(out, intern(AtomKind::exp, "", ParamKind::coefficient, arg), 1);
    }
    return out;
}

std::optional<Poly> try_divide(const Poly& p, const Poly& d) {
    if (d.empty()) return std::nullopt;
    Poly r = p, q;
    size_t cap = 64 + 8 * p.size();
    for (size_t it = 0; it < cap; ++it) {
        if (r.empty()) {
            canon(q);
            return q;
        }
        auto m = mono_div(r[0].mono, d[0].mono);
        if (!m) return std::nullopt;
        Term t{*m, r[0].coef / d[0].coef};
        Mono lead = r[0].mono;
        q.push_back(t);
        r = poly_add(r, poly_neg(poly_mul(Poly{t}, d)));
        if (!r.empty() && mono_cmp(r[0].mono, lead) >= 0) return std::nullopt;
    }
    return std::nullopt;
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && key_less(a[i].atom, b[j].atom))) {
            out.push_back(a[i++]);
        } else if (i == a.size() || key_less(b[j].atom, a[i].atom)) {
            out.push_back(b[j++]);
        } else {
            out.push_back(Factor{a[i].atom, a[i].exp + b[j].exp});
            ++i;
            ++j;
        }
    }
    // merge exponentials into one atom
    int count = 0;
    for (auto& f : out)
        if (f.atom->kind == AtomKind::exp) count += f.exp;
    if (count <= 1) return out;
    Expr arg(0);
    Mono rest;
    for (auto& f : out) {
        if (f.atom->kind == AtomKind::exp)
            arg = arg + Expr(f.exp) * f.atom->arg;
        else
            rest.push_back(f);
    }
    if (!arg.is_structurally_zero()) insert_factor(rest, intern(AtomKind::exp, "", ParamKind::coefficient, arg), 1);
    return rest;
}

std::string rational_str(const Rational& q) { return q.get_str(); }

std::string mono_str(const Mono& m) {
    std::string s;
    for (auto& f : m) {
        if (!s.empty()) s += "*";
        s += f.atom->key;
        if (f.exp != 1) s += "^" + std::to_string(f.exp);
    }
    return s;
}

std::string poly_str(const Poly& p) {
    if (p.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        const auto& t = p[i];
        std::string body;
        Rational c = t.coef;
        bool neg = c < 0;
        if (neg) c = -c;
        if (t.mono.empty())
            body = rational_str(c);
        else if (c == 1)
            body = mono_str(t.mono);
        else
            body = rational_str(c) + "*" + mono_str(t.mono);
        if (i == 0)
            s += neg ? "-" + body : body;
        else
            s += neg ? " - " + body : " + " + body;
    }
    return s;
}

bool needs_parens(const Poly& p) {
    return p.size() > 1 || (p.size() == 1 && p[0].coef < 0);
}

Mono mono_gcd_nonexp(const Poly& a, const Poly& b) {
    Mono g = without_exp(a.empty() ? b[0].mono : a[0].mono);
    auto meet = [&](const Mono& m) {
        Mono out;
        for (auto& f : g) {
            auto it = std::find_if(m.begin(), m.end(), [&](const Factor& x) { return x.atom == f.atom; });
            if (it != m.end()) out.push_back(Factor{f.atom, std::min(f.exp, it->exp)});
        }
        g = out;
    };
    for (auto& t : a) meet(t.mono);
    for (auto& t : b) meet(t.mono);
    return g;
}

Poly divide_mono(const Poly& p, const Mono& g) {
    Poly out;
    for (auto& t : p) {
        Mono m = t.mono;
        for (auto& f : g) insert_factor(m, f.atom, -f.exp);
        out.push_back(Term{m, t.coef});
    }
    canon(out);
    return out;
}

}  // namespace
}  // namespace detail

using namespace detail;

namespace {

std::shared_ptr<const Rep> make_rep(Poly num, Poly den) {
    auto r = std::make_shared<Rep>();
    r->num = std::move(num);
    r->den = std::move(den);
    return r;
}

const std::shared_ptr<const Rep>& zero_rep() {
    static const std::shared_ptr<const Rep> z = make_rep(Poly{}, poly_one());
    return z;
}

}  // namespace

Expr::Expr() : rep_(zero_rep()) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& q) {
    if (q == 0)
        rep_ = zero_rep();
    else
        rep_ = make_rep(Poly{Term{Mono{}, q}}, poly_one());
}

Expr Expr::param(const std::string& name, ParamKind kind) {
    const Atom* a = intern(AtomKind::param, name, kind, Expr());
    return Expr(make_rep(poly_from_atom(a), poly_one()));
}

Expr Expr::from_parts(Poly num, Poly den) {
    canon(num);
    canon(den);
    if (den.empty()) throw SymxError("zero denominator");
    if (num.empty()) return Expr();
    // make one denominator term free of exponentials; which one must not depend on the
    // representative, so try every exp factor present and keep the smallest denominator
    {
        std::vector<const Atom*> shifts;
        bool plain = false;
        for (auto& t : den) {
            const Atom* e = exp_atom_of(t.mono);
            if (!e)
                plain = true;
            else if (std::find(shifts.begin(), shifts.end(), e) == shifts.end())
                shifts.push_back(e);
        }
        if (!shifts.empty()) {
            std::optional<std::pair<Poly, Poly>> best;
            std::string best_key;
            auto consider = [&](Poly n, Poly d) {
                if (d[0].coef != 1) {
                    Rational lc = d[0].coef;
                    n = poly_scale(n, 1 / lc);
                    d = poly_scale(d, 1 / lc);
                }
                std::string key = poly_str(d) + "|" + poly_str(n);
                if (!best || key < best_key) {
                    best = {std::move(n), std::move(d)};
                    best_key = std::move(key);
                }
            };
            if (plain) consider(num, den);
            for (const Atom* e : shifts) {
                Poly inv = poly_from_atom(intern(AtomKind::exp, "", ParamKind::coefficient, -e->arg));
                consider(poly_mul(num, inv), poly_mul(den, inv));
            }
            num = std::move(best->first);
            den = std::move(best->second);
        }
    }
    if (!poly_is_one(den)) {
        Mono g = mono_gcd_nonexp(num, den);
        if (!g.empty()) {
            num = divide_mono(num, g);
            den = divide_mono(den, g);
        }
        if (!(den.size() == 1 && den[0].mono.empty())) {
            if (auto q = try_divide(num, den)) {
                num = *q;
                den = poly_one();
            }
        }
        Rational lc = den[0].coef;
        if (lc != 1) {
            num = poly_scale(num, 1 / lc);
            den = poly_scale(den, 1 / lc);
        }
    }
    return Expr(make_rep(std::move(num), std::move(den)));
}

Expr operator+(const Expr& a, const Expr& b) {
    const Rep& x = a.rep();
    const Rep& y = b.rep();
    if (x.num.empty()) return b;
    if (y.num.empty()) return a;
    if (poly_eq(x.den, y.den)) return Expr::from_parts(poly_add(x.num, y.num), x.den);
    if (poly_is_one(y.den)) return Expr::from_parts(poly_add(x.num, poly_mul(y.num, x.den)), x.den);
    if (poly_is_one(x.den)) return Expr::from_parts(poly_add(poly_mul(x.num, y.den), y.num), y.den);
    if (auto q = try_divide(y.den, x.den))  // x.den | y.den
        return Expr::from_parts(poly_add(poly_mul(x.num, *q), y.num), y.den);
    if (auto q = try_divide(x.den, y.den))
        return Expr::from_parts(poly_add(x.num, poly_mul(y.num, *q)), x.den);
    return Expr::from_parts(poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den)), poly_mul(x.den, y.den));
}

Expr operator-(const Expr& a) {
    const Rep& x = a.rep();
    if (x.num.empty()) return a;
    return Expr::from_parts(poly_neg(x.num), x.den);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    const Rep& x = a.rep();
    const Rep& y = b.rep();
    if (x.num.empty() || y.num.empty()) return Expr();
    Poly n1 = x.num, d1 = x.den, n2 = y.num, d2 = y.den;
    if (!poly_is_one(d2))
        if (auto q = try_divide(n1, d2)) {
            n1 = *q;
            d2 = poly_one();
        }
    if (!poly_is_one(d1))
        if (auto q = try_divide(n2, d1)) {
            n2 = *q;
            d1 = poly_one();
        }
    return Expr::from_parts(poly_mul(n1, n2), poly_mul(d1, d2));
}

Expr operator/(const Expr& a, const Expr& b) {
    const Rep& y = b.rep();
    if (y.num.empty()) throw SymxError("zero denominator");
    Expr inv = Expr::from_parts(y.den, y.num);
    return a * inv;
}

bool Expr::same(const Expr& o) const {
    return poly_eq(rep_->num, o.rep_->num) && poly_eq(rep_->den, o.rep_->den);
}

bool Expr::is_structurally_zero() const { return rep_->num.empty(); }

bool Expr::is_constant() const {
    return (rep_->num.empty() || (rep_->num.size() == 1 && rep_->num[0].mono.empty())) &&
           poly_is_one(rep_->den);
}

bool Expr::is_polynomial() const { return poly_is_one(rep_->den); }

std::optional<Rational> Expr::as_rational() const {
    if (!is_constant()) return std::nullopt;
    if (rep_->num.empty()) return Rational(0);
    return rep_->num[0].coef;
}

std::string Expr::str() const {
    const Rep& r = *rep_;
    if (poly_is_one(r.den)) return poly_str(r.num);
    std::string n = poly_str(r.num);
    std::string d = poly_str(r.den);
    if (needs_parens(r.num)) n = "(" + n + ")";
    if (needs_parens(r.den) || d.find_first_of("*^/") != std::string::npos) d = "(" + d + ")";
    return n + "/" + d;
}

std::set<std::string> Expr::params() const {
    std::set<std::string> out;
    for (auto* p : {&rep_->num, &rep_->den})
        for (auto& t : *p)
            for (auto& f : t.mono) out.insert(f.atom->params.begin(), f.atom->params.end());
    return out;
}

bool Expr::depends_on(const std::string& name) const {
    for (auto* p : {&rep_->num, &rep_->den})
        for (auto& t : *p)
            for (auto& f : t.mono)
                if (f.atom->params.count(name)) return true;
    return false;
}

Expr pow(const Expr& e, int k) {
    if (k < 0) return Expr(1) / pow(e, -k);
    Expr out(1), base = e;
    while (k) {
        if (k & 1) out = out * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return out;
}

namespace {

// exp/sin/cos arguments: polynomial, linear in times and coefficients, algebra parameters as factors
void check_linear_arg(const Expr& arg, const char* fn) {
    const Rep& r = arg.rep();
    bool ok = r.den.size() == 1 && r.den[0].mono.empty();
    for (auto& t : r.num) {
        int deg = 0;
        for (auto& f : t.mono) {
            if (f.atom->kind != AtomKind::param) ok = false;
            else if (f.atom->pkind != ParamKind::algebra) deg += f.exp;
        }
        if (deg > 1) ok = false;
    }
    if (!ok) throw SymxError(std::string(fn) + " argument is not a linear form: " + arg.str());
}

}  // namespace

Expr exp(const Expr& arg) {
    if (arg.is_structurally_zero()) return Expr(1);
    check_linear_arg(arg, "exp");
    const Atom* a = intern(AtomKind::exp, "", ParamKind::coefficient, arg);
    return Expr::from_parts(poly_from_atom(a), poly_one());
}

namespace {

// splits arg into single-numerator-term pieces over the common denominator
std::vector<Expr> split_terms(const Expr& arg) {
    std::vector<Expr> out;
    const Rep& r = arg.rep();
    for (auto& t : r.num) out.push_back(Expr::from_parts(Poly{t}, r.den));
    return out;
}

Expr trig_single(AtomKind kind, const Expr& u) {
    const Rep& r = u.rep();
    bool neg = r.num[0].coef < 0;
    Expr pos = neg ? -u : u;
    Expr atom = Expr::from_parts(poly_from_atom(intern(kind, "", ParamKind::coefficient, pos)), poly_one());
    if (neg && kind == AtomKind::sin) return -atom;
    return atom;
}

Expr trig_of(AtomKind kind, const std::vector<Expr>& parts, size_t from) {
    size_t n = parts.size() - from;
    if (n == 0) return kind == AtomKind::sin ? Expr(0) : Expr(1);
    if (n == 1) return trig_single(kind, parts[from]);
    const Expr& u = parts[from];
    Expr su = trig_single(AtomKind::sin, u), cu = trig_single(AtomKind::cos, u);
    Expr sv = trig_of(AtomKind::sin, parts, from + 1), cv = trig_of(AtomKind::cos, parts, from + 1);
    if (kind == AtomKind::sin) return su * cv + cu * sv;
    return cu * cv - su * sv;
}

}  // namespace

Expr sin(const Expr& arg) {
    check_linear_arg(arg, "sin");
    return trig_of(AtomKind::sin, split_terms(arg), 0);
}
Expr cos(const Expr& arg) {
    check_linear_arg(arg, "cos");
    return trig_of(AtomKind::cos, split_terms(arg), 0);
}

Expr normalize(const Expr& e) { return Expr::from_parts(e.rep().num, e.rep().den); }

Expr numerator(const Expr& e) { return Expr::from_parts(e.rep().num, poly_one()); }
Expr denominator(const Expr& e) { return Expr::from_parts(e.rep().den, poly_one()); }

namespace {

template <class T>
T from_rational(const Rational& q);
template <>
double from_rational<double>(const Rational& q) {
    return q.get_d();
}
template <>
Dual from_rational<Dual>(const Rational& q) {
    return Dual(q.get_d());
}
template <>
Expr from_rational<Expr>(const Rational& q) {
    return Expr(q);
}

template <class T>
T ipow(const T& x, int k) {
    T out = from_rational<T>(Rational(1));
    T b = x;
    while (k) {
        if (k & 1) out = out * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return out;
}

template <class T, class F>
T eval_poly(const Poly& p, F&& atom_value) {
    T sum = from_rational<T>(Rational(0));
    bool first = true;
    for (auto& t : p) {
        T term = from_rational<T>(t.coef);
        for (auto& f : t.mono) term = term * ipow<T>(atom_value(f.atom), f.exp);
        if (first) {
            sum = term;
            first = false;
        } else {
            sum = sum + term;
        }
    }
    return sum;
}

Expr atom_expr(const Atom* a) { return Expr::from_parts(poly_from_atom(a), poly_one()); }

Expr apply_atom(const Atom* a, const Expr& arg) {
    switch (a->kind) {
        case AtomKind::exp: return exp(arg);
        case AtomKind::sin: return sin(arg);
        case AtomKind::cos: return cos(arg);
        default: return atom_expr(a);
    }
}

Expr d_atom(const Atom* a, const std::string& p);

Expr diff_poly(const Poly& poly, const std::string& p) {
    Expr out;
    for (auto& t : poly) {
        for (size_t i = 0; i < t.mono.size(); ++i) {
            const Atom* a = t.mono[i].atom;
            if (!a->params.count(p)) continue;
            Expr da = d_atom(a, p);
            if (da.is_structurally_zero()) continue;
            Mono rest = t.mono;
            insert_factor(rest, a, -1);
            Expr term = Expr::from_parts(Poly{Term{rest, t.coef * t.mono[i].exp}}, poly_one());
            out = out + term * da;
        }
    }
    return out;
}

Expr d_atom(const Atom* a, const std::string& p) {
    switch (a->kind) {
        case AtomKind::param: return a->name == p ? Expr(1) : Expr(0);
        case AtomKind::exp: return atom_expr(a) * differentiate(a->arg, p);
        case AtomKind::sin: return cos(a->arg) * differentiate(a->arg, p);
        case AtomKind::cos: return -sin(a->arg) * differentiate(a->arg, p);
    }
    return Expr();
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& p) {
    const Rep& r = e.rep();
    Expr dn = diff_poly(r.num, p);
    if (poly_is_one(r.den)) return dn;
    Expr n = numerator(e), d = denominator(e);
    Expr dd = diff_poly(r.den, p);
    return (dn * d - n * dd) / (d * d);
}

Expr substitute(const Expr& e, const std::string& p, const Expr& value) {
    if (!e.depends_on(p)) return e;
    std::unordered_map<const Atom*, Expr> memo;
    std::function<Expr(const Atom*)> val = [&](const Atom* a) -> Expr {
        auto it = memo.find(a);
        if (it != memo.end()) return it->second;
        Expr out;
        if (!a->params.count(p))
            out = atom_expr(a);
        else if (a->kind == AtomKind::param)
            out = value;
        else
            out = apply_atom(a, substitute(a->arg, p, value));
        memo.emplace(a, out);
        return out;
    };
    Expr n = eval_poly<Expr>(e.rep().num, val);
    Expr d = eval_poly<Expr>(e.rep().den, val);
    if (d.is_structurally_zero()) throw SymxError("zero denominator");
    return n / d;
}

std::optional<std::vector<Expr>> coefficients_in(const Expr& e, const std::string& p) {
    std::vector<Expr> out;
    for (auto& t : e.rep().num) {
        int k = 0;
        Mono rest;
        for (auto& f : t.mono) {
            if (f.atom->kind == AtomKind::param && f.atom->name == p) {
                k = f.exp;
            } else {
                if (f.atom->params.count(p)) return std::nullopt;
                rest.push_back(f);
            }
        }
        if ((int)out.size() <= k) out.resize(k + 1);
        out[k] = out[k] + Expr::from_parts(Poly{Term{rest, t.coef}}, poly_one());
    }
    return out;
}

namespace {

bool rational_sqrt(const Rational& q, Rational& out) {
    if (q < 0) return false;
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    out = Rational(rn, rd);
    out.canonicalize();
    return true;
}

std::optional<Term> term_sqrt(const Term& t) {
    Rational c;
    if (!rational_sqrt(t.coef, c)) return std::nullopt;
    Mono m;
    for (auto& f : t.mono) {
        if (f.atom->kind == AtomKind::exp) {
            m.push_back(Factor{intern(AtomKind::exp, "", ParamKind::coefficient, f.atom->arg / Expr(2)), 1});
            continue;
        }
        if (f.exp % 2) return std::nullopt;
        m.push_back(Factor{f.atom, f.exp / 2});
    }
    std::sort(m.begin(), m.end(), [](const Factor& a, const Factor& b) { return key_less(a.atom, b.atom); });
    return Term{m, c};
}

std::optional<Poly> poly_sqrt_impl(const Poly& p) {
    if (p.empty()) return Poly{};
    auto lead = term_sqrt(p[0]);
    if (!lead) return std::nullopt;
    Poly s{*lead};
    size_t cap = 4 + 2 * p.size();
    for (size_t it = 0; it < cap; ++it) {
        Poly r = poly_add(p, poly_neg(poly_mul(s, s)));
        if (r.empty()) return s;
        auto m = mono_div(r[0].mono, lead->mono);
        if (!m) return std::nullopt;
        Term next{*m, r[0].coef / (2 * lead->coef)};
        if (mono_cmp(next.mono, s.back().mono) >= 0) return std::nullopt;
        s.push_back(next);
        canon(s);
    }
    return std::nullopt;
}

int poly_sign(const Poly& p) {
    if (p.empty()) return 0;
    int sign = p[0].coef > 0 ? 1 : -1;
    for (auto& t : p) {
        if ((t.coef > 0 ? 1 : -1) != sign) return 0;
        for (auto& f : t.mono) {
            if (f.atom->kind == AtomKind::exp) continue;
            if (f.exp % 2) return 0;
        }
    }
    return sign;
}

}  // namespace

std::optional<Expr> poly_sqrt(const Expr& e) {
    const Rep& r = e.rep();
    if (poly_is_one(r.den)) {
        auto s = poly_sqrt_impl(r.num);
        if (!s) return std::nullopt;
        return Expr::from_parts(*s, poly_one());
    }
    auto s = poly_sqrt_impl(poly_mul(r.num, r.den));
    if (!s) return std::nullopt;
    return Expr::from_parts(*s, r.den);
}

int provable_sign(const Expr& e) { return poly_sign(e.rep().num) * poly_sign(e.rep().den); }

// ---------------------------------------------------------------- parser

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;
    const std::map<std::string, ParamKind>* kinds;

    [[noreturn]] void fail(const std::string& msg) {
        throw SymxError("parse error at column " + std::to_string(i + 1) + ": " + msg);
    }
    void ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool peek(char c) {
        ws();
        return i < s.size() && s[i] == c;
    }
    bool eat(char c) {
        if (peek(c)) {
            ++i;
            return true;
        }
        return false;
    }
    bool starts_primary() {
        ws();
        if (i >= s.size()) return false;
        char c = s[i];
        return std::isdigit((unsigned char)c) || std::isalpha((unsigned char)c) || c == '_' || c == '(' || c == '.';
    }
    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat('+'))
                e = e + term();
            else if (eat('-'))
                e = e - term();
            else
                return e;
        }
    }
    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat('*'))
                e = e * unary();
            else if (eat('/'))
                e = e / unary();
            else if (starts_primary())
                e = e * power();
            else
                return e;
        }
    }
    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    int integer_exponent() {
        ws();
        bool neg = false;
        if (eat('-')) neg = true;
        ws();
        size_t b = i;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
        if (b == i) fail("integer exponent expected");
        int k = std::stoi(s.substr(b, i - b));
        return neg ? -k : k;
    }
    Expr power() {
        Expr b = primary();
        if (eat('^')) {
            if (peek('(')) {
                ++i;
                int k = integer_exponent();
                if (!eat(')')) fail("')' expected");
                return pow(b, k);
            }
            return pow(b, integer_exponent());
        }
        return b;
    }
    Expr primary() {
        ws();
        if (i >= s.size()) fail("unexpected end of input");
        char c = s[i];
        if (c == '(') {
            ++i;
            Expr e = expr();
            if (!eat(')')) fail("')' expected");
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            size_t b = i;
            while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
            std::string ip = s.substr(b, i - b), fp;
            if (i < s.size() && s[i] == '.') {
                ++i;
                size_t fb = i;
                while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
                fp = s.substr(fb, i - fb);
            }
            if (ip.empty() && fp.empty()) fail("number expected");
            mpz_class num(ip + fp, 10), den = 1;
            for (size_t k = 0; k < fp.size(); ++k) den *= 10;
            Rational q(num, den);
            q.canonicalize();
            return Expr(q);
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t b = i;
            while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_')) ++i;
            std::string id = s.substr(b, i - b);
            if (id == "exp" || id == "sin" || id == "cos") {
                if (!eat('(')) fail("'(' expected after " + id);
                Expr a = expr();
                if (!eat(')')) fail("')' expected");
                if (id == "exp") return subopt::exp(a);
                if (id == "sin") return subopt::sin(a);
                return subopt::cos(a);
            }
            ParamKind k = kind_of(id);
            if (kinds) {
                auto it = kinds->find(id);
                if (it != kinds->end()) k = it->second;
            }
            return Expr::param(id, k);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Expr parse_expr(const std::string& text, const std::map<std::string, ParamKind>* kinds) {
    Parser p{text, 0, kinds};
    Expr e = p.expr();
    p.ws();
    if (p.i != text.size()) p.fail("trailing input");
    return e;
}

ParamKind kind_of(const std::string& name) {
    {
        std::lock_guard<std::mutex> lock(table_mutex());
        auto it = table().find(name);
        if (it != table().end() && it->second->kind == AtomKind::param) return it->second->pkind;
    }
    auto digits_after = [&](char c) {
        if (name.empty() || name[0] != c) return false;
        for (size_t k = 1; k < name.size(); ++k)
            if (!std::isdigit((unsigned char)name[k]) && name[k] != '_') return false;
        return true;
    };
    if (digits_after('t')) return ParamKind::time;
    if (digits_after('f')) return ParamKind::coefficient;
    return ParamKind::algebra;
}

// ---------------------------------------------------------------- numerics

Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v + b.v);
    r.n = std::max(a.n, b.n);
    for (int k = 0; k < r.n; ++k) r.g[k] = a.g[k] + b.g[k];
    return r;
}
Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v - b.v);
    r.n = std::max(a.n, b.n);
    for (int k = 0; k < r.n; ++k) r.g[k] = a.g[k] - b.g[k];
    return r;
}
Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    r.n = std::max(a.n, b.n);
    for (int k = 0; k < r.n; ++k) r.g[k] = a.g[k] * b.v + a.v * b.g[k];
    return r;
}
Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    r.n = std::max(a.n, b.n);
    double ib = 1.0 / (b.v * b.v);
    for (int k = 0; k < r.n; ++k) r.g[k] = (a.g[k] * b.v - a.v * b.g[k]) * ib;
    return r;
}
Dual operator-(const Dual& a) {
    Dual r(-a.v);
    r.n = a.n;
    for (int k = 0; k < r.n; ++k) r.g[k] = -a.g[k];
    return r;
}
namespace {
Dual chain(const Dual& a, double v, double d) {
    Dual r(v);
    r.n = a.n;
    for (int k = 0; k < r.n; ++k) r.g[k] = d * a.g[k];
    return r;
}
}  // namespace
Dual exp(const Dual& a) {
    double e = std::exp(a.v);
    return chain(a, e, e);
}
Dual sin(const Dual& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }
Dual cos(const Dual& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
Dual log(const Dual& a) { return chain(a, std::log(a.v), 1.0 / a.v); }
Dual atan(const Dual& a) { return chain(a, std::atan(a.v), 1.0 / (1.0 + a.v * a.v)); }

template <class T>
T Evaluator<T>::atom(const Atom* a) {
    auto it = cache_.find(a);
    if (it != cache_.end()) return it->second;
    T v{};
    using std::cos;
    using std::exp;
    using std::sin;
    switch (a->kind) {
        case AtomKind::param: {
            auto e = env_.find(a->name);
            if (e == env_.end()) throw SymxError("unbound parameter " + a->name);
            v = e->second;
            break;
        }
        case AtomKind::exp: v = exp((*this)(a->arg)); break;
        case AtomKind::sin: v = sin((*this)(a->arg)); break;
        case AtomKind::cos: v = cos((*this)(a->arg)); break;
    }
    cache_.emplace(a, v);
    return v;
}

template <class T>
T Evaluator<T>::poly(const Poly& p) {
    return eval_poly<T>(p, [this](const Atom* a) { return atom(a); });
}

template <class T>
T Evaluator<T>::operator()(const Expr& e) {
    const Rep& r = e.rep();
    T n = poly(r.num);
    if (poly_is_one(r.den)) return n;
    return n / poly(r.den);
}

template class Evaluator<double>;
template class Evaluator<Dual>;

double evaluate(const Expr& e, const std::map<std::string, double>& env) {
    Evaluator<double> ev(env);
    return ev(e);
}

namespace {
// sum of |term| values, used as the scale of cancellation
double magnitude(const Expr& e, Evaluator<double>& ev) {
    double m = 0;
    for (auto& t : e.rep().num) {
        double v = std::abs(t.coef.get_d());
        for (auto& f : t.mono) {
            Expr a = Expr::from_parts(Poly{Term{Mono{f}, Rational(1)}}, poly_one());
            v *= std::abs(ev(a));
        }
        m += v;
    }
    return m;
}
}  // namespace

Sampler::Sampler(std::uint64_t seed, Predicate admissible) : rng_(seed), admissible_(std::move(admissible)) {}

double Sampler::draw(ParamKind kind) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sign = u(rng_) < 0.5 ? -1.0 : 1.0;
    switch (kind) {
        case ParamKind::time: return sign * (0.3 + 1.4 * u(rng_));
        case ParamKind::coefficient: return sign * (0.4 + 1.4 * u(rng_));
        case ParamKind::algebra: return sign * (0.1 + 1.7 * u(rng_));
    }
    return 0.0;
}

std::map<std::string, double> Sampler::point(const std::vector<Parameter>& ps) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::map<std::string, double> pt;
        for (auto& p : ps) pt[p.name] = draw(p.kind);
        if (!admissible_ || admissible_(pt)) return pt;
    }
    throw SymxError("no admissible sample point found");
}

std::vector<Parameter> parameters_of(const Expr& e) { return parameters_of(std::vector<Expr>{e}); }

std::vector<Parameter> parameters_of(const std::vector<Expr>& es) {
    std::set<std::string> names;
    for (auto& e : es) {
        auto p = e.params();
        names.insert(p.begin(), p.end());
    }
    std::vector<Parameter> out;
    for (auto& n : names) out.push_back(Parameter{n, kind_of(n)});
    return out;
}

bool is_zero(const Expr& e, Sampler* sampler) {
    bool symbolic = e.is_structurally_zero();
    Sampler local;
    Sampler& s = sampler ? *sampler : local;
    auto ps = parameters_of(e);
    if (ps.empty()) return symbolic;
    int tiny = 0, used = 0;
    for (int attempt = 0; attempt < 64 && used < kZeroSamples; ++attempt) {
        auto pt = s.point(ps);
        Evaluator<double> ev(pt);
        double v = ev(e);
        if (!std::isfinite(v)) continue;
        double scale = std::max(1.0, magnitude(numerator(e), ev));
        ++used;
        if (symbolic) {
            if (std::abs(v) > 1e-7 * scale)
                throw SymxError("zero-test disagreement: canonical zero evaluates to " + std::to_string(v));
        } else if (std::abs(v) <= 1e-13 * scale) {
            ++tiny;
        }
    }
    if (!symbolic && used > 0 && tiny == used)
        throw SymxError("zero-test disagreement: nonzero form vanishes numerically: " + e.str());
    return symbolic;
}

namespace {

int numeric_rank(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    auto sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    double tol = 1e-9 * sv(0);
    int r = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > tol) ++r;
    return r;
}

int symbolic_rank(std::vector<std::vector<Expr>> m, Sampler* s) {
    int rows = m.size(), cols = rows ? m[0].size() : 0, rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (!is_zero(m[r][c], s)) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[piv], m[rank]);
        for (int r = rank + 1; r < rows; ++r) {
            if (m[r][c].is_structurally_zero()) continue;
            Expr f = m[r][c] / m[rank][c];
            for (int k = c; k < cols; ++k) m[r][k] = m[r][k] - f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

int generic_rank(const std::vector<Expr>& exprs, const std::vector<std::string>& params, Sampler* sampler) {
    if (exprs.empty() || params.empty()) return 0;
    bool rational = true;
    for (auto& e : exprs)
        for (auto* p : {&e.rep().num, &e.rep().den})
            for (auto& t : *p)
                for (auto& f : t.mono)
                    if (f.atom->kind != AtomKind::param)
                        for (auto& q : params)
                            if (f.atom->params.count(q)) rational = false;
    if (rational) {
        std::vector<std::vector<Expr>> jac(exprs.size(), std::vector<Expr>(params.size()));
        for (size_t i = 0; i < exprs.size(); ++i)
            for (size_t j = 0; j < params.size(); ++j) jac[i][j] = differentiate(exprs[i], params[j]);
        return symbolic_rank(jac, sampler);
    }
    Sampler local;
    Sampler& s = sampler ? *sampler : local;
    auto ps = parameters_of(exprs);
    int best = 0;
    for (int k = 0; k < kZeroSamples; ++k) {
        auto pt = s.point(ps);
        std::map<std::string, Dual> env;
        int n = params.size();
        for (auto& [name, v] : pt) env[name] = Dual(v);
        for (int j = 0; j < n; ++j) env[params[j]] = Dual::variable(pt.count(params[j]) ? pt[params[j]] : 0.7, j, n);
        Evaluator<Dual> ev(env);
        Eigen::MatrixXd jac(exprs.size(), n);
        bool ok = true;
        for (size_t i = 0; i < exprs.size(); ++i) {
            Dual d = ev(exprs[i]);
            for (int j = 0; j < n; ++j) {
                jac(i, j) = d.g[j];
                if (!std::isfinite(d.g[j])) ok = false;
            }
        }
        if (ok) best = std::max(best, numeric_rank(jac));
    }
    return best;
}

// ---------------------------------------------------------------- solving

std::string Solution::describe() const {
    switch (kind) {
        case RootKind::rational: return param + " = " + value->str();
        case RootKind::trig: {
            std::string g = gamma.same(Expr(1)) ? "" : "/(" + gamma.str() + ")";
            if (special == 1) return param + " = " + (branch ? "-pi/2" : "pi/2") + g;
            if (special == 2) return param + " = pi" + g;
            std::string a = "atan(-(" + alpha.str() + ")/(" + beta.str() + "))";
            if (branch) a = "(" + a + " + pi)";
            return param + " = " + a + g;
        }
        case RootKind::log: return param + " = log(" + ratio.str() + ")/(" + gamma.str() + ")";
    }
    return param;
}

template <class T>
T Solution::evaluate(Evaluator<T>& ev) const {
    using std::atan;
    using std::log;
    const double pi = 3.14159265358979323846;
    switch (kind) {
        case RootKind::rational: return ev(*value);
        case RootKind::trig: {
            T g = ev(gamma);
            if (special == 1) return T(branch ? -pi / 2 : pi / 2) / g;
            if (special == 2) return T(pi) / g;
            T th = atan(-(ev(alpha) / ev(beta)));
            if (branch) th = th + T(pi);
            return th / g;
        }
        case RootKind::log: return log(ev(ratio)) / ev(gamma);
    }
    return T(0.0);
}

template double Solution::evaluate<double>(Evaluator<double>&) const;
template Dual Solution::evaluate<Dual>(Evaluator<Dual>&) const;

namespace {

struct LinearArg {
    Expr slope, offset;
};

// arg = slope*p + offset with slope, offset free of p
std::optional<LinearArg> linear_in(const Expr& arg, const std::string& p) {
    Expr den = denominator(arg);
    if (den.depends_on(p)) return std::nullopt;
    auto cs = coefficients_in(numerator(arg), p);
    if (!cs || cs->size() > 2) return std::nullopt;
    LinearArg out;
    out.offset = (*cs)[0] / den;
    out.slope = cs->size() > 1 ? (*cs)[1] / den : Expr(0);
    return out;
}

SolveResult solve_polynomial(const Expr& n, const std::string& p) {
    SolveResult r;
    auto cs = coefficients_in(n, p);
    if (!cs) {
        r.unsupported = true;
        return r;
    }
    std::vector<Expr> c = *cs;
    size_t kmin = 0;
    while (kmin < c.size() && c[kmin].is_structurally_zero()) ++kmin;
    if (kmin > 0) {
        Solution z;
        z.param = p;
        z.value = Expr(0);
        r.roots.push_back(z);
    }
    c.erase(c.begin(), c.begin() + kmin);
    int deg = (int)c.size() - 1;
    auto rational_root = [&](const Expr& v, std::vector<Expr> nz) {
        Solution s;
        s.param = p;
        s.value = v;
        s.nonzero = std::move(nz);
        r.roots.push_back(s);
    };
    if (deg <= 0) return r;
    if (deg == 1) {
        rational_root(-c[0] / c[1], {c[1]});
        return r;
    }
    if (deg == 2) {
        Expr disc = c[1] * c[1] - Expr(4) * c[2] * c[0];
        if (disc.is_structurally_zero()) {
            rational_root(-c[1] / (Expr(2) * c[2]), {c[2]});
            return r;
        }
        if (auto s = poly_sqrt(disc)) {
            rational_root((-c[1] + *s) / (Expr(2) * c[2]), {c[2]});
            rational_root((-c[1] - *s) / (Expr(2) * c[2]), {c[2]});
            return r;
        }
        if (poly_sqrt(-disc)) return r;  // no real roots
    }
    r.unsupported = true;
    return r;
}

}  // namespace

SolveResult solve_for(const Expr& e, const std::string& p) {
    SolveResult r;
    Expr n = numerator(e);
    if (!n.depends_on(p)) return r;
    bool poly_q = false, has_exp = false, has_trig = false;
    for (auto& t : n.rep().num)
        for (auto& f : t.mono) {
            if (!f.atom->params.count(p)) continue;
            switch (f.atom->kind) {
                case AtomKind::param: poly_q = true; break;
                case AtomKind::exp: has_exp = true; break;
                default: has_trig = true;
            }
        }
    if (!has_exp && !has_trig) return solve_polynomial(n, p);
    // a factor exp(s q) shared by every term never vanishes: divide it out
    if (has_exp) {
        std::optional<Expr> common;
        bool shared = true;
        for (auto& t : n.rep().num) {
            Expr slope(0);
            for (auto& f : t.mono)
                if (f.atom->kind == AtomKind::exp && f.atom->params.count(p)) {
                    auto la = linear_in(f.atom->arg, p);
                    if (!la) {
                        r.unsupported = true;
                        return r;
                    }
                    slope += la->slope * Expr(f.exp);
                }
            if (!common) common = slope;
            else if (!common->same(slope)) shared = false;
        }
        if (shared && common && !common->is_structurally_zero())
            return solve_for(n * exp(-*common * Expr::param(p, kind_of(p))), p);
    }
    if (poly_q) {
        r.unsupported = true;
        return r;
    }
    // split every term into (p-free part, exp slope, trig atom)
    struct Piece {
        Expr rest;
        Expr slope;
        const Atom* trig = nullptr;
    };
    std::vector<Piece> pieces;
    for (auto& t : n.rep().num) {
        Piece pc;
        Mono rest;
        Expr factor(1);
        int trig_count = 0;
        for (auto& f : t.mono) {
            if (!f.atom->params.count(p)) {
                rest.push_back(f);
                continue;
            }
            if (f.atom->kind == AtomKind::exp) {
                auto la = linear_in(f.atom->arg, p);
                if (!la) {
                    r.unsupported = true;
                    return r;
                }
                pc.slope = la->slope;
                factor = factor * exp(la->offset);
            } else {
                if (f.exp != 1) {
                    r.unsupported = true;
                    return r;
                }
                pc.trig = f.atom;
                ++trig_count;
            }
        }
        if (trig_count > 1) {
            r.unsupported = true;
            return r;
        }
        pc.rest = Expr::from_parts(Poly{Term{rest, t.coef}}, poly_one()) * factor;
        pieces.push_back(pc);
    }
    if (has_trig) {
        Expr slope0 = pieces[0].slope;
        std::optional<Expr> gamma;
        Expr alpha, beta;
        for (auto& pc : pieces) {
            if (!pc.slope.same(slope0) || !pc.trig) {
                r.unsupported = true;
                return r;
            }
            auto la = linear_in(pc.trig->arg, p);
            if (!la || !la->offset.is_structurally_zero()) {
                r.unsupported = true;
                return r;
            }
            if (!gamma)
                gamma = la->slope;
            else if (!gamma->same(la->slope)) {
                r.unsupported = true;
                return r;
            }
            if (pc.trig->kind == AtomKind::cos)
                alpha = alpha + pc.rest;
            else
                beta = beta + pc.rest;
        }
        Solution s;
        s.param = p;
        s.kind = RootKind::trig;
        s.alpha = alpha;
        s.beta = beta;
        s.gamma = *gamma;
        s.nonzero = {*gamma};
        if (alpha.is_structurally_zero()) {
            Solution z;
            z.param = p;
            z.value = Expr(0);
            r.roots.push_back(z);
            s.special = 2;
            r.roots.push_back(s);
        } else if (beta.is_structurally_zero()) {
            s.special = 1;
            r.roots.push_back(s);
            s.branch = 1;
            r.roots.push_back(s);
        } else {
            s.nonzero.push_back(beta);
            r.roots.push_back(s);
            s.branch = 1;
            r.roots.push_back(s);
        }
        return r;
    }
    // alpha + beta*exp(gamma*p)
    std::vector<std::pair<Expr, Expr>> groups;
    for (auto& pc : pieces) {
        bool placed = false;
        for (auto& g : groups)
            if (g.first.same(pc.slope)) {
                g.second = g.second + pc.rest;
                placed = true;
            }
        if (!placed) groups.emplace_back(pc.slope, pc.rest);
    }
    if (groups.size() == 1) return r;
    if (groups.size() > 2) {
        r.unsupported = true;
        return r;
    }
    Expr ratio = -groups[0].second / groups[1].second;
    int sign = provable_sign(ratio);
    if (sign < 0) return r;
    if (sign == 0) {
        r.unsupported = true;
        return r;
    }
    Solution s;
    s.param = p;
    s.kind = RootKind::log;
    s.ratio = ratio;
    s.gamma = groups[1].first - groups[0].first;
    s.nonzero = {s.gamma};
    r.roots.push_back(s);
    return r;
}

}  // namespace subopt
