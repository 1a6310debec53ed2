#pragma once

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace subopt {

using Rational = mpq_class;

enum class ParamKind { time, algebra, coefficient };

struct Parameter {
    std::string name;
    ParamKind kind = ParamKind::coefficient;
};

struct SymxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Expr;

namespace detail {

enum class AtomKind { param, exp, sin, cos };

struct Atom;

struct Factor {
    const Atom* atom;
    int exp;
};
using Mono = std::vector<Factor>;  // sorted by atom key, exponents > 0

struct Term {
    Mono mono;
    Rational coef;
};
using Poly = std::vector<Term>;  // sorted descending (graded lex), no zero coefficients

struct Rep {
    Poly num;
    Poly den;
};

}  // namespace detail

class Expr {
public:
    Expr();
    Expr(long v);
    Expr(const Rational& q);

    static Expr param(const std::string& name, ParamKind kind = ParamKind::coefficient);
    static Expr param(const Parameter& p) { return param(p.name, p.kind); }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr& operator/=(const Expr& o) { return *this = *this / o; }

    // structural equality of canonical forms
    bool same(const Expr& o) const;
    bool is_structurally_zero() const;
    bool is_constant() const;
    bool is_polynomial() const;  // denominator is 1
    std::optional<Rational> as_rational() const;

    // canonical text; stable across runs
    std::string str() const;

    std::set<std::string> params() const;
    bool depends_on(const std::string& name) const;

    const detail::Rep& rep() const { return *rep_; }
    static Expr from_parts(detail::Poly num, detail::Poly den);

private:
    explicit Expr(std::shared_ptr<const detail::Rep> r) : rep_(std::move(r)) {}
    std::shared_ptr<const detail::Rep> rep_;
};

Expr pow(const Expr& e, int k);
Expr exp(const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);

// canonical form; idempotent
Expr normalize(const Expr& e);
Expr differentiate(const Expr& e, const std::string& p);
Expr substitute(const Expr& e, const std::string& p, const Expr& value);
Expr numerator(const Expr& e);
Expr denominator(const Expr& e);

// polynomial view of e's numerator in parameter p: coefficient list, index = degree.
// nullopt when p occurs inside a transcendental atom.
std::optional<std::vector<Expr>> coefficients_in(const Expr& e, const std::string& p);

std::optional<Expr> poly_sqrt(const Expr& e);
// strict sign decidable from the form: +1, -1, or 0 (unknown)
int provable_sign(const Expr& e);

Expr parse_expr(const std::string& text,
                const std::map<std::string, ParamKind>* kinds = nullptr);

// ---------------------------------------------------------------- numerics

struct Dual {
    static constexpr int N = 24;
    double v = 0.0;
    std::array<double, N> g{};
    int n = 0;

    Dual() = default;
    Dual(double x) : v(x) {}
    static Dual variable(double x, int idx, int n) {
        Dual d(x);
        d.n = n;
        d.g[idx] = 1.0;
        return d;
    }
};

Dual operator+(const Dual& a, const Dual& b);
Dual operator-(const Dual& a, const Dual& b);
Dual operator*(const Dual& a, const Dual& b);
Dual operator/(const Dual& a, const Dual& b);
Dual operator-(const Dual& a);
Dual exp(const Dual& a);
Dual sin(const Dual& a);
Dual cos(const Dual& a);
Dual log(const Dual& a);
Dual atan(const Dual& a);
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

template <class T>
class Evaluator {
public:
    explicit Evaluator(std::map<std::string, T> env) : env_(std::move(env)) {}
    T operator()(const Expr& e);
    const std::map<std::string, T>& env() const { return env_; }

private:
    T atom(const detail::Atom* a);
    T poly(const detail::Poly& p);
    std::map<std::string, T> env_;
    std::unordered_map<const detail::Atom*, T> cache_;
};

extern template class Evaluator<double>;
extern template class Evaluator<Dual>;

double evaluate(const Expr& e, const std::map<std::string, double>& env);

// Pseudo-random admissible sample points.
class Sampler {
public:
    using Predicate = std::function<bool(const std::map<std::string, double>&)>;
    explicit Sampler(std::uint64_t seed = 0x5EED, Predicate admissible = {});

    double draw(ParamKind kind);
    // draws every named parameter, redrawing until admissible
    std::map<std::string, double> point(const std::vector<Parameter>& ps);
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    Predicate admissible_;
};

std::vector<Parameter> parameters_of(const Expr& e);
std::vector<Parameter> parameters_of(const std::vector<Expr>& es);
ParamKind kind_of(const std::string& name);

constexpr int kZeroSamples = 8;

// symbolic zero test with numeric confirmation
bool is_zero(const Expr& e, Sampler* sampler = nullptr);

int generic_rank(const std::vector<Expr>& exprs, const std::vector<std::string>& params,
                 Sampler* sampler = nullptr);

// ---------------------------------------------------------------- solving

enum class RootKind { rational, trig, log };

struct Solution {
    std::string param;
    RootKind kind = RootKind::rational;
    std::optional<Expr> value;  // rational roots
    // trig: gamma*q = atan(-alpha/beta) + branch*pi, or fixed angle when alpha/beta vanish
    Expr alpha, beta, gamma;
    int branch = 0;
    int special = 0;  // 0 general, 1: beta==0 (angle = branch ? -pi/2 : pi/2), 2: alpha==0 (angle = pi)
    // log: q = log(ratio)/gamma
    Expr ratio;
    std::vector<Expr> nonzero;  // validity side conditions

    std::string describe() const;
    template <class T>
    T evaluate(Evaluator<T>& ev) const;
};

struct SolveResult {
    bool unsupported = false;
    std::vector<Solution> roots;
};

SolveResult solve_for(const Expr& e, const std::string& p);

}  // namespace subopt
