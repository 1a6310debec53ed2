#include "subopt/autgrp.hpp"

namespace subopt {

std::string time_name(int k) { return "t" + std::to_string(k); }

Matrix generator_derivation(const LieAlgebra& alg, int k) {
    Matrix m = adjoint_matrix(alg, k);
    for (auto& row : m)
        for (auto& e : row) e = -e;
    return m;
}

namespace {

bool is_zero_matrix(const Matrix& m) {
    for (auto& row : m)
        for (auto& e : row)
            if (!e.is_structurally_zero()) return false;
    return true;
}

// complex numbers over Expr
struct C {
    Expr re, im;
    bool zero() const { return re.is_structurally_zero() && im.is_structurally_zero(); }
    bool same(const C& o) const { return re.same(o.re) && im.same(o.im); }
};
C operator+(const C& a, const C& b) { return {a.re + b.re, a.im + b.im}; }
C operator-(const C& a, const C& b) { return {a.re - b.re, a.im - b.im}; }
C operator*(const C& a, const C& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
C operator/(const C& a, const C& b) {
    if (b.im.is_structurally_zero()) return {a.re / b.re, a.im / b.re};
    Expr n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

// c * t^m * exp(mu t)
struct ETerm {
    C c;
    int m;
    C mu;
};
using EPoly = std::vector<ETerm>;

void add_term(EPoly& p, const ETerm& t) {
    if (t.c.zero()) return;
    for (auto& x : p)
        if (x.m == t.m && x.mu.same(t.mu)) {
            x.c = x.c + t.c;
            return;
        }
    p.push_back(t);
}

// solution of y' = lam*y + g with y(0) = 0
EPoly integrate(const EPoly& g, const C& lam) {
    EPoly y;
    for (auto& t : g) {
        C diff = t.mu - lam;
        if (diff.zero()) {
            add_term(y, {t.c / C{Expr(t.m + 1), Expr()}, t.m + 1, lam});
            continue;
        }
        C a = t.c / diff;
        add_term(y, {a, t.m, t.mu});
        for (int i = t.m - 1; i >= 0; --i) {
            a = C{Expr(-(i + 1)), Expr()} * a / diff;
            add_term(y, {a, i, t.mu});
        }
    }
    C y0;
    for (auto& t : y)
        if (t.m == 0) y0 = y0 + t.c;
    add_term(y, {C{Expr(), Expr()} - y0, 0, lam});
    EPoly out;
    for (auto& t : y)
        if (!t.c.zero()) out.push_back(t);
    return out;
}

// strongly connected blocks of the sparsity graph of X
std::vector<std::vector<int>> blocks(const Matrix& X) {
    int n = X.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) reach[i][j] = i == j || !X[i][j].is_structurally_zero();
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(n);
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> b;
        for (int j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i]) {
                b.push_back(j);
                seen[j] = true;
            }
        out.push_back(b);
    }
    return out;
}

std::optional<GeneratorAutomorphism> nilpotent_series(const Matrix& X, const Expr& t) {
    int n = X.size();
    Matrix sum = identity_matrix(n), power = identity_matrix(n);
    Expr coef(1);
    for (int i = 1; i <= n; ++i) {
        power = matmul(power, X);
        if (is_zero_matrix(power)) {
            GeneratorAutomorphism g;
            g.matrix = sum;
            g.method = "nilpotent";
            g.eigen.assign(n, EigenValue{});
            return g;
        }
        coef = coef * t / Expr(i);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (!power[a][b].is_structurally_zero()) sum[a][b] += coef * power[a][b];
    }
    return std::nullopt;
}

std::optional<GeneratorAutomorphism> spectral(const Matrix& X, const Expr& t) {
    int n = X.size();
    auto bs = blocks(X);
    std::vector<C> lambdas;
    std::vector<EigenValue> eig;
    std::vector<int> owner(n);
    for (size_t b = 0; b < bs.size(); ++b) {
        for (int i : bs[b]) owner[i] = b;
        if (bs[b].size() == 1) {
            int i = bs[b][0];
            lambdas.push_back({X[i][i], Expr()});
            eig.push_back({X[i][i], Expr()});
        } else if (bs[b].size() == 2) {
            int i = bs[b][0], j = bs[b][1];
            if (!X[i][i].same(X[j][j]) || !(X[i][j] + X[j][i]).is_structurally_zero()) return std::nullopt;
            Expr p = X[i][i], q = X[i][j];
            lambdas.push_back({p, q});
            lambdas.push_back({p, -q});
            eig.push_back({p, q});
            eig.push_back({p, -q});
        } else {
            return std::nullopt;
        }
    }
    GeneratorAutomorphism g;
    g.eigen = eig;
    bool block_diagonal = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (owner[i] != owner[j] && !X[i][j].is_structurally_zero()) block_diagonal = false;
    g.matrix.assign(n, std::vector<Expr>(n));
    if (block_diagonal) {
        g.method = "diagonal";
        for (auto& b : bs) {
            if (b.size() == 1) {
                g.matrix[b[0]][b[0]] = exp(X[b[0]][b[0]] * t);
            } else {
                int i = b[0], j = b[1];
                Expr e = exp(X[i][i] * t), q = X[i][j] * t;
                g.matrix[i][i] = e * cos(q);
                g.matrix[j][j] = e * cos(q);
                g.matrix[i][j] = e * sin(q);
                g.matrix[j][i] = -(e * sin(q));
            }
        }
        return g;
    }
    // Putzer: exp(tX) = sum_j r_{j+1}(t) P_j
    g.method = "putzer";
    using CM = std::vector<std::vector<C>>;
    CM P(n, std::vector<C>(n));
    for (int i = 0; i < n; ++i) P[i][i] = C{Expr(1), Expr()};
    EPoly r{{C{Expr(1), Expr()}, 0, lambdas[0]}};
    std::vector<std::vector<C>> acc(n, std::vector<C>(n));
    std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n));
    for (int j = 0; j < n; ++j) {
        for (auto& term : r) {
            Expr tm = pow(t, term.m);
            Expr ept = exp(term.mu.re * t);
            Expr cs = cos(term.mu.im * t), sn = sin(term.mu.im * t);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (P[a][b].zero()) continue;
                    C z = term.c * P[a][b];
                    Expr re = z.re * cs - z.im * sn;
                    if (!re.is_structurally_zero()) out[a][b] += tm * ept * re;
                }
        }
        if (j + 1 == n) break;
        // P <- P (X - lambda_{j+1} I)
        CM next(n, std::vector<C>(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                C s;
                for (int l = 0; l < n; ++l) {
                    if (P[a][l].zero()) continue;
                    C x{X[l][b], Expr()};
                    if (l == b) x = x - lambdas[j];
                    if (!x.zero()) s = s + P[a][l] * x;
                }
                next[a][b] = s;
            }
        P = next;
        r = integrate(r, lambdas[j + 1]);
    }
    g.matrix = out;
    return g;
}

}  // namespace

Verification verify_exponential(const LieAlgebra& alg, const GeneratorAutomorphism& gen) {
    Verification v;
    int n = alg.dim();
    Matrix X = generator_derivation(alg, gen.k);
    Sampler s = alg.sampler(0x5EED);
    const Matrix& M = gen.matrix;
    if ((int)M.size() != n) return {false, -1, -1, "wrong shape"};
    try {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr at0 = substitute(M[i][j], gen.time, Expr(0)) - Expr(i == j ? 1 : 0);
                if (!is_zero(at0, &s)) return {false, i, j, "A(0) differs from the identity"};
            }
        Matrix XM = matmul(X, M);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr res = differentiate(M[i][j], gen.time) - XM[i][j];
                if (!is_zero(res, &s)) return {false, i, j, "dA/dt - X A = " + res.str()};
            }
    } catch (const SymxError& e) {
        return {false, -1, -1, e.what()};
    }
    return v;
}

GeneratorAutomorphism exponentiate(const LieAlgebra& alg, int k) {
    int n = alg.dim();
    Matrix X = generator_derivation(alg, k);
    Expr t = Expr::param(time_name(k), ParamKind::time);
    std::optional<GeneratorAutomorphism> g;
    if (is_zero_matrix(X)) {
        g = GeneratorAutomorphism{};
        g->matrix = identity_matrix(n);
        g->trivial = true;
        g->method = "identity";
        g->eigen.assign(n, EigenValue{});
    }
    if (!g) g = nilpotent_series(X, t);
    if (!g) g = spectral(X, t);
    if (!g) {
        auto it = alg.overrides().find(k);
        if (it == alg.overrides().end()) throw ExponentialUnavailable(k);
        g = GeneratorAutomorphism{};
        g->matrix = it->second;
        g->method = "override";
    }
    g->k = k;
    g->time = time_name(k);
    auto v = verify_exponential(alg, *g);
    if (!v) throw VerificationFailed(k, v.row, v.col, v.reason);
    return *g;
}

std::vector<GeneratorAutomorphism> generators(const LieAlgebra& alg, std::vector<int>* trivial) {
    std::vector<GeneratorAutomorphism> out;
    for (int k = 1; k <= alg.dim(); ++k) {
        if (is_zero_matrix(adjoint_matrix(alg, k))) {
            if (trivial) trivial->push_back(k);
            continue;
        }
        out.push_back(exponentiate(alg, k));
    }
    return out;
}

std::vector<std::vector<double>> evaluate_matrix(const Matrix& m, const std::map<std::string, double>& env) {
    Evaluator<double> ev(env);
    std::vector<std::vector<double>> out(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        for (auto& e : m[i]) out[i].push_back(ev(e));
    return out;
}

}  // namespace subopt
