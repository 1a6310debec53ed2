#include "subopt/algebra.hpp"

#include <algorithm>
#include <cctype>

namespace subopt {

Matrix identity_matrix(int n) {
    Matrix m(n, std::vector<Expr>(n));
    for (int i = 0; i < n; ++i) m[i][i] = Expr(1);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    Matrix out(n, std::vector<Expr>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_structurally_zero()) continue;
            for (size_t j = 0; j < m; ++j)
                if (!b[l][j].is_structurally_zero()) out[i][j] += a[i][l] * b[l][j];
        }
    return out;
}

Matrix transpose(const Matrix& a) {
    if (a.empty()) return a;
    Matrix out(a[0].size(), std::vector<Expr>(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
    return out;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

Constraint Constraint::parse(const std::string& text) {
    Constraint c;
    c.text_ = trim(text);
    const std::string& s = c.text_;
    std::vector<std::string> parts;
    size_t start = 0;
    int depth = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (depth) continue;
        Cmp op;
        size_t len = 0;
        auto two = s.substr(i, 2);
        if (two == "<=") op = Cmp::le, len = 2;
        else if (two == ">=") op = Cmp::ge, len = 2;
        else if (two == "!=") op = Cmp::ne, len = 2;
        else if (two == "==") op = Cmp::eq, len = 2;
        else if (ch == '<') op = Cmp::lt, len = 1;
        else if (ch == '>') op = Cmp::gt, len = 1;
        else if (ch == '=') op = Cmp::eq, len = 1;
        if (!len) continue;
        parts.push_back(s.substr(start, i - start));
        c.cmps_.push_back(op);
        i += len - 1;
        start = i + 1;
    }
    parts.push_back(s.substr(start));
    if (c.cmps_.empty()) throw SymxError("constraint without comparison: '" + s + "'");
    std::map<std::string, ParamKind> kinds;
    for (auto& p : parts) {
        std::string t = trim(p);
        Operand o;
        if (t.size() >= 2 && t.front() == '|' && t.back() == '|') {
            o.abs = true;
            t = t.substr(1, t.size() - 2);
        }
        if (t.empty()) throw SymxError("empty operand in constraint '" + s + "'");
        o.e = parse_expr(t);
        c.ops_.push_back(o);
    }
    return c;
}

bool Constraint::holds(const std::map<std::string, double>& env) const {
    std::vector<double> v;
    for (auto& o : ops_) {
        double x = evaluate(o.e, env);
        v.push_back(o.abs ? std::abs(x) : x);
    }
    for (size_t i = 0; i < cmps_.size(); ++i) {
        double a = v[i], b = v[i + 1];
        bool ok = true;
        switch (cmps_[i]) {
            case Cmp::lt: ok = a < b; break;
            case Cmp::le: ok = a <= b; break;
            case Cmp::gt: ok = a > b; break;
            case Cmp::ge: ok = a >= b; break;
            case Cmp::ne: ok = a != b; break;
            case Cmp::eq: ok = a == b; break;
        }
        if (!ok) return false;
    }
    return true;
}

std::vector<Constraint> parse_constraints(const std::string& text) {
    std::vector<Constraint> out;
    std::string s = text;
    // "and" -> ","
    for (size_t p; (p = s.find(" and ")) != std::string::npos;) s.replace(p, 5, ",");
    size_t start = 0;
    int depth = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i < s.size() && s[i] == '(') ++depth;
        if (i < s.size() && s[i] == ')') --depth;
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            std::string part = trim(s.substr(start, i - start));
            if (!part.empty()) out.push_back(Constraint::parse(part));
            start = i + 1;
        }
    }
    return out;
}

JacobiViolation::JacobiViolation(int a, int b, int c, int e, const std::string& value)
    : AlgebraError("Jacobi identity fails for (" + std::to_string(a) + "," + std::to_string(b) + "," +
                   std::to_string(c) + ") in component " + std::to_string(e) + ": " + value),
      alpha(a), beta(b), gamma(c), epsilon(e) {}

AntisymmetryViolation::AntisymmetryViolation(int a, int b, int c)
    : AlgebraError("antisymmetry fails: C[" + std::to_string(a) + "][" + std::to_string(b) + "][" +
                   std::to_string(c) + "] != -C[" + std::to_string(b) + "][" + std::to_string(a) + "][" +
                   std::to_string(c) + "]"),
      alpha(a), beta(b), gamma(c) {}

bool LieAlgebra::admissible(const std::map<std::string, double>& env) const {
    for (auto& p : params_)
        for (auto& c : p.constraints)
            if (!c.holds(env)) return false;
    return true;
}

Sampler::Predicate LieAlgebra::predicate() const {
    bool any = false;
    for (auto& p : params_) any = any || !p.constraints.empty();
    if (!any) return {};
    auto ps = params_;
    return [ps](const std::map<std::string, double>& env) {
        for (auto& p : ps) {
            if (!env.count(p.name)) continue;
            for (auto& c : p.constraints) {
                bool bound = true;
                for (auto& q : ps)
                    if (!env.count(q.name) && c.text().find(q.name) != std::string::npos) bound = false;
                if (bound && !c.holds(env)) return false;
            }
        }
        return true;
    };
}

namespace {

void check_linear(const Expr& e, int a, int b, int g) {
    bool ok = e.is_polynomial();
    for (auto& t : e.rep().num) {
        int deg = 0;
        for (auto& f : t.mono) {
            deg += f.exp;
        }
        if (deg > 1) ok = false;
    }
    for (auto& p : e.params())
        if (kind_of(p) != ParamKind::algebra) ok = false;
    if (!ok || e.str().find('(') != std::string::npos)
        throw AlgebraError("structure constant C[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "][" +
                           std::to_string(g + 1) + "] = " + e.str() + " is not linear in the algebra parameters");
}

}  // namespace

LieAlgebra from_structure_constants(int r, StructureConstants C, std::vector<AlgebraParam> params,
                                    std::vector<std::string> basis, std::string name) {
    if (r < 1 || r > 8) throw AlgebraError("dimension must be between 1 and 8");
    if ((int)C.size() != r) throw AlgebraError("structure constants must have shape r x r x r");
    for (auto& row : C) {
        if ((int)row.size() != r) throw AlgebraError("structure constants must have shape r x r x r");
        for (auto& v : row)
            if ((int)v.size() != r) throw AlgebraError("structure constants must have shape r x r x r");
    }
    if (basis.empty())
        for (int i = 1; i <= r; ++i) basis.push_back("e" + std::to_string(i));
    if ((int)basis.size() != r) throw AlgebraError("basis size differs from dimension");

    std::set<std::string> declared;
    for (auto& p : params) declared.insert(p.name);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int g = 0; g < r; ++g) {
                check_linear(C[a][b][g], a, b, g);
                for (auto& p : C[a][b][g].params())
                    if (!declared.count(p)) throw AlgebraError("undeclared parameter '" + p + "'");
            }

    auto empty = [&](int a, int b) {
        for (int g = 0; g < r; ++g)
            if (!C[a][b][g].is_structurally_zero()) return false;
        return true;
    };
    for (int a = 0; a < r; ++a) {
        if (!empty(a, a))
            for (int g = 0; g < r; ++g)
                if (!C[a][a][g].is_structurally_zero()) throw AntisymmetryViolation(a + 1, a + 1, g + 1);
        for (int b = a + 1; b < r; ++b) {
            if (empty(b, a))
                for (int g = 0; g < r; ++g) C[b][a][g] = -C[a][b][g];
            else if (empty(a, b))
                for (int g = 0; g < r; ++g) C[a][b][g] = -C[b][a][g];
            for (int g = 0; g < r; ++g)
                if (!(C[a][b][g] + C[b][a][g]).is_structurally_zero()) throw AntisymmetryViolation(a + 1, b + 1, g + 1);
        }
    }

    LieAlgebra alg;
    alg.r_ = r;
    alg.C_ = std::move(C);
    alg.basis_ = std::move(basis);
    alg.params_ = std::move(params);
    alg.name_ = std::move(name);

    Sampler s = alg.sampler(0x5EED);
    const auto& K = alg.C_;
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b)
            for (int c = b + 1; c < r; ++c)
                for (int e = 0; e < r; ++e) {
                    Expr sum;
                    for (int d = 0; d < r; ++d) {
                        if (!K[a][b][d].is_structurally_zero() && !K[d][c][e].is_structurally_zero())
                            sum += K[a][b][d] * K[d][c][e];
                        if (!K[b][c][d].is_structurally_zero() && !K[d][a][e].is_structurally_zero())
                            sum += K[b][c][d] * K[d][a][e];
                        if (!K[c][a][d].is_structurally_zero() && !K[d][b][e].is_structurally_zero())
                            sum += K[c][a][d] * K[d][b][e];
                    }
                    if (!is_zero(sum, &s)) throw JacobiViolation(a + 1, b + 1, c + 1, e + 1, sum.str());
                }
    return alg;
}

LieAlgebra from_brackets(const std::vector<std::string>& basis, const std::vector<BracketSpec>& brackets,
                         std::vector<AlgebraParam> params, std::string name) {
    int r = basis.size();
    auto index = [&](const std::string& n) {
        auto it = std::find(basis.begin(), basis.end(), n);
        if (it == basis.end()) throw UnknownBasisName(n);
        return int(it - basis.begin());
    };
    StructureConstants C(r, std::vector<std::vector<Expr>>(r, std::vector<Expr>(r)));
    for (auto& br : brackets) {
        int a = index(br.left), b = index(br.right);
        if (a == b) throw AntisymmetryViolation(a + 1, b + 1, 1);
        std::vector<Expr> v(r);
        for (auto& [coef, n] : br.combination) v[index(n)] += coef;
        for (int g = 0; g < r; ++g) {
            if (!C[a][b][g].is_structurally_zero() && !C[a][b][g].same(v[g]))
                throw AlgebraError("bracket [" + br.left + "," + br.right + "] given twice");
            C[a][b][g] = v[g];
            C[b][a][g] = -v[g];
        }
    }
    return from_structure_constants(r, std::move(C), std::move(params), basis, std::move(name));
}

LieAlgebra LieAlgebra::instantiate(const std::map<std::string, Rational>& values) const {
    std::map<std::string, double> env;
    for (auto& [k, v] : values) env[k] = v.get_d();
    std::vector<AlgebraParam> rest;
    for (auto& p : params_) {
        if (!values.count(p.name)) {
            rest.push_back(p);
            continue;
        }
    }
    for (auto& p : params_)
        for (auto& c : p.constraints) {
            bool bound = true;
            for (auto& q : params_)
                if (!values.count(q.name) && c.text().find(q.name) != std::string::npos) bound = false;
            if (bound && !c.holds(env))
                throw AlgebraError("parameter values violate constraint " + c.text());
        }
    auto subst = [&](Expr e) {
        for (auto& [k, v] : values) e = substitute(e, k, Expr(v));
        return e;
    };
    StructureConstants C = C_;
    for (auto& x : C)
        for (auto& y : x)
            for (auto& z : y) z = subst(z);
    std::string label = name_;
    std::string suffix;
    for (auto& [k, v] : values) suffix += (suffix.empty() ? "" : ",") + k + "=" + v.get_str();
    if (!suffix.empty()) label += "[" + suffix + "]";
    LieAlgebra out = from_structure_constants(r_, std::move(C), rest, basis_, label);
    for (auto& [k, m] : overrides_) {
        Matrix mm = m;
        for (auto& row : mm)
            for (auto& e : row) e = subst(e);
        out.set_override(k, mm);
    }
    return out;
}

Vector bracket(const LieAlgebra& alg, const Vector& x, const Vector& y) {
    int r = alg.dim();
    Vector out(r);
    for (int a = 0; a < r; ++a) {
        if (x[a].is_structurally_zero()) continue;
        for (int b = 0; b < r; ++b) {
            if (y[b].is_structurally_zero()) continue;
            Expr xy = x[a] * y[b];
            for (int g = 0; g < r; ++g)
                if (!alg.c(a, b, g).is_structurally_zero()) out[g] += xy * alg.c(a, b, g);
        }
    }
    return out;
}

Vector basis_vector(int r, int k) {
    Vector v(r);
    v[k - 1] = Expr(1);
    return v;
}

Matrix adjoint_matrix(const LieAlgebra& alg, int k) {
    int r = alg.dim();
    Matrix m(r, std::vector<Expr>(r));
    for (int j = 0; j < r; ++j)
        for (int g = 0; g < r; ++g) m[g][j] = alg.c(k - 1, j, g);
    return m;
}

}  // namespace subopt
