#include "subopt/document.hpp"

#include <regex>
#include <set>
#include <sstream>

namespace subopt {

ParseError::ParseError(int l, int c, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg),
      line(l),
      column(c) {}

namespace {

struct Stmt {
    std::string text;
    int line, col;  // of the first non-blank character
};

std::vector<Stmt> statements(const std::string& src) {
    std::vector<Stmt> out;
    int line = 1, col = 1;
    std::string cur;
    int sl = 0, sc = 0;
    bool comment = false;
    auto flush = [&] {
        while (!cur.empty() && std::isspace((unsigned char)cur.back())) cur.pop_back();
        if (!cur.empty()) out.push_back({cur, sl, sc});
        cur.clear();
    };
    for (char ch : src) {
        if (ch == '\n') {
            flush();
            comment = false;
            ++line;
            col = 1;
            continue;
        }
        if (!comment && ch == '#') comment = true;
        if (!comment) {
            if (ch == ';') {
                flush();
            } else if (!cur.empty() || !std::isspace((unsigned char)ch)) {
                if (cur.empty()) sl = line, sc = col;
                cur += ch;
            }
        }
        ++col;
    }
    flush();
    return out;
}

// "parse error at column N: ..." from the expression parser, shifted to document coordinates
[[noreturn]] void rethrow(const SymxError& e, const Stmt& s, int offset) {
    std::string msg = e.what();
    static const std::regex re("parse error at column ([0-9]+): (.*)");
    std::smatch m;
    if (std::regex_match(msg, m, re)) throw ParseError(s.line, s.col + offset + std::stoi(m[1]) - 1, m[2]);
    throw ParseError(s.line, s.col + offset, msg);
}

size_t skip_ws(const std::string& t, size_t i) {
    while (i < t.size() && std::isspace((unsigned char)t[i])) ++i;
    return i;
}

// splits "((a,b),(c,d))" into rows of entry strings with their offsets
std::vector<std::vector<std::pair<std::string, int>>> split_matrix(const std::string& t, int base, const Stmt& s) {
    std::vector<std::vector<std::pair<std::string, int>>> rows;
    size_t i = skip_ws(t, 0);
    if (i >= t.size() || t[i] != '(') throw ParseError(s.line, s.col + base + i, "expected '(' to open a matrix");
    ++i;
    while (true) {
        i = skip_ws(t, i);
        if (i >= t.size() || t[i] != '(') throw ParseError(s.line, s.col + base + i, "expected '(' to open a row");
        ++i;
        std::vector<std::pair<std::string, int>> row;
        int depth = 0;
        size_t start = i;
        for (; i < t.size(); ++i) {
            char ch = t[i];
            if (ch == '(') ++depth;
            if (ch == ')' && depth-- == 0) break;
            if (ch == ',' && depth == 0) {
                row.push_back({t.substr(start, i - start), (int)start});
                start = i + 1;
            }
        }
        if (i >= t.size()) throw ParseError(s.line, s.col + base + i, "unterminated row");
        row.push_back({t.substr(start, i - start), (int)start});
        rows.push_back(row);
        i = skip_ws(t, i + 1);
        if (i < t.size() && t[i] == ',') {
            ++i;
            continue;
        }
        if (i < t.size() && t[i] == ')') {
            i = skip_ws(t, i + 1);
            if (i != t.size()) throw ParseError(s.line, s.col + base + i, "trailing text after matrix");
            return rows;
        }
        throw ParseError(s.line, s.col + base + i, "expected ',' or ')'");
    }
}

bool is_ident(const std::string& s) { return std::regex_match(s, std::regex("[A-Za-z_][A-Za-z_0-9]*")); }

}  // namespace

LieAlgebra parse_algebra(const std::string& text) {
    int dim = -1;
    std::vector<std::string> basis;
    std::vector<AlgebraParam> params;
    std::map<std::string, ParamKind> kinds;
    std::vector<BracketSpec> brackets;
    struct ExpStmt {
        int k;
        Stmt s;
        int base;  // column offset of the matrix text within the statement
        std::string body;
    };
    std::vector<ExpStmt> exps;
    std::string name;
    std::set<std::pair<std::string, std::string>> seen;

    static const std::regex kw("([A-Za-z]+)\\b\\s*(.*)");
    for (auto& s : statements(text)) {
        if (s.text[0] == '[') {
            if (dim < 0) throw ParseError(s.line, s.col, "bracket before 'dim'");
            if (basis.empty())
                for (int i = 1; i <= dim; ++i) basis.push_back("e" + std::to_string(i));
            static const std::regex br("\\[\\s*([A-Za-z_][A-Za-z_0-9]*)\\s*,\\s*([A-Za-z_][A-Za-z_0-9]*)\\s*\\]\\s*=(.*)");
            std::smatch m;
            if (!std::regex_match(s.text, m, br)) throw ParseError(s.line, s.col, "expected [x,y] = combination");
            std::string l = m[1], r = m[2];
            for (auto& [nm, pos] : {std::pair{l, m.position(1)}, std::pair{r, m.position(2)}})
                if (std::find(basis.begin(), basis.end(), nm) == basis.end())
                    throw ParseError(s.line, s.col + pos, "unknown basis name '" + nm + "'");
            if (l == r) throw ParseError(s.line, s.col, "[" + l + "," + l + "] is zero by antisymmetry");
            if (!seen.insert({l, r}).second || !seen.insert({r, l}).second)
                throw ParseError(s.line, s.col, "bracket [" + l + "," + r + "] given twice");
            int off = m.position(3);
            auto k2 = kinds;
            for (auto& b : basis) k2[b] = ParamKind::algebra;
            Expr rhs;
            try {
                rhs = parse_expr(m[3], &k2);
            } catch (const SymxError& e) {
                rethrow(e, s, off);
            }
            for (auto& p : rhs.params())
                if (!k2.count(p)) throw ParseError(s.line, s.col + off, "undeclared parameter '" + p + "'");
            BracketSpec spec{l, r, {}};
            Expr rest = rhs;
            for (auto& b : basis) {
                Expr c = differentiate(rhs, b);
                for (auto& p : c.params())
                    if (std::find(basis.begin(), basis.end(), p) != basis.end())
                        throw ParseError(s.line, s.col + off, "right-hand side is not linear in the basis");
                if (c.is_structurally_zero()) continue;
                spec.combination.push_back({c, b});
                rest = rest - c * Expr::param(b, ParamKind::algebra);
            }
            if (!rest.is_structurally_zero())
                throw ParseError(s.line, s.col + off, "term without a basis element: " + rest.str());
            brackets.push_back(spec);
            continue;
        }
        std::smatch m;
        if (!std::regex_match(s.text, m, kw)) throw ParseError(s.line, s.col, "unrecognised statement");
        std::string key = m[1], arg = m[2];
        int off = m.position(2);
        if (key == "dim") {
            if (dim >= 0) throw ParseError(s.line, s.col, "'dim' given twice");
            if (!std::regex_match(arg, std::regex("[0-9]+"))) throw ParseError(s.line, s.col + off, "expected a dimension");
            dim = std::stoi(arg);
            if (dim < 1 || dim > 8) throw ParseError(s.line, s.col + off, "dimension must be 1..8");
        } else if (key == "basis") {
            if (dim < 0) throw ParseError(s.line, s.col, "'basis' before 'dim'");
            if (!basis.empty() || !brackets.empty()) throw ParseError(s.line, s.col, "'basis' must precede brackets");
            std::istringstream in(arg);
            for (std::string b; in >> b;) {
                if (!is_ident(b)) throw ParseError(s.line, s.col + off, "bad basis name '" + b + "'");
                basis.push_back(b);
            }
            if ((int)basis.size() != dim)
                throw ParseError(s.line, s.col + off, "expected " + std::to_string(dim) + " basis names");
        } else if (key == "param") {
            static const std::regex pr("([A-Za-z_][A-Za-z_0-9]*)\\s*(\\((.*)\\))?\\s*");
            std::smatch pm;
            if (!std::regex_match(arg, pm, pr)) throw ParseError(s.line, s.col + off, "expected: param NAME (constraints)");
            std::string nm = pm[1];
            if (kinds.count(nm)) throw ParseError(s.line, s.col + off, "parameter '" + nm + "' declared twice");
            AlgebraParam p{nm, {}};
            kinds[nm] = ParamKind::algebra;
            if (pm[3].matched && !std::string(pm[3]).empty()) {
                try {
                    p.constraints = parse_constraints(pm[3]);
                } catch (const std::exception& e) {
                    throw ParseError(s.line, s.col + off + pm.position(3), e.what());
                }
            }
            params.push_back(p);
        } else if (key == "exp") {
            static const std::regex er("([0-9]+)\\s*=(.*)");
            std::smatch em;
            if (!std::regex_match(arg, em, er)) throw ParseError(s.line, s.col + off, "expected: exp K = ((..),(..))");
            exps.push_back({std::stoi(em[1]), s, off + (int)em.position(2), em[2]});
        } else if (key == "name") {
            name = arg;
        } else {
            throw ParseError(s.line, s.col, "unknown statement '" + key + "'");
        }
    }
    if (dim < 0) throw ParseError(1, 1, "missing 'dim'");
    if (basis.empty())
        for (int i = 1; i <= dim; ++i) basis.push_back("e" + std::to_string(i));

    LieAlgebra alg = from_brackets(basis, brackets, params, name);
    for (auto& [k, s, base, body] : exps) {
        if (k < 1 || k > dim) throw ParseError(s.line, s.col + base, "generator index out of range");
        auto rows = split_matrix(body, base, s);
        if ((int)rows.size() != dim) throw ParseError(s.line, s.col + base, "matrix must have dim rows");
        Matrix M;
        for (auto& row : rows) {
            if ((int)row.size() != dim) throw ParseError(s.line, s.col + base, "matrix must have dim columns");
            std::vector<Expr> out;
            for (auto& [txt, pos] : row) {
                try {
                    out.push_back(parse_expr(txt, &kinds));
                } catch (const SymxError& e) {
                    rethrow(e, s, base + pos);
                }
            }
            M.push_back(out);
        }
        alg.set_override(k, M);
    }
    return alg;
}

std::string serialize_algebra(const LieAlgebra& alg) {
    std::ostringstream o;
    int r = alg.dim();
    if (!alg.name().empty()) o << "name " << alg.name() << "\n";
    o << "dim " << r << "\n";
    bool def = true;
    for (int i = 0; i < r; ++i) def = def && alg.basis()[i] == "e" + std::to_string(i + 1);
    if (!def) {
        o << "basis";
        for (auto& b : alg.basis()) o << " " << b;
        o << "\n";
    }
    for (auto& p : alg.params()) {
        o << "param " << p.name;
        if (!p.constraints.empty()) {
            o << " (";
            for (size_t i = 0; i < p.constraints.size(); ++i) o << (i ? ", " : "") << p.constraints[i].text();
            o << ")";
        }
        o << "\n";
    }
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b) {
            std::string rhs;
            for (int g = 0; g < r; ++g) {
                const Expr& c = alg.c(a, b, g);
                if (c.is_structurally_zero()) continue;
                const std::string& b = alg.basis()[g];
                bool neg = false;
                std::string term;
                if (auto q = c.as_rational()) {
                    neg = *q < 0;
                    Rational m = abs(*q);
                    term = m == 1 ? b : m.get_str() + " " + b;
                } else {
                    term = "(" + c.str() + ") " + b;
                }
                if (rhs.empty())
                    rhs = (neg ? "-" : "") + term;
                else
                    rhs += (neg ? " - " : " + ") + term;
            }
            if (!rhs.empty()) o << "[" << alg.basis()[a] << "," << alg.basis()[b] << "] = " << rhs << "\n";
        }
    for (auto& [k, M] : alg.overrides()) {
        o << "exp " << k << " = (";
        for (size_t i = 0; i < M.size(); ++i) {
            o << (i ? "," : "") << "(";
            for (size_t j = 0; j < M[i].size(); ++j) o << (j ? "," : "") << M[i][j].str();
            o << ")";
        }
        o << ")\n";
    }
    return o.str();
}

}  // namespace subopt
