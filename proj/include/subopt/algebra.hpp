#pragma once

#include "subopt/symx.hpp"

#include <map>
#include <string>
#include <vector>

namespace subopt {

using Vector = std::vector<Expr>;
using Matrix = std::vector<std::vector<Expr>>;

Matrix identity_matrix(int n);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// chained comparison such as "0<|a|<1" or "-1<=a<b<1"; "ab != 0" style products allowed
class Constraint {
public:
    static Constraint parse(const std::string& text);
    bool holds(const std::map<std::string, double>& env) const;
    const std::string& text() const { return text_; }

private:
    enum class Cmp { lt, le, gt, ge, ne, eq };
    struct Operand {
        Expr e;
        bool abs = false;
    };
    std::string text_;
    std::vector<Operand> ops_;
    std::vector<Cmp> cmps_;
};

// splits "a!=0, b>=0" / "a>0 and b<1" into single constraints
std::vector<Constraint> parse_constraints(const std::string& text);

struct AlgebraParam {
    std::string name;
    std::vector<Constraint> constraints;
};

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct JacobiViolation : AlgebraError {
    JacobiViolation(int a, int b, int c, int e, const std::string& value);
    int alpha, beta, gamma, epsilon;  // 1-based
};
struct AntisymmetryViolation : AlgebraError {
    AntisymmetryViolation(int a, int b, int c);
    int alpha, beta, gamma;
};
struct UnknownBasisName : AlgebraError {
    explicit UnknownBasisName(const std::string& n) : AlgebraError("unknown basis name '" + n + "'"), name(n) {}
    std::string name;
};

// C[a][b][g]: coefficient of basis g in [basis a, basis b], 0-based storage
using StructureConstants = std::vector<std::vector<std::vector<Expr>>>;

class LieAlgebra {
public:
    int dim() const { return r_; }
    const Expr& c(int a, int b, int g) const { return C_[a][b][g]; }
    const StructureConstants& constants() const { return C_; }
    const std::vector<std::string>& basis() const { return basis_; }
    const std::vector<AlgebraParam>& params() const { return params_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    bool admissible(const std::map<std::string, double>& env) const;
    Sampler::Predicate predicate() const;
    Sampler sampler(std::uint64_t seed) const { return Sampler(seed, predicate()); }

    // closed-form exponentials keyed by 1-based generator index; matrix in time t<k>
    const std::map<int, Matrix>& overrides() const { return overrides_; }
    void set_override(int k, Matrix m) { overrides_[k] = std::move(m); }

    // replaces algebra parameters by values (constraints must hold)
    LieAlgebra instantiate(const std::map<std::string, Rational>& values) const;

private:
    friend LieAlgebra from_structure_constants(int, StructureConstants, std::vector<AlgebraParam>,
                                               std::vector<std::string>, std::string);
    int r_ = 0;
    StructureConstants C_;
    std::vector<std::string> basis_;
    std::vector<AlgebraParam> params_;
    std::string name_;
    std::map<int, Matrix> overrides_;
};

// validates antisymmetry (completing a lower triangle left empty) and Jacobi
LieAlgebra from_structure_constants(int r, StructureConstants C, std::vector<AlgebraParam> params = {},
                                    std::vector<std::string> basis = {}, std::string name = "");

struct BracketSpec {
    std::string left, right;
    std::vector<std::pair<Expr, std::string>> combination;  // coefficient, basis name
};

LieAlgebra from_brackets(const std::vector<std::string>& basis, const std::vector<BracketSpec>& brackets,
                         std::vector<AlgebraParam> params = {}, std::string name = "");

Vector bracket(const LieAlgebra& alg, const Vector& x, const Vector& y);
Vector basis_vector(int r, int k);  // 1-based

// column action: M*y = [Xi_k, y]; k is 1-based
Matrix adjoint_matrix(const LieAlgebra& alg, int k);

}  // namespace subopt
