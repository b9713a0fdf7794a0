#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace hecc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
    int var = 0;
    double coef = 0.0;
};

/// constant + Σ coef·x[var]
struct AffineExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    AffineExpr() = default;
    AffineExpr(double c) : constant(c) {}
    AffineExpr(std::vector<Term> t, double c = 0.0) : terms(std::move(t)), constant(c) {}

    AffineExpr& add(int var, double coef)
    {
        terms.push_back({var, coef});
        return *this;
    }
    double eval(const std::vector<double>& x) const;
};

/// Convex program with a linear objective plus weighted squares of affine
/// expressions, linear rows, second-order cones and rotated cones.
///
///   min  c'x + c0 + Σ w_q (a_q'x + d_q)^2
///   s.t. lo_i <= r_i'x <= hi_i
///        ‖x_soc‖ <= t_soc
///        2·u·v >= ‖w‖², u, v >= 0
///        lower <= x <= upper
class ConicProgram {
public:
    struct Quadratic {
        double weight = 0.0;
        AffineExpr expr;
    };
    struct Row {
        std::vector<Term> terms;
        double lo = -kInf;
        double hi = kInf;
        std::string name;
    };
    struct SecondOrderCone {
        AffineExpr t;
        std::vector<AffineExpr> x;
        std::string name;
    };
    struct RotatedCone {
        AffineExpr u;
        AffineExpr v;
        std::vector<AffineExpr> w;
        std::string name;
    };

    int add_variable(std::string name, double lower = -kInf, double upper = kInf, double cost = 0.0);
    void set_bounds(int var, double lower, double upper)
    {
        lower_.at(var) = lower;
        upper_.at(var) = upper;
    }
    void set_cost(int var, double cost) { cost_.at(var) = cost; }
    void add_cost(int var, double cost) { cost_.at(var) += cost; }
    void add_constant(double c) { constant_ += c; }
    void add_quadratic(double weight, AffineExpr expr);

    void add_row(std::vector<Term> terms, double lo, double hi, std::string name = {});
    void add_le(std::vector<Term> terms, double hi, std::string name = {}) { add_row(std::move(terms), -kInf, hi, std::move(name)); }
    void add_ge(std::vector<Term> terms, double lo, std::string name = {}) { add_row(std::move(terms), lo, kInf, std::move(name)); }
    void add_eq(std::vector<Term> terms, double rhs, std::string name = {}) { add_row(std::move(terms), rhs, rhs, std::move(name)); }
    void add_soc(AffineExpr t, std::vector<AffineExpr> x, std::string name = {});
    void add_rotated(AffineExpr u, AffineExpr v, std::vector<AffineExpr> w, std::string name = {});

    int num_vars() const { return static_cast<int>(cost_.size()); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<double>& cost() const { return cost_; }
    double constant() const { return constant_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<Quadratic>& quadratics() const { return quadratics_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<SecondOrderCone>& socs() const { return socs_; }
    const std::vector<RotatedCone>& rotated() const { return rotated_; }

    /// Throws std::invalid_argument on references to undeclared variables,
    /// negative quadratic weights, crossed bounds or non-finite data.
    void validate() const;

    double objective(const std::vector<double>& x) const;
    /// Largest violation over bounds, rows and cones (absolute units).
    double max_violation(const std::vector<double>& x) const;

    /// Plain-text listing: one line per variable, quadratic, row and cone.
    void dump(std::ostream& os) const;

private:
    std::vector<double> lower_, upper_, cost_;
    std::vector<std::string> names_;
    double constant_ = 0.0;
    std::vector<Quadratic> quadratics_;
    std::vector<Row> rows_;
    std::vector<SecondOrderCone> socs_;
    std::vector<RotatedCone> rotated_;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SolveStatus s);

struct ConicSolution {
    SolveStatus status = SolveStatus::iteration_limit;
    std::vector<double> x;
    double objective = 0.0;
    double primal_residual = 0.0;  // max violation of the original program
    double dual_residual = 0.0;    // relative, from the final iterate
    int iterations = 0;
};

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 200;
};

ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

}  // namespace hecc
