#include "hecc/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace hecc {

double AffineExpr::eval(const std::vector<double>& x) const
{
    double v = constant;
    for (const auto& t : terms) v += t.coef * x[static_cast<std::size_t>(t.var)];
    return v;
}

int ConicProgram::add_variable(std::string name, double lower, double upper, double cost)
{
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    names_.push_back(std::move(name));
    return num_vars() - 1;
}

void ConicProgram::add_quadratic(double weight, AffineExpr expr) { quadratics_.push_back({weight, std::move(expr)}); }

void ConicProgram::add_row(std::vector<Term> terms, double lo, double hi, std::string name)
{
    rows_.push_back({std::move(terms), lo, hi, std::move(name)});
}

void ConicProgram::add_soc(AffineExpr t, std::vector<AffineExpr> x, std::string name)
{
    socs_.push_back({std::move(t), std::move(x), std::move(name)});
}

void ConicProgram::add_rotated(AffineExpr u, AffineExpr v, std::vector<AffineExpr> w, std::string name)
{
    rotated_.push_back({std::move(u), std::move(v), std::move(w), std::move(name)});
}

namespace {

void check_expr(const AffineExpr& e, int n, const std::string& where)
{
    if (!std::isfinite(e.constant)) throw std::invalid_argument(where + ": non-finite constant");
    for (const auto& t : e.terms) {
        if (t.var < 0 || t.var >= n) throw std::invalid_argument(where + ": undeclared variable " + std::to_string(t.var));
        if (!std::isfinite(t.coef)) throw std::invalid_argument(where + ": non-finite coefficient");
    }
}

}  // namespace

void ConicProgram::validate() const
{
    const int n = num_vars();
    for (int j = 0; j < n; ++j) {
        if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j])
            throw std::invalid_argument(fmt::format("variable {} ({}): bad bounds", j, names_[j]));
        if (!std::isfinite(cost_[j])) throw std::invalid_argument(fmt::format("variable {}: non-finite cost", j));
    }
    for (std::size_t i = 0; i < quadratics_.size(); ++i) {
        if (!(quadratics_[i].weight >= 0) || !std::isfinite(quadratics_[i].weight))
            throw std::invalid_argument(fmt::format("quadratic {}: weight must be nonnegative", i));
        check_expr(quadratics_[i].expr, n, fmt::format("quadratic {}", i));
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        check_expr(AffineExpr(r.terms), n, fmt::format("row {} ({})", i, r.name));
        if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi || r.lo == kInf || r.hi == -kInf)
            throw std::invalid_argument(fmt::format("row {} ({}): bad bounds", i, r.name));
    }
    for (std::size_t i = 0; i < socs_.size(); ++i) {
        std::string where = fmt::format("cone {} ({})", i, socs_[i].name);
        check_expr(socs_[i].t, n, where);
        for (const auto& e : socs_[i].x) check_expr(e, n, where);
    }
    for (std::size_t i = 0; i < rotated_.size(); ++i) {
        std::string where = fmt::format("rotated cone {} ({})", i, rotated_[i].name);
        check_expr(rotated_[i].u, n, where);
        check_expr(rotated_[i].v, n, where);
        for (const auto& e : rotated_[i].w) check_expr(e, n, where);
    }
}

double ConicProgram::objective(const std::vector<double>& x) const
{
    double v = constant_;
    for (int j = 0; j < num_vars(); ++j) v += cost_[j] * x[j];
    for (const auto& q : quadratics_) {
        double e = q.expr.eval(x);
        v += q.weight * e * e;
    }
    return v;
}

double ConicProgram::max_violation(const std::vector<double>& x) const
{
    double worst = 0.0;
    for (int j = 0; j < num_vars(); ++j) {
        worst = std::max(worst, lower_[j] - x[j]);
        worst = std::max(worst, x[j] - upper_[j]);
    }
    for (const auto& r : rows_) {
        double v = AffineExpr(r.terms).eval(x);
        worst = std::max({worst, r.lo - v, v - r.hi});
    }
    for (const auto& c : socs_) {
        double nrm = 0.0;
        for (const auto& e : c.x) {
            double v = e.eval(x);
            nrm += v * v;
        }
        worst = std::max(worst, std::sqrt(nrm) - c.t.eval(x));
    }
    for (const auto& c : rotated_) {
        double u = c.u.eval(x), v = c.v.eval(x);
        double nrm = 0.0;
        for (const auto& e : c.w) {
            double w = e.eval(x);
            nrm += w * w;
        }
        // same geometry as the second-order form used by the solver
        double lhs = std::sqrt((u - v) * (u - v) + 2.0 * nrm);
        worst = std::max(worst, (lhs - (u + v)) / std::sqrt(2.0));
    }
    return worst;
}

namespace {

void print_expr(std::ostream& os, const AffineExpr& e)
{
    fmt::print(os, "{:.17g}", e.constant);
    for (const auto& t : e.terms) fmt::print(os, " {:+.17g}*x{}", t.coef, t.var);
}

}  // namespace

void ConicProgram::dump(std::ostream& os) const
{
    fmt::print(os, "vars {}\n", num_vars());
    for (int j = 0; j < num_vars(); ++j)
        fmt::print(os, "var {} {} lo {:.17g} hi {:.17g} cost {:.17g}\n", j, names_[j].empty() ? "-" : names_[j],
                   lower_[j], upper_[j], cost_[j]);
    fmt::print(os, "constant {:.17g}\n", constant_);
    for (const auto& q : quadratics_) {
        fmt::print(os, "quad {:.17g} : ", q.weight);
        print_expr(os, q.expr);
        os << '\n';
    }
    for (const auto& r : rows_) {
        fmt::print(os, "row {} lo {:.17g} hi {:.17g} : ", r.name.empty() ? "-" : r.name, r.lo, r.hi);
        print_expr(os, AffineExpr(r.terms));
        os << '\n';
    }
    for (const auto& c : socs_) {
        fmt::print(os, "soc {} {} : t = ", c.name.empty() ? "-" : c.name, c.x.size());
        print_expr(os, c.t);
        for (const auto& e : c.x) {
            os << " | ";
            print_expr(os, e);
        }
        os << '\n';
    }
    for (const auto& c : rotated_) {
        fmt::print(os, "rsoc {} {} : u = ", c.name.empty() ? "-" : c.name, c.w.size());
        print_expr(os, c.u);
        os << " ; v = ";
        print_expr(os, c.v);
        for (const auto& e : c.w) {
            os << " | ";
            print_expr(os, e);
        }
        os << '\n';
    }
}

const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

}  // namespace hecc
