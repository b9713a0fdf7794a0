// Primal-dual interior-point method for linear + second-order cone programs
// on the homogeneous self-dual embedding, with Nesterov-Todd scaling and a
// Mehrotra predictor-corrector step.
//
//   primal:  min c'x   s.t. Ax = b, Gx + s = h, s in K
//   dual:    max -b'y - h'z   s.t. A'y + G'z + c = 0, z in K
//
// K is a product of one nonnegative orthant and a list of Lorentz cones.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hecc/conic.hpp"

namespace hecc {

namespace {

constexpr double kInaccurate = 1e-6;

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ConeDims {
    int l = 0;
    std::vector<int> q;
    std::vector<int> offset;  // start of each Lorentz block

    int size() const
    {
        int m = l;
        for (int n : q) m += n;
        return m;
    }
    int degree() const { return l + static_cast<int>(q.size()); }
};

// ---------------------------------------------------------------------------
// Cone algebra

double jdot(const double* u, const double* v, int n)
{
    double r = u[0] * v[0];
    for (int i = 1; i < n; ++i) r -= u[i] * v[i];
    return r;
}

// u o v
Vec jordan(const ConeDims& d, const Vec& u, const Vec& v)
{
    Vec r(u.size());
    for (int i = 0; i < d.l; ++i) r[i] = u[i] * v[i];
    for (std::size_t j = 0; j < d.q.size(); ++j) {
        int o = d.offset[j], n = d.q[j];
        r[o] = u.segment(o, n).dot(v.segment(o, n));
        for (int i = 1; i < n; ++i) r[o + i] = u[o] * v[o + i] + v[o] * u[o + i];
    }
    return r;
}

// x with lambda o x = v
Vec jordan_div(const ConeDims& d, const Vec& lambda, const Vec& v)
{
    Vec r(v.size());
    for (int i = 0; i < d.l; ++i) r[i] = v[i] / lambda[i];
    for (std::size_t j = 0; j < d.q.size(); ++j) {
        int o = d.offset[j], n = d.q[j];
        const double* lam = lambda.data() + o;
        const double* w = v.data() + o;
        double l0 = lam[0];
        double det = jdot(lam, lam, n);
        double tail = 0.0;
        for (int i = 1; i < n; ++i) tail += lam[i] * w[i];
        double x0 = (l0 * w[0] - tail) / det;
        r[o] = x0;
        for (int i = 1; i < n; ++i) r[o + i] = (w[i] - x0 * lam[i]) / l0;
    }
    return r;
}

Vec identity(const ConeDims& d)
{
    Vec e = Vec::Zero(d.size());
    e.head(d.l).setOnes();
    for (int o : d.offset) e[o] = 1.0;
    return e;
}

// min t with x + t e in K, i.e. minus the smallest eigenvalue
double neg_min_eig(const ConeDims& d, const Vec& x)
{
    double t = -kInf;
    for (int i = 0; i < d.l; ++i) t = std::max(t, -x[i]);
    for (std::size_t j = 0; j < d.q.size(); ++j) {
        int o = d.offset[j], n = d.q[j];
        t = std::max(t, x.segment(o + 1, n - 1).norm() - x[o]);
    }
    return t;
}

// sup { a >= 0 : x + a dx in K }, x interior
double max_step(const ConeDims& d, const Vec& x, const Vec& dx)
{
    double a = kInf;
    for (int i = 0; i < d.l; ++i)
        if (dx[i] < 0) a = std::min(a, -x[i] / dx[i]);
    for (std::size_t j = 0; j < d.q.size(); ++j) {
        int o = d.offset[j], n = d.q[j];
        const double* u = x.data() + o;
        const double* v = dx.data() + o;
        double un = x.segment(o + 1, n - 1).norm();
        double c = (u[0] - un) * (u[0] + un);
        if (c <= 0) return 0.0;
        double qa = jdot(v, v, n);
        double qb = jdot(u, v, n);
        double disc = qb * qb - qa * c;
        if (disc < 0) continue;
        double den = -qb + std::sqrt(disc);
        if (den <= 0) continue;
        a = std::min(a, c / den);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling

struct Scaling {
    Vec lp;                       // diag of W on the orthant
    std::vector<double> beta;     // per Lorentz block
    std::vector<Vec> wbar;        // per Lorentz block, wbar' J wbar = 1
    std::vector<Vec> v;           // (wbar + e) / sqrt(2 (wbar_0 + 1)), W = beta (2 v v' - J)

    Vec apply(const ConeDims& d, const Vec& v) const
    {
        Vec r(v.size());
        r.head(d.l) = lp.cwiseProduct(v.head(d.l));
        for (std::size_t j = 0; j < d.q.size(); ++j) {
            int o = d.offset[j], n = d.q[j];
            const Vec& w = this->v[j];
            auto seg = v.segment(o, n);
            double wv = w.dot(seg);
            Vec out = 2.0 * wv * w;
            out[0] -= seg[0];
            out.tail(n - 1) += seg.tail(n - 1);
            r.segment(o, n) = beta[j] * out;
        }
        return r;
    }

    Vec apply_inverse(const ConeDims& d, const Vec& v) const
    {
        Vec r(v.size());
        r.head(d.l) = v.head(d.l).cwiseQuotient(lp);
        for (std::size_t j = 0; j < d.q.size(); ++j) {
            int o = d.offset[j], n = d.q[j];
            Vec jw = this->v[j];
            jw.tail(n - 1) *= -1.0;
            auto seg = v.segment(o, n);
            double wv = jw.dot(seg);
            Vec out = 2.0 * wv * jw;
            out[0] -= seg[0];
            out.tail(n - 1) += seg.tail(n - 1);
            r.segment(o, n) = out / beta[j];
        }
        return r;
    }

    Eigen::MatrixXd block_squared(int j) const
    {
        const Vec& w = wbar[static_cast<std::size_t>(j)];
        int n = static_cast<int>(w.size());
        Eigen::MatrixXd H = 2.0 * w * w.transpose();
        H(0, 0) -= 1.0;
        for (int i = 1; i < n; ++i) H(i, i) += 1.0;
        double b = beta[static_cast<std::size_t>(j)];
        return b * b * H;
    }
};

Scaling nt_scaling(const ConeDims& d, const Vec& s, const Vec& z)
{
    Scaling W;
    W.lp = (s.head(d.l).array() / z.head(d.l).array()).sqrt();
    for (std::size_t j = 0; j < d.q.size(); ++j) {
        int o = d.offset[j], n = d.q[j];
        Vec sj = s.segment(o, n), zj = z.segment(o, n);
        double sn = std::sqrt(jdot(sj.data(), sj.data(), n));
        double zn = std::sqrt(jdot(zj.data(), zj.data(), n));
        Vec sb = sj / sn, zb = zj / zn;
        double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
        Vec jz = zb;
        jz.tail(n - 1) *= -1.0;
        Vec wb = (sb + jz) / (2.0 * gamma);
        Vec vv = wb;
        vv[0] += 1.0;
        vv /= std::sqrt(2.0 * (wb[0] + 1.0));
        W.wbar.push_back(wb);
        W.v.push_back(vv);
        W.beta.push_back(std::sqrt(sn / zn));
    }
    return W;
}

// ---------------------------------------------------------------------------
// Standard form

struct StandardForm {
    int n = 0;  // variables including quadratic epigraphs
    Vec c;
    SpMat A;
    Vec b;
    SpMat G;
    Vec h;
    ConeDims dims;
    double cscale = 1.0;
    bool infeasible = false;  // a row over fixed variables only is violated
};

struct RowBuilder {
    std::vector<Triplet> trip;
    std::vector<double> rhs;
    int rows = 0;

    // row: sum coef x <= rhs (for G) or == rhs (for A), scaled
    void add(const std::vector<Term>& terms, double scale, double r)
    {
        for (const auto& t : terms) trip.emplace_back(rows, t.var, t.coef * scale);
        rhs.push_back(r * scale);
        ++rows;
    }
};

double row_norm(const std::vector<Term>& terms)
{
    double m = 0.0;
    for (const auto& t : terms) m = std::max(m, std::abs(t.coef));
    return m;
}

StandardForm to_standard(const ConicProgram& P)
{
    StandardForm F;
    const int n0 = P.num_vars();
    const int nq = static_cast<int>(P.quadratics().size());
    F.n = n0 + nq;

    F.c = Vec::Zero(F.n);
    for (int j = 0; j < n0; ++j) F.c[j] = P.cost()[j];
    for (int q = 0; q < nq; ++q) F.c[n0 + q] = P.quadratics()[q].weight;
    double cmax = F.c.cwiseAbs().maxCoeff();
    F.cscale = cmax > 0 ? 1.0 / cmax : 1.0;
    F.c *= F.cscale;

    RowBuilder eq, lin;
    auto scale_of = [](const std::vector<Term>& t, double rhs) {
        double r = std::max(row_norm(t), std::abs(rhs));
        return r > 0 ? 1.0 / r : 1.0;
    };

    for (int j = 0; j < n0; ++j) {
        if (P.lower()[j] == P.upper()[j]) {
            eq.add({{j, 1.0}}, 1.0, P.lower()[j]);
            continue;
        }
        if (P.lower()[j] > -kInf) lin.add({{j, -1.0}}, 1.0, -P.lower()[j]);
        if (P.upper()[j] < kInf) lin.add({{j, 1.0}}, 1.0, P.upper()[j]);
    }
    // fixed variables are substituted out of the linear rows
    for (const auto& r : P.rows()) {
        std::vector<Term> terms;
        double fixed = 0.0, mag = 0.0;
        for (const auto& t : r.terms) {
            if (P.lower()[t.var] == P.upper()[t.var]) {
                fixed += t.coef * P.lower()[t.var];
                mag = std::max(mag, std::abs(t.coef * P.lower()[t.var]));
            } else {
                terms.push_back(t);
            }
        }
        double lo = r.lo - fixed, hi = r.hi - fixed;
        if (terms.empty()) {
            double slack = 1e-9 * std::max({1.0, mag, std::abs(r.lo) < kInf ? std::abs(r.lo) : 0.0,
                                            std::abs(r.hi) < kInf ? std::abs(r.hi) : 0.0});
            if (lo > slack || hi < -slack) F.infeasible = true;
            continue;
        }
        if (lo == hi) {
            eq.add(terms, scale_of(terms, lo), lo);
            continue;
        }
        // sides the variable bounds already imply are dropped
        double amin = 0.0, amax = 0.0;
        for (const auto& t : terms) {
            double a = t.coef * P.lower()[t.var], b = t.coef * P.upper()[t.var];
            if (std::isnan(a)) a = 0.0;
            if (std::isnan(b)) b = 0.0;
            amin += std::min(a, b);
            amax += std::max(a, b);
        }
        if (hi < kInf && amax > hi) lin.add(terms, scale_of(terms, hi), hi);
        if (lo > -kInf && amin < lo) {
            for (auto& t : terms) t.coef = -t.coef;
            lin.add(terms, scale_of(terms, lo), -lo);
        }
    }
    F.dims.l = lin.rows;

    // Lorentz blocks: s = e(x)  <=>  -a'x + s = constant
    RowBuilder& cone = lin;
    auto add_block = [&](const std::vector<AffineExpr>& comps) {
        double mx = 0.0;
        for (const auto& e : comps) mx = std::max(mx, row_norm(e.terms));
        double sc = mx > 0 ? 1.0 / mx : 1.0;
        F.dims.offset.push_back(cone.rows);
        F.dims.q.push_back(static_cast<int>(comps.size()));
        for (const auto& e : comps) {
            std::vector<Term> neg = e.terms;
            for (auto& t : neg) t.coef = -t.coef;
            cone.add(neg, sc, e.constant);
        }
    };
    auto sum = [](const AffineExpr& a, const AffineExpr& b, double sign) {
        AffineExpr r = a;
        for (auto t : b.terms) r.terms.push_back({t.var, sign * t.coef});
        r.constant += sign * b.constant;
        return r;
    };
    auto scaled = [](AffineExpr e, double f) {
        for (auto& t : e.terms) t.coef *= f;
        e.constant *= f;
        return e;
    };

    for (const auto& c : P.socs()) {
        std::vector<AffineExpr> comps{c.t};
        comps.insert(comps.end(), c.x.begin(), c.x.end());
        add_block(comps);
    }
    for (const auto& c : P.rotated()) {
        std::vector<AffineExpr> comps{sum(c.u, c.v, 1.0), sum(c.u, c.v, -1.0)};
        for (const auto& w : c.w) comps.push_back(scaled(w, std::sqrt(2.0)));
        add_block(comps);
    }
    for (int q = 0; q < nq; ++q) {
        // t >= e^2  <=>  2 t (1/2) >= e^2
        AffineExpr t({{n0 + q, 1.0}});
        AffineExpr half(0.5);
        const auto& e = P.quadratics()[q].expr;
        add_block({sum(t, half, 1.0), sum(t, half, -1.0), scaled(e, std::sqrt(2.0))});
    }

    F.A.resize(eq.rows, F.n);
    F.A.setFromTriplets(eq.trip.begin(), eq.trip.end());
    F.b = Eigen::Map<Vec>(eq.rhs.data(), eq.rows);
    F.G.resize(cone.rows, F.n);
    F.G.setFromTriplets(cone.trip.begin(), cone.trip.end());
    F.h = Eigen::Map<Vec>(cone.rhs.data(), cone.rows);
    return F;
}

// ---------------------------------------------------------------------------
// KKT system  [ 0  A'  G' ] [x]   [bx]
//             [ A  0   0  ] [y] = [by]
//             [ G  0  -W2 ] [z]   [bz]

class Kkt {
public:
    Kkt(const StandardForm& F) : F_(F), N_(F.n + static_cast<int>(F.A.rows()) + static_cast<int>(F.G.rows())) {}

    bool factor(const Scaling& W)
    {
        const int n = F_.n, p = static_cast<int>(F_.A.rows());
        const auto& d = F_.dims;
        w2_lp_ = W.lp.cwiseProduct(W.lp);
        w2_soc_.clear();
        for (std::size_t j = 0; j < d.q.size(); ++j) w2_soc_.push_back(W.block_squared(static_cast<int>(j)));

        std::vector<Triplet> t;
        t.reserve(static_cast<std::size_t>(N_ + F_.A.nonZeros() + F_.G.nonZeros()));
        for (int i = 0; i < n; ++i) t.emplace_back(i, i, kReg);
        for (int k = 0; k < F_.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(F_.A, k); it; ++it) {
                t.emplace_back(n + it.row(), it.col(), it.value());
                t.emplace_back(it.col(), n + it.row(), it.value());
            }
        for (int i = 0; i < p; ++i) t.emplace_back(n + i, n + i, -kReg);
        const int zo = n + p;
        for (int k = 0; k < F_.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(F_.G, k); it; ++it) {
                t.emplace_back(zo + it.row(), it.col(), it.value());
                t.emplace_back(it.col(), zo + it.row(), it.value());
            }
        for (int i = 0; i < d.l; ++i) t.emplace_back(zo + i, zo + i, -w2_lp_[i] - kReg);
        for (std::size_t j = 0; j < d.q.size(); ++j) {
            int o = zo + d.offset[j], m = d.q[j];
            for (int c = 0; c < m; ++c)
                for (int r = 0; r < m; ++r)
                    t.emplace_back(o + r, o + c, -w2_soc_[j](r, c) - (r == c ? kReg : 0.0));
        }
        K_.resize(N_, N_);
        K_.setFromTriplets(t.begin(), t.end());
        if (!analyzed_) {
            lu_.analyzePattern(K_);
            analyzed_ = true;
        }
        lu_.factorize(K_);
        return lu_.info() == Eigen::Success;
    }

    // Solve the unregularized system with iterative refinement.
    void solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& x, Vec& y, Vec& z) const
    {
        const int n = F_.n, p = static_cast<int>(F_.A.rows()), m = static_cast<int>(F_.G.rows());
        Vec rhs(N_);
        rhs << bx, by, bz;
        Vec u = lu_.solve(rhs);
        for (int it = 0; it < kRefine; ++it) {
            Vec r = rhs - multiply(u);
            if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
            u += lu_.solve(r);
        }
        x = u.head(n);
        y = u.segment(n, p);
        z = u.tail(m);
    }

private:
    Vec multiply(const Vec& u) const
    {
        const int n = F_.n, p = static_cast<int>(F_.A.rows()), m = static_cast<int>(F_.G.rows());
        const auto& d = F_.dims;
        Vec x = u.head(n), y = u.segment(n, p), z = u.tail(m);
        Vec out(N_);
        out.head(n) = F_.A.transpose() * y + F_.G.transpose() * z;
        out.segment(n, p) = F_.A * x;
        Vec w2z(m);
        w2z.head(d.l) = w2_lp_.cwiseProduct(z.head(d.l));
        for (std::size_t j = 0; j < d.q.size(); ++j) {
            int o = d.offset[j], k = d.q[j];
            w2z.segment(o, k) = w2_soc_[j] * z.segment(o, k);
        }
        out.tail(m) = F_.G * x - w2z;
        return out;
    }

    static constexpr double kReg = 1e-9;
    static constexpr int kRefine = 6;

    const StandardForm& F_;
    int N_;
    Vec w2_lp_;
    std::vector<Eigen::MatrixXd> w2_soc_;
    SpMat K_;
    mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    bool analyzed_ = false;
};


void shift_into_cone(const ConeDims& d, Vec& v)
{
    double nrm = v.norm();
    double t = neg_min_eig(d, v);
    if (t >= -1e-8 * std::max(nrm, 1.0)) v += (1.0 + t) * identity(d);
}

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& options)
{
    program.validate();
    if (options.tolerance <= 0 || options.max_iterations < 1)
        throw std::invalid_argument("solve: tolerance and iteration limit must be positive");

    StandardForm F = to_standard(program);
    const auto& d = F.dims;
    const int n = F.n, p = static_cast<int>(F.A.rows()), m = static_cast<int>(F.G.rows());
    const double tol = options.tolerance;

    ConicSolution out;
    auto finish = [&](const Vec& x) {
        out.x.assign(x.data(), x.data() + program.num_vars());
        out.objective = program.objective(out.x);
        out.primal_residual = program.max_violation(out.x);
        return out;
    };
    if (F.infeasible) {
        Vec x0 = Vec::Zero(n);
        for (int j = 0; j < program.num_vars(); ++j)
            if (program.lower()[j] == program.upper()[j]) x0[j] = program.lower()[j];
        out.status = SolveStatus::infeasible;
        return finish(x0);
    }

    Kkt kkt(F);
    Vec e = identity(d);

    // Starting point from two least-squares systems with W = I.
    Scaling I;
    I.lp = Vec::Ones(d.l);
    for (int q : d.q) {
        Vec w = Vec::Zero(q);
        w[0] = 1.0;
        I.wbar.push_back(w);
        I.v.push_back(w);
        I.beta.push_back(1.0);
    }
    if (!kkt.factor(I)) {
        out.status = SolveStatus::iteration_limit;
        return finish(Vec::Zero(n));
    }
    Vec x, y, z, s, tmpx, tmpy, tmpz;
    kkt.solve(Vec::Zero(n), F.b, F.h, x, tmpy, tmpz);
    s = -tmpz;
    kkt.solve(-F.c, Vec::Zero(p), Vec::Zero(m), tmpx, y, z);
    shift_into_cone(d, s);
    shift_into_cone(d, z);
    double tau = 1.0, kappa = 1.0;

    const double resx0 = std::max(1.0, F.c.norm());
    const double resy0 = std::max(1.0, F.b.norm());
    const double resz0 = std::max(1.0, F.h.norm());

    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        out.iterations = iter;
        Vec hrx = F.A.transpose() * y + F.G.transpose() * z;
        Vec rx = hrx + F.c * tau;
        Vec hry = F.A * x;
        Vec ry = F.b * tau - hry;
        Vec hrz = s + F.G * x;
        Vec rz = hrz - F.h * tau;
        double cx = F.c.dot(x), by = F.b.dot(y), hz = F.h.dot(z);
        double rt = kappa + cx + by + hz;
        double gap = s.dot(z);
        double mu = (gap + kappa * tau) / (d.degree() + 1);

        double pres = std::max(ry.norm() / tau / resy0, rz.norm() / tau / resz0);
        double dres = rx.norm() / tau / resx0;
        double pcost = cx / tau, dcost = -(by + hz) / tau;
        double ngap = gap / (tau * tau);
        out.dual_residual = dres;

        auto verdict = [&](double t) {
            if (pres <= t && dres <= t && (ngap <= t || ngap <= t * std::max(std::abs(pcost), std::abs(dcost))))
                return SolveStatus::optimal;
            if (kappa <= tau) return SolveStatus::iteration_limit;
            if (by + hz < 0 && hrx.norm() / resx0 / -(by + hz) <= t) return SolveStatus::infeasible;
            if (cx < 0 && std::max(hry.norm() / resy0, hrz.norm() / resz0) / -cx <= t) return SolveStatus::unbounded;
            return SolveStatus::iteration_limit;
        };
        out.status = verdict(tol);
        if (out.status != SolveStatus::iteration_limit) return finish(x / tau);
        // reduced-accuracy verdict, used if the iteration stalls from here on
        out.status = verdict(std::max(tol, kInaccurate));
        if (iter == options.max_iterations) break;

        Scaling W = nt_scaling(d, s, z);
        Vec lambda = W.apply(d, z);
        if (!kkt.factor(W) || !lambda.allFinite()) break;

        Vec x1, y1, z1;
        kkt.solve(-F.c, F.b, F.h, x1, y1, z1);
        double denom = -(W.apply(d, z1).squaredNorm() + kappa / tau);

        struct Step {
            Vec dx, dy, dz, ds;
            double dtau, dkappa;
        };
        auto direction = [&](const Vec& ex, const Vec& ey, const Vec& ez, double et, const Vec& es, double ek) {
            Step st;
            Vec t = jordan_div(d, lambda, es);
            Vec x2, y2, z2;
            kkt.solve(ex, -ey, ez - W.apply(d, t), x2, y2, z2);
            st.dtau = (et - ek / tau - F.c.dot(x2) - F.b.dot(y2) - F.h.dot(z2)) / denom;
            st.dx = x2 + st.dtau * x1;
            st.dy = y2 + st.dtau * y1;
            st.dz = z2 + st.dtau * z1;
            st.ds = W.apply(d, t - W.apply(d, st.dz));
            st.dkappa = (ek - kappa * st.dtau) / tau;
            return st;
        };
        auto step_length = [&](const Step& st) {
            double a = std::min(max_step(d, s, st.ds), max_step(d, z, st.dz));
            if (st.dtau < 0) a = std::min(a, -tau / st.dtau);
            if (st.dkappa < 0) a = std::min(a, -kappa / st.dkappa);
            return a;
        };

        Vec ll = jordan(d, lambda, lambda);
        Step aff = direction(-rx, -ry, -rz, -rt, -ll, -kappa * tau);
        double alpha_aff = std::min(1.0, step_length(aff));
        double sigma = std::pow(1.0 - alpha_aff, 3);

        Vec corr = jordan(d, W.apply_inverse(d, aff.ds), W.apply(d, aff.dz));
        double f = 1.0 - sigma;
        Step st = direction(-f * rx, -f * ry, -f * rz, -f * rt, -ll - corr + sigma * mu * e,
                            -kappa * tau - aff.dkappa * aff.dtau + sigma * mu);
        double alpha = std::min(1.0, 0.99 * step_length(st));
        if (!(alpha > 1e-14) || !st.dx.allFinite()) break;

        x += alpha * st.dx;
        y += alpha * st.dy;
        z += alpha * st.dz;
        s += alpha * st.ds;
        tau += alpha * st.dtau;
        kappa += alpha * st.dkappa;
    }
    return finish(x / tau);
}

}  // namespace hecc
