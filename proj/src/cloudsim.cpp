#include "caso/cloudsim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "caso/errors.hpp"

namespace caso {

OutcomeCase outcome_case(const SolveOutcome& out) {
    return static_cast<OutcomeCase>(out.index());
}

std::string case_name(OutcomeCase c) {
    switch (c) {
        case OutcomeCase::Normal: return "normal";
        case OutcomeCase::Infeasible: return "infeasible";
        case OutcomeCase::Unbounded: return "unbounded";
        case OutcomeCase::Failure: return "failure";
    }
    return "unknown";
}

OutcomeCase parse_case_name(const std::string& name) {
    if (name == "normal") return OutcomeCase::Normal;
    if (name == "infeasible") return OutcomeCase::Infeasible;
    if (name == "unbounded") return OutcomeCase::Unbounded;
    if (name == "failure") return OutcomeCase::Failure;
    throw ParseError("unknown outcome case '" + name + "'");
}

SolveOutcome solve_linear(const LinearSystem& g) {
    try {
        g.validate();
        return NormalOutcome{lu_solve(g.a, g.b), 0.0};
    } catch (const SingularMatrix& e) {
        return FailureOutcome{std::string("singular system: ") + e.what()};
    }
}

// ---------------------------------------------------------------------------
// Simplex

namespace {

constexpr double kPivotTol = 1e-9;

class Simplex {
public:
    Simplex(const LinearProgram& g) : g_(g) {
        n_ = g.num_vars();
        m_ = g.num_equalities();
        s_ = g.num_inequalities();
        rows_ = m_ + s_;
        art_ = 2 * n_ + s_;
        cols_ = art_ + rows_;
        width_ = cols_ + 1;
        t_.assign(rows_ * width_, 0.0);
        basis_.resize(rows_);
        origin_.resize(rows_);
        double scale = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const bool eq = i < m_;
            const auto src = eq ? g.a.row(i) : g.d.row(i - m_);
            const double rhs = eq ? g.b[i] : g.e[i - m_];
            const double sign = rhs < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) {
                at(i, j) = sign * src[j];
                at(i, n_ + j) = -sign * src[j];
                scale = std::max(scale, std::abs(src[j]));
            }
            if (!eq) at(i, 2 * n_ + (i - m_)) = -sign;
            at(i, art_ + i) = 1.0;
            rhs_(i) = sign * rhs;
            scale = std::max(scale, std::abs(rhs));
            basis_[i] = art_ + i;
            origin_[i] = i;
        }
        for (double v : g.c) cscale_ = std::max(cscale_, std::abs(v));
        feas_tol_ = 1e-8 * scale;
        cap_ = 10 * (n_ + m_ + s_);
    }

    SolveOutcome run(bool want_certificate) {
        // Phase 1: minimise the sum of artificials.
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t k = art_; k < cols_; ++k) cost[k] = 1.0;
        set_objective(cost);
        if (iterate(cols_, 1.0) == Stop::Cap) return FailureOutcome{"simplex pivot cap reached in phase 1"};
        double infeas = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] >= art_) infeas += rhs_(i);
        if (infeas > feas_tol_) {
            if (!want_certificate) return InfeasibleOutcome{{}, infeas};
            return certificate(infeas);
        }
        drive_out_artificials();
        // Phase 2 on the original costs; artificial columns may not re-enter.
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            cost[j] = g_.c[j];
            cost[n_ + j] = -g_.c[j];
        }
        set_objective(cost);
        const Stop stop = iterate(art_, cscale_);
        if (stop == Stop::Cap) return FailureOutcome{"simplex pivot cap reached in phase 2"};
        const Vector z = basic_solution();
        Vector y(n_);
        for (std::size_t j = 0; j < n_; ++j) y[j] = z[j] - z[n_ + j];
        if (stop == Stop::Unbounded) {
            Vector dz(cols_, 0.0);
            dz[entering_] = 1.0;
            for (std::size_t i = 0; i < rows_; ++i) dz[basis_[i]] = -at(i, entering_);
            Vector ray(n_);
            for (std::size_t j = 0; j < n_; ++j) ray[j] = dz[j] - dz[n_ + j];
            return UnboundedOutcome{std::move(ray), std::move(y)};
        }
        const double obj = g_.objective(y);
        return NormalOutcome{std::move(y), obj};
    }

private:
    enum class Stop { Optimal, Unbounded, Cap };

    double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
    double& rhs_(std::size_t i) { return t_[i * width_ + cols_]; }

    void set_objective(const std::vector<double>& cost) {
        cost_ = cost;
        d_ = cost;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * at(i, j);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j < width_; ++j) at(r, j) /= p;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        const double f = d_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= f * at(r, j);
            d_[c] = 0.0;
        }
        basis_[r] = c;
    }

    // Bland's rule over columns [0, limit).
    Stop iterate(std::size_t limit, double cost_scale) {
        const double dtol = 1e-9 * std::max(1.0, cost_scale);
        for (std::size_t k = 0; k < cap_; ++k) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (d_[j] < -dtol) {
                    enter = j;
                    break;
                }
            }
            if (enter == limit) return Stop::Optimal;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(rhs_(i), 0.0) / a;
                const double slack = 1e-12 * std::max(1.0, best);
                if (leave == rows_ || ratio < best - slack) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave == rows_) {
                entering_ = enter;
                return Stop::Unbounded;
            }
            pivot(leave, enter);
        }
        return Stop::Cap;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < rows_;) {
            if (basis_[i] < art_) {
                ++i;
                continue;
            }
            std::size_t col = art_;
            double best = kPivotTol;
            for (std::size_t j = 0; j < art_; ++j) {
                if (std::abs(at(i, j)) > best) {
                    best = std::abs(at(i, j));
                    col = j;
                }
            }
            if (col < art_) {
                pivot(i, col);
                ++i;
            } else {
                remove_row(i);
            }
        }
    }

    void remove_row(std::size_t i) {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i * width_),
                 t_.begin() + static_cast<std::ptrdiff_t>((i + 1) * width_));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        origin_.erase(origin_.begin() + static_cast<std::ptrdiff_t>(i));
        --rows_;
    }

    // Basic values re-solved from the original rows, falling back to the
    // tableau when the basis is numerically singular.
    Vector basic_solution() {
        Vector z(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) z[basis_[i]] = std::max(rhs_(i), 0.0);
        if (rows_ == 0) return z;
        DenseMatrix b(rows_, rows_);
        Vector rhs(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t o = origin_[i];
            const bool eq = o < m_;
            rhs[i] = eq ? g_.b[o] : g_.e[o - m_];
            for (std::size_t k = 0; k < rows_; ++k) b(i, k) = original_entry(o, basis_[k]);
        }
        try {
            const Vector zb = lu_solve(b, rhs);
            for (std::size_t k = 0; k < rows_; ++k) z[basis_[k]] = zb[k];
        } catch (const SingularMatrix&) {
        }
        return z;
    }

    double original_entry(std::size_t o, std::size_t col) const {
        const bool eq = o < m_;
        const auto src = eq ? g_.a.row(o) : g_.d.row(o - m_);
        if (col < n_) return src[col];
        if (col < 2 * n_) return -src[col - n_];
        if (col < art_) return (!eq && col - 2 * n_ == o - m_) ? -1.0 : 0.0;
        return 0.0;
    }

    SolveOutcome certificate(double infeas) {
        const LinearProgram lp = build_phase_one(g_);
        Simplex phase_one(lp);
        const SolveOutcome out = phase_one.run(false);
        if (const auto* normal = std::get_if<NormalOutcome>(&out)) {
            const double rho = normal->solution.back();
            if (rho <= 0.0) return FailureOutcome{"phase 1 and phase-I disagree on feasibility"};
            Vector y(normal->solution.begin(), normal->solution.end() - 1);
            return InfeasibleOutcome{std::move(y), rho};
        }
        if (std::holds_alternative<InfeasibleOutcome>(out)) return InfeasibleOutcome{{}, infeas};
        return FailureOutcome{"phase-I problem could not be solved"};
    }

    const LinearProgram& g_;
    std::size_t n_ = 0, m_ = 0, s_ = 0, rows_ = 0, art_ = 0, cols_ = 0, width_ = 0;
    std::vector<double> t_;
    std::vector<double> cost_;
    std::vector<double> d_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> origin_;
    std::size_t entering_ = 0;
    std::size_t cap_ = 0;
    double cscale_ = 1.0;
    double feas_tol_ = 1e-8;
};

}  // namespace

SolveOutcome solve_lp(const LinearProgram& g) {
    g.validate();
    Simplex simplex(g);
    return simplex.run(true);
}

LinearProgram build_phase_one(const LinearProgram& g) {
    const std::size_t n = g.num_vars();
    const std::size_t m = g.num_equalities();
    const std::size_t s = g.num_inequalities();
    LinearProgram p;
    p.c.assign(n + 1, 0.0);
    p.c[n] = 1.0;
    p.a = DenseMatrix(m, n + 1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) p.a(i, j) = g.a(i, j);
    p.b = g.b;
    if (s == 0) {
        p.d = DenseMatrix(1, n + 1);
        p.d(0, n) = 1.0;
        p.e = {0.0};
        return p;
    }
    p.d = DenseMatrix(s, n + 1);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < n; ++j) p.d(i, j) = g.d(i, j);
        p.d(i, n) = 1.0;
    }
    p.e = g.e;
    return p;
}

LinearProgram build_phase_one(const ConvexQuadraticProgram& g) {
    return build_phase_one(LinearProgram{g.c, g.a, g.b, g.d, g.e});
}

LinearProgram build_lp_dual(const LinearProgram& g) {
    const std::size_t n = g.num_vars();
    const std::size_t m = g.num_equalities();
    const std::size_t s = g.num_inequalities();
    if (m + s == 0) throw InvalidArgument("LP without constraints has no dual variables");
    LinearProgram d;
    d.c.resize(m + s);
    for (std::size_t i = 0; i < m; ++i) d.c[i] = -g.b[i];
    for (std::size_t i = 0; i < s; ++i) d.c[m + i] = -g.e[i];
    d.a = DenseMatrix(n, m + s);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) d.a(j, i) = g.a(i, j);
        for (std::size_t i = 0; i < s; ++i) d.a(j, m + i) = g.d(i, j);
    }
    d.b = g.c;
    d.d = DenseMatrix(s, m + s);
    for (std::size_t i = 0; i < s; ++i) d.d(i, m + i) = 1.0;
    d.e.assign(s, 0.0);
    return d;
}

// ---------------------------------------------------------------------------
// Newton

SolveOutcome solve_newton(const NonlinearSystem& g, std::span<const double> y0, double eps,
                          std::size_t max_iter) {
    g.validate();
    if (y0.size() != g.n) throw DimensionMismatch("initial point has the wrong dimension");
    Vector y(y0.begin(), y0.end());
    Vector fy;
    try {
        fy = eval_system(g, y);
    } catch (const DomainError& e) {
        return FailureOutcome{std::string("initial point outside the domain: ") + e.what()};
    }
    double norm = norm2(fy);
    for (std::size_t it = 0; it < max_iter && !(norm < eps); ++it) {
        Vector step;
        try {
            step = lu_solve(jacobian(g, y), scale(fy, -1.0));
        } catch (const SingularMatrix&) {
            return FailureOutcome{"singular Jacobian"};
        } catch (const DomainError& e) {
            return FailureOutcome{e.what()};
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 20 && !accepted; ++h, lambda *= 0.5) {
            Vector trial(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) trial[i] = y[i] + lambda * step[i];
            try {
                Vector ft = eval_system(g, trial);
                const double nt = norm2(ft);
                if (std::isfinite(nt) && nt < norm) {
                    y = std::move(trial);
                    fy = std::move(ft);
                    norm = nt;
                    accepted = true;
                }
            } catch (const DomainError&) {
            }
        }
        if (!accepted) return FailureOutcome{"line search could not reduce the residual"};
    }
    if (!(norm < eps)) return FailureOutcome{"Newton iteration cap reached"};
    return NormalOutcome{std::move(y), 0.0};
}

// ---------------------------------------------------------------------------
// Quadratic programs

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const DenseMatrix& a, std::size_t cols) {
    MatrixXd m(a.rows(), cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = a(i, j);
    return m;
}

VectorXd to_eigen(std::span<const double> v) {
    VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
    return out;
}

Vector from_eigen(const VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

Eigen::Index row_rank(const MatrixXd& m) {
    if (m.rows() == 0) return 0;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(m.transpose());
    qr.setThreshold(1e-10);
    return qr.rank();
}

class ActiveSet {
public:
    ActiveSet(const ConvexQuadraticProgram& g) : g_(g) {
        n_ = g.num_vars();
        q_ = to_eigen(g.q, n_);
        c_ = to_eigen(g.c);
        a_ = to_eigen(g.a, n_);
        d_ = to_eigen(g.d, n_);
        e_ = to_eigen(g.e);
        // Keep a linearly independent subset of the equality rows.
        for (Eigen::Index i = 0; i < a_.rows(); ++i) {
            eq_.push_back(i);
            if (row_rank(stack()) < static_cast<Eigen::Index>(eq_.size())) eq_.pop_back();
        }
    }

    SolveOutcome run(VectorXd x) {
        const double scale = std::max({1.0, q_.cwiseAbs().maxCoeff(), c_.cwiseAbs().maxCoeff()});
        for (Eigen::Index i = 0; i < d_.rows(); ++i) {
            if (std::abs(d_.row(i).dot(x) - e_(i)) <= 1e-9 * (1.0 + std::abs(e_(i)))) {
                work_.push_back(i);
                if (row_rank(stack()) < static_cast<Eigen::Index>(eq_.size() + work_.size()))
                    work_.pop_back();
            }
        }
        for (int iter = 0; iter < 200; ++iter) {
            const MatrixXd m = stack();
            const VectorXd grad = q_ * x + c_;
            const Eigen::Index k = m.rows();
            MatrixXd z;
            if (k == 0) {
                z = MatrixXd::Identity(n_, n_);
            } else {
                Eigen::HouseholderQR<MatrixXd> qr(m.transpose());
                const MatrixXd full = qr.householderQ() * MatrixXd::Identity(n_, n_);
                z = full.rightCols(static_cast<Eigen::Index>(n_) - k);
            }
            VectorXd p = VectorXd::Zero(n_);
            if (z.cols() > 0) {
                const MatrixXd h = z.transpose() * q_ * z;
                const VectorXd gz = z.transpose() * grad;
                Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h);
                const VectorXd& lam = eig.eigenvalues();
                const MatrixXd& vec = eig.eigenvectors();
                const double htol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
                VectorXd gn = VectorXd::Zero(gz.size());
                VectorXd pz = VectorXd::Zero(gz.size());
                for (Eigen::Index j = 0; j < lam.size(); ++j) {
                    const double proj = vec.col(j).dot(gz);
                    if (lam(j) <= htol) gn += proj * vec.col(j);
                    else pz -= (proj / lam(j)) * vec.col(j);
                }
                if (gn.norm() > 1e-10 * (1.0 + grad.norm())) {
                    // Zero-curvature descent: follow it until a constraint blocks.
                    const VectorXd dir = -(z * gn);
                    const auto [alpha, block] = ratio_test(x, dir, std::numeric_limits<double>::infinity());
                    if (block < 0) {
                        return UnboundedOutcome{from_eigen(dir / dir.cwiseAbs().maxCoeff()), from_eigen(x)};
                    }
                    x += alpha * dir;
                    work_.push_back(block);
                    continue;
                }
                p = z * pz;
            }
            if (p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + x.cwiseAbs().maxCoeff())) {
                if (work_.empty()) return finish(x);
                const VectorXd mult = m.transpose().colPivHouseholderQr().solve(grad);
                Eigen::Index worst = -1;
                double worst_val = -1e-9 * scale;
                for (std::size_t j = 0; j < work_.size(); ++j) {
                    const double v = mult(static_cast<Eigen::Index>(eq_.size() + j));
                    if (v < worst_val) {
                        worst_val = v;
                        worst = static_cast<Eigen::Index>(j);
                    }
                }
                if (worst < 0) return finish(x);
                work_.erase(work_.begin() + worst);
                continue;
            }
            const auto [alpha, block] = ratio_test(x, p, 1.0);
            x += alpha * p;
            if (block >= 0) work_.push_back(block);
        }
        return FailureOutcome{"active-set iteration cap reached"};
    }

private:
    MatrixXd stack() const {
        MatrixXd m(eq_.size() + work_.size(), n_);
        Eigen::Index r = 0;
        for (auto i : eq_) m.row(r++) = a_.row(i);
        for (auto i : work_) m.row(r++) = d_.row(i);
        return m;
    }

    std::pair<double, Eigen::Index> ratio_test(const VectorXd& x, const VectorXd& dir, double cap) const {
        double alpha = cap;
        Eigen::Index block = -1;
        const double tiny = 1e-12 * (1.0 + dir.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < d_.rows(); ++i) {
            if (std::find(work_.begin(), work_.end(), i) != work_.end()) continue;
            const double rate = d_.row(i).dot(dir);
            if (rate >= -tiny) continue;
            const double slack = std::min(0.0, e_(i) - d_.row(i).dot(x));
            const double a = slack / rate;
            if (a < alpha) {
                alpha = a;
                block = i;
            }
        }
        return {alpha, block};
    }

    SolveOutcome finish(const VectorXd& x) const {
        Vector sol = from_eigen(x);
        const double obj = g_.objective(sol);
        return NormalOutcome{std::move(sol), obj};
    }

    const ConvexQuadraticProgram& g_;
    std::size_t n_ = 0;
    MatrixXd q_, a_, d_;
    VectorXd c_, e_;
    std::vector<Eigen::Index> eq_;
    std::vector<Eigen::Index> work_;
};

}  // namespace

SolveOutcome solve_cqp(const ConvexQuadraticProgram& g) {
    g.validate();
    const std::size_t n = g.num_vars();
    const std::size_t m = g.b.size();
    if (g.e.empty()) {
        DenseMatrix kkt(n + m, n + m);
        Vector rhs(n + m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) kkt(i, j) = g.q(i, j);
            rhs[i] = -g.c[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                kkt(n + i, j) = g.a(i, j);
                kkt(j, n + i) = g.a(i, j);
            }
            rhs[n + i] = g.b[i];
        }
        try {
            const Vector sol = lu_solve(kkt, rhs);
            Vector x(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
            const double obj = g.objective(x);
            return NormalOutcome{std::move(x), obj};
        } catch (const SingularMatrix&) {
            // Singular KKT: rank-deficient A or Q singular on its nullspace.
        }
    }
    const LinearProgram feas{Vector(n, 0.0), g.a, g.b, g.d, g.e};
    SolveOutcome start = solve_lp(feas);
    if (!std::holds_alternative<NormalOutcome>(start)) return start;
    ActiveSet solver(g);
    return solver.run(to_eigen(std::get<NormalOutcome>(start).solution));
}

// ---------------------------------------------------------------------------
// Cloud

CloudTask make_task(const TransformedProblem& t) {
    CloudTask task;
    task.problem = t.problem;
    task.initial_point = t.initial_point;
    return task;
}

std::string AdversaryMode::name() const {
    switch (kind) {
        case AdversaryKind::Honest: return "honest";
        case AdversaryKind::Lazy: return "lazy";
        case AdversaryKind::Random: return "random";
        case AdversaryKind::Scaled: return "scaled";
        case AdversaryKind::HalfHonest: return "halfhonest";
    }
    return "unknown";
}

AdversaryMode AdversaryMode::parse(const std::string& name) {
    if (name == "honest") return honest();
    if (name == "lazy") return lazy();
    if (name == "random") return random();
    if (name == "scaled") return scaled(2.0);
    if (name == "halfhonest") return half_honest();
    throw InvalidArgument("unknown adversary '" + name + "'");
}

SolveOutcome solve_task(const CloudTask& task) {
    return std::visit(
        [&](const auto& p) -> SolveOutcome {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearSystem>) return solve_linear(p);
            else if constexpr (std::is_same_v<T, LinearProgram>) return solve_lp(p);
            else if constexpr (std::is_same_v<T, ConvexQuadraticProgram>) return solve_cqp(p);
            else {
                const Vector y0 = task.initial_point.empty() ? Vector(p.n, 0.0) : task.initial_point;
                return solve_newton(p, y0, task.tolerance, task.max_iterations);
            }
        },
        task.problem);
}

Cloud::Cloud(AdversaryMode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {
    if (mode_.kind == AdversaryKind::Scaled && mode_.alpha == 1.0)
        throw InvalidArgument("scaled adversary needs alpha != 1");
}

SolveOutcome Cloud::fabricate(std::size_t dim) {
    Vector v(dim);
    for (double& x : v) x = rng_.uniform(-10.0, 10.0);
    return NormalOutcome{std::move(v), 0.0};
}

SolveOutcome Cloud::serve(const CloudTask& task) {
    ++calls_;
    const std::size_t dim = num_vars(task.problem);
    switch (mode_.kind) {
        case AdversaryKind::Honest: return solve_task(task);
        case AdversaryKind::Lazy: return NormalOutcome{Vector(dim, 0.0), 0.0};
        case AdversaryKind::Random: return fabricate(dim);
        case AdversaryKind::HalfHonest:
            if (calls_ % 2 == 1) return solve_task(task);
            return fabricate(dim);
        case AdversaryKind::Scaled: {
            SolveOutcome out = solve_task(task);
            const double a = mode_.alpha;
            std::visit(
                [a](auto& o) {
                    using T = std::decay_t<decltype(o)>;
                    if constexpr (std::is_same_v<T, NormalOutcome>) {
                        o.solution = scale(o.solution, a);
                        o.objective *= a;
                    } else if constexpr (std::is_same_v<T, InfeasibleOutcome>) {
                        o.phase1_solution = scale(o.phase1_solution, a);
                        o.rho_star *= a;
                    } else if constexpr (std::is_same_v<T, UnboundedOutcome>) {
                        o.ray = scale(o.ray, a);
                        o.feasible_point = scale(o.feasible_point, a);
                    }
                },
                out);
            return out;
        }
    }
    return solve_task(task);
}

}  // namespace caso
