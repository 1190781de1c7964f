#include "safeforce/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace safeforce {

namespace {

void check_problem(const BoxQP& qp) {
    const Eigen::Index n = qp.H.rows();
    if (qp.H.cols() != n || qp.f.size() != n || qp.lower.size() != n || qp.upper.size() != n)
        throw ContractViolation("QP dimensions are inconsistent");
    if (qp.c.size() != 0 && qp.c.size() != n) throw ContractViolation("QP row has wrong size");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(qp.lower[i] <= qp.upper[i])) throw ContractViolation("QP bounds are crossed");
    if (!qp.H.allFinite() || !qp.f.allFinite()) throw ContractViolation("QP data is not finite");
}

double clamp_finite(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

BoxQPResult solve_box_qp(const BoxQP& qp, const VectorXd* warm_start, const ActiveSetOptions& opt) {
    check_problem(qp);
    const Eigen::Index n = qp.H.rows();
    const bool has_row = qp.c.size() == n;
    BoxQPResult res;
    res.x = VectorXd::Zero(n);
    if (warm_start && warm_start->size() == n) res.x = *warm_start;
    for (Eigen::Index i = 0; i < n; ++i) res.x[i] = clamp_finite(res.x[i], qp.lower[i], qp.upper[i]);
    VectorXd& x = res.x;

    // Phase 1: push coordinates with the largest row weight toward the bound that helps.
    if (has_row) {
        double s = qp.c.dot(x);
        if (s < qp.d) {
            std::vector<Eigen::Index> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return std::abs(qp.c[a]) > std::abs(qp.c[b]);
            });
            bool reached = false;
            for (Eigen::Index i : order) {
                const double ci = qp.c[i];
                if (ci == 0.0) break;
                const double target = ci > 0 ? qp.upper[i] : qp.lower[i];
                const double need = (qp.d - s) / ci;
                if (std::abs(need) <= std::abs(target - x[i])) {
                    x[i] += need;
                    reached = true;
                    break;
                }
                x[i] = target;
                s = qp.c.dot(x);
                if (s >= qp.d) {
                    reached = true;
                    break;
                }
            }
            if (!reached) {
                res.status = QpStatus::Infeasible;
                return res;
            }
        }
    }

    std::vector<BoundState>& st = res.state;
    st.assign(n, BoundState::Free);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (qp.lower[i] == qp.upper[i])
            st[i] = BoundState::Fixed;
        else if (x[i] == qp.lower[i])
            st[i] = BoundState::AtLower;
        else if (x[i] == qp.upper[i])
            st[i] = BoundState::AtUpper;
    }

    auto row_has_free = [&]() {
        for (Eigen::Index i = 0; i < n; ++i)
            if (st[i] == BoundState::Free && qp.c[i] != 0.0) return true;
        return false;
    };

    bool row_active = false;
    if (has_row) {
        const double scale = 1.0 + qp.c.cwiseAbs().dot(x.cwiseAbs()) + std::abs(qp.d);
        row_active = std::abs(qp.c.dot(x) - qp.d) <= 1e-14 * scale && row_has_free();
    }

    const int max_iter = opt.max_iterations > 0 ? opt.max_iterations : 50 + 10 * static_cast<int>(n);
    double lambda = 0.0;
    VectorXd p = VectorXd::Zero(n);
    // After an unblocked full step x minimizes over the working set; the next
    // direction would be rounding noise.
    bool at_minimizer = false;

    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        std::vector<Eigen::Index> F;
        for (Eigen::Index i = 0; i < n; ++i)
            if (st[i] == BoundState::Free) F.push_back(i);
        if (row_active && !row_has_free()) row_active = false;

        const VectorXd g = qp.H * x + qp.f;
        p.setZero();
        lambda = 0.0;
        if (!F.empty()) {
            const auto m = static_cast<Eigen::Index>(F.size());
            MatrixXd HF(m, m);
            VectorXd gF(m), cF(m);
            for (Eigen::Index a = 0; a < m; ++a) {
                gF[a] = g[F[a]];
                cF[a] = has_row ? qp.c[F[a]] : 0.0;
                for (Eigen::Index b = 0; b < m; ++b) HF(a, b) = qp.H(F[a], F[b]);
            }
            Eigen::LLT<MatrixXd> llt(HF);
            if (llt.info() != Eigen::Success)
                throw ContractViolation("QP Hessian is not positive definite");
            const MatrixXd L = llt.matrixL();
            for (Eigen::Index a = 0; a < m; ++a)
                if (!(L(a, a) * L(a, a) > opt.pivot_floor))
                    throw ContractViolation("QP Hessian pivot below floor");
            const VectorXd v = llt.solve(gF);
            VectorXd pF = -v;
            if (row_active) {
                const VectorXd w = llt.solve(cF);
                lambda = cF.dot(v) / cF.dot(w);
                pF += lambda * w;
            }
            for (Eigen::Index a = 0; a < m; ++a) p[F[a]] = pF[a];
        }

        const double xscale = 1.0 + x.cwiseAbs().maxCoeff();
        if (at_minimizer || p.cwiseAbs().maxCoeff() <= opt.step_tol * xscale) {
            at_minimizer = false;
            // Stationary on the working set: check multiplier signs.
            const VectorXd r = has_row ? VectorXd(g - lambda * qp.c) : g;
            const double tol = opt.dual_tol * (1.0 + g.cwiseAbs().maxCoeff());
            double worst = -tol;
            Eigen::Index drop = -2;  // -1 marks the general row
            if (row_active && lambda < worst) {
                worst = lambda;
                drop = -1;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                double mult = 0.0;
                if (st[i] == BoundState::AtLower)
                    mult = r[i];
                else if (st[i] == BoundState::AtUpper)
                    mult = -r[i];
                else
                    continue;
                if (mult < worst) {
                    worst = mult;
                    drop = i;
                }
            }
            if (drop == -2) {
                res.status = QpStatus::Optimal;
                res.lambda = row_active ? lambda : 0.0;
                res.row_active = row_active;
                res.lambda_lower = VectorXd::Zero(n);
                res.lambda_upper = VectorXd::Zero(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (st[i] == BoundState::AtLower || (st[i] == BoundState::Fixed && r[i] > 0))
                        res.lambda_lower[i] = r[i];
                    else if (st[i] == BoundState::AtUpper || st[i] == BoundState::Fixed)
                        res.lambda_upper[i] = -r[i];
                }
                res.objective = 0.5 * x.dot(qp.H * x) + qp.f.dot(x);
                return res;
            }
            if (drop == -1)
                row_active = false;
            else
                st[drop] = BoundState::Free;
            continue;
        }

        double alpha = 1.0;
        Eigen::Index block = -2;
        BoundState block_state = BoundState::Free;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (st[i] != BoundState::Free) continue;
            if (p[i] < 0 && std::isfinite(qp.lower[i])) {
                const double t = std::max(0.0, (qp.lower[i] - x[i]) / p[i]);
                if (t < alpha) {
                    alpha = t;
                    block = i;
                    block_state = BoundState::AtLower;
                }
            } else if (p[i] > 0 && std::isfinite(qp.upper[i])) {
                const double t = std::max(0.0, (qp.upper[i] - x[i]) / p[i]);
                if (t < alpha) {
                    alpha = t;
                    block = i;
                    block_state = BoundState::AtUpper;
                }
            }
        }
        if (has_row && !row_active) {
            const double cp = qp.c.dot(p);
            if (cp < 0) {
                const double t = std::max(0.0, (qp.c.dot(x) - qp.d) / -cp);
                if (t < alpha) {
                    alpha = t;
                    block = -1;
                }
            }
        }
        x += alpha * p;
        if (block >= 0) {
            x[block] = block_state == BoundState::AtLower ? qp.lower[block] : qp.upper[block];
            st[block] = block_state;
        } else if (block == -1) {
            row_active = true;
        } else {
            at_minimizer = true;
        }
    }
    res.status = QpStatus::IterationLimit;
    return res;
}

double kkt_residual(const BoxQP& qp, const VectorXd& x, double lambda, const VectorXd& lambda_lower,
                    const VectorXd& lambda_upper) {
    const bool has_row = qp.c.size() == x.size();
    VectorXd stat = qp.H * x + qp.f - lambda_lower + lambda_upper;
    if (has_row) stat -= lambda * qp.c;
    double r = stat.cwiseAbs().maxCoeff();
    r = std::max(r, -lambda);
    if (has_row) {
        const double slack = qp.c.dot(x) - qp.d;
        r = std::max(r, -slack);
        r = std::max(r, std::abs(lambda * slack));
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        r = std::max({r, -lambda_lower[i], -lambda_upper[i]});
        if (std::isfinite(qp.lower[i])) {
            r = std::max(r, qp.lower[i] - x[i]);
            r = std::max(r, std::abs(lambda_lower[i] * (x[i] - qp.lower[i])));
        } else {
            r = std::max(r, std::abs(lambda_lower[i]));
        }
        if (std::isfinite(qp.upper[i])) {
            r = std::max(r, x[i] - qp.upper[i]);
            r = std::max(r, std::abs(lambda_upper[i] * (qp.upper[i] - x[i])));
        } else {
            r = std::max(r, std::abs(lambda_upper[i]));
        }
    }
    return r;
}

}  // namespace safeforce
