#include "equimesh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "equimesh/errors.hpp"
#include "equimesh/kernels.hpp"
#include "equimesh/kkt.hpp"

namespace equimesh {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierFloor = 1e-12;  // below this the barrier is switched off

using Eigen::SparseMatrix;
using Eigen::VectorXd;

SparseMatrix<double> spdiag(const VectorXd& d) {
    const int n = int(d.size());
    SparseMatrix<double> m(n, n);
    m.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) m.insert(i, i) = d[i];
    m.makeCompressed();
    return m;
}

// The constraint rows actually used by the solver: the known redundant row
// and rows of isolated vertices are dropped so A has full row rank. Residual
// reporting still uses the full system.
struct ConstraintWork {
    SparseMatrix<double> A;       // filtered, full row rank
    VectorXd b;
    SparseMatrix<double> A_full;  // as handed in
    VectorXd b_full;
    Eigen::SimplicialLDLT<SparseMatrix<double>> normal;  // A A^T

    explicit ConstraintWork(const LinearConstraints& lc) : A_full(lc.matrix), b_full(lc.rhs) {
        const int rows = int(lc.matrix.rows());
        std::vector<char> keep(rows, 1);
        if (lc.redundant_row >= 0) keep[lc.redundant_row] = 0;
        std::vector<int> nnz_per_row(rows, 0);
        for (int k = 0; k < lc.matrix.outerSize(); ++k)
            for (SparseMatrix<double>::InnerIterator it(lc.matrix, k); it; ++it)
                ++nnz_per_row[it.row()];
        std::vector<int> newrow(rows, -1);
        int m = 0;
        for (int r = 0; r < rows; ++r) {
            if (nnz_per_row[r] == 0) keep[r] = 0;
            if (keep[r]) newrow[r] = m++;
        }
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(lc.matrix.nonZeros());
        for (int k = 0; k < lc.matrix.outerSize(); ++k)
            for (SparseMatrix<double>::InnerIterator it(lc.matrix, k); it; ++it)
                if (keep[it.row()])
                    trip.emplace_back(newrow[it.row()], int(it.col()), it.value());
        A.resize(m, lc.matrix.cols());
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
        b.resize(m);
        for (int r = 0; r < rows; ++r)
            if (keep[r]) b[newrow[r]] = lc.rhs[r];

        SparseMatrix<double> aat = A * SparseMatrix<double>(A.transpose());
        normal.compute(aat);
        if (normal.info() != Eigen::Success)
            throw FeasibilityError("constraint system is rank-deficient beyond the known redundancy");
    }

    double max_full_residual(const VectorXd& a) const {
        if (A_full.rows() == 0) return 0.0;
        return (A_full * a - b_full).lpNorm<Eigen::Infinity>();
    }

    VectorXd project_null(const VectorXd& g) const {
        if (A.rows() == 0) return g;
        return g - A.transpose() * normal.solve(A * g);
    }

    VectorXd project_affine(const VectorXd& a) const {
        if (A.rows() == 0) return a;
        return a - A.transpose() * normal.solve(A * a - b);
    }
};

struct Workspace {
    const MeshTopology& topo;
    const ConstraintSpec* spec;  // null when only custom rows are given
    ConstraintWork cw;
    SolverConfig cfg;
    int n;
    std::vector<double> cot_buf;

    Workspace(const MeshTopology& t, const ConstraintSpec* s, const LinearConstraints& lc,
              const SolverConfig& c)
        : topo(t), spec(s), cw(lc), cfg(c), n(int(lc.matrix.cols())), cot_buf(n) {}

    bool interior(const VectorXd& a, double margin = 1e-15) const {
        for (int i = 0; i < n; ++i)
            if (!(a[i] > margin && a[i] < kPi - margin)) return false;
        return true;
    }

    double eval_E(const VectorXd& a) const { return kernels::sum_lob({a.data(), size_t(n)}); }

    void grad_E(const VectorXd& a, VectorXd& g) const {
        g.resize(n);
        kernels::neg_log_2sin({a.data(), size_t(n)}, {g.data(), size_t(n)});
    }

    VectorXd residuals(const VectorXd& a) {
        kernels::log_sin({a.data(), size_t(n)}, cot_buf);  // reuse buffer for log-sines
        VectorXd r(topo.vertex_count);
        for (int v = 0; v < topo.vertex_count; ++v) {
            double h = 0.0;
            for (const auto& [f, c] : topo.vertex_corners[v])
                h += cot_buf[3 * f + (c + 2) % 3] - cot_buf[3 * f + (c + 1) % 3];
            r[v] = h - spec->holonomy_target[v];
        }
        return r;
    }

    double eval_D(const VectorXd& a) { return spec ? residuals(a).squaredNorm() : 0.0; }

    // gradient of D and the Gauss-Newton Hessian 2 J^T J + damping * I; the
    // triplet assembly always emits every structural entry so the sparsity
    // pattern is fixed by the topology alone.
    void defect_derivatives(const VectorXd& a, const VectorXd& r, VectorXd& g,
                            SparseMatrix<double>* H, double damping) {
        kernels::cot({a.data(), size_t(n)}, cot_buf);
        g = VectorXd::Zero(n);
        std::vector<Eigen::Triplet<double>> trip;
        if (H) {
            size_t cap = size_t(n);
            for (int v = 0; v < topo.vertex_count; ++v)
                cap += 4 * topo.vertex_corners[v].size() * topo.vertex_corners[v].size();
            trip.reserve(cap);
            for (int i = 0; i < n; ++i) trip.emplace_back(i, i, damping);
        }
        std::vector<std::pair<int, double>> row;
        for (int v = 0; v < topo.vertex_count; ++v) {
            row.clear();
            for (const auto& [f, c] : topo.vertex_corners[v]) {
                const int cp = 3 * f + (c + 2) % 3;  // +cot column
                const int cm = 3 * f + (c + 1) % 3;  // -cot column
                row.emplace_back(cp, cot_buf[cp]);
                row.emplace_back(cm, -cot_buf[cm]);
            }
            for (const auto& [col, val] : row) {
                g[col] += 2.0 * val * r[v];
                if (H)
                    for (const auto& [col2, val2] : row)
                        trip.emplace_back(col, col2, 2.0 * val * val2);
            }
        }
        if (H) {
            H->resize(n, n);
            H->setFromTriplets(trip.begin(), trip.end());
            H->makeCompressed();
        }
    }

    void ensure_feasible(const VectorXd& a, const char* who) const {
        if (!interior(a))
            throw FeasibilityError(std::string(who) + ": initial angles not strictly inside (0, pi)");
        const double res = cw.max_full_residual(a);
        if (res > cfg.constraint_tolerance)
            throw FeasibilityError(std::string(who) + ": initial linear residual " +
                                   std::to_string(res) + " exceeds tolerance");
    }
};

double fraction_to_boundary(const VectorXd& a, const VectorXd& p, double tau) {
    double t = kInf;
    for (int i = 0; i < a.size(); ++i) {
        if (p[i] < 0.0) t = std::min(t, tau * a[i] / -p[i]);
        else if (p[i] > 0.0) t = std::min(t, tau * (kPi - a[i]) / p[i]);
    }
    return t;
}

double barrier_sum(const VectorXd& a) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += std::log(a[i]) + std::log(kPi - a[i]);
    return s;
}

void append_trace(SolveTrace& dst, const SolveTrace& src) {
    dst.iterations.insert(dst.iterations.end(), src.iterations.begin(), src.iterations.end());
    dst.phase1_iterations += src.phase1_iterations;
    dst.phase2_iterations += src.phase2_iterations;
    if (!src.message.empty()) {
        if (!dst.message.empty()) dst.message += "; ";
        dst.message += src.message;
    }
}

// Interior-point ascent on E + mu * sum(log a + log(pi - a)) subject to the
// linear rows. With delta_cap finite, trial points must additionally keep
// the defect below the cap (the relaxation's inequality constraint).
SolveTrace phase1(Workspace& ws, VectorXd& a, double delta_cap) {
    const SolverConfig& cfg = ws.cfg;
    SolveTrace trace;
    trace.initial_energy = ws.eval_E(a);

    KktSolver kkt(ws.cw.A, cfg.iterative_kkt_threshold);
    VectorXd gE(ws.n), gB(ws.n), hd(ws.n);

    ws.grad_E(a, gE);
    double mu = cfg.barrier_initial * gE.norm() / std::max(1, ws.n);
    mu = std::clamp(mu, kBarrierFloor, 1e3);

    auto shrink_mu = [&](double m) {
        const double next = m * cfg.barrier_shrink;
        return next < kBarrierFloor ? 0.0 : next;
    };

    int iters = 0;
    bool converged = false;
    std::string stop;
    while (iters < cfg.max_iterations) {
        ws.grad_E(a, gE);
        gB = gE;
        for (int i = 0; i < ws.n; ++i) gB[i] += mu * (1.0 / a[i] - 1.0 / (kPi - a[i]));
        const VectorXd pg = ws.cw.project_null(gB);
        if (pg.norm() <= std::max(cfg.kkt_tolerance, 0.1 * mu)) {
            if (mu == 0.0) {
                converged = true;
                break;
            }
            mu = shrink_mu(mu);
            continue;
        }

        for (int i = 0; i < ws.n; ++i) {
            const double lo = a[i], hi = kPi - a[i];
            hd[i] = -(std::cos(a[i]) / std::sin(a[i])) - mu * (1.0 / (lo * lo) + 1.0 / (hi * hi));
        }
        kkt.factorize(spdiag(hd));
        const auto sol = kkt.solve(-gB, ws.cw.b - ws.cw.A * a);
        VectorXd p = sol.ok ? sol.x : pg;
        if (gB.dot(p) <= 0.0) p = pg;

        const double E0 = ws.eval_E(a);
        const double B0 = E0 + (mu > 0.0 ? mu * barrier_sum(a) : 0.0);
        const double slope = gB.dot(p);
        double t = std::min(1.0, fraction_to_boundary(a, p, cfg.fraction_to_boundary));
        bool accepted = false;
        VectorXd trial;
        double E_t = 0.0;
        for (int ls = 0; ls < 60 && t > 1e-18; ++ls, t *= 0.5) {
            trial = a + t * p;
            if (!ws.interior(trial)) continue;
            if (delta_cap < kInf && ws.eval_D(trial) >= delta_cap) continue;
            E_t = ws.eval_E(trial);
            const double B_t = E_t + (mu > 0.0 ? mu * barrier_sum(trial) : 0.0);
            if (B_t >= B0 + 1e-4 * t * slope && E_t >= E0 - 1e-12) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (mu > 0.0) {
                mu = shrink_mu(mu);
                continue;
            }
            stop = delta_cap < kInf ? "defect cap blocks further ascent" : "line search stalled";
            break;
        }

        const double step_norm = t * p.norm();
        a = trial;
        if (ws.cw.max_full_residual(a) > 0.5 * cfg.constraint_tolerance) a = ws.cw.project_affine(a);
        ++iters;
        trace.iterations.push_back({1, E_t, ws.spec ? ws.eval_D(a) : 0.0, mu, step_norm,
                                    ws.cw.max_full_residual(a)});
        if (step_norm <= 1e-16 * (1.0 + a.norm())) {
            if (mu > 0.0) {
                mu = shrink_mu(mu);
                continue;
            }
            stop = "negligible step";
            break;
        }
    }
    if (iters >= cfg.max_iterations) stop = "iteration limit reached";

    trace.phase1_iterations = iters;
    trace.converged = converged;
    if (!converged && !stop.empty()) trace.message = "phase 1: " + stop;
    trace.final_energy = ws.eval_E(a);
    trace.final_defect = ws.spec ? ws.eval_D(a) : 0.0;
    return trace;
}

// Levenberg-Marquardt on the holonomy residuals inside the linear rows.
// Stops at max residual <= holonomy_tolerance, or at defect <= d_target when
// d_target >= 0 (the relaxation's fallback mode).
SolveTrace phase2(Workspace& ws, VectorXd& a, double d_target) {
    const SolverConfig& cfg = ws.cfg;
    SolveTrace trace;
    trace.initial_energy = ws.eval_E(a);

    VectorXd r = ws.residuals(a);
    double D = r.squaredNorm();
    auto done = [&] {
        return d_target >= 0.0 ? D <= d_target
                               : r.lpNorm<Eigen::Infinity>() <= cfg.holonomy_tolerance;
    };

    if (done()) {
        trace.converged = true;
        trace.final_energy = trace.initial_energy;
        trace.final_defect = D;
        trace.max_holonomy_residual = r.lpNorm<Eigen::Infinity>();
        return trace;
    }

    KktSolver kkt(ws.cw.A, cfg.iterative_kkt_threshold);
    VectorXd g(ws.n);
    SparseMatrix<double> H;
    ws.defect_derivatives(a, r, g, &H, 0.0);
    double scale = 1.0;
    for (int i = 0; i < ws.n; ++i) scale = std::max(scale, H.coeff(i, i));
    double lm = cfg.lm_damping_initial * scale;
    const double lm_min = 1e-14 * scale, lm_max = 1e14 * scale;

    int iters = 0;
    bool converged = false;
    std::string stop;
    std::deque<double> window;  // defect at the last accepted iterates
    while (iters < cfg.max_iterations) {
        ws.defect_derivatives(a, r, g, nullptr, 0.0);
        bool accepted = false;
        VectorXd trial, r_t;
        double D_t = 0.0, t = 0.0, pnorm = 0.0;
        for (int tries = 0; tries < 60; ++tries) {
            ws.defect_derivatives(a, r, g, &H, lm);
            kkt.factorize(H);
            const auto sol = kkt.solve(-g, ws.cw.b - ws.cw.A * a);
            if (!sol.ok) {
                lm = std::min(lm * 2.0, lm_max);
                continue;
            }
            const VectorXd& p = sol.x;
            pnorm = p.norm();
            t = std::min(1.0, fraction_to_boundary(a, p, cfg.fraction_to_boundary));
            trial = a + t * p;
            if (ws.interior(trial)) {
                r_t = ws.residuals(trial);
                D_t = r_t.squaredNorm();
                if (D_t < D) {
                    accepted = true;
                    break;
                }
            }
            if (lm >= lm_max) break;
            lm = std::min(lm * 2.0, lm_max);
        }
        if (!accepted) {
            stop = "damping exhausted without defect decrease";
            break;
        }
        a = trial;
        r = r_t;
        D = D_t;
        lm = std::max(lm / 3.0, lm_min);
        if (ws.cw.max_full_residual(a) > 0.5 * cfg.constraint_tolerance) {
            a = ws.cw.project_affine(a);
            r = ws.residuals(a);
            D = r.squaredNorm();
        }
        ++iters;
        trace.iterations.push_back(
            {2, ws.eval_E(a), D, lm, t * pnorm, ws.cw.max_full_residual(a)});
        if (done()) {
            converged = true;
            break;
        }
        window.push_back(D);
        if (window.size() > 20) {
            window.pop_front();
            if (window.front() - D < 1e-16) {
                stop = "stagnation: defect reduction below 1e-16 over 20 iterations";
                break;
            }
        }
    }
    if (iters >= cfg.max_iterations && !converged) stop = "iteration limit reached";

    trace.phase2_iterations = iters;
    trace.converged = converged;
    if (!converged && !stop.empty()) trace.message = "phase 2: " + stop;
    trace.final_energy = ws.eval_E(a);
    trace.final_defect = D;
    trace.max_holonomy_residual = r.lpNorm<Eigen::Infinity>();
    return trace;
}

// Projected gradient descent on the defect down to `target`. Falls back to
// damped Gauss-Newton if the plain descent stalls.
SolveTrace descend_D(Workspace& ws, VectorXd& a, double target, double delta_for_trace) {
    const SolverConfig& cfg = ws.cfg;
    SolveTrace trace;
    trace.initial_energy = ws.eval_E(a);

    VectorXd r = ws.residuals(a);
    double D = r.squaredNorm();
    VectorXd g(ws.n);
    double t_prev = 1.0;
    int iters = 0;
    bool converged = D <= target;
    while (!converged && iters < cfg.max_iterations) {
        ws.defect_derivatives(a, r, g, nullptr, 0.0);
        const VectorXd p = -ws.cw.project_null(g);
        const double slope = g.dot(p);
        if (p.norm() <= 1e-15 || slope >= 0.0) break;  // stalled; fall back below

        double t = std::min(2.0 * t_prev, fraction_to_boundary(a, p, cfg.fraction_to_boundary));
        bool accepted = false;
        VectorXd trial, r_t;
        double D_t = 0.0;
        for (int ls = 0; ls < 60 && t > 1e-18; ++ls, t *= 0.5) {
            trial = a + t * p;
            if (!ws.interior(trial)) continue;
            r_t = ws.residuals(trial);
            D_t = r_t.squaredNorm();
            if (D_t <= D + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // stalled; fall back below
        a = trial;
        r = r_t;
        D = D_t;
        t_prev = std::max(t, 1e-12);
        if (ws.cw.max_full_residual(a) > 0.5 * cfg.constraint_tolerance) {
            a = ws.cw.project_affine(a);
            r = ws.residuals(a);
            D = r.squaredNorm();
        }
        ++iters;
        trace.iterations.push_back(
            {2, ws.eval_E(a), D, delta_for_trace, t * p.norm(), ws.cw.max_full_residual(a)});
        converged = D <= target;
    }
    trace.phase2_iterations = iters;
    if (!converged) {
        SolveTrace fb = phase2(ws, a, target);
        append_trace(trace, fb);
        D = fb.final_defect;
        converged = fb.converged;
        if (!fb.converged) trace.message = "defect descent stalled; " + fb.message;
    }
    trace.converged = converged;
    trace.final_energy = ws.eval_E(a);
    trace.final_defect = D;
    return trace;
}

VectorXd to_vec(const AngleStructure& A) {
    return Eigen::Map<const VectorXd>(A.angles.data(), long(A.angles.size()));
}

AngleStructure to_angles(const VectorXd& v) {
    AngleStructure A;
    A.angles.assign(v.data(), v.data() + v.size());
    return A;
}

}  // namespace

void SolverConfig::validate() const {
    if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
    if (!(kkt_tolerance > 0) || !(constraint_tolerance > 0) || !(holonomy_tolerance > 0))
        throw std::invalid_argument("tolerances must be positive");
    if (!(barrier_initial > 0) || !(lm_damping_initial > 0))
        throw std::invalid_argument("barrier_initial and lm_damping_initial must be positive");
    if (!(barrier_shrink > 0 && barrier_shrink < 1))
        throw std::invalid_argument("barrier_shrink must lie in (0, 1)");
    if (!(fraction_to_boundary > 0 && fraction_to_boundary < 1))
        throw std::invalid_argument("fraction_to_boundary must lie in (0, 1)");
}

SolveResult maximize_E(const MeshTopology& topo, const AngleStructure& A0,
                       const LinearConstraints& constraints, const SolverConfig& cfg) {
    cfg.validate();
    Workspace ws(topo, nullptr, constraints, cfg);
    VectorXd a = to_vec(A0);
    ws.ensure_feasible(a, "maximize_E");
    SolveTrace trace = phase1(ws, a, kInf);
    return {to_angles(a), std::move(trace)};
}

SolveResult maximize_E(const MeshTopology& topo, const AngleStructure& A0,
                       const ConstraintSpec& spec, const SolverConfig& cfg) {
    cfg.validate();
    const LinearConstraints lc = build_linear_constraints(topo, spec);
    Workspace ws(topo, &spec, lc, cfg);
    VectorXd a = to_vec(A0);
    ws.ensure_feasible(a, "maximize_E");
    SolveTrace trace = phase1(ws, a, kInf);
    trace.max_holonomy_residual = ws.residuals(a).lpNorm<Eigen::Infinity>();
    return {to_angles(a), std::move(trace)};
}

SolveResult minimize_D(const MeshTopology& topo, const AngleStructure& A1,
                       const ConstraintSpec& spec, const SolverConfig& cfg) {
    cfg.validate();
    const LinearConstraints lc = build_linear_constraints(topo, spec);
    Workspace ws(topo, &spec, lc, cfg);
    VectorXd a = to_vec(A1);
    ws.ensure_feasible(a, "minimize_D");
    SolveTrace trace = phase2(ws, a, -1.0);
    return {to_angles(a), std::move(trace)};
}

SolveResult argmax(const MeshTopology& topo, const AngleStructure& A0, const ConstraintSpec& spec,
                   const SolverConfig& cfg) {
    cfg.validate();
    const LinearConstraints lc = build_linear_constraints(topo, spec);
    Workspace ws(topo, &spec, lc, cfg);
    VectorXd a = to_vec(A0);
    ws.ensure_feasible(a, "argmax");

    SolveTrace trace = phase1(ws, a, kInf);
    const double e_after_phase1 = ws.eval_E(a);
    SolveTrace t2 = phase2(ws, a, -1.0);
    const bool both = trace.converged && t2.converged;
    append_trace(trace, t2);
    trace.converged = both;
    trace.final_energy = t2.final_energy;
    trace.final_defect = t2.final_defect;
    trace.max_holonomy_residual = t2.max_holonomy_residual;
    if (t2.final_energy < e_after_phase1 - 1e-12) {
        if (!trace.message.empty()) trace.message += "; ";
        trace.message += "defect reduction lowered the energy by " +
                         std::to_string(e_after_phase1 - t2.final_energy);
    }
    return {to_angles(a), std::move(trace)};
}

SolveResult argmax_relaxed(const MeshTopology& topo, const AngleStructure& A0,
                           const ConstraintSpec& spec, const SolverConfig& cfg, double delta0) {
    cfg.validate();
    if (!(delta0 > 0)) throw std::invalid_argument("delta0 must be positive");
    const LinearConstraints lc = build_linear_constraints(topo, spec);
    Workspace ws(topo, &spec, lc, cfg);
    VectorXd a = to_vec(A0);
    ws.ensure_feasible(a, "argmax_relaxed");

    SolveTrace trace;
    trace.initial_energy = ws.eval_E(a);
    double delta = delta0;
    const double delta_stop = cfg.holonomy_tolerance * cfg.holonomy_tolerance;
    bool ok = true;
    while (delta >= delta_stop) {
        trace.delta_schedule.push_back(delta);
        if (ws.eval_D(a) >= delta) {
            SolveTrace pre = descend_D(ws, a, delta / 4.0, delta);
            ok = ok && pre.converged;
            append_trace(trace, pre);
        }
        SolveTrace up = phase1(ws, a, delta);
        append_trace(trace, up);  // cap-blocked exits are expected here
        SolveTrace down = descend_D(ws, a, delta / 4.0, delta);
        ok = ok && down.converged;
        append_trace(trace, down);
        delta *= 0.5;
    }
    const VectorXd r = ws.residuals(a);
    trace.max_holonomy_residual = r.lpNorm<Eigen::Infinity>();
    trace.converged = ok && trace.max_holonomy_residual <= cfg.holonomy_tolerance;
    trace.final_energy = ws.eval_E(a);
    trace.final_defect = r.squaredNorm();
    return {to_angles(a), std::move(trace)};
}

}  // namespace equimesh
