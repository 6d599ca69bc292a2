#include "nlch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace nlch {

namespace {

constexpr double kClampGuard = 1e-12;
constexpr double kStationaryRate = 1e-10;

double wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& scale_rho,
            double abs_tol, double rel_tol) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double w = abs_tol + rel_tol * std::abs(scale_rho(i));
        const double q = v(i) / w;
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

ChSystem::ChSystem(std::shared_ptr<const Grid2D> grid, std::shared_ptr<const ConvOperator> op,
                   Potential pot, double mobility)
    : grid_(std::move(grid)), op_(std::move(op)), pot_(pot), mobility_(mobility) {
    if (!grid_ || !op_)
        throw std::invalid_argument("ChSystem: null grid or operator");
    if (op_->matrix.rows() != grid_->m())
        throw std::invalid_argument("ChSystem: operator does not match the grid");
    if (!(mobility_ > 0.0))
        throw std::invalid_argument("ChSystem: mobility must be positive");

    std::vector<bool> is_bnd(grid_->m(), false);
    for (const auto& bp : grid_->boundary) {
        is_bnd[bp.index] = true;
        bnd_index_.push_back(bp.index);
    }
    for (int i = 0; i < grid_->m(); ++i)
        if (!is_bnd[i])
            interior_.push_back(i);

    bnd_rows_ = grid_->normal_derivative_rows();
    lap_op_ = grid_->lap * op_->matrix;
    bnd_op_ = bnd_rows_ * op_->matrix;
}

Eigen::VectorXd ChSystem::chemical_potential(const Eigen::VectorXd& rho) const {
    return pot_.eval(rho, 1) - op_->matrix * rho;
}

Eigen::VectorXd ChSystem::residual(const Eigen::VectorXd& rho, const Eigen::VectorXd& mu,
                                   const Eigen::VectorXd& rho_dot) const {
    const int m = grid_->m();
    Eigen::VectorXd r(2 * m);
    const Eigen::VectorXd lap_mu = grid_->lap * mu;
    for (int i : interior_)
        r(i) = rho_dot(i) - mobility_ * lap_mu(i);
    for (std::size_t k = 0; k < bnd_index_.size(); ++k)
        r(bnd_index_[k]) = bnd_rows_.row(static_cast<Eigen::Index>(k)).dot(mu);
    r.segment(m, m) = mu - pot_.eval(rho, 1) + op_->matrix * rho;
    return r;
}

double ChSystem::energy(const Eigen::VectorXd& rho) const {
    const Eigen::VectorXd f = pot_.eval(rho, 0);
    const Eigen::VectorXd conv = op_->matrix * rho;
    return grid_->weights.dot(f) - 0.5 * rho.dot(grid_->weights.cwiseProduct(conv));
}

double ChSystem::quadrature_mean(const Eigen::VectorXd& rho) const {
    return grid_->weights.dot(rho);  // the square has unit area
}

ChState ChSystem::make_state(double t, Eigen::VectorXd rho) const {
    ChState s;
    s.t = t;
    s.mu = chemical_potential(rho);
    s.mass = quadrature_mean(rho);
    s.energy = energy(rho);
    s.sup_norm = rho.cwiseAbs().maxCoeff();
    s.rho = std::move(rho);
    return s;
}

ChState ChSystem::consistent_init(const Eigen::VectorXd& rho0, double bc_tol,
                                  int max_iter) const {
    if (rho0.size() != grid_->m())
        throw std::invalid_argument("consistent_init: rho0 size mismatch");
    Eigen::VectorXd rho = rho0;
    if (pot_.kind() == Potential::Kind::logarithmic) {
        const double sup = rho.cwiseAbs().maxCoeff();
        if (sup >= 1.0)
            throw InitializationError(
                "consistent_init: initial datum attains |rho| >= 1 at a collocation point; "
                "the logarithmic potential requires ||rho0||_inf < 1 (wave data hits +-1 "
                "exactly on grids with n = 1 mod 3)",
                sup);
        rho = rho.cwiseMax(-1.0 + kClampGuard).cwiseMin(1.0 - kClampGuard);
    }

    const int nb = static_cast<int>(bnd_index_.size());
    auto bnd_residual = [&](const Eigen::VectorXd& r) {
        return (bnd_rows_ * (pot_.eval(r, 1) - op_->matrix * r)).eval();
    };

    Eigen::VectorXd g = bnd_residual(rho);
    double gnorm = g.cwiseAbs().maxCoeff();
    int it = 0;
    while (gnorm > bc_tol && it++ < max_iter) {
        // Jacobian of the boundary constraints w.r.t. the boundary values.
        const Eigen::VectorXd fpp = pot_.eval(rho, 2);
        Eigen::MatrixXd jac(nb, nb);
        for (int c = 0; c < nb; ++c) {
            const int j = bnd_index_[c];
            jac.col(c) = bnd_rows_.col(j) * fpp(j) - bnd_op_.col(j);
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-g);

        double lambda = 1.0;
        for (int half = 0; half < 40; ++half) {
            Eigen::VectorXd trial = rho;
            for (int c = 0; c < nb; ++c) {
                double v = trial(bnd_index_[c]) + lambda * step(c);
                if (pot_.kind() == Potential::Kind::logarithmic)
                    v = std::clamp(v, -1.0 + kClampGuard, 1.0 - kClampGuard);
                trial(bnd_index_[c]) = v;
            }
            const Eigen::VectorXd gt = bnd_residual(trial);
            const double gtn = gt.cwiseAbs().maxCoeff();
            if (gtn < gnorm || lambda < 1e-8) {
                rho = std::move(trial);
                g = gt;
                gnorm = gtn;
                break;
            }
            lambda /= 2.0;
        }
    }
    if (gnorm > bc_tol) {
        std::ostringstream msg;
        msg << "consistent_init: boundary constraint residual " << gnorm
            << " above tolerance " << bc_tol << " after " << max_iter << " iterations";
        throw InitializationError(msg.str(), gnorm);
    }
    return make_state(0.0, std::move(rho));
}

namespace {

// BDF coefficients: rho_dot = (c0 rho_new - hist) / dt.
struct BdfScheme {
    double c0;
    Eigen::VectorXd hist;
};

BdfScheme bdf_coeffs(int order, double dt, const Eigen::VectorXd& rho_n,
                     const Eigen::VectorXd* rho_prev, double dt_prev) {
    if (order == 1 || rho_prev == nullptr)
        return {1.0, rho_n};
    const double r = dt / dt_prev;
    BdfScheme s;
    s.c0 = (1.0 + 2.0 * r) / (1.0 + r);
    s.hist = (1.0 + r) * rho_n - (r * r / (1.0 + r)) * (*rho_prev);
    return s;
}

struct NewtonResult {
    Eigen::VectorXd rho, mu;
    bool converged = false;
};

// Modified Newton on the Schur-reduced system. The mu block is eliminated
// exactly: delta_mu = -r2 - C delta_rho with C = op - diag(F''), leaving an
// M x M solve per iteration with a frozen factorization.
class NewtonSolver {
public:
    explicit NewtonSolver(const ChSystem& sys) : sys_(sys) {}

    NewtonResult solve(const Eigen::VectorXd& rho_guess, double dtc,
                       const BdfScheme& scheme, double dt, const SolverConfig& cfg) {
        const auto& grid = sys_.grid();
        const int m = grid.m();
        const bool clamp = sys_.potential().kind() == Potential::Kind::logarithmic;

        NewtonResult res;
        res.rho = rho_guess;
        if (clamp)
            res.rho = res.rho.cwiseMax(-1.0 + kClampGuard).cwiseMin(1.0 - kClampGuard);
        res.mu = sys_.chemical_potential(res.rho);

        bool refactored_this_try = false;
        if (!lu_valid_ || std::abs(std::log(dtc / dtc_factored_)) > 0.3) {
            factor(res.rho, dtc);
            refactored_this_try = true;
        }

        double prev_step = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg.newton_max_iter; ++it) {
            const Eigen::VectorXd rho_dot = (scheme.c0 * res.rho - scheme.hist) / dt;
            const Eigen::VectorXd r = sys_.residual(res.rho, res.mu, rho_dot);
            const Eigen::VectorXd r1 = r.head(m);
            const Eigen::VectorXd r2 = r.tail(m);

            Eigen::VectorXd rhs(m);
            const Eigen::VectorXd lap_r2 = grid.lap * r2;
            const Eigen::VectorXd bnd_r2 = sys_.boundary_rows() * r2;
            for (int i : sys_.interior_indices())
                rhs(i) = -r1(i) - sys_.mobility() * lap_r2(i);
            for (std::size_t k = 0; k < sys_.boundary_indices().size(); ++k)
                rhs(sys_.boundary_indices()[k]) = r1(sys_.boundary_indices()[k]) - bnd_r2(static_cast<Eigen::Index>(k));

            const Eigen::VectorXd drho = lu_.solve(rhs);
            const Eigen::VectorXd dmu =
                -r2 - (sys_.op().matrix * drho - fpp_.cwiseProduct(drho));

            res.rho += drho;
            if (clamp)
                res.rho = res.rho.cwiseMax(-1.0 + kClampGuard).cwiseMin(1.0 - kClampGuard);
            res.mu += dmu;

            const double step_norm = wrms(drho, res.rho, cfg.abs_tol, cfg.rel_tol);
            if (step_norm <= 0.03 || drho.cwiseAbs().maxCoeff() <= cfg.newton_tol) {
                res.converged = true;
                return res;
            }
            // Convergence degrading: refactor once at the current iterate.
            if (step_norm > 0.5 * prev_step && it >= 1) {
                if (refactored_this_try)
                    return res;  // give up; caller halves dt
                factor(res.rho, dtc);
                refactored_this_try = true;
                prev_step = std::numeric_limits<double>::infinity();
                continue;
            }
            prev_step = step_norm;
        }
        return res;
    }

    void invalidate() { lu_valid_ = false; }

private:
    void factor(const Eigen::VectorXd& rho, double dtc) {
        const auto& grid = sys_.grid();
        const int m = grid.m();
        fpp_ = sys_.potential().eval(rho, 2);
        Eigen::MatrixXd s(m, m);
        for (int i : sys_.interior_indices()) {
            s.row(i) = sys_.mobility()
                     * (sys_.lap_op().row(i) - grid.lap.row(i).cwiseProduct(fpp_.transpose()));
            s(i, i) += dtc;
        }
        for (std::size_t k = 0; k < sys_.boundary_indices().size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            s.row(sys_.boundary_indices()[k]) =
                sys_.bnd_op().row(kk) - sys_.boundary_rows().row(kk).cwiseProduct(fpp_.transpose());
        }
        lu_.compute(s);
        dtc_factored_ = dtc;
        lu_valid_ = true;
    }

    const ChSystem& sys_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::VectorXd fpp_;
    double dtc_factored_ = -1.0;
    bool lu_valid_ = false;
};

// Quadratic (or linear) extrapolation of rho histories to t_new.
Eigen::VectorXd extrapolate(const std::deque<std::pair<double, Eigen::VectorXd>>& hist,
                            double t_new) {
    const std::size_t n = hist.size();
    if (n == 1)
        return hist.back().second;
    const std::size_t k0 = n >= 3 ? n - 3 : 0;
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(hist.back().second.size());
    for (std::size_t k = k0; k < n; ++k) {
        double c = 1.0;
        for (std::size_t j = k0; j < n; ++j)
            if (j != k)
                c *= (t_new - hist[j].first) / (hist[k].first - hist[j].first);
        pred += c * hist[k].second;
    }
    return pred;
}

}  // namespace

std::pair<ChState, double> ch_step(const ChSystem& sys, const ChState& state, double dt,
                                   int order, const SolverConfig& cfg,
                                   const ChState* prev, double dt_prev) {
    if (!(dt > 0.0))
        throw std::invalid_argument("ch_step: dt must be positive");
    if (order == 2 && prev == nullptr)
        order = 1;
    NewtonSolver newton(sys);
    const BdfScheme scheme =
        bdf_coeffs(order, dt, state.rho, prev ? &prev->rho : nullptr, dt_prev);

    std::deque<std::pair<double, Eigen::VectorXd>> hist;
    if (prev)
        hist.emplace_back(state.t - dt_prev, prev->rho);
    hist.emplace_back(state.t, state.rho);
    const Eigen::VectorXd pred = extrapolate(hist, state.t + dt);

    NewtonResult res = newton.solve(pred, scheme.c0 / dt, scheme, dt, cfg);
    if (!res.converged)
        throw IntegrationFailure("ch_step: Newton iteration failed to converge", state);
    const double est = 0.5 * wrms(res.rho - pred, res.rho, cfg.abs_tol, cfg.rel_tol);
    return {sys.make_state(state.t + dt, std::move(res.rho)), est};
}

Trajectory integrate(const ChSystem& sys, const Eigen::VectorXd& rho0,
                     const SolverConfig& cfg) {
    if (!(cfg.t_end > 0.0))
        throw std::invalid_argument("integrate: t_end must be positive");

    Trajectory traj;
    ChState cur = sys.consistent_init(rho0);

    // Targets the stepper must land on exactly.
    std::vector<double> targets;
    for (double t : cfg.output_times)
        if (t > 0.0 && t < cfg.t_end)
            targets.push_back(t);
    targets.push_back(cfg.t_end);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::size_t next_target = 0;

    auto record = [&](const ChState& s, double dt_used) {
        traj.accepted.push_back({s.t, dt_used, s.mass, s.energy, s.sup_norm, s.rho});
    };
    record(cur, 0.0);
    for (double t : cfg.output_times)
        if (t == 0.0)
            traj.outputs.push_back(cur);

    NewtonSolver newton(sys);
    std::deque<std::pair<double, Eigen::VectorXd>> hist;
    hist.emplace_back(0.0, cur.rho);

    const bool fixed = cfg.fixed_dt > 0.0;
    double dt = fixed ? cfg.fixed_dt : cfg.initial_dt;
    double dt_prev = 0.0;
    int order = 1;
    int consecutive_failures = 0;

    while (cur.t < cfg.t_end - 1e-14) {
        while (next_target < targets.size() && targets[next_target] <= cur.t + 1e-14)
            ++next_target;
        const double t_stop = targets[std::min(next_target, targets.size() - 1)];
        double dt_try = std::min(dt, t_stop - cur.t);
        if (t_stop - cur.t - dt_try < 1e-13 * std::max(1.0, t_stop))
            dt_try = t_stop - cur.t;

        const BdfScheme scheme = bdf_coeffs(order, dt_try, cur.rho,
                                            hist.size() >= 2 ? &hist[hist.size() - 2].second : nullptr,
                                            dt_prev);
        const Eigen::VectorXd pred = extrapolate(hist, cur.t + dt_try);

        NewtonResult res;
        bool newton_ok = false;
        try {
            res = newton.solve(pred, scheme.c0 / dt_try, scheme, dt_try, cfg);
            newton_ok = res.converged;
        } catch (const std::domain_error&) {
            newton_ok = false;  // potential evaluated outside its domain
        }
        if (!newton_ok) {
            dt = dt_try / 2.0;
            newton.invalidate();
            if (dt < 1e-14 || ++consecutive_failures > 60)
                throw IntegrationFailure("integrate: step size underflow", cur);
            continue;
        }

        double est = 0.0;
        if (!fixed) {
            est = 0.5 * wrms(res.rho - pred, res.rho, cfg.abs_tol, cfg.rel_tol);
            if (hist.size() < 2)
                est = std::max(est, wrms(res.rho - cur.rho, res.rho, cfg.abs_tol, cfg.rel_tol));
        }
        if (!fixed && est > 1.0) {
            dt = dt_try * std::clamp(0.9 * std::pow(std::max(est, 1e-14), -1.0 / (order + 1)),
                                     0.2, 0.9);
            if (dt < 1e-14 || ++consecutive_failures > 60)
                throw IntegrationFailure("integrate: step size underflow", cur);
            continue;
        }
        consecutive_failures = 0;

        // Accept.
        dt_prev = dt_try;
        cur = sys.make_state(cur.t + dt_try, std::move(res.rho));
        hist.emplace_back(cur.t, cur.rho);
        if (hist.size() > 3)
            hist.pop_front();
        record(cur, dt_try);
        if (next_target < targets.size() && cur.t >= targets[next_target] - 1e-14) {
            const bool requested = std::find(cfg.output_times.begin(), cfg.output_times.end(),
                                             targets[next_target]) != cfg.output_times.end();
            if (requested || targets[next_target] == cfg.t_end)
                traj.outputs.push_back(cur);
            ++next_target;
        }
        order = std::min(cfg.max_order, static_cast<int>(hist.size()) - 1);
        order = std::max(order, 1);
        if (!fixed)
            dt = dt_try * std::clamp(0.9 * std::pow(std::max(est, 1e-14), -1.0 / (order + 1)),
                                     0.2, 5.0);
    }

    traj.diagnostics = equilibrium_diagnostics(traj, sys);
    return traj;
}

double l2_norm(const Grid2D& grid, const Eigen::VectorXd& v) {
    return std::sqrt(grid.weights.dot(v.cwiseAbs2()));
}

Diagnostics equilibrium_diagnostics(const Trajectory& traj, const ChSystem& sys) {
    Diagnostics d;
    if (traj.accepted.size() < 2)
        return d;
    const auto& last = traj.accepted.back();
    const auto& before = traj.accepted[traj.accepted.size() - 2];
    const double t_end = last.t;

    const double rate = (last.rho - before.rho).cwiseAbs().maxCoeff()
                      / std::max(last.t - before.t, 1e-300);
    d.stationary = rate < kStationaryRate;

    double tail_sup = 0.0;
    for (const auto& rec : traj.accepted)
        if (rec.t >= 0.5 * t_end)
            tail_sup = std::max(tail_sup, rec.sup_norm);
    d.delta = 1.0 - tail_sup;

    const Eigen::VectorXd v = sys.chemical_potential(last.rho);
    d.mu_inf = sys.quadrature_mean(v);
    d.mu_flatness = (v.array() - d.mu_inf).abs().maxCoeff();

    // Power-law fit of the L2 distance to the final state. The decay bound
    // holds for t >= 1; points within a decade of the resolution floor are
    // dropped, as is the terminal segment where the distance vanishes by
    // construction.
    std::vector<double> ts, es;
    double floor_e = std::numeric_limits<double>::infinity();
    for (const auto& rec : traj.accepted) {
        if (rec.t < 1.0 || rec.t > 0.9 * t_end)
            continue;
        const double e = l2_norm(sys.grid(), rec.rho - last.rho);
        if (e > 0.0) {
            ts.push_back(rec.t);
            es.push_back(e);
            floor_e = std::min(floor_e, e);
        }
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (es[i] > 10.0 * floor_e) {
            lx.push_back(std::log1p(ts[i]));
            ly.push_back(std::log(es[i]));
        }
    }
    if (lx.size() >= 5) {
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
            syy += ly[i] * ly[i];
        }
        const double denom = n * sxx - sx * sx;
        if (denom > 0) {
            const double slope = (n * sxy - sx * sy) / denom;
            d.decay_exponent = -slope;
            const double ss_tot = syy - sy * sy / n;
            const double ss_res = ss_tot - slope * (sxy - sx * sy / n);
            d.decay_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
        }
    }
    d.reliable = d.stationary && lx.size() >= 5;
    return d;
}

double regularized_shift_check(const Eigen::VectorXd& rho0,
                               std::shared_ptr<const Grid2D> grid,
                               std::shared_ptr<const ConvOperator> op,
                               const Potential& log_pot, const Potential& reg_pot,
                               double sigma, double t_horizon, const SolverConfig& cfg) {
    if (!(sigma > 0.0) || !(t_horizon > 0.0))
        throw std::invalid_argument("regularized_shift_check: sigma and horizon must be positive");
    const double t_shift = 3.0 * sigma;

    SolverConfig base = cfg;
    base.t_end = t_shift + t_horizon;
    base.output_times = {t_shift};
    ChSystem sys_log(grid, op, log_pot, cfg.mobility);
    const Trajectory run = integrate(sys_log, rho0, base);

    const ChState* at_shift = nullptr;
    for (const auto& s : run.outputs)
        if (std::abs(s.t - t_shift) < 1e-12)
            at_shift = &s;
    if (!at_shift)
        throw std::logic_error("regularized_shift_check: missing shift-time output");

    SolverConfig reg_cfg = cfg;
    reg_cfg.t_end = t_horizon;
    reg_cfg.output_times = {};
    ChSystem sys_reg(grid, op, reg_pot, cfg.mobility);
    const Trajectory reg_run = integrate(sys_reg, at_shift->rho, reg_cfg);

    return l2_norm(*grid, reg_run.outputs.back().rho - run.outputs.back().rho);
}

ConvOperator zero_operator(std::shared_ptr<const Grid2D> grid) {
    ConvOperator op;
    op.grid = grid;
    op.matrix = Eigen::MatrixXd::Zero(grid->m(), grid->m());
    op.meta.m = static_cast<std::uint64_t>(grid->m());
    op.meta.n = static_cast<std::uint64_t>(grid->nx());
    op.meta.eta = 0.0;
    return op;
}

}  // namespace nlch
