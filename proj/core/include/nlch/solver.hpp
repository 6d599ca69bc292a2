#pragma once

#include "nlch/conv_operator.hpp"
#include "nlch/potential.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nlch {

/// Paired fields (rho, mu) at one time, plus the recorded diagnostics.
struct ChState {
    double t = 0.0;
    Eigen::VectorXd rho, mu;
    double mass = 0.0;      // quadrature mean of rho
    double energy = 0.0;
    double sup_norm = 0.0;  // max |rho_i| over collocation points
};

struct SolverConfig {
    double abs_tol = 1e-7;
    double rel_tol = 1e-7;
    double t_end = 1.0;
    int max_order = 2;            // BDF order, 1 or 2
    double newton_tol = 1e-9;
    int newton_max_iter = 12;
    double mass_tol = 1e-8;
    double initial_dt = 1e-8;
    double mobility = 1.0;
    double fixed_dt = 0.0;        // > 0 disables adaptivity (convergence studies)
    std::vector<double> output_times;
};

/// Equilibrium and decay diagnostics extracted from a trajectory.
struct Diagnostics {
    double delta = 0.0;           // 1 - max ||rho(t)||_inf over the tail
    double mu_inf = 0.0;          // mean of F'(rho(T)) - K*rho(T)
    double mu_flatness = 0.0;     // ||v - vbar||_inf at T
    double decay_exponent = 0.0;  // fitted power-law exponent of the L2 decay
    double decay_r2 = 0.0;
    bool stationary = false;      // ||drho||_inf/dt below 1e-10 at the end
    bool reliable = false;        // diagnostics taken from a stationary tail
};

/// Per-accepted-step record (kept light; full fields only in `outputs`).
struct StepRecord {
    double t, dt, mass, energy, sup_norm;
    Eigen::VectorXd rho;
};

struct Trajectory {
    std::vector<ChState> outputs;     // at requested output times and t_end
    std::vector<StepRecord> accepted;
    Diagnostics diagnostics;
};

struct InitializationError : std::runtime_error {
    double residual_norm;
    InitializationError(const std::string& msg, double r)
        : std::runtime_error(msg), residual_norm(r) {}
};

struct IntegrationFailure : std::runtime_error {
    ChState last_state;
    IntegrationFailure(const std::string& msg, ChState last)
        : std::runtime_error(msg), last_state(std::move(last)) {}
};

/// Semi-discrete nonlocal Cahn-Hilliard system on a collocation grid:
/// interior rows  drho/dt = m Lap mu, boundary rows replaced by the no-flux
/// constraint on mu, algebraic block mu = F'(rho) - op rho.
class ChSystem {
public:
    ChSystem(std::shared_ptr<const Grid2D> grid, std::shared_ptr<const ConvOperator> op,
             Potential pot, double mobility = 1.0);

    int m() const { return grid_->m(); }
    const Grid2D& grid() const { return *grid_; }
    const ConvOperator& op() const { return *op_; }
    const Potential& potential() const { return pot_; }
    double mobility() const { return mobility_; }

    /// DAE residual, 2M values: rho-block rows (interior balance laws and
    /// boundary constraints), then the mu-block.
    Eigen::VectorXd residual(const Eigen::VectorXd& rho, const Eigen::VectorXd& mu,
                             const Eigen::VectorXd& rho_dot) const;

    double energy(const Eigen::VectorXd& rho) const;
    double quadrature_mean(const Eigen::VectorXd& rho) const;

    /// mu = F'(rho) - op rho.
    Eigen::VectorXd chemical_potential(const Eigen::VectorXd& rho) const;

    ChState make_state(double t, Eigen::VectorXd rho) const;

    /// Consistent initialization: damped Newton on the boundary values of
    /// rho (interior held fixed) until ||d_n mu||_inf <= bc_tol.
    ChState consistent_init(const Eigen::VectorXd& rho0, double bc_tol = 1e-9,
                            int max_iter = 100) const;

    const Eigen::MatrixXd& boundary_rows() const { return bnd_rows_; }
    const std::vector<int>& interior_indices() const { return interior_; }
    const std::vector<int>& boundary_indices() const { return bnd_index_; }
    const Eigen::MatrixXd& lap_op() const { return lap_op_; }
    const Eigen::MatrixXd& bnd_op() const { return bnd_op_; }

private:
    std::shared_ptr<const Grid2D> grid_;
    std::shared_ptr<const ConvOperator> op_;
    Potential pot_;
    double mobility_;
    std::vector<int> interior_;       // flat indices of interior points
    std::vector<int> bnd_index_;      // flat indices of boundary points
    Eigen::MatrixXd bnd_rows_;        // outward-normal derivative rows
    Eigen::MatrixXd lap_op_;          // cached Lap * op
    Eigen::MatrixXd bnd_op_;          // cached B * op
};

/// One implicit BDF step of the DAE. `order` 1 uses state only; 2 also needs
/// `prev` (the state one accepted step earlier) and its step size. Returns
/// the new state and a weighted local error estimate (< 1 acceptable).
/// Throws IntegrationFailure if Newton cannot converge at this dt.
std::pair<ChState, double> ch_step(const ChSystem& sys, const ChState& state, double dt,
                                   int order, const SolverConfig& cfg,
                                   const ChState* prev = nullptr, double dt_prev = 0.0);

/// Adaptive BDF1/BDF2 integration from a consistent initial state.
Trajectory integrate(const ChSystem& sys, const Eigen::VectorXd& rho0,
                     const SolverConfig& cfg);

/// Diagnostics over the recorded trajectory: separation delta on the tail
/// [T/2, T], equilibrium mu statistics at T, and a power-law fit of
/// ||rho(t) - rho(T)||_L2 over the post-transient window [0.02 T, 0.5 T].
Diagnostics equilibrium_diagnostics(const Trajectory& traj, const ChSystem& sys);

/// L2 norm (quadrature) of a field difference.
double l2_norm(const Grid2D& grid, const Eigen::VectorXd& v);

/// Integrate the logarithmic system to 3 sigma, restart with the
/// regularized potential for a further `t_horizon`, and return the L2
/// discrepancy || rho_omega(t_horizon) - rho(t_horizon + 3 sigma) ||.
double regularized_shift_check(const Eigen::VectorXd& rho0,
                               std::shared_ptr<const Grid2D> grid,
                               std::shared_ptr<const ConvOperator> op,
                               const Potential& log_pot, const Potential& reg_pot,
                               double sigma, double t_horizon, const SolverConfig& cfg);

/// All-zero convolution operator on a grid (diffusion-only checks).
ConvOperator zero_operator(std::shared_ptr<const Grid2D> grid);

}  // namespace nlch
