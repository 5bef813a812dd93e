#pragma once

#include <deque>
#include <optional>

#include "ddfc/error.hpp"
#include "ddfc/signal.hpp"
#include "ddfc/trajectory_kernel.hpp"

namespace ddfc {

double spectral_radius(const Matrix& a);

/// Discrete-time plant x+ = A x + B u + B_d d, y = C x + D u.
class LtiModel {
public:
    LtiModel(Matrix A, Matrix B, Matrix B_d, Matrix C, Matrix D, double period_s);

    const Matrix& A() const noexcept { return A_; }
    const Matrix& B() const noexcept { return B_; }
    const Matrix& B_d() const noexcept { return B_d_; }
    const Matrix& C() const noexcept { return C_; }
    const Matrix& D() const noexcept { return D_; }
    double period_s() const noexcept { return period_s_; }

    Index n() const noexcept { return A_.rows(); }
    Index m() const noexcept { return B_.cols(); }
    Index q() const noexcept { return B_d_.cols(); }
    Index p() const noexcept { return C_.rows(); }

    bool schur_stable() const noexcept { return spectral_radius_ < 1.0; }
    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    Matrix A_, B_, B_d_, C_, D_;
    double period_s_;
    double spectral_radius_;
};

Signal simulate_lti(const LtiModel& model, const Vector& x0, const Signal& u, const Signal& d);

struct DcGain {
    Matrix G;  // p x q
    bool full_column_rank = false;
};

/// C (I - A)^{-1} B_d.
DcGain dc_gain_model(const LtiModel& model);

enum class DcGainForm {
    // Every input channel is held constant over the window, so the selected
    // trajectory is an equilibrium. Exact for any observable stable plant.
    equilibrium,
    // Only output and control differences are constrained (reduced form: output
    // differences only). Exact for first-order plants.
    as_printed,
};

struct DcGainOptions {
    DcGainForm form = DcGainForm::equilibrium;
    Regularization regularization = ToleranceMode{};
};

/// Steady-state d -> y gain from recorded trajectories. `depth` is the
/// difference-window length and must be at least the plant lag. With
/// `drop_d_channel` the lumped u+d channel is used and the result is the gain
/// of that channel.
Matrix dc_gain_data(const TrajectoryDataset& data, Index depth, bool drop_d_channel,
                    const DcGainOptions& options = {});

/// Gain rule L = G_d(1)^+ (q x p).
Matrix low_gain_rule(const Matrix& dc_gain);

/// Luenberger observer on the plant extended with a constant disturbance state.
class ExtendedObserver {
public:
    ExtendedObserver(const LtiModel& model, Matrix gain, Vector xi0);

    // Consumes u(t), y(t); advances xi_hat to t+1 and returns the disturbance
    // component of the updated estimate.
    Vector step(const Vector& u, const Vector& y);

    const Vector& xi_hat() const noexcept { return xi_hat_; }
    Vector d_hat() const { return xi_hat_.tail(q_); }

    const Matrix& extended_A() const noexcept { return ext_A_; }
    const Matrix& extended_B() const noexcept { return ext_B_; }
    const Matrix& extended_C() const noexcept { return ext_C_; }
    const Matrix& gain() const noexcept { return gain_; }

    // A_ext - L C_ext; its spectral radius is below one by construction.
    Matrix error_matrix() const { return ext_A_ - gain_ * ext_C_; }

private:
    Matrix ext_A_, ext_B_, ext_C_, D_, gain_;
    Vector xi_hat_;
    Index q_;
};

enum class EstimatorVariant {
    predictive,  // update from y(t) produces d_hat(t+1)
    current,     // update from y(t) produces d_hat(t)
};

struct LowGainConfig {
    double epsilon = 0.1;
    EstimatorVariant variant = EstimatorVariant::current;
    // Optional clamp on |epsilon * L * innovation| per channel.
    std::optional<double> innovation_clip;
};

/// Model-based low-gain disturbance estimator: an open-loop plant copy driven
/// by u and the disturbance estimate, with an integrating correction.
class LowGainEstimator {
public:
    LowGainEstimator(LtiModel model, Matrix L, LowGainConfig config, std::optional<Vector> d_hat0 = std::nullopt);

    const Vector& step(const Vector& u, const Vector& y);

    const Vector& d_hat() const noexcept { return d_hat_; }
    const Vector& y_hat() const noexcept { return y_hat_; }
    const Vector& innovation() const noexcept { return innovation_; }
    const Vector& x_hat() const noexcept { return x_hat_; }
    const LowGainConfig& config() const noexcept { return config_; }
    const Matrix& L() const noexcept { return L_; }

private:
    LtiModel model_;
    Matrix L_;
    LowGainConfig config_;
    Vector x_hat_;
    Vector d_hat_;
    Vector y_hat_;
    Vector innovation_;
};

enum class WindowInit {
    zero,     // past windows start at the equilibrium (all zeros)
    warm_up,  // estimator waits for t_ini real samples, holding d_hat
};

struct DataDrivenConfig {
    double epsilon = 0.1;
    std::optional<double> innovation_clip;
    WindowInit window_init = WindowInit::zero;
};

/// Data-driven twin of the current-variant low-gain estimator: the output
/// prediction comes from a predictor matrix built from recorded trajectories.
class DataDrivenEstimator {
public:
    DataDrivenEstimator(Predictor predictor, Matrix L, DataDrivenConfig config,
                        std::optional<Vector> d_hat0 = std::nullopt);

    const Vector& step(const Vector& u, const Vector& y);

    // Prediction of y(t) from the stored windows for a given current input and
    // current disturbance value, without changing state.
    Vector predict(const Vector& u_now, const Vector& d_now) const;

    bool warming_up() const noexcept { return filled_ < layout().t_ini; }
    const Vector& d_hat() const noexcept { return d_hat_; }
    const Vector& y_hat() const noexcept { return y_hat_; }
    const Vector& innovation() const noexcept { return innovation_; }
    const Predictor& predictor() const noexcept { return predictor_; }
    const PredictorLayout& layout() const noexcept { return predictor_.layout; }
    const Matrix& L() const noexcept { return L_; }

    // Windows as m x t_ini (lumped: u + d), q x t_ini, p x t_ini, oldest first.
    const Matrix& past_u() const noexcept { return past_u_; }
    const Matrix& past_d_hat() const noexcept { return past_d_; }
    const Matrix& past_y_hat() const noexcept { return past_y_; }

private:
    void roll(const Vector& u, const Vector& d, const Vector& y);

    Predictor predictor_;
    Matrix L_;
    DataDrivenConfig config_;
    Matrix past_u_, past_d_, past_y_;
    Index filled_;
    Vector d_hat_;
    Vector y_hat_;
    Vector innovation_;
};

}  // namespace ddfc
