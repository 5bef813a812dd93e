#include "ddfc/estimation.hpp"

#include <cmath>
#include <sstream>

namespace ddfc {

namespace {

void require_shape(const Matrix& m, Index rows, Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " must be " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
        throw std::invalid_argument(os.str());
    }
}

void require_finite(const Vector& v, const char* name) {
    if (!v.allFinite()) {
        throw PoisonedStateError(std::string("non-finite ") + name + " fed to estimator");
    }
}

Vector clipped(Vector correction, const std::optional<double>& clip) {
    if (clip) {
        correction = correction.cwiseMax(-*clip).cwiseMin(*clip);
    }
    return correction;
}

}  // namespace

double spectral_radius(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

LtiModel::LtiModel(Matrix A, Matrix B, Matrix B_d, Matrix C, Matrix D, double period_s)
    : A_(std::move(A)), B_(std::move(B)), B_d_(std::move(B_d)), C_(std::move(C)), D_(std::move(D)),
      period_s_(period_s) {
    const Index n = A_.rows();
    require_shape(A_, n, n, "A");
    if (B_.rows() != n) throw std::invalid_argument("B must have n rows");
    if (B_d_.rows() != n) throw std::invalid_argument("B_d must have n rows");
    if (C_.cols() != n) throw std::invalid_argument("C must have n columns");
    require_shape(D_, C_.rows(), B_.cols(), "D");
    if (B_d_.cols() > C_.rows()) {
        throw std::invalid_argument("disturbance count q must not exceed output count p");
    }
    if (!(period_s_ > 0.0)) {
        throw std::invalid_argument("LtiModel period must be positive");
    }
    spectral_radius_ = ddfc::spectral_radius(A_);
}

Signal simulate_lti(const LtiModel& model, const Vector& x0, const Signal& u, const Signal& d) {
    if (u.channels() != model.m() || d.channels() != model.q()) {
        throw std::invalid_argument("simulate_lti: expected " + std::to_string(model.m()) + " input and " +
                                    std::to_string(model.q()) + " disturbance channels, got " +
                                    std::to_string(u.channels()) + " and " + std::to_string(d.channels()));
    }
    if (u.length() != d.length()) {
        throw std::invalid_argument("simulate_lti: input and disturbance lengths differ");
    }
    if (x0.size() != model.n()) {
        throw std::invalid_argument("simulate_lti: initial state has wrong dimension");
    }
    const Index T = u.length();
    Matrix y(model.p(), T);
    Vector x = x0;
    for (Index t = 0; t < T; ++t) {
        y.col(t) = model.C() * x + model.D() * u.sample(t);
        x = model.A() * x + model.B() * u.sample(t) + model.B_d() * d.sample(t);
    }
    return Signal(std::move(y), u.period_s());
}

DcGain dc_gain_model(const LtiModel& model) {
    const Index n = model.n();
    const Matrix I_minus_A = Matrix::Identity(n, n) - model.A();
    Eigen::FullPivLU<Matrix> lu(I_minus_A);
    if (!lu.isInvertible()) {
        throw InfeasibleError("I - A is singular; the plant has a pole at z = 1");
    }
    DcGain out;
    out.G = model.C() * lu.solve(model.B_d());
    out.full_column_rank = numerical_rank(out.G) == model.q();
    return out;
}

Matrix dc_gain_data(const TrajectoryDataset& data, Index depth, bool drop_d_channel, const DcGainOptions& options) {
    if (depth < 1) {
        throw std::invalid_argument("dc_gain_data: depth must be at least 1");
    }
    if (data.length() < depth + 2) {
        throw InfeasibleError("dc_gain_data: dataset of length " + std::to_string(data.length()) +
                              " too short for depth " + std::to_string(depth));
    }
    if (drop_d_channel && data.m() != data.q()) {
        throw std::invalid_argument("dc_gain_data: lumped form requires m == q");
    }
    const Index p = data.p();
    const bool equilibrium = options.form == DcGainForm::equilibrium;

    // Difference Hankels of depth `depth` and sample Hankels of depth + 1 share
    // T - depth columns; column j covers samples j .. j + depth.
    const Matrix y = data.y.samples();
    const Matrix u = drop_d_channel ? Matrix(data.u.samples() + data.d.samples()) : data.u.samples();
    const Matrix& d = data.d.samples();
    auto diff_hankel = [depth](const Matrix& z) {
        const Index n = z.cols() - 1;
        return hankel_matrix(z.rightCols(n) - z.leftCols(n), depth);
    };

    std::vector<Matrix> blocks;
    blocks.push_back(diff_hankel(y));
    if (drop_d_channel) {
        if (equilibrium) blocks.push_back(diff_hankel(u));
        blocks.push_back(hankel_matrix(u, depth + 1).topRows(u.rows()));
    } else {
        blocks.push_back(diff_hankel(u));
        if (equilibrium) blocks.push_back(diff_hankel(d));
        blocks.push_back(hankel_matrix(u, depth + 1).topRows(u.rows()));
        blocks.push_back(hankel_matrix(d, depth + 1).topRows(d.rows()));
    }
    Index rows = 0;
    for (const auto& b : blocks) rows += b.rows();
    const Index cols = blocks.front().cols();
    Matrix stacked(rows, cols);
    Index r = 0;
    for (const auto& b : blocks) {
        stacked.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    const Matrix y_f = hankel_matrix(y, depth + 1).bottomRows(p);

    // Selector picks the disturbance (lumped: the composite input) and sets it to I.
    const Index sel = drop_d_channel ? u.rows() : d.rows();
    Matrix rhs = Matrix::Zero(rows, sel);
    rhs.bottomRows(sel) = Matrix::Identity(sel, sel);

    const auto pinv = truncated_pinv(stacked, options.regularization);
    const Matrix g = pinv.pinv * rhs;
    if (std::holds_alternative<ToleranceMode>(options.regularization)) {
        const double residual = (stacked * g - rhs).norm();
        if (!(residual <= 1e-6 * rhs.norm())) {
            throw InfeasibleError("dc_gain_data: stacked difference data cannot represent a unit equilibrium "
                                  "(residual " + std::to_string(residual) + ")",
                                  pinv.retained_rank, rows);
        }
    }
    return y_f * g;
}

Matrix low_gain_rule(const Matrix& dc_gain) {
    if (numerical_rank(dc_gain) < dc_gain.cols()) {
        throw InfeasibleError("DC gain lacks full column rank; the low-gain rule is undefined",
                              numerical_rank(dc_gain), dc_gain.cols());
    }
    return truncated_pinv(dc_gain).pinv;
}

ExtendedObserver::ExtendedObserver(const LtiModel& model, Matrix gain, Vector xi0)
    : D_(model.D()), gain_(std::move(gain)), xi_hat_(std::move(xi0)), q_(model.q()) {
    const Index n = model.n();
    const Index q = model.q();
    const Index p = model.p();
    ext_A_ = Matrix::Zero(n + q, n + q);
    ext_A_.topLeftCorner(n, n) = model.A();
    ext_A_.topRightCorner(n, q) = model.B_d();
    ext_A_.bottomRightCorner(q, q).setIdentity();
    ext_B_ = Matrix::Zero(n + q, model.m());
    ext_B_.topRows(n) = model.B();
    ext_C_ = Matrix::Zero(p, n + q);
    ext_C_.leftCols(n) = model.C();

    require_shape(gain_, n + q, p, "extended observer gain");
    if (xi_hat_.size() != n + q) {
        throw std::invalid_argument("extended observer initial estimate has wrong dimension");
    }
    if (!xi_hat_.allFinite()) {
        throw std::invalid_argument("extended observer initial estimate is not finite");
    }
    const double rho = spectral_radius(error_matrix());
    if (!(rho < 1.0)) {
        throw std::invalid_argument("observer gain does not stabilise the error dynamics (spectral radius " +
                                    std::to_string(rho) + ")");
    }
}

Vector ExtendedObserver::step(const Vector& u, const Vector& y) {
    const Vector y_hat = ext_C_ * xi_hat_ + D_ * u;
    xi_hat_ = ext_A_ * xi_hat_ + ext_B_ * u - gain_ * (y_hat - y);
    return d_hat();
}

LowGainEstimator::LowGainEstimator(LtiModel model, Matrix L, LowGainConfig config, std::optional<Vector> d_hat0)
    : model_(std::move(model)), L_(std::move(L)), config_(config) {
    require_shape(L_, model_.q(), model_.p(), "estimator gain L");
    if (!L_.allFinite()) throw std::invalid_argument("estimator gain L is not finite");
    if (!(config_.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
    x_hat_ = Vector::Zero(model_.n());
    d_hat_ = d_hat0.value_or(Vector::Zero(model_.q()));
    if (d_hat_.size() != model_.q()) throw std::invalid_argument("initial disturbance estimate has wrong size");
    y_hat_ = Vector::Zero(model_.p());
    innovation_ = Vector::Zero(model_.p());
}

const Vector& LowGainEstimator::step(const Vector& u, const Vector& y) {
    require_finite(u, "input");
    require_finite(y, "measurement");
    y_hat_ = model_.C() * x_hat_ + model_.D() * u;
    innovation_ = y_hat_ - y;
    const Vector correction = clipped(config_.epsilon * (L_ * innovation_), config_.innovation_clip);
    if (config_.variant == EstimatorVariant::current) {
        d_hat_ -= correction;
        x_hat_ = model_.A() * x_hat_ + model_.B() * u + model_.B_d() * d_hat_;
    } else {
        x_hat_ = model_.A() * x_hat_ + model_.B() * u + model_.B_d() * d_hat_;
        d_hat_ -= correction;
    }
    return d_hat_;
}

DataDrivenEstimator::DataDrivenEstimator(Predictor predictor, Matrix L, DataDrivenConfig config,
                                         std::optional<Vector> d_hat0)
    : predictor_(std::move(predictor)), L_(std::move(L)), config_(config) {
    const auto& lay = predictor_.layout;
    require_shape(predictor_.matrix, lay.p, lay.columns(), "predictor matrix");
    require_shape(L_, lay.q, lay.p, "estimator gain L");
    if (!L_.allFinite()) throw std::invalid_argument("estimator gain L is not finite");
    if (!(config_.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
    past_u_ = Matrix::Zero(lay.m, lay.t_ini);
    past_d_ = Matrix::Zero(lay.q, lay.t_ini);
    past_y_ = Matrix::Zero(lay.p, lay.t_ini);
    filled_ = config_.window_init == WindowInit::zero ? lay.t_ini : 0;
    d_hat_ = d_hat0.value_or(Vector::Zero(lay.q));
    if (d_hat_.size() != lay.q) throw std::invalid_argument("initial disturbance estimate has wrong size");
    y_hat_ = Vector::Zero(lay.p);
    innovation_ = Vector::Zero(lay.p);
}

Vector DataDrivenEstimator::predict(const Vector& u_now, const Vector& d_now) const {
    const auto& lay = predictor_.layout;
    Vector z(lay.columns());
    const auto flat = [](const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); };
    if (lay.drop_d_channel) {
        const Matrix w = past_u_ + past_d_;
        z << flat(w), flat(past_y_), u_now + d_now;
    } else {
        z << flat(past_u_), flat(past_d_), flat(past_y_), u_now, d_now;
    }
    return predictor_.matrix * z;
}

void DataDrivenEstimator::roll(const Vector& u, const Vector& d, const Vector& y) {
    const Index t_ini = layout().t_ini;
    if (t_ini > 1) {
        past_u_.leftCols(t_ini - 1) = past_u_.rightCols(t_ini - 1).eval();
        past_d_.leftCols(t_ini - 1) = past_d_.rightCols(t_ini - 1).eval();
        past_y_.leftCols(t_ini - 1) = past_y_.rightCols(t_ini - 1).eval();
    }
    past_u_.col(t_ini - 1) = u;
    past_d_.col(t_ini - 1) = d;
    past_y_.col(t_ini - 1) = y;
}

const Vector& DataDrivenEstimator::step(const Vector& u, const Vector& y) {
    const auto& lay = layout();
    if (u.size() != lay.m || y.size() != lay.p) {
        throw std::invalid_argument("data-driven estimator step: wrong input or output size");
    }
    require_finite(u, "input");
    require_finite(y, "measurement");

    if (warming_up()) {
        // Until t_ini real samples exist the measured output stands in for the prediction.
        y_hat_ = y;
        innovation_.setZero();
        roll(u, d_hat_, y);
        ++filled_;
        return d_hat_;
    }

    const Vector zero_q = Vector::Zero(lay.q);
    // Lumped form feeds zero in the current composite slot; the full form feeds
    // u(t) and a zero disturbance.
    y_hat_ = lay.drop_d_channel ? predict(Vector::Zero(lay.m), zero_q) : predict(u, zero_q);
    innovation_ = y_hat_ - y;
    d_hat_ -= clipped(config_.epsilon * (L_ * innovation_), config_.innovation_clip);
    if (!d_hat_.allFinite()) {
        throw PoisonedStateError("data-driven disturbance estimate became non-finite");
    }
    roll(u, d_hat_, y_hat_);
    return d_hat_;
}

}  // namespace ddfc
