#include "ddfc/trajectory_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddfc {

namespace {

// Two-sided Jacobi: slower than divide and conquer but keeps the small
// singular values of rank-deficient data matrices accurate.
Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

double rank_threshold(const Matrix& m, const Vector& singular_values, double relative) {
    if (singular_values.size() == 0) return 0.0;
    return static_cast<double>(std::max(m.rows(), m.cols())) * singular_values(0) * relative;
}

Index count_above(const Vector& s, double threshold) {
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) ++r;
    }
    return r;
}

// Stack two signals channel-wise: rows of `a` first, then rows of `b`.
Matrix stack_channels(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() + b.rows(), a.cols());
    out << a, b;
    return out;
}

struct StackedData {
    Matrix inputs_and_past;  // [U_p; D_p; Y_p; U_f; D_f] (lumped: [W_p; Y_p; W_f])
    Matrix y_future;         // Y_f
    PeCheck check = PeCheck::stacked_inputs;
    Index stacked_rank = 0;
};

StackedData build_stacked(const TrajectoryDataset& data, Index t_ini, Index horizon, bool drop_d,
                          std::optional<Index> order_bound, double rank_tolerance) {
    if (t_ini < 1 || horizon < 1) {
        throw std::invalid_argument("t_ini and horizon must be at least 1");
    }
    const Index m = data.m();
    const Index q = data.q();
    const Index p = data.p();
    const Index depth = t_ini + horizon;
    if (depth > data.length()) {
        throw InfeasibleError("dataset of length " + std::to_string(data.length()) +
                              " is shorter than the window t_ini + horizon = " + std::to_string(depth));
    }
    if (drop_d && m != q) {
        throw std::invalid_argument("lumped u/d channel requires m == q (m=" + std::to_string(m) +
                                    ", q=" + std::to_string(q) + ")");
    }

    // Exogenous inputs seen by the behavior: col(u, d), or u + d when lumped.
    const Matrix inputs = drop_d ? Matrix(data.u.samples() + data.d.samples())
                                 : stack_channels(data.u.samples(), data.d.samples());
    const Index input_channels = inputs.rows();

    StackedData out;
    if (order_bound) {
        out.check = PeCheck::order_bound;
        const Index order = depth + *order_bound;
        const Index required = input_channels * order;
        const Index cols = data.length() - order + 1;
        if (cols < required) {
            throw InfeasibleError("inputs cannot be persistently exciting of order " + std::to_string(order) +
                                      ": insufficient length",
                                  std::max<Index>(cols, 0), required);
        }
        const Index rank = numerical_rank(hankel_matrix(inputs, order), rank_tolerance);
        if (rank < required) {
            throw InfeasibleError("inputs not persistently exciting of order " + std::to_string(order) +
                                      " (rank " + std::to_string(rank) + " < " + std::to_string(required) + ")",
                                  rank, required);
        }
    } else {
        out.check = PeCheck::stacked_inputs;
        const Index required = input_channels * depth;
        const Index rank = numerical_rank(hankel_matrix(inputs, depth), rank_tolerance);
        if (rank < required) {
            throw InfeasibleError("stacked past/future input blocks are rank deficient (rank " +
                                      std::to_string(rank) + " < " + std::to_string(required) + ")",
                                  rank, required);
        }
    }

    const Matrix hu = hankel_matrix(drop_d ? inputs : data.u.samples(), depth);
    const Matrix hy = hankel_matrix(data.y.samples(), depth);
    const Index cols = hu.cols();

    const Index rows = drop_d ? (m + p) * t_ini + m * horizon : (m + q + p) * t_ini + (m + q) * horizon;
    Matrix stacked(rows, cols);
    Index r = 0;
    auto put = [&](const Matrix& src, Index first, Index count) {
        stacked.middleRows(r, count) = src.middleRows(first, count);
        r += count;
    };
    if (drop_d) {
        put(hu, 0, m * t_ini);
        put(hy, 0, p * t_ini);
        put(hu, m * t_ini, m * horizon);
    } else {
        const Matrix hd = hankel_matrix(data.d.samples(), depth);
        put(hu, 0, m * t_ini);
        put(hd, 0, q * t_ini);
        put(hy, 0, p * t_ini);
        put(hu, m * t_ini, m * horizon);
        put(hd, q * t_ini, q * horizon);
    }
    out.inputs_and_past = std::move(stacked);
    out.y_future = hy.bottomRows(p * horizon);
    out.stacked_rank = numerical_rank(out.inputs_and_past, rank_tolerance);
    return out;
}

}  // namespace

Index numerical_rank(const Matrix& m, double relative_tolerance) {
    if (m.size() == 0) return 0;
    const Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    return count_above(s, rank_threshold(m, s, relative_tolerance));
}

Matrix hankel_matrix(const Matrix& samples, Index depth) {
    const Index channels = samples.rows();
    const Index length = samples.cols();
    if (depth < 1 || depth > length) {
        throw std::invalid_argument("Hankel depth " + std::to_string(depth) + " must be in [1, " +
                                    std::to_string(length) + "] (signal length " + std::to_string(length) + ")");
    }
    const Index cols = length - depth + 1;
    Matrix h(channels * depth, cols);
    for (Index i = 0; i < depth; ++i) {
        h.middleRows(i * channels, channels) = samples.middleCols(i, cols);
    }
    return h;
}

HankelBlock build_hankel(const Signal& z, Index depth) {
    return HankelBlock{depth, z.channels(), hankel_matrix(z.samples(), depth)};
}

PastFuturePartition::PastFuturePartition(Index t_ini_in, Index horizon_in, Index channels_in)
    : t_ini(t_ini_in), horizon(horizon_in), channels(channels_in) {
    if (t_ini < 1 || horizon < 1) {
        throw std::invalid_argument("PastFuturePartition requires t_ini >= 1 and horizon >= 1");
    }
}

PeReport is_persistently_exciting(const Signal& z, Index order, double relative_tolerance) {
    PeReport report;
    if (order < 1) {
        throw std::invalid_argument("excitation order must be at least 1");
    }
    report.required_rank = z.channels() * order;
    const Index cols = z.length() - order + 1;
    if (cols < report.required_rank) {
        report.exciting = false;
        report.rank = cols > 0 ? numerical_rank(hankel_matrix(z.samples(), order), relative_tolerance) : 0;
        report.reason = "insufficient length";
        return report;
    }
    report.rank = numerical_rank(hankel_matrix(z.samples(), order), relative_tolerance);
    report.exciting = report.rank == report.required_rank;
    if (!report.exciting) {
        report.reason = "rank " + std::to_string(report.rank) + " < " + std::to_string(report.required_rank);
    }
    return report;
}

PinvResult truncated_pinv(const Matrix& m, const Regularization& mode) {
    if (m.size() == 0) {
        throw std::invalid_argument("truncated_pinv of an empty matrix");
    }
    const auto svd = thin_svd(m);
    const Vector& s = svd.singularValues();
    PinvResult result;
    result.singular_values = s;

    const Index min_dim = std::min(m.rows(), m.cols());
    Index keep = 0;
    if (const auto* tol = std::get_if<ToleranceMode>(&mode)) {
        keep = count_above(s, rank_threshold(m, s, tol->relative));
    } else {
        const auto& rank = std::get<RankMode>(mode);
        if (rank.rank < 1) {
            throw std::invalid_argument("truncated_pinv: retained rank must be at least 1");
        }
        keep = rank.rank;
        if (keep > min_dim) {
            result.warnings.push_back("requested rank " + std::to_string(keep) + " exceeds min dimension " +
                                      std::to_string(min_dim) + "; clamped");
            keep = min_dim;
        }
        const Index numerical = count_above(s, rank_threshold(m, s, kDefaultRankTolerance));
        if (keep > numerical) {
            result.warnings.push_back("requested rank " + std::to_string(keep) + " exceeds numerical rank " +
                                      std::to_string(numerical) + "; clamped");
            keep = numerical;
        }
    }
    result.retained_rank = keep;
    if (keep == 0) {
        result.pinv = Matrix::Zero(m.cols(), m.rows());
        return result;
    }
    const Vector inv = s.head(keep).cwiseInverse();
    result.pinv = svd.matrixV().leftCols(keep) * inv.asDiagonal() * svd.matrixU().leftCols(keep).transpose();
    return result;
}

ResponseResult data_driven_response(const TrajectoryDataset& data, const InitialWindow& prefix,
                                    const Matrix& u_future, const Matrix& d_future,
                                    const PredictionOptions& options) {
    const Index t_ini = options.t_ini;
    const Index horizon = options.horizon;
    const Index m = data.m();
    const Index q = data.q();
    const Index p = data.p();
    auto expect = [](const Matrix& x, Index rows, Index cols, const char* name) {
        if (x.rows() != rows || x.cols() != cols) {
            std::ostringstream os;
            os << name << " must be " << rows << "x" << cols << ", got " << x.rows() << "x" << x.cols();
            throw std::invalid_argument(os.str());
        }
    };
    expect(prefix.u, m, t_ini, "prefix u");
    expect(prefix.d, q, t_ini, "prefix d");
    expect(prefix.y, p, t_ini, "prefix y");
    expect(u_future, m, horizon, "future u");
    expect(d_future, q, horizon, "future d");

    const auto stacked = build_stacked(data, t_ini, horizon, options.drop_d_channel, options.order_bound,
                                       options.rank_tolerance);
    const auto reg = options.regularization.value_or(Regularization{ToleranceMode{options.rank_tolerance}});
    const auto pinv = truncated_pinv(stacked.inputs_and_past, reg);

    const auto flat = [](const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); };
    Vector rhs(stacked.inputs_and_past.rows());
    if (options.drop_d_channel) {
        const Matrix wp = prefix.u + prefix.d;
        const Matrix wf = u_future + d_future;
        rhs << flat(wp), flat(prefix.y), flat(wf);
    } else {
        rhs << flat(prefix.u), flat(prefix.d), flat(prefix.y), flat(u_future), flat(d_future);
    }
    const Vector g = pinv.pinv * rhs;
    const Vector y = stacked.y_future * g;

    ResponseResult out;
    out.y = Eigen::Map<const Matrix>(y.data(), p, horizon);
    out.check = stacked.check;
    out.stacked_rank = stacked.stacked_rank;
    return out;
}

Predictor predictor_matrix(const TrajectoryDataset& data, Index t_ini, bool drop_d_channel,
                           const std::optional<Regularization>& regularization, std::optional<Index> order_bound,
                           double rank_tolerance) {
    const auto stacked = build_stacked(data, t_ini, 1, drop_d_channel, order_bound, rank_tolerance);
    const auto reg = regularization.value_or(Regularization{ToleranceMode{rank_tolerance}});
    auto pinv = truncated_pinv(stacked.inputs_and_past, reg);

    Predictor out;
    out.layout = PredictorLayout{data.m(), data.q(), data.p(), t_ini, drop_d_channel};
    out.matrix = stacked.y_future * pinv.pinv;
    out.check = stacked.check;
    out.stacked_rank = stacked.stacked_rank;
    out.retained_rank = pinv.retained_rank;
    out.warnings = std::move(pinv.warnings);
    out.causal_column_max = out.matrix
                                .middleCols(out.layout.current_disturbance_offset(),
                                            out.layout.current_disturbance_count())
                                .cwiseAbs()
                                .maxCoeff();
    if (out.causal_column_max > kCausalityTolerance) {
        std::ostringstream os;
        os << "columns multiplying the current disturbance reach " << out.causal_column_max
           << "; d -> y is not strictly causal in this data";
        out.warnings.push_back(os.str());
    }
    return out;
}

}  // namespace ddfc
