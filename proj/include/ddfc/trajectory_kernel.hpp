#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ddfc/error.hpp"
#include "ddfc/signal.hpp"

namespace ddfc {

/// Relative factor of the numerical-rank convention: a singular value s counts
/// as zero when s < max(rows, cols) * s_max * factor.
inline constexpr double kDefaultRankTolerance = 1e-10;

Index numerical_rank(const Matrix& m, double relative_tolerance = kDefaultRankTolerance);

/// Block-Hankel matrix of a multichannel signal.
///
/// Block row i, column j holds sample z(i + j) (0-based), which is the
/// window z(i+1) ... z(i+L) in the usual 1-based notation. The matrix has
/// channels * depth rows and length - depth + 1 columns.
struct HankelBlock {
    Index depth = 0;
    Index source_channels = 0;
    Matrix matrix;

    Index columns() const noexcept { return matrix.cols(); }

    // Rows of block rows [first_block, first_block + count).
    auto blocks(Index first_block, Index count) const {
        return matrix.middleRows(first_block * source_channels, count * source_channels);
    }
};

HankelBlock build_hankel(const Signal& z, Index depth);
Matrix hankel_matrix(const Matrix& samples, Index depth);

/// Row ranges of a depth-(t_ini + horizon) Hankel matrix split into past and future.
struct PastFuturePartition {
    PastFuturePartition(Index t_ini, Index horizon, Index channels);

    Index t_ini;
    Index horizon;
    Index channels;

    Index past_first() const noexcept { return 0; }
    Index past_count() const noexcept { return channels * t_ini; }
    Index future_first() const noexcept { return channels * t_ini; }
    Index future_count() const noexcept { return channels * horizon; }
};

struct PeReport {
    bool exciting = false;
    Index rank = 0;
    Index required_rank = 0;
    std::string reason;
};

PeReport is_persistently_exciting(const Signal& z, Index order,
                                  double relative_tolerance = kDefaultRankTolerance);

struct ToleranceMode {
    double relative = kDefaultRankTolerance;
};
struct RankMode {
    Index rank = 0;
};
using Regularization = std::variant<ToleranceMode, RankMode>;

struct PinvResult {
    Matrix pinv;
    Index retained_rank = 0;
    Vector singular_values;
    std::vector<std::string> warnings;
};

/// SVD-based pseudoinverse. Singular values below the tolerance, or beyond the
/// retained rank, are dropped before inversion.
PinvResult truncated_pinv(const Matrix& m, const Regularization& mode = ToleranceMode{});

/// Which excitation check guarded a data-driven computation.
enum class PeCheck {
    order_bound,     // col(u_d, d_d) PE of order depth + order bound
    stacked_inputs,  // stacked past/future input blocks have full row rank
};

struct PredictionOptions {
    Index t_ini = 1;
    Index horizon = 1;
    std::optional<Index> order_bound;
    std::optional<Regularization> regularization;
    double rank_tolerance = kDefaultRankTolerance;
    // Treat u and d as one lumped channel (requires m == q) and omit the
    // disturbance blocks from the stacked data matrix.
    bool drop_d_channel = false;
};

struct InitialWindow {
    Matrix u;  // m x t_ini
    Matrix d;  // q x t_ini
    Matrix y;  // p x t_ini
};

struct ResponseResult {
    Matrix y;  // p x horizon
    PeCheck check = PeCheck::stacked_inputs;
    Index stacked_rank = 0;
};

/// Output completion of a prefix trajectory for given future inputs, computed
/// from recorded data alone.
ResponseResult data_driven_response(const TrajectoryDataset& data, const InitialWindow& prefix,
                                    const Matrix& u_future, const Matrix& d_future,
                                    const PredictionOptions& options);

/// Column layout of a one-step predictor matrix: [u_p, d_p, y_p, u_now, d_now],
/// each past block stored oldest sample first. In lumped form the d blocks are
/// absent and the u blocks carry u + d.
struct PredictorLayout {
    Index m = 0;
    Index q = 0;
    Index p = 0;
    Index t_ini = 0;
    bool drop_d_channel = false;

    Index u_past_offset() const noexcept { return 0; }
    Index d_past_offset() const noexcept { return m * t_ini; }
    Index y_past_offset() const noexcept { return m * t_ini + (drop_d_channel ? 0 : q * t_ini); }
    Index u_now_offset() const noexcept { return y_past_offset() + p * t_ini; }
    Index d_now_offset() const noexcept { return u_now_offset() + m; }
    Index columns() const noexcept { return d_now_offset() + (drop_d_channel ? 0 : q); }

    // Columns that multiply the current disturbance estimate.
    Index current_disturbance_offset() const noexcept { return drop_d_channel ? u_now_offset() : d_now_offset(); }
    Index current_disturbance_count() const noexcept { return drop_d_channel ? m : q; }
};

struct Predictor {
    Matrix matrix;  // p x layout.columns()
    PredictorLayout layout;
    PeCheck check = PeCheck::stacked_inputs;
    Index stacked_rank = 0;
    Index retained_rank = 0;
    double causal_column_max = 0.0;
    std::vector<std::string> warnings;
};

inline constexpr double kCausalityTolerance = 1e-10;

Predictor predictor_matrix(const TrajectoryDataset& data, Index t_ini, bool drop_d_channel,
                           const std::optional<Regularization>& regularization = std::nullopt,
                           std::optional<Index> order_bound = std::nullopt,
                           double rank_tolerance = kDefaultRankTolerance);

}  // namespace ddfc
