#pragma once

#include <filesystem>
#include <string>

#include "ddfc/error.hpp"

namespace ddfc {

/// Uniformly sampled multichannel signal. Samples are stored column-wise:
/// column k holds the channel vector at time k * period_s.
class Signal {
public:
    Signal(Matrix samples, double period_s);

    static Signal zeros(Index channels, Index length, double period_s);

    Index channels() const noexcept { return samples_.rows(); }
    Index length() const noexcept { return samples_.cols(); }
    double period_s() const noexcept { return period_s_; }

    const Matrix& samples() const noexcept { return samples_; }
    auto sample(Index k) const { return samples_.col(k); }

    // Consecutive samples [first, first + count).
    Signal window(Index first, Index count) const;

    // Forward differences z(k+1) - z(k); one sample shorter.
    Signal diff() const;

private:
    Matrix samples_;
    double period_s_;
};

/// Recorded input/disturbance/output trajectories from one experiment.
struct TrajectoryDataset {
    TrajectoryDataset(Signal u, Signal d, Signal y, std::string label = {});

    Index length() const noexcept { return u.length(); }
    double period_s() const noexcept { return u.period_s(); }
    Index m() const noexcept { return u.channels(); }
    Index q() const noexcept { return d.channels(); }
    Index p() const noexcept { return y.channels(); }

    Signal u;
    Signal d;
    Signal y;
    std::string label;
};

// CSV with header `t,u1..um,d1..dq,y1..yp` plus a JSON sidecar with the same
// basename holding period, label and channel counts.
void write_dataset(const TrajectoryDataset& data, const std::filesystem::path& csv_path);
TrajectoryDataset read_dataset(const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace ddfc
