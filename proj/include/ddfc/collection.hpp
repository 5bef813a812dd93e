#pragma once

#include <string>
#include <vector>

#include "ddfc/config.hpp"
#include "ddfc/signal.hpp"
#include "ddfc/trajectory_kernel.hpp"

namespace ddfc {

struct AreaCollection {
    std::string area_id;
    TrajectoryDataset dataset;
    PeReport pe;
    double freq_rms_hz = 0.0;
};

struct CollectionResult {
    std::vector<AreaCollection> areas;
    Index samples = 0;
};

// Number of recorded samples: duration / period + 1.
Index collection_samples(const CollectionConfig& collection);

/// Open-loop excitation of every IBR with A sin(2 pi f t) plus white noise of
/// variance psd / (2 Ts); records u = ibr - tie and y = dw per area (pu).
/// Throws InfeasibleError when an area's input is not persistently exciting
/// of order T_ini + 1 and `check_pe` is set.
CollectionResult run_collection(const ScenarioConfig& config, bool check_pe = true);

}  // namespace ddfc

namespace ddfc {

// Truth plant for the configured system. Events and noise are optional so the
// collection phase can run on the undisturbed network.
Network make_network(const ScenarioConfig& config, bool with_events, const NoiseSpec& noise);

}  // namespace ddfc
