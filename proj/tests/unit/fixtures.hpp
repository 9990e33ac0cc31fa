#pragma once

#include "chemlayer/harness.hpp"

#include <map>
#include <memory>

namespace fixtures {

/// Reduced-resolution study used by the pipeline-level unit tests.
inline chemlayer::StudyConfig small_config() {
    chemlayer::StudyConfig c;
    c.eps = {1e-2, 1e-3, 1e-4};
    c.T = 0.5;
    c.grid_n = 256;
    c.outer_n = 128;
    c.layer_cells = 400;
    c.dt = 1e-4;
    c.record_dt = 1e-2;
    return c;
}

inline const chemlayer::PipelineContext& small_context() {
    static const chemlayer::PipelineContext ctx = chemlayer::prepare_context(small_config());
    return ctx;
}

inline const chemlayer::PipelineRun& small_run(double eps) {
    static std::map<double, std::unique_ptr<chemlayer::PipelineRun>> cache;
    auto& slot = cache[eps];
    if (!slot) slot = std::make_unique<chemlayer::PipelineRun>(chemlayer::run_pipeline(small_context(), eps));
    return *slot;
}

}  // namespace fixtures
