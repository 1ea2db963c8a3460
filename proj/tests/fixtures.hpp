#pragma once

// Shared end-to-end design fixture: one seeded collection plus synthesis
// over the five-mass chain, computed once and reused by the synthesis,
// evaluation, and pipeline suites.

#include <vector>

#include "ddc/experiment.hpp"
#include "ddc/pipeline.hpp"
#include "ddc/plant.hpp"
#include "ddc/synthesis.hpp"

namespace fixtures {

struct CertifiedDesign {
    ddc::PipelineConfig config;
    ddc::CollectionResult collection;
    ddc::SynthesisRun synthesis;
};

/// Five-mass chain, T = 40, analytic bounds, fixed seed.
inline const CertifiedDesign& certified_chain() {
    static const CertifiedDesign design = [] {
        CertifiedDesign d;
        d.config.seed = 1;
        d.config.bounds = ddc::BoundMode::analytic;
        d.collection = ddc::run_collection(d.config);
        if (!d.collection.rank_ok)
            throw std::runtime_error("fixture: rank condition failed");
        d.synthesis = ddc::run_synthesis(d.config, d.collection.discrete, d.collection.data);
        return d;
    }();
    return design;
}

} // namespace fixtures
