#pragma once

#include "sarbench/core.hpp"

#include <string>
#include <vector>

namespace sarbench {

/// Train/test partition. Training is normal-only.
struct DatasetSplit {
    std::string name;
    std::vector<SampleRecord> train;
    std::vector<SampleRecord> test;

    std::size_t count(Label label) const;
    /// Anomalous test records that carry a ground-truth mask.
    std::size_t masked_anomalies() const;

    /// Throws ValidationError when a record breaks its invariants or a
    /// training record is not Normal.
    void validate() const;
};

}  // namespace sarbench
