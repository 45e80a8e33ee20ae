#include "sarbench/dataset.hpp"

#include "sarbench/errors.hpp"

#include <algorithm>

namespace sarbench {

std::size_t DatasetSplit::count(Label label) const {
    auto pred = [label](const SampleRecord& r) { return r.label == label; };
    return static_cast<std::size_t>(std::count_if(train.begin(), train.end(), pred) +
                                    std::count_if(test.begin(), test.end(), pred));
}

std::size_t DatasetSplit::masked_anomalies() const {
    return static_cast<std::size_t>(std::count_if(test.begin(), test.end(), [](const auto& r) {
        return r.label == Label::Anomalous && r.mask.has_value();
    }));
}

void DatasetSplit::validate() const {
    for (const auto& rec : train) {
        if (rec.label != Label::Normal) {
            throw ValidationError("training record '" + rec.id + "' is not normal");
        }
        rec.validate();
    }
    for (const auto& rec : test) rec.validate();
}

}  // namespace sarbench
