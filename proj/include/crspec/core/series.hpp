#pragma once

#include <vector>

namespace crspec {

struct SeriesPoint {
    double k = 0.0;
    double value = 0.0;
};

using Series = std::vector<SeriesPoint>;

}  // namespace crspec
