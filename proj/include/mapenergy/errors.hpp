#pragma once

#include <stdexcept>
#include <string>

namespace mapenergy {

struct GeomError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfChart : GeomError { using GeomError::GeomError; };
struct DegenerateMetric : GeomError { using GeomError::GeomError; };
struct DegeneratePlane : GeomError { using GeomError::GeomError; };
struct NonCompactDomain : GeomError { using GeomError::GeomError; };
struct UnknownManifold : GeomError { using GeomError::GeomError; };
struct UnknownMap : GeomError { using GeomError::GeomError; };
struct TargetChartEscape : GeomError { using GeomError::GeomError; };
struct StencilOutOfChart : GeomError { using GeomError::GeomError; };
struct NonFiniteField : GeomError { using GeomError::GeomError; };
struct RankDeficient : GeomError { using GeomError::GeomError; };
struct StepRejected : GeomError { using GeomError::GeomError; };
struct BlowUp : GeomError { using GeomError::GeomError; };
struct ConfigError : GeomError { using GeomError::GeomError; };

} // namespace mapenergy
