#pragma once

#include "jamlink/sheath.hpp"
#include "jamlink/spine.hpp"
#include "jamlink/stiffness.hpp"

#include <optional>
#include <string>

namespace jamlink {

/// One complete link design: sheath pattern, optional spine, jamming state,
/// optional calibrated stiffness model. The unit the optimizer ranks and the
/// design file stores.
struct LinkDesign {
    std::string name = "link";
    sheath::FlapPattern pattern;
    std::optional<spine::SpineDesign> spine;
    sheath::JammingState jamming;
    std::optional<stiffness::StiffnessModelParams> stiffness_model;
};

} // namespace jamlink
