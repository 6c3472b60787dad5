#pragma once

#include <string>

#include "skintone/consensus/platform.hpp"

namespace skintone::consensus {

/// `image_id,status,label,total_qualified,agreement,difficulty,incorrect_flags,inappropriate_flags`
/// in ingest order. Label and metrics are blank when undefined; metrics use
/// six decimals.
std::string consensus_csv(const PlatformState& state);

/// `image_id,annotator_id,label,seq,qualified` in submission order.
std::string annotations_csv(const PlatformState& state);

}  // namespace skintone::consensus
