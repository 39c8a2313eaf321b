#pragma once

#include <cstddef>

namespace dht {

// Relative change below which a truncation study counts as a plateau.
inline constexpr double kPlateauThreshold = 0.10;

inline constexpr double kCoincidenceTol = 1e-12;
inline constexpr double kBoundaryTol = 1e-9;
inline constexpr double kTieSlack = 1e-12;

// Worker count for parallel studies; honours DHT_LAB_THREADS when set.
std::size_t thread_cap();

}  // namespace dht
