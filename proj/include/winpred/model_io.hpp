#pragma once

#include <string>

#include "winpred/network.hpp"
#include "winpred/stacking.hpp"

namespace winpred {

// Everything needed to run a saved model on raw data: the network, the
// feature normalizer it was trained behind, and the stacking geometry
// (sequence duration, lag, static feature count) its input layout assumes.
struct ModelBundle {
  Mlp mlp;
  Normalizer normalizer;
  std::size_t seq_minutes = 0;
  std::size_t lag_minutes = 0;
  std::size_t n_static = 0;

  void validate() const;  // throws std::invalid_argument on inconsistency
};

// Versioned little-endian binary container; save/load round-trips are
// bit-exact (64-bit float parameters written verbatim).
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace winpred
