#pragma once

#include <cstdint>

namespace icfsim {

enum class Channel : std::uint8_t { Selection, Recommendation };

// Record of one dynamics step.
struct StepOutcome {
  Channel channel = Channel::Selection;
  std::int32_t user = -1;
  std::int32_t item = -1;   // acquired item, -1 when the event was skipped
  std::int32_t genre = -1;  // item genre; -1 in replay mode
  bool match = false;       // matches the user's taste(s) / is a correct movie
  bool taste1 = false;      // two-taste mode: genre equals the user's taste 1
  bool fallback = false;    // selection had to fall back to the full catalog
  bool skipped = false;     // replay: no correct movie selectable, no-op event
};

}  // namespace icfsim
