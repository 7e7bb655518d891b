#pragma once

#include <stdexcept>
#include <vector>

namespace lyaplab {

/// Tracks the successive visit times of a Markov chain to one marked state.
struct ReturnClock {
  int marked_state{0};
  std::vector<long> return_times;

  void record(long step, int index) {
    if (index != marked_state) return;
    if (!return_times.empty() && step <= return_times.back())
      throw std::logic_error("ReturnClock: steps must increase");
    return_times.push_back(step);
  }
};

}  // namespace lyaplab
