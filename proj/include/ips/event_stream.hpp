#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ips/lattice.hpp"
#include "ips/process.hpp"
#include "ips/rng.hpp"

namespace ips {

// One realized clock ring: site (bond source for exclusion), an exchange
// channel (jump index; unused for spin systems), and an independent uniform
// mark deciding the local action.
struct Event {
  double time;
  std::int32_t site;
  std::int32_t channel;
  double mark;
};

// Lazy generator of the superposed Poisson clock process: one event per
// call, in time order, deterministic given the seed. EventStream
// materializes the same sequence.
class EventSource {
 public:
  EventSource(const ProcessSpec& spec, const Lattice& lat, double horizon, std::uint64_t seed);

  // Fills `ev` and returns true, or returns false once past the horizon.
  bool next(Event& ev);
  double horizon() const { return horizon_; }

 private:
  double horizon_;
  double clock_;
  double total_rate_;
  std::size_t n_sites_;
  std::vector<double> channel_cdf_;
  Rng rng_;
};

// Realized graphical construction up to a horizon: the superposed Poisson
// event list of all site/bond clocks, in time order. The same stream drives
// one copy or a basic-coupled pair.
class EventStream {
 public:
  static EventStream generate(const ProcessSpec& spec, const Lattice& lat, double horizon,
                              std::uint64_t seed);

  double horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const Event> events() const { return events_; }

 private:
  double horizon_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<Event> events_;
};

}  // namespace ips
