#include "ips/event_stream.hpp"

#include <stdexcept>

namespace ips {

EventSource::EventSource(const ProcessSpec& spec, const Lattice& lat, double horizon,
                         std::uint64_t seed)
    : horizon_(horizon), clock_(0.0), n_sites_(static_cast<std::size_t>(lat.size())), rng_(seed) {
  validate(spec, lat);
  if (horizon < 0.0) throw std::invalid_argument("EventSource: negative horizon");

  const double per_site = site_clock_rate(spec, lat);
  total_rate_ = per_site * static_cast<double>(lat.size());

  // Channel law for exchange dynamics (jump choice per bond-source event).
  if (const auto* sep = std::get_if<SepSpec>(&spec)) {
    double acc = 0.0;
    for (const auto& [z, p] : sep->kernel.jumps) {
      acc += p / per_site;
      channel_cdf_.push_back(acc);
    }
  } else if (const auto* asep = std::get_if<AsepSpec>(&spec)) {
    channel_cdf_.push_back(asep->p_right / per_site);
    channel_cdf_.push_back(1.0);
  }
}

bool EventSource::next(Event& ev) {
  if (total_rate_ <= 0.0) return false;
  clock_ += rng_.exponential(total_rate_);
  if (clock_ > horizon_) return false;
  ev.time = clock_;
  ev.site = static_cast<std::int32_t>(rng_.uniform_index(n_sites_));
  ev.channel = 0;
  if (!channel_cdf_.empty()) {
    const double u = rng_.uniform();
    std::int32_t c = 0;
    while (u >= channel_cdf_[static_cast<std::size_t>(c)] &&
           c + 1 < static_cast<std::int32_t>(channel_cdf_.size()))
      ++c;
    ev.channel = c;
  }
  ev.mark = rng_.uniform();
  return true;
}

EventStream EventStream::generate(const ProcessSpec& spec, const Lattice& lat, double horizon,
                                  std::uint64_t seed) {
  EventStream stream;
  stream.horizon_ = horizon;
  stream.seed_ = seed;
  EventSource source(spec, lat, horizon, seed);
  Event ev;
  while (source.next(ev)) stream.events_.push_back(ev);
  return stream;
}

}  // namespace ips
