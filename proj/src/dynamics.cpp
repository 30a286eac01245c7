#include "ips/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ips {

namespace {

void check_horizon(double t, const EventStream& stream) {
  if (t > stream.horizon() + 1e-12)
    throw std::runtime_error(
        "evolve: requested time exceeds the stream horizon; regenerate the stream with a larger "
        "horizon");
}

// Per-call context: precomputed per-site target tables so the event loop is
// table lookups only.
struct Kinetics {
  enum class Kind { Exchange, Voter, Contact, Glauber };

  Kind kind;
  const GlauberSpec* glauber = nullptr;
  int n_channels = 0;
  // Exchange/voter: target site per (channel, site), row-major by channel.
  std::vector<std::int32_t> targets;
  std::vector<double> voter_cdf;
  // Contact: neighbor per (slot, site).
  double contact_recover_threshold = 0.0;
  double contact_slot_width = 0.0;
  int n_sites = 0;

  Kinetics(const ProcessSpec& s, const Lattice& l) : n_sites(l.size()) {
    auto fill_targets = [&](const std::vector<Point>& offsets) {
      n_channels = static_cast<int>(offsets.size());
      targets.resize(static_cast<std::size_t>(n_channels) * static_cast<std::size_t>(n_sites));
      for (int c = 0; c < n_channels; ++c)
        for (int x = 0; x < n_sites; ++x)
          targets[static_cast<std::size_t>(c) * static_cast<std::size_t>(n_sites) +
                  static_cast<std::size_t>(x)] =
              static_cast<std::int32_t>(l.translate(x, offsets[static_cast<std::size_t>(c)]));
    };
    if (const auto* sep = std::get_if<SepSpec>(&s)) {
      kind = Kind::Exchange;
      std::vector<Point> offsets;
      for (const auto& [z, p] : sep->kernel.jumps) offsets.push_back(z);
      fill_targets(offsets);
    } else if (std::holds_alternative<AsepSpec>(s)) {
      kind = Kind::Exchange;
      fill_targets({make_point({1}), make_point({-1})});
    } else if (const auto* voter = std::get_if<VoterSpec>(&s)) {
      kind = Kind::Voter;
      std::vector<Point> offsets;
      double acc = 0.0;
      for (const auto& [z, p] : voter->kernel.jumps) {
        offsets.push_back(z);
        acc += p;
        voter_cdf.push_back(acc);
      }
      fill_targets(offsets);
    } else if (const auto* contact = std::get_if<ContactSpec>(&s)) {
      kind = Kind::Contact;
      const double m = 1.0 + 2.0 * l.dim() * contact->lambda;
      contact_recover_threshold = 1.0 / m;
      contact_slot_width = contact->lambda / m;
      std::vector<Point> offsets;
      for (int j = 0; j < 2 * l.dim(); ++j) {
        Point z{};
        z[static_cast<std::size_t>(j >> 1)] = (j & 1) ? -1 : 1;
        offsets.push_back(z);
      }
      fill_targets(offsets);
    } else {
      kind = Kind::Glauber;
      glauber = &std::get<GlauberSpec>(s);
    }
  }

  int target(int channel, int site) const {
    return targets[static_cast<std::size_t>(channel) * static_cast<std::size_t>(n_sites) +
                   static_cast<std::size_t>(site)];
  }

  int voter_source(const Event& ev) const {
    std::size_t c = 0;
    while (ev.mark >= voter_cdf[c] && c + 1 < voter_cdf.size()) ++c;
    return target(static_cast<int>(c), ev.site);
  }

  // Contact: -1 for a recovery mark, else the neighbor whose infection
  // arrow fired.
  int contact_source(const Event& ev) const {
    if (ev.mark < contact_recover_threshold) return -1;
    int j = static_cast<int>((ev.mark - contact_recover_threshold) / contact_slot_width);
    j = std::min(j, n_channels - 1);
    return target(j, ev.site);
  }
};

// Applies one event to one copy. The same event applied to two copies is
// the basic coupling: identical clocks and marks, order-preserving mark use.
inline void apply_event(const Kinetics& kin, Configuration& sigma, const Event& ev) {
  switch (kin.kind) {
    case Kinetics::Kind::Exchange: {
      const int x = ev.site;
      const int y = kin.target(ev.channel, x);
      if (sigma.at(x) == 1 && sigma.at(y) == 0) {
        sigma.set(x, 0);
        sigma.set(y, 1);
      }
      break;
    }
    case Kinetics::Kind::Voter:
      sigma.set(ev.site, sigma.at(kin.voter_source(ev)));
      break;
    case Kinetics::Kind::Contact: {
      const int src = kin.contact_source(ev);
      if (src < 0) {
        sigma.set(ev.site, 0);
      } else if (sigma.at(src) == 1) {
        sigma.set(ev.site, 1);
      }
      break;
    }
    case Kinetics::Kind::Glauber: {
      const double pi = glauber_plus_probability(*kin.glauber, sigma, ev.site);
      sigma.set(ev.site, ev.mark < pi ? 1 : 0);
      break;
    }
  }
}

// Sites an event can touch, for incremental discrepancy accounting.
inline std::pair<int, int> touched_sites(const Kinetics& kin, const Event& ev) {
  if (kin.kind == Kinetics::Kind::Exchange) return {ev.site, kin.target(ev.channel, ev.site)};
  return {ev.site, ev.site};
}

}  // namespace

Configuration evolve(const Configuration& sigma, const ProcessSpec& spec, double t,
                     const EventStream& stream) {
  validate(spec, sigma.lattice());
  check_horizon(t, stream);
  Kinetics kin(spec, sigma.lattice());
  Configuration out = sigma;
  for (const Event& ev : stream.events()) {
    if (ev.time > t) break;
    apply_event(kin, out, ev);
  }
  return out;
}

std::pair<Configuration, Configuration> evolve_coupled(const Configuration& a,
                                                       const Configuration& b,
                                                       const ProcessSpec& spec, double t,
                                                       const EventStream& stream) {
  if (!(a.lattice() == b.lattice())) throw std::invalid_argument("evolve_coupled: lattice mismatch");
  validate(spec, a.lattice());
  check_horizon(t, stream);
  Kinetics kin(spec, a.lattice());
  Configuration ca = a, cb = b;
  for (const Event& ev : stream.events()) {
    if (ev.time > t) break;
    apply_event(kin, ca, ev);
    apply_event(kin, cb, ev);
  }
  return {std::move(ca), std::move(cb)};
}

namespace {

// Core coupled loop over any event producer `next(Event&) -> bool`.
template <class NextFn>
void coupled_observe_loop(const Configuration& a, const Configuration& b, const ProcessSpec& spec,
                          std::span<const double> times, NextFn&& next_event,
                          const std::function<void(const CoupledSnapshot&)>& observer,
                          bool stop_when_coalesced) {
  if (!(a.lattice() == b.lattice()))
    throw std::invalid_argument("evolve_coupled_observe: lattice mismatch");
  validate(spec, a.lattice());
  if (times.empty()) return;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i] > times[i + 1])
      throw std::invalid_argument("evolve_coupled_observe: times must be ascending");

  Kinetics kin(spec, a.lattice());
  Configuration ca = a, cb = b;
  int diff_count = 0;
  for (int i = 0; i < ca.size(); ++i) diff_count += ca.at(i) != cb.at(i);

  std::size_t next_grid = 0;
  auto emit_until = [&](double now) {
    while (next_grid < times.size() && times[next_grid] < now) {
      CoupledSnapshot snap{next_grid, diff_count == 0, &ca, &cb};
      observer(snap);
      ++next_grid;
    }
  };

  bool stopped_early = false;
  Event ev;
  while (next_grid < times.size() && next_event(ev)) {
    emit_until(ev.time);
    if (next_grid >= times.size()) break;
    if (stop_when_coalesced && diff_count == 0) {
      stopped_early = true;
      break;
    }
    const auto [x, y] = touched_sites(kin, ev);
    int before = (ca.at(x) != cb.at(x)) + (x == y ? 0 : (ca.at(y) != cb.at(y)));
    apply_event(kin, ca, ev);
    apply_event(kin, cb, ev);
    int after = (ca.at(x) != cb.at(x)) + (x == y ? 0 : (ca.at(y) != cb.at(y)));
    diff_count += after - before;
  }
  // remaining grid points (no more events, or coalesced early)
  while (next_grid < times.size()) {
    const Configuration* pa = stopped_early ? nullptr : &ca;
    const Configuration* pb = stopped_early ? nullptr : &cb;
    CoupledSnapshot snap{next_grid, diff_count == 0, pa, pb};
    observer(snap);
    ++next_grid;
  }
}

}  // namespace

void evolve_coupled_observe(const Configuration& a, const Configuration& b,
                            const ProcessSpec& spec, std::span<const double> times,
                            const EventStream& stream,
                            const std::function<void(const CoupledSnapshot&)>& observer,
                            bool stop_when_coalesced) {
  if (!times.empty()) check_horizon(times.back(), stream);
  auto it = stream.events().begin();
  const auto end = stream.events().end();
  coupled_observe_loop(
      a, b, spec, times,
      [&](Event& ev) {
        if (it == end) return false;
        ev = *it++;
        return true;
      },
      observer, stop_when_coalesced);
}

void evolve_coupled_observe(const Configuration& a, const Configuration& b,
                            const ProcessSpec& spec, std::span<const double> times,
                            EventSource& source,
                            const std::function<void(const CoupledSnapshot&)>& observer,
                            bool stop_when_coalesced) {
  if (!times.empty() && times.back() > source.horizon() + 1e-12)
    throw std::runtime_error(
        "evolve: requested time exceeds the stream horizon; regenerate the stream with a larger "
        "horizon");
  coupled_observe_loop(a, b, spec, times, [&](Event& ev) { return source.next(ev); }, observer,
                       stop_when_coalesced);
}

DiscrepancyTrace evolve_coupled_trace(const Configuration& a, const Configuration& b,
                                      const ProcessSpec& spec, std::span<const double> times,
                                      const EventStream& stream) {
  DiscrepancyTrace trace;
  trace.times.assign(times.begin(), times.end());
  trace.diff_sites.resize(times.size());
  evolve_coupled_observe(a, b, spec, times, stream, [&](const CoupledSnapshot& snap) {
    if (!snap.coalesced)
      trace.diff_sites[snap.grid_index] = discrepancy_profile(*snap.first, *snap.second);
  });
  return trace;
}

std::vector<SecondClassSample> track_second_class(const Configuration& sigma_env, int origin_site,
                                                  const AsepSpec& spec,
                                                  std::span<const double> times,
                                                  const EventStream& stream) {
  const Lattice& lat = sigma_env.lattice();
  validate(ProcessSpec{spec}, lat);
  if (times.empty()) throw std::invalid_argument("track_second_class: empty time grid");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i] > times[i + 1])
      throw std::invalid_argument("track_second_class: times must be ascending");
  check_horizon(times.back(), stream);

  // State: sigma is the lower copy (hole at the discrepancy), X its site.
  Configuration sigma = sigma_env;
  sigma.set(origin_site, 0);
  int x_site = origin_site;
  long displacement = 0;

  std::vector<std::int32_t> right(static_cast<std::size_t>(lat.size()));
  std::vector<std::int32_t> left(static_cast<std::size_t>(lat.size()));
  for (int s = 0; s < lat.size(); ++s) {
    right[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(lat.neighbor(s, 0, 1));
    left[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(lat.neighbor(s, 0, -1));
  }

  std::vector<SecondClassSample> out;
  out.reserve(times.size());
  std::size_t next_grid = 0;
  auto emit_until = [&](double now) {
    while (next_grid < times.size() && times[next_grid] < now) {
      out.push_back({x_site, displacement});
      ++next_grid;
    }
  };

  for (const Event& ev : stream.events()) {
    if (next_grid >= times.size()) break;
    emit_until(ev.time);
    if (next_grid >= times.size()) break;

    if (sigma.at(x_site) != 0) throw std::logic_error("track_second_class: invariant corrupted");
    const int step = ev.channel == 0 ? 1 : -1;
    const int x = ev.site;
    const int y = step == 1 ? right[static_cast<std::size_t>(x)] : left[static_cast<std::size_t>(x)];
    if (x == y) continue;
    if (x == x_site) {
      // upper copy's extra particle jumps if the target is free in both
      if (sigma.at(y) == 0) {
        x_site = y;
        displacement += step;
      }
    } else if (y == x_site) {
      // lower copy fills the hole; the discrepancy swaps onto the source
      if (sigma.at(x) == 1) {
        sigma.set(x, 0);
        sigma.set(x_site, 1);
        x_site = x;
        displacement -= step;
      }
    } else if (sigma.at(x) == 1 && sigma.at(y) == 0) {
      sigma.set(x, 0);
      sigma.set(y, 1);
    }
  }
  while (next_grid < times.size()) {
    out.push_back({x_site, displacement});
    ++next_grid;
  }
  return out;
}

SecondClassSample track_second_class(const Configuration& sigma_env, int origin_site,
                                     const AsepSpec& spec, double t, const EventStream& stream) {
  const double times[] = {t};
  return track_second_class(sigma_env, origin_site, spec, times, stream).front();
}

std::string trajectory_csv(const Configuration& sigma, const ProcessSpec& spec,
                           std::span<const double> times, const EventStream& stream) {
  std::string out = "time,site,value\n";
  char buf[64];
  // equal-input coupled run: both snapshots are the single trajectory
  evolve_coupled_observe(
      sigma, sigma, spec, times, stream,
      [&](const CoupledSnapshot& snap) {
        for (int site = 0; site < sigma.size(); ++site) {
          std::snprintf(buf, sizeof buf, "%.12g,%d,%d\n", times[snap.grid_index], site,
                        static_cast<int>(snap.first->at(site)));
          out += buf;
        }
      },
      /*stop_when_coalesced=*/false);
  return out;
}

}  // namespace ips
