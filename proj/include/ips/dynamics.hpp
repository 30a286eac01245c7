#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ips/configuration.hpp"
#include "ips/event_stream.hpp"
#include "ips/process.hpp"

namespace ips {

// Configuration at time t of the process driven by the stream;
// deterministic given (sigma, stream). Throws if t exceeds the stream
// horizon (extend the stream).
Configuration evolve(const Configuration& sigma, const ProcessSpec& spec, double t,
                     const EventStream& stream);

// Both copies driven by the same stream (basic coupling); each marginal
// equals evolve of that copy alone.
std::pair<Configuration, Configuration> evolve_coupled(const Configuration& a,
                                                       const Configuration& b,
                                                       const ProcessSpec& spec, double t,
                                                       const EventStream& stream);

// Runs the coupled pair and invokes the observer at each grid time (times
// ascending). If stop_when_coalesced is set, observation stops once the
// copies agree everywhere: coupled copies driven by one stream stay equal
// forever, so later grid points are reported with the coalesced flag.
struct CoupledSnapshot {
  std::size_t grid_index;
  bool coalesced;                 // copies equal everywhere from here on
  const Configuration* first;     // null once coalesced and stopped
  const Configuration* second;
};
void evolve_coupled_observe(const Configuration& a, const Configuration& b,
                            const ProcessSpec& spec, std::span<const double> times,
                            const EventStream& stream,
                            const std::function<void(const CoupledSnapshot&)>& observer,
                            bool stop_when_coalesced = true);
// Lazy variant: events are drawn from the source only as far as needed
// (early coalescence stops the draw).
void evolve_coupled_observe(const Configuration& a, const Configuration& b,
                            const ProcessSpec& spec, std::span<const double> times,
                            EventSource& source,
                            const std::function<void(const CoupledSnapshot&)>& observer,
                            bool stop_when_coalesced = true);

// Discrepancy sets at each grid time.
struct DiscrepancyTrace {
  std::vector<double> times;
  std::vector<std::vector<int>> diff_sites;
  std::vector<long> second_class_displacement;  // ASEP tracker output only
};
DiscrepancyTrace evolve_coupled_trace(const Configuration& a, const Configuration& b,
                                      const ProcessSpec& spec, std::span<const double> times,
                                      const EventStream& stream);

// ASEP second-class particle: position of the unique discrepancy of the
// pair (sigma w/ particle at origin_site, sigma w/ hole there). The
// occupancy of sigma at origin_site is ignored. Displacement is the
// unwrapped signed move count. Throws std::logic_error if the single
// discrepancy invariant breaks.
struct SecondClassSample {
  int site;           // torus position
  long displacement;  // unwrapped
};
std::vector<SecondClassSample> track_second_class(const Configuration& sigma_env, int origin_site,
                                                  const AsepSpec& spec,
                                                  std::span<const double> times,
                                                  const EventStream& stream);
SecondClassSample track_second_class(const Configuration& sigma_env, int origin_site,
                                     const AsepSpec& spec, double t, const EventStream& stream);

// Debug dump of a single trajectory at the grid times, one "time,site,value"
// line per site.
std::string trajectory_csv(const Configuration& sigma, const ProcessSpec& spec,
                           std::span<const double> times, const EventStream& stream);

}  // namespace ips
