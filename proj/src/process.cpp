#include "ips/process.hpp"

#include <cmath>
#include <stdexcept>

#include "ips/configuration.hpp"

namespace ips {

namespace {

void validate_symmetric_kernel(const JumpKernel& kernel, const Lattice& lat, const char* who) {
  kernel.validate();
  if (kernel.dim != lat.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!kernel.symmetric()) throw std::invalid_argument(std::string(who) + ": kernel must be symmetric");
  for (const auto& [z, p] : kernel.jumps) {
    for (int a = 0; a < kernel.dim; ++a) {
      const int c = z[static_cast<std::size_t>(a)];
      if (std::abs(c) > lat.side() / 2)
        throw std::invalid_argument(std::string(who) + ": jump exceeds half the torus side");
    }
  }
}

}  // namespace

void validate(const ProcessSpec& spec, const Lattice& lat) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SepSpec>) {
          validate_symmetric_kernel(s.kernel, lat, "SepSpec");
        } else if constexpr (std::is_same_v<T, VoterSpec>) {
          validate_symmetric_kernel(s.kernel, lat, "VoterSpec");
        } else if constexpr (std::is_same_v<T, AsepSpec>) {
          if (lat.dim() != 1) throw std::invalid_argument("AsepSpec: requires d=1");
          if (s.p_right < 0.0 || s.q_left < 0.0 ||
              std::fabs(s.p_right + s.q_left - 1.0) > 1e-12)
            throw std::invalid_argument("AsepSpec: need p,q >= 0 with p+q = 1");
          if (std::fabs(s.p_right - s.q_left) < 1e-12)
            throw std::invalid_argument("AsepSpec: p = q is the symmetric case, use SepSpec");
        } else if constexpr (std::is_same_v<T, ContactSpec>) {
          if (s.lambda <= 0.0) throw std::invalid_argument("ContactSpec: lambda must be positive");
        } else if constexpr (std::is_same_v<T, GlauberSpec>) {
          if (lat.dim() != 1) throw std::invalid_argument("GlauberSpec: requires d=1");
          s.interaction.validate();
          if (s.interaction.range > lat.side() / 2 - 1)
            throw std::invalid_argument("GlauberSpec: interaction range too large for the torus");
        }
      },
      spec);
}

double site_clock_rate(const ProcessSpec& spec, const Lattice& lat) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SepSpec>) {
          double total = 0.0;
          for (const auto& [z, p] : s.kernel.jumps) total += p;
          return total;  // = 1: per-directed-bond clocks grouped by source site
        } else if constexpr (std::is_same_v<T, AsepSpec>) {
          return s.p_right + s.q_left;
        } else if constexpr (std::is_same_v<T, VoterSpec>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, ContactSpec>) {
          return 1.0 + 2.0 * lat.dim() * s.lambda;
        } else {
          return 1.0;  // Glauber heat-bath resampling
        }
      },
      spec);
}

bool is_exchange_dynamics(const ProcessSpec& spec) {
  return std::holds_alternative<SepSpec>(spec) || std::holds_alternative<AsepSpec>(spec);
}

bool is_monotone_dynamics(const ProcessSpec& spec) {
  if (const auto* g = std::get_if<GlauberSpec>(&spec)) {
    for (double j : g->interaction.couplings)
      if (j < 0.0) return false;
    return true;
  }
  return true;
}

RateBounds glauber_rate_bounds(const GlauberSpec& spec) {
  const double t1 = spec.interaction.truncated_tail_abs_sum(1);
  return RateBounds{1.0 / (1.0 + std::exp(2.0 * t1)), 1.0 / (1.0 + std::exp(-2.0 * t1))};
}

double glauber_plus_probability(const GlauberSpec& spec, const Configuration& sigma, int site) {
  const Lattice& lat = sigma.lattice();
  const Interaction& inter = spec.interaction;
  double field = 0.0;
  for (int r = 1; r <= inter.range; ++r) {
    const double j = inter.coupling(r);
    const int left = lat.neighbor(site, 0, -r);
    const int right = lat.neighbor(site, 0, r);
    field += j * ((2.0 * sigma.at(left) - 1.0) + (2.0 * sigma.at(right) - 1.0));
  }
  return 1.0 / (1.0 + std::exp(-2.0 * field));
}

}  // namespace ips
