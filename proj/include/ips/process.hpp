#pragma once

#include <variant>

#include "ips/interaction.hpp"
#include "ips/lattice.hpp"
#include "ips/random_walk.hpp"

namespace ips {

// Symmetric exclusion: unordered-pair exchange at rate p(x,y), realized by
// directed-bond clocks (move iff source occupied, target empty).
struct SepSpec {
  JumpKernel kernel;
};

// Nearest-neighbor asymmetric exclusion in d=1, jump right at rate p, left
// at rate q, p + q = 1, p != q.
struct AsepSpec {
  double p_right = 1.0;
  double q_left = 0.0;
  double drift() const { return p_right - q_left; }  // first moment b
};

// Voter model: site resamples from a kernel-random neighbor at rate 1.
struct VoterSpec {
  JumpKernel kernel;
};

// Contact process: recovery at rate 1, infection at rate lambda per infected
// nearest neighbor.
struct ContactSpec {
  double lambda = 1.0;
};

// Heat-bath Glauber dynamics for a 1d Ising interaction: site resamples from
// its single-site conditional at rate 1, i.e. flip rates
// c(i,sigma) = mu(sigma^i(i) | sigma off i).
struct GlauberSpec {
  Interaction interaction;
};

using ProcessSpec = std::variant<SepSpec, AsepSpec, VoterSpec, ContactSpec, GlauberSpec>;

void validate(const ProcessSpec& spec, const Lattice& lat);

// Uniform per-site Poisson clock rate of the graphical construction
// (per-directed-bond rates summed per site for exclusion dynamics).
double site_clock_rate(const ProcessSpec& spec, const Lattice& lat);

bool is_exchange_dynamics(const ProcessSpec& spec);
bool is_monotone_dynamics(const ProcessSpec& spec);  // ferromagnetic check for Glauber

// Heat-bath probability of spin 1 at `site` given the rest of sigma,
// 1 / (1 + exp(-2 h)) with the local field h from the interaction (d=1).
double glauber_plus_probability(const GlauberSpec& spec, const class Configuration& sigma,
                                int site);

// Uniform flip-rate bounds 0 < eps <= c(i,sigma) <= K of the heat-bath
// rates, from the truncated tail sums.
struct RateBounds {
  double lower;
  double upper;
};
RateBounds glauber_rate_bounds(const GlauberSpec& spec);

}  // namespace ips
