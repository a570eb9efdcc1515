#pragma once
// Spatial S/I/R epidemics among Poisson particles in R^d (d = 1, 2).
//
// Diffusion model: every particle that is not removed performs Brownian
// motion. Delayed model: only infected particles move. An infected particle
// infects every susceptible within distance 1 and is removed once it has
// been infected for longer than e/alpha, where e is its own standard
// exponential mark.
//
// Time is discretized with step dt. Each step resolves infection as a
// cascade closure at the current positions, then moves particles, then
// removes those whose infection has lasted longer than e/alpha.
//
// Brownian increments are pure functions of (stream, particle id, k, axis):
// in the diffusion model k is the global step, in the delayed model it is
// the number of steps the particle has already spent infected. The latter
// makes runs at different alpha an exact monotone coupling.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochlab/randstat.hpp"

namespace stochlab {

enum class EpidemicModel : std::uint8_t { Diffusion, Delayed };
enum class Compartment : std::uint8_t { S, I, R };

const char* to_string(EpidemicModel m);
EpidemicModel epidemic_model_from_string(const std::string& s);

struct EpidemicConfig {
  int dimension = 2;
  double alpha = 1.0;
  EpidemicModel model = EpidemicModel::Diffusion;
  double box_radius = 20.0;  // particles start in [-R, R]^d
  double dt = 0.01;
  double diffusion = 1.0;    // Brownian variance per unit time per axis
  std::uint64_t max_infected = 500;  // survival proxy: ever infected >= this
  double boundary_margin = 2.0;      // survival proxy: infected within this of the box edge
  std::uint64_t max_steps = 10'000'000;
  bool shuffle_ids = false;          // relabel particles by a random permutation
  bool record_events = false;

  /// Throws InvalidParameter naming the offending field.
  void validate() const;
};

struct Population {
  int dimension = 2;
  std::vector<double> x, y;  // y is 0 in one dimension
  std::vector<Compartment> state;
  std::vector<double> mark;             // standard exponential clock
  std::vector<std::uint64_t> id;        // label used for randomness
  std::vector<std::int64_t> infected_step;  // -1 while susceptible

  std::size_t size() const noexcept { return x.size(); }
  std::size_t count(Compartment c) const noexcept;
};

/// Poisson(volume) susceptibles uniform in the box plus one infected
/// particle at the origin (index 0).
Population init_population(const EpidemicConfig& config, const RngStream& stream);

enum class EventType : std::uint8_t { Infection, Removal };

struct EpidemicEvent {
  double time;
  EventType type;
  std::uint64_t particle;
  double x, y;
};

enum class OutcomeKind : std::uint8_t { Extinct, SurvivalProxy, StepLimit };
enum class ProxyReason : std::uint8_t { None, MaxInfected, Boundary };

const char* to_string(OutcomeKind k);
const char* to_string(ProxyReason r);

struct EpidemicOutcome {
  OutcomeKind kind = OutcomeKind::StepLimit;
  ProxyReason reason = ProxyReason::None;
  std::uint64_t total_infected = 0;
  std::uint64_t steps = 0;
  double time = 0.0;
  std::vector<EpidemicEvent> events;
  /// Step at which each particle (by index) was infected, -1 if never.
  std::vector<std::int64_t> infected_step;

  bool survived() const noexcept { return kind == OutcomeKind::SurvivalProxy; }
};

/// Steps a population forward. Owns the neighbour cell lists.
class EpidemicSimulation {
 public:
  EpidemicSimulation(const EpidemicConfig& config, const RngStream& stream);
  EpidemicSimulation(const EpidemicConfig& config, const RngStream& stream, Population population);

  const Population& population() const noexcept { return pop_; }
  std::uint64_t steps() const noexcept { return step_; }
  std::uint64_t total_infected() const noexcept { return total_infected_; }
  std::size_t infected_now() const noexcept { return infected_.size(); }

  /// Cascade, then advance. Returns false once no infected particles remain.
  bool step();
  /// Infection cascade at the current positions.
  void cascade();
  /// Moves particles by one time step and removes expired infections.
  bool advance();

  /// Survival proxy that currently holds, if any.
  ProxyReason proxy() const;

  const std::vector<EpidemicEvent>& events() const noexcept { return events_; }

 private:
  void infect(std::uint32_t i);
  void build_cells();
  void move();
  void remove_expired();

  EpidemicConfig cfg_;
  std::uint64_t key_;
  Population pop_;
  std::uint64_t step_ = 0;
  std::uint64_t total_infected_ = 0;
  std::vector<std::uint32_t> infected_;  // indices currently infected
  std::vector<EpidemicEvent> events_;

  // Cell lists of side 1 over the starting box, clamped at the edges.
  int cells_x_ = 1, cells_y_ = 1;
  double origin_ = 0.0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_members_;
  std::vector<double> cell_x_, cell_y_;
  std::vector<std::uint32_t> hits_;
  bool cells_valid_ = false;
};

using StepObserver = std::function<void(const EpidemicSimulation&)>;

EpidemicOutcome run(const EpidemicConfig& config, const RngStream& stream,
                    const StepObserver& observer = {});
EpidemicOutcome run(const EpidemicConfig& config, const RngStream& stream, Population population,
                    const StepObserver& observer = {});

EstimateCI estimate_survival(const EpidemicConfig& config, std::uint64_t trials,
                             const RngStream& base, unsigned workers = 0);

struct SurvivalCurve {
  std::vector<double> alpha;
  std::vector<EstimateCI> estimate;
  std::optional<double> crossover;  // midpoint of the pair bracketing 1/2
};

/// With `coupled`, every alpha reuses the same trial streams (for the
/// delayed model this makes the curve exactly nonincreasing); otherwise each
/// alpha gets independent streams.
SurvivalCurve scan_alpha(const EpidemicConfig& config, const std::vector<double>& alpha_grid,
                         std::uint64_t trials, const RngStream& base, bool coupled = false,
                         unsigned workers = 0);

/// Runs the delayed model at each alpha (increasing) on shared randomness and
/// checks that every particle infected by step t at a larger alpha was
/// infected by step t at each smaller one, up to the earlier stopping time.
/// Throws std::logic_error with a diagnostic on a violation.
std::vector<EpidemicOutcome> coupled_delayed_run(const EpidemicConfig& config,
                                                 const std::vector<double>& alpha_list,
                                                 const RngStream& stream);

void write_event_csv(const std::vector<EpidemicEvent>& events, std::ostream& out);

}  // namespace stochlab
