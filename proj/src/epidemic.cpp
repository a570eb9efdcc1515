#include "stochlab/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stochlab/parallel.hpp"
#include "stochlab/simd/kernels.hpp"

namespace stochlab {

const char* to_string(EpidemicModel m) {
  return m == EpidemicModel::Diffusion ? "diffusion" : "delayed";
}

EpidemicModel epidemic_model_from_string(const std::string& s) {
  if (s == "diffusion") return EpidemicModel::Diffusion;
  if (s == "delayed") return EpidemicModel::Delayed;
  throw InvalidParameter("unknown epidemic model '" + s + "' (expected diffusion or delayed)");
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Extinct: return "extinct";
    case OutcomeKind::SurvivalProxy: return "survival";
    default: return "step_limit";
  }
}

const char* to_string(ProxyReason r) {
  switch (r) {
    case ProxyReason::MaxInfected: return "max_infected";
    case ProxyReason::Boundary: return "boundary";
    default: return "none";
  }
}

void EpidemicConfig::validate() const {
  if (dimension != 1 && dimension != 2) throw InvalidParameter("epidemic: dimension must be 1 or 2");
  if (!(alpha > 0.0) || std::isnan(alpha)) throw InvalidParameter("epidemic: alpha must be positive");
  if (!(box_radius > 2.0) || !std::isfinite(box_radius))
    throw InvalidParameter("epidemic: box_radius must exceed 2");
  if (box_radius > 1e4) throw InvalidParameter("epidemic: box_radius is too large");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("epidemic: dt must be positive");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion))
    throw InvalidParameter("epidemic: diffusion must be non-negative");
  if (max_infected < 1) throw InvalidParameter("epidemic: max_infected must be >= 1");
  if (!(boundary_margin >= 0.0) || boundary_margin >= box_radius)
    throw InvalidParameter("epidemic: boundary_margin must lie in [0, box_radius)");
}

std::size_t Population::count(Compartment c) const noexcept {
  return static_cast<std::size_t>(std::count(state.begin(), state.end(), c));
}

Population init_population(const EpidemicConfig& cfg, const RngStream& stream) {
  cfg.validate();
  RngStream s(stream.key(), 0x706f70ULL);
  const double side = 2.0 * cfg.box_radius;
  const double volume = cfg.dimension == 2 ? side * side : side;
  const auto n = sample_poisson(s, volume);
  Population pop;
  pop.dimension = cfg.dimension;
  auto add = [&](double x, double y, Compartment c) {
    pop.x.push_back(x);
    pop.y.push_back(y);
    pop.state.push_back(c);
    pop.mark.push_back(sample_exponential(s, 1.0));
    pop.id.push_back(pop.id.size());
    pop.infected_step.push_back(c == Compartment::I ? 0 : -1);
  };
  add(0.0, 0.0, Compartment::I);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double x = -cfg.box_radius + side * s.uniform01();
    const double y = cfg.dimension == 2 ? -cfg.box_radius + side * s.uniform01() : 0.0;
    add(x, y, Compartment::S);
  }
  if (cfg.shuffle_ids) std::shuffle(pop.id.begin(), pop.id.end(), s);
  return pop;
}

// ---------------------------------------------------------------------------

EpidemicSimulation::EpidemicSimulation(const EpidemicConfig& config, const RngStream& stream)
    : EpidemicSimulation(config, stream, init_population(config, stream)) {}

EpidemicSimulation::EpidemicSimulation(const EpidemicConfig& config, const RngStream& stream,
                                       Population population)
    : cfg_(config), key_(hash_words(stream.key(), 0x6d6f7665ULL)), pop_(std::move(population)) {
  cfg_.validate();
  const std::size_t n = pop_.size();
  if (pop_.y.size() != n || pop_.state.size() != n || pop_.mark.size() != n || pop_.id.size() != n ||
      pop_.infected_step.size() != n)
    throw InvalidParameter("epidemic: population arrays differ in length");
  if (pop_.dimension != cfg_.dimension) throw InvalidParameter("epidemic: population dimension mismatch");
  for (std::uint32_t i = 0; i < n; ++i) {
    if (pop_.state[i] == Compartment::S) continue;
    ++total_infected_;
    if (pop_.state[i] == Compartment::I) {
      if (pop_.infected_step[i] < 0) pop_.infected_step[i] = 0;
      infected_.push_back(i);
      if (cfg_.record_events) events_.push_back({0.0, EventType::Infection, pop_.id[i], pop_.x[i], pop_.y[i]});
    }
  }
  origin_ = -cfg_.box_radius - 1.0;
  cells_x_ = static_cast<int>(std::ceil(2.0 * cfg_.box_radius + 2.0));
  cells_y_ = cfg_.dimension == 2 ? cells_x_ : 1;
}

void EpidemicSimulation::infect(std::uint32_t i) {
  pop_.state[i] = Compartment::I;
  pop_.infected_step[i] = static_cast<std::int64_t>(step_);
  ++total_infected_;
  infected_.push_back(i);
  if (cfg_.record_events)
    events_.push_back({double(step_) * cfg_.dt, EventType::Infection, pop_.id[i], pop_.x[i], pop_.y[i]});
}

void EpidemicSimulation::build_cells() {
  const std::size_t cells = static_cast<std::size_t>(cells_x_) * cells_y_;
  auto cell_of = [&](std::uint32_t i) {
    const int cx = std::clamp(static_cast<int>(std::floor(pop_.x[i] - origin_)), 0, cells_x_ - 1);
    const int cy = cells_y_ == 1 ? 0 : std::clamp(static_cast<int>(std::floor(pop_.y[i] - origin_)), 0, cells_y_ - 1);
    return static_cast<std::size_t>(cy) * cells_x_ + cx;
  };
  cell_start_.assign(cells + 1, 0);
  std::vector<std::size_t> where;
  std::vector<std::uint32_t> members;
  for (std::uint32_t i = 0; i < pop_.size(); ++i) {
    if (pop_.state[i] != Compartment::S) continue;
    members.push_back(i);
    where.push_back(cell_of(i));
    ++cell_start_[where.back() + 1];
  }
  std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
  cell_members_.resize(members.size());
  cell_x_.resize(members.size());
  cell_y_.resize(members.size());
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto slot = fill[where[k]]++;
    cell_members_[slot] = members[k];
    cell_x_[slot] = pop_.x[members[k]];
    cell_y_[slot] = pop_.y[members[k]];
  }
  hits_.resize(members.size());
  cells_valid_ = true;
}

void EpidemicSimulation::cascade() {
  if (!cells_valid_) build_cells();
  std::vector<std::uint32_t> queue(infected_);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::uint32_t i = queue[q];
    const double px = pop_.x[i], py = pop_.y[i];
    const int cx = std::clamp(static_cast<int>(std::floor(px - origin_)), 0, cells_x_ - 1);
    const int cy = cells_y_ == 1 ? 0 : std::clamp(static_cast<int>(std::floor(py - origin_)), 0, cells_y_ - 1);
    const int x0 = std::max(cx - 1, 0), x1 = std::min(cx + 1, cells_x_ - 1);
    for (int row = std::max(cy - 1, 0); row <= std::min(cy + 1, cells_y_ - 1); ++row) {
      const std::size_t base = static_cast<std::size_t>(row) * cells_x_;
      const std::uint32_t first = cell_start_[base + x0];
      const std::uint32_t last = cell_start_[base + x1 + 1];
      if (first == last) continue;
      const std::size_t len = last - first;
      const std::size_t found = simd::within_radius(
          px, py, 1.0, std::span<const double>(cell_x_).subspan(first, len),
          std::span<const double>(cell_y_).subspan(first, len), std::span<std::uint32_t>(hits_).first(len));
      for (std::size_t h = 0; h < found; ++h) {
        const std::uint32_t j = cell_members_[first + hits_[h]];
        if (pop_.state[j] != Compartment::S) continue;
        infect(j);
        queue.push_back(j);
      }
    }
  }
}

void EpidemicSimulation::move() {
  const double sd = std::sqrt(cfg_.dt * cfg_.diffusion);
  if (sd == 0.0) return;
  auto increment = [&](std::uint32_t i, std::uint64_t k, std::uint64_t axis) {
    return sd * gaussian_from_bits(hash_words(key_, pop_.id[i], k, 2 * axis),
                                   hash_words(key_, pop_.id[i], k, 2 * axis + 1));
  };
  if (cfg_.model == EpidemicModel::Delayed) {
    for (const std::uint32_t i : infected_) {
      const auto k = step_ - static_cast<std::uint64_t>(pop_.infected_step[i]);
      pop_.x[i] += increment(i, k, 0);
      if (cfg_.dimension == 2) pop_.y[i] += increment(i, k, 1);
    }
    return;  // susceptibles stay put, so the cell lists remain valid
  }
  for (std::uint32_t i = 0; i < pop_.size(); ++i) {
    if (pop_.state[i] == Compartment::R) continue;
    pop_.x[i] += increment(i, step_, 0);
    if (cfg_.dimension == 2) pop_.y[i] += increment(i, step_, 1);
  }
  cells_valid_ = false;
}

void EpidemicSimulation::remove_expired() {
  std::size_t kept = 0;
  for (const std::uint32_t i : infected_) {
    const double elapsed = double(step_ - static_cast<std::uint64_t>(pop_.infected_step[i])) * cfg_.dt;
    if (elapsed > pop_.mark[i] / cfg_.alpha) {
      pop_.state[i] = Compartment::R;
      if (cfg_.record_events)
        events_.push_back({double(step_) * cfg_.dt, EventType::Removal, pop_.id[i], pop_.x[i], pop_.y[i]});
    } else {
      infected_[kept++] = i;
    }
  }
  infected_.resize(kept);
}

bool EpidemicSimulation::advance() {
  move();
  ++step_;
  remove_expired();
  return !infected_.empty();
}

bool EpidemicSimulation::step() {
  cascade();
  return advance();
}

ProxyReason EpidemicSimulation::proxy() const {
  if (total_infected_ >= cfg_.max_infected) return ProxyReason::MaxInfected;
  const double edge = cfg_.box_radius - cfg_.boundary_margin;
  for (const std::uint32_t i : infected_)
    if (std::abs(pop_.x[i]) >= edge || std::abs(pop_.y[i]) >= edge) return ProxyReason::Boundary;
  return ProxyReason::None;
}

// ---------------------------------------------------------------------------

EpidemicOutcome run(const EpidemicConfig& config, const RngStream& stream, const StepObserver& observer) {
  return run(config, stream, init_population(config, stream), observer);
}

EpidemicOutcome run(const EpidemicConfig& config, const RngStream& stream, Population population,
                    const StepObserver& observer) {
  EpidemicSimulation sim(config, stream, std::move(population));
  EpidemicOutcome out;
  auto finish = [&](OutcomeKind kind, ProxyReason reason) {
    out.kind = kind;
    out.reason = reason;
    out.total_infected = sim.total_infected();
    out.steps = sim.steps();
    out.time = double(sim.steps()) * config.dt;
    out.events = sim.events();
    out.infected_step = sim.population().infected_step;
    return out;
  };
  if (sim.infected_now() == 0) return finish(OutcomeKind::Extinct, ProxyReason::None);
  for (;;) {
    sim.cascade();
    if (observer) observer(sim);
    if (const auto r = sim.proxy(); r != ProxyReason::None) return finish(OutcomeKind::SurvivalProxy, r);
    const bool alive = sim.advance();
    if (observer) observer(sim);
    if (!alive) return finish(OutcomeKind::Extinct, ProxyReason::None);
    if (sim.steps() >= config.max_steps) return finish(OutcomeKind::StepLimit, ProxyReason::None);
  }
}

EstimateCI estimate_survival(const EpidemicConfig& config, std::uint64_t trials, const RngStream& base,
                             unsigned workers) {
  config.validate();
  if (trials == 0) throw InvalidParameter("estimate_survival: trials must be >= 1");
  const auto hits = count_successes(trials, workers, [&](std::size_t i) {
    return run(config, base.child(i)).survived();
  });
  return estimate_proportion(hits, trials);
}

SurvivalCurve scan_alpha(const EpidemicConfig& config, const std::vector<double>& alpha_grid,
                         std::uint64_t trials, const RngStream& base, bool coupled, unsigned workers) {
  if (alpha_grid.empty()) throw InvalidParameter("scan_alpha: empty alpha grid");
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()))
    throw InvalidParameter("scan_alpha: alpha grid must be increasing");
  SurvivalCurve curve;
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    EpidemicConfig c = config;
    c.alpha = alpha_grid[k];
    curve.alpha.push_back(c.alpha);
    curve.estimate.push_back(estimate_survival(c, trials, coupled ? base : base.child(k), workers));
  }
  for (std::size_t k = 0; k + 1 < curve.alpha.size(); ++k)
    if (curve.estimate[k].point >= 0.5 && curve.estimate[k + 1].point < 0.5) {
      curve.crossover = 0.5 * (curve.alpha[k] + curve.alpha[k + 1]);
      break;
    }
  return curve;
}

std::vector<EpidemicOutcome> coupled_delayed_run(const EpidemicConfig& config,
                                                 const std::vector<double>& alpha_list,
                                                 const RngStream& stream) {
  if (config.model != EpidemicModel::Delayed)
    throw InvalidParameter(
        "coupled_delayed_run: only the delayed model is monotone in alpha; the diffusion model has "
        "no such coupling");
  if (alpha_list.empty()) throw InvalidParameter("coupled_delayed_run: empty alpha list");
  if (!std::is_sorted(alpha_list.begin(), alpha_list.end()))
    throw InvalidParameter("coupled_delayed_run: alpha list must be increasing");
  std::vector<EpidemicOutcome> out;
  for (const double a : alpha_list) {
    EpidemicConfig c = config;
    c.alpha = a;
    out.push_back(run(c, stream));
  }
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    const auto& lo = out[k];      // smaller alpha
    const auto& hi = out[k + 1];  // larger alpha
    const auto horizon = static_cast<std::int64_t>(std::min(lo.steps, hi.steps));
    for (std::size_t j = 0; j < hi.infected_step.size(); ++j) {
      const auto t_hi = hi.infected_step[j];
      if (t_hi < 0 || t_hi > horizon) continue;
      const auto t_lo = lo.infected_step[j];
      if (t_lo >= 0 && t_lo <= t_hi) continue;
      std::ostringstream msg;
      msg << "coupled_delayed_run: monotonicity violated: particle " << j << " infected at step " << t_hi
          << " for alpha=" << alpha_list[k + 1] << " but at step " << t_lo << " for alpha=" << alpha_list[k]
          << " (seed " << stream.master_seed() << ", stream " << stream.stream_id() << ")";
      throw std::logic_error(msg.str());
    }
  }
  return out;
}

void write_event_csv(const std::vector<EpidemicEvent>& events, std::ostream& out) {
  out << "time,event,particle,x,y\n";
  out.precision(17);
  for (const auto& e : events)
    out << e.time << ',' << (e.type == EventType::Infection ? "infection" : "removal") << ',' << e.particle
        << ',' << e.x << ',' << e.y << '\n';
}

}  // namespace stochlab
