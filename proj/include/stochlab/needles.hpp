#pragma once
// Poisson needle mirrors in the plane.
//
// Needle centres form a rate-1 Poisson process, generated per unit cell as
// a pure function of (seed, cell); every needle has length epsilon and an
// inclination drawn from an AngleLaw. Since centres and angles never depend
// on epsilon, fields built from the same seed at different lengths are
// coupled needle by needle.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stochlab/randstat.hpp"

namespace stochlab {

inline constexpr double kGeometryTolerance = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Probability law of needle inclinations on [0, pi).
class AngleLaw {
 public:
  struct Degenerate {
    double angle;
  };
  struct RationalAtom {
    long numerator;    // angle = pi * numerator / denominator
    long denominator;
    double weight;
  };
  struct DiscreteRational {
    std::vector<RationalAtom> atoms;
  };
  struct Uniform {};
  struct Table {
    std::vector<std::pair<double, double>> atoms;  // (angle, weight)
  };

  static AngleLaw degenerate(double angle);
  static AngleLaw uniform();
  static AngleLaw rational(std::vector<RationalAtom> atoms);
  static AngleLaw table(std::vector<std::pair<double, double>> atoms);

  /// Accepts "uniform", "degenerate:ANGLE", "table:A1,A2,...:W1,W2,..." and
  /// "atoms:P1/Q1,P2/Q2,...:W1,W2,..." (angles as rational multiples of pi).
  static AngleLaw parse(const std::string& text);

  double sample(double u) const;
  bool is_degenerate() const noexcept;
  std::string describe() const;

 private:
  explicit AngleLaw(std::variant<Degenerate, DiscreteRational, Uniform, Table> v);
  void validate() const;

  std::variant<Degenerate, DiscreteRational, Uniform, Table> law_;
  std::vector<std::pair<double, double>> cumulative_;  // (angle, cdf) for atomic laws
};

struct Needle {
  Point centre;
  double angle = 0.0;
  double length = 0.0;

  Point endpoint_a() const noexcept;
  Point endpoint_b() const noexcept;
};

/// Needles whose centres fall in the square window [-W, W)^2, indexed by
/// unit cell.
class NeedleField {
 public:
  NeedleField(std::uint64_t seed, int window_radius, double epsilon, AngleLaw law);

  double epsilon() const noexcept { return epsilon_; }
  int window_radius() const noexcept { return window_; }
  std::size_t size() const noexcept { return cx_.size(); }
  Needle needle(std::size_t i) const noexcept;
  /// Times a configuration with a needle through the origin was redrawn.
  std::uint64_t origin_rejections() const noexcept { return rejections_; }
  const AngleLaw& law() const noexcept { return law_; }

  /// Needles are stored grouped by square buckets of `bucket_side()` unit
  /// cells; a needle never reaches beyond the 3x3 buckets around its own.
  int bucket_side() const noexcept { return bucket_; }
  int buckets_per_side() const noexcept { return nb_; }
  /// Index range [first, last) of the needles in bucket (bi, bj); buckets
  /// in the same column with consecutive bj are stored consecutively.
  std::pair<std::uint32_t, std::uint32_t> bucket_range(int bi, int bj) const noexcept;

  // Structure-of-arrays view for the SIMD kernels: needle i runs from
  // (ax, ay) to (ax + ex, ay + ey).
  std::span<const double> ax() const noexcept { return ax_; }
  std::span<const double> ay() const noexcept { return ay_; }
  std::span<const double> ex() const noexcept { return ex_; }
  std::span<const double> ey() const noexcept { return ey_; }

 private:
  void generate(std::uint64_t key);
  bool origin_on_a_needle() const;

  double epsilon_;
  int window_;
  int bucket_;
  int nb_;
  AngleLaw law_;
  std::uint64_t rejections_ = 0;
  std::vector<double> cx_, cy_, angle_;
  std::vector<double> ax_, ay_, ex_, ey_;
  std::vector<std::uint32_t> bucket_start_;  // size nb_ * nb_ + 1
};

NeedleField generate_field(std::uint64_t seed, int window_radius, double epsilon,
                           const AngleLaw& law);

enum class HitStatus : std::uint8_t { None, Hit, Degenerate };

struct FirstHit {
  HitStatus status = HitStatus::None;
  std::uint32_t needle = 0;
  Point point;
  double distance = 0.0;
};

/// Nearest needle crossed by the ray from `from` along unit `direction`
/// within `max_range`, found by walking the cell grid. A hit within the
/// geometry tolerance of a needle endpoint, or of another needle's crossing
/// along the ray, is reported as Degenerate. `exclude` skips one needle
/// (the one the ray is leaving).
FirstHit first_hit(const NeedleField& field, Point from, Point direction, double max_range,
                   std::optional<std::uint32_t> exclude = std::nullopt);

enum class ContinuumOutcome : std::uint8_t { EscapedRadius, BudgetExhausted, DegenerateHit };

const char* to_string(ContinuumOutcome o);

struct ContinuumTrace {
  double alpha = 0.0;
  std::vector<Point> points;  // start, reflection points, final point
  std::vector<std::uint32_t> needles;  // needle hit at each reflection
  double total_length = 0.0;
  double escape_radius = 0.0;
  ContinuumOutcome outcome = ContinuumOutcome::BudgetExhausted;

  std::size_t reflections() const noexcept { return needles.size(); }
  /// Position after arc length t along the polyline (t <= total_length).
  Point position_at(double t) const;
};

/// Follows the ray from `from` along unit `direction`, reflecting
/// specularly, until it leaves the disc of radius R about the origin.
ContinuumTrace trace_from(const NeedleField& field, Point from, Point direction, double R,
                          std::size_t max_reflections,
                          std::optional<std::uint32_t> exclude = std::nullopt);

/// Ray from the origin at inclination alpha.
ContinuumTrace trace_continuum(const NeedleField& field, double alpha, double R,
                               std::size_t max_reflections);

struct SpectrumRow {
  double alpha;
  ContinuumOutcome outcome;
  std::size_t reflections;
};

struct EscapeSpectrum {
  std::vector<SpectrumRow> rows;
  std::size_t escaped = 0;
  std::size_t degenerate = 0;
  double escaped_fraction() const noexcept {
    return rows.empty() ? 0.0 : double(escaped) / double(rows.size());
  }
};

EscapeSpectrum escape_spectrum(const NeedleField& field, std::span<const double> alpha_grid,
                               double R, std::size_t max_reflections);

/// True when the needles, clipped to the side-s square centred at the
/// origin, contain a chain joining its top and bottom sides (which is
/// exactly when the vacant set has no left-right crossing).
bool blocks_vertical_chain(const NeedleField& field, double side);

/// Field large enough to cover the side-s square for the given length.
NeedleField crossing_field(std::uint64_t seed, double side, double epsilon, const AngleLaw& law);

EstimateCI vacant_crossing_probability(double epsilon, const AngleLaw& law, double side,
                                       std::uint64_t trials, const RngStream& base,
                                       unsigned workers = 0);

struct DiffusivityRow {
  double t;
  std::size_t traces;
  double variance;  // trace of the covariance of X(t)
};

struct DiffusivityReport {
  std::vector<DiffusivityRow> rows;
  double sigma2 = 0.0;     // least-squares slope of variance on t through 0
  double exponent = 0.0;   // log-log slope of variance on t
  bool diffusive = false;  // |exponent - 1| <= 0.2
};

/// Uses escaping traces only; throws if there are none.
DiffusivityReport estimate_diffusivity(std::span<const ContinuumTrace> traces,
                                       std::span<const double> t_grid);

void write_trace_csv(std::span<const ContinuumTrace> traces, std::ostream& out);

}  // namespace stochlab
