#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/counting.hpp"
#include "dioph/real.hpp"

namespace dioph {

// Generator behind monte-carlo sampling; y_i = (64-bit draw)/2^64 in draw order.
inline constexpr const char* kSamplerAlgorithm = "mt19937_64";

struct Sampling {
  enum class Mode { Grid, MonteCarlo };
  Mode mode = Mode::Grid;
  std::uint64_t n_points = 10000;  // grid: must be a perfect k-th power
  std::uint64_t seed = 0;

  static Sampling grid(std::uint64_t n) { return {Mode::Grid, n, 0}; }
  static Sampling monte_carlo(std::uint64_t n, std::uint64_t seed) { return {Mode::MonteCarlo, n, seed}; }
};

const char* sampling_mode_name(Sampling::Mode m);

struct MeasureExperiment {
  RealVector x;
  ApproxFunction psi = ApproxFunction::constant(0);
  unsigned d = 1;
  unsigned k = 1;  // fiber dimension, d = dim(x) + k
  std::uint64_t Q0 = 0;
  std::uint64_t Q_max = 1;
  Sampling sampling;
};

// Sample points y_i = numerators[i]/denominator; grid points are the cell midpoints (2j+1)/(2m).
struct SamplePoints {
  unsigned k = 1;
  unsigned __int128 denominator = 0;
  std::vector<std::uint64_t> numerators;  // n_points·k, row-major
  std::size_t size() const { return k == 0 ? 0 : numerators.size() / k; }
  std::string coordinate(std::size_t point, unsigned axis) const;  // "a/D"
};

SamplePoints make_samples(const Sampling& s, unsigned k);

struct PointRecord {
  std::uint32_t witness_count = 0;
  std::uint64_t first_witness = 0;  // 0 when none
};

struct MeasureResult {
  std::uint64_t Q0 = 0, Q_max = 0;
  std::uint64_t n_points = 0;
  std::uint64_t hits = 0;
  double fraction = 0;
  double sigma = 0;  // sqrt(f(1−f)/n)
  std::uint64_t qualifying = 0;  // q in (Q0, Q_max] with ‖q·x‖ < ψ(q)
  std::uint64_t undecided = 0;   // ψ(q) comparisons left open; counted as non-witness
  SamplePoints points;
  std::vector<PointRecord> records;
};

// Fraction of sampled y in [0,1]^k with some q in (Q0, Q_max] and ‖q·(x, y)‖ < ψ(q).
MeasureResult approximable_fraction(const MeasureExperiment& exp, const Budget& budget = {});

struct PhiContrast {
  MeasureResult empirical;
  CertifiedValue union_bound;  // Σ over qualifying q of (2φ(q)·(q+1)/q)^k
  bool within = false;         // fraction <= union_bound.upper + 3σ
};

PhiContrast phi_contrast(const RealVector& x, unsigned d, std::uint64_t Q0, std::uint64_t Q_max,
                         const Sampling& sampling, const Budget& budget = {});

struct SubspaceResult {
  MeasureResult measure;
  std::vector<SeriesPoint> series;  // Σ ψ(q)^k over q <= Q with ‖q·x‖ < ψ(q)
};

SubspaceResult subspace_fraction(const MeasureExperiment& exp, const Budget& budget = {});

// Per sample: witnessed by max{ψ, φ}, by φ, by ψ. A violation is a max-witnessed y with neither.
struct DecompositionReport {
  std::uint64_t n_points = 0;
  std::uint64_t max_hits = 0, phi_hits = 0, psi_hits = 0;
  std::uint64_t violations = 0;
  std::uint64_t spurious = 0;  // witnessed by ψ or φ but not by the max
};

DecompositionReport decomposition_check(const MeasureExperiment& exp, const ApproxFunction& phi,
                                        const Budget& budget = {});

}  // namespace dioph
