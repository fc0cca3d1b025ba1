#pragma once

#include <span>
#include <vector>

#include "vahf/dsp/types.hpp"

namespace vahf::dsp {

enum class Metric { Euclidean, Manhattan };

/// Sequence of equal-dimension vectors, one per time step.
using VectorSequence = std::vector<std::vector<double>>;

double frame_cost(std::span<const double> a, std::span<const double> b, Metric metric);

/// Minimal cumulative frame cost over monotone alignments using steps
/// (1,0), (0,1), (1,1) with no slope weighting. Throws Error("dimension-mismatch")
/// when frame dimensions differ and Error("empty-sequence") on empty input.
double dtw_distance(const VectorSequence& a, const VectorSequence& b, Metric metric = Metric::Euclidean);

/// Treats each MFCC column (time frame) as one vector.
VectorSequence frames_of(const MfccSeries& m);

}  // namespace vahf::dsp
