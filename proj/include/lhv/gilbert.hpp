#pragma once

#include "lhv/correlation.hpp"
#include "lhv/polytope.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lhv {

// State of the distance-to-polytope iteration. The decomposition weights are
// kept lazily scaled: true weight = weight_scale * weights_raw[i], which makes
// the per-step global rescale O(1).
struct GilbertState {
    uint64_t iteration = 0;
    CorrelationMatrix target;
    CorrelationMatrix current;
    std::vector<DeterministicStrategy> strategies;
    std::vector<double> weights_raw;
    double weight_scale = 1.0;
    double distance = 0.0;
    uint64_t seed = 0;          // opaque rng state: base seed for derived streams
    uint64_t renorm_count = 0;  // exact renormalizations performed (logged)

    std::unordered_map<DeterministicStrategy, size_t, StrategyHash> index;

    std::vector<double> true_weights() const;
    double weight_sum() const;
    ConvexDecomposition decomposition() const;
    CorrelationMatrix recompute_current() const;
    void renormalize_weights(); // exact rescale of raw weights to sum 1
    void rebuild_index();
};

// Oracle callback: given the gradient matrix G = target - current and the
// iteration counter (for seed derivation), return a vertex maximizing the
// overlap.
using OracleFn = std::function<OracleResult(const CorrelationMatrix& G, uint64_t iteration)>;

// Starts at the all-zero correlation point, represented as the uniform
// mixture of the all-plus strategy and its a-flipped partner.
GilbertState gilbert_init(const CorrelationMatrix& target, uint64_t seed);

// One iteration: oracle, exact line search on the segment, convex update.
// Returns false (state geometry unchanged, iteration still advances) when no
// progress is possible for this oracle answer. Distance never increases.
bool gilbert_step(GilbertState& state, const OracleFn& oracle);

enum class RunOutcome { Converged, IterationBudget };

struct RunOptions {
    double eps = 1e-5;
    uint64_t max_iters = 1000000;
    uint64_t checkpoint_every = 100000;
    std::string checkpoint_path;              // empty = no checkpointing
    std::function<void(const GilbertState&)> on_iteration; // trace hook
    std::function<void(const GilbertState&)> on_checkpoint;
};

// Iterates until distance <= eps or the iteration budget is exhausted,
// checkpointing periodically (atomic replace; a failed write leaves the
// previous checkpoint intact). Verifies at every checkpoint that the
// incrementally maintained current matches the decomposition within 1e-9.
RunOutcome gilbert_run(GilbertState& state, const RunOptions& opts, const OracleFn& oracle);

// Binary checkpoint: magic "GLBCKPT1", version, m, iteration, rng state,
// target hash, renormalization count, decomposition records, current matrix,
// distance, FNV-1a checksum.
void save_checkpoint(const GilbertState& state, const std::string& path);

// Loads a checkpoint; the caller supplies the target (the file stores only
// its hash, which is validated). Errors name the offending field.
GilbertState load_checkpoint(const std::string& path, const CorrelationMatrix& target);

// Reads only the decomposition records and m (for certification).
struct CheckpointSummary {
    int m = 0;
    uint64_t iteration = 0;
    double distance = 0.0;
    ConvexDecomposition decomposition;
};
CheckpointSummary read_checkpoint_summary(const std::string& path);

} // namespace lhv
