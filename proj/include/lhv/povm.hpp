#pragma once

#include "lhv/bloch.hpp"
#include "lhv/interval.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lhv {

// An extremal qubit POVM element a*I + avec.sigma with a = |avec|
// (rank-1-proportional). A valid POVM has at most four elements with
// sum a_i = 1 and sum avec_i = 0. Noise enters as M_i(mu) = a_i*I +
// mu*avec_i.sigma through operation parameters, never the stored data.
struct PovmElement {
    double a = 0.0;
    BlochVector avec;
};

struct Povm {
    std::vector<PovmElement> elements;
};

bool validate_povm(const Povm& p, double tol = 1e-12);

struct PairInfo {
    int i = 0;
    int j = 0;
    double cos_theta = 0.0;
};

// The pair of nonzero elements with the most negative normalized inner
// product. For four nonzero elements the value is guaranteed <= -1/3, for
// three <= -1/2; a violation (impossible for valid input) raises
// InternalError.
PairInfo find_pair(const Povm& p);

struct PeelStep {
    double p = 0.0;        // projector weight
    BlochVector b;         // projector axis; outcome i gets (I + b.sigma)/2
    int i = 0;
    int j = 0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    Povm residual;         // valid POVM carrying the remaining weight
};

// Extracts a projective measurement from the noisy POVM on the given pair,
// leaving a residual POVM at the same mu. Returns nullopt when no positive
// weight can be peeled for this pair at this mu.
std::optional<PeelStep> peel(const Povm& p, double mu, int i, int j);

struct DecompositionItem {
    double weight = 0.0;
    BlochVector b;
    int i = 0;
    int j = 0;
};

struct PovmDecomposition {
    std::vector<DecompositionItem> items;
    double residual_weight = 1.0;
    Povm residual;
    bool complete = false;
    int steps = 0;
};

// Iteratively peels the maximal-p admissible pair (ties to the lowest index
// pair) until the residual weight drops below tol_weight, the residual
// becomes a projective pair (finished exactly with two items along its axis),
// or max_steps is reached (incomplete).
PovmDecomposition decompose(const Povm& p, double mu, double tol_weight = 1e-6,
                            int max_steps = 10000);

// Probability of outcome i for a qubit state with Bloch vector r under the
// decomposition's mixture (test/reporting helper mirroring a_i + mu avec_i.r).
double decomposition_outcome_probability(const PovmDecomposition& d, double mu, int outcome,
                                         int n_outcomes, const BlochVector& r);

// Max elementwise reconstruction error of the original M(mu) in (a, mu*avec)
// form.
double reconstruction_error(const PovmDecomposition& d, const Povm& original, double mu);

// (2/3) * v1, outward rounded: the POVM visibility implied by a projective
// visibility bound v1.
Interval povm_visibility_bound(const Interval& v1);

// Deterministic random valid POVM: mean-centered gaussian vectors normalized
// so the scalar parts sum to one. outcomes must be 3 or 4.
Povm random_extremal_povm(uint64_t seed, int outcomes);

// Structured text: "mu:" optional when embedded in decomposition output;
// elements one per line as "element: a ax ay az".
void write_povm(const Povm& p, const std::string& path);
Povm read_povm(const std::string& path);
void write_povm_decomposition(const PovmDecomposition& d, double mu, const std::string& path);

} // namespace lhv
