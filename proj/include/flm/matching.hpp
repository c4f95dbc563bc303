#ifndef FLM_MATCHING_HPP
#define FLM_MATCHING_HPP

#include <optional>
#include <string>
#include <vector>

#include "flm/graph.hpp"

namespace flm {

// ---------------------------------------------------------------------------
// Cardinality / weighted matching engines
// ---------------------------------------------------------------------------

// Maximum cardinality matching via augmenting paths with blossom shrinking.
Matching max_cardinality_matching(const Graph& g);

int nu(const Graph& g); // size of a maximum matching

bool is_perfectly_matchable(const Graph& g);

// Among all matchings of size nu(g), one of minimum total cost.
// Costs must be nonnegative.
Matching min_cost_maximum_matching(const Graph& g, const std::vector<double>& cost);

// Minimum-cost perfect matching; throws infeasible_error if g has none.
Matching min_cost_perfect_matching(const Graph& g, const std::vector<double>& cost);

double matching_cost(const Graph& g, const Matching& m, const std::vector<double>& cost);

// ---------------------------------------------------------------------------
// Symmetric difference structure
// ---------------------------------------------------------------------------

struct AlternatingComponent {
    bool is_cycle = false;
    // Edge ids ordered along the walk; consecutive edges share a vertex.
    std::vector<int> edge_ids;
    // Parallel to edge_ids: true when the edge belongs to the second matching
    // (M' \ M), false when it belongs to the first (M \ M').
    std::vector<bool> in_second;
    // Vertices along the walk; for a path: edge_ids.size() + 1 entries,
    // for a cycle: edge_ids.size() entries (walk wraps around).
    std::vector<int> vertices;
};

// Decomposes M (*first*) symmetric-difference M' (*second*) into maximal
// alternating paths and cycles, deterministically ordered by lowest vertex.
std::vector<AlternatingComponent> symmetric_difference_components(const Graph& g,
                                                                  const Matching& m_first,
                                                                  const Matching& m_second);

// ---------------------------------------------------------------------------
// Fractional matchings, separation, decomposition
// ---------------------------------------------------------------------------

// z indexed by edge id of its graph.
struct FractionalMatching {
    std::vector<double> z;
};

enum class SeparationMode {
    general, // E[U] form: sum_{e in E[U]} z_e <= (|U|-1)/2
    perfect, // cut form:  sum_{e in delta(U)} z_e >= 1
};

struct OddSetCut {
    SeparationMode mode;
    std::vector<int> vertices; // the odd set U, sorted
    double lhs = 0.0;          // sum over E[U] (general) or delta(U) (perfect)
    double violation = 0.0;    // positive amount by which the constraint fails
};

// Exhaustive odd-set separation; caller guarantees degree constraints hold.
// Throws capability_error for |V| > 22 (extension point: Padberg-Rao
// minimum odd cut on a Gomory-Hu tree).
std::optional<OddSetCut> separate_odd_set(const Graph& g, const FractionalMatching& z,
                                          SeparationMode mode, double tol = 1e-7);

struct MatchingDecomposition {
    std::vector<Matching> matchings;  // each of cardinality nu(g)
    std::vector<double> coefficients; // positive, summing to 1
};

// Decomposes a feasible point of the maximum-matching polytope into a convex
// combination of at most 2|E| + |V| maximum matchings, by extending z to the
// doubled graph (copy of g plus one rung edge per vertex), then repeatedly
// peeling perfect matchings from the support.
MatchingDecomposition decompose_to_maximum_matchings(const Graph& g, const FractionalMatching& z);

// Reconstructs sum_M gamma_M * chi^M as an edge-indexed vector.
std::vector<double> reconstruct_marginals(const Graph& g, const MatchingDecomposition& d);

// Feasibility violations of z for the maximum-matching polytope description
// (nonnegativity, degree, total size, odd sets). Empty when feasible.
std::vector<std::string> check_pmm_feasible(const Graph& g, const FractionalMatching& z,
                                            double tol = 1e-7);

} // namespace flm

#endif
