#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsphere/admm.hpp"
#include "qsphere/discretize.hpp"
#include "qsphere/rnewton.hpp"

namespace qsphere {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream& out) const;
};

struct ReplicateOptions {
    std::uint64_t seed = 42;
    /// Largest grid for the mesh-refinement tables.
    int max_N = 65;
    /// Restrict the strong-interaction table to one β; ≤ 0 runs all three.
    double beta = 0.0;
    bool run_oracle = true;
};

/// Penalties used for the mesh-refinement comparisons, by (dim, β, N).
double tuned_rho(int dim, double beta, int N);

/// The trap on [−1,1]² with initial state x·e^{−(x²+y²)/2}/‖·‖ (the
/// asymmetric start of the excited-state experiment).
BecSpec excited_state_spec();
Vector excited_state_init(const BecSpec& spec);

/// Solves each mesh from the prolongated previous solution. Reports are in
/// mesh order; wall_seconds accumulates from the coarsest mesh.
struct RefinementRun {
    int N = 0;
    SolveReport rn;
    SolveReport admm;
};
std::vector<RefinementRun> mesh_refinement(int dim, double beta, const std::vector<int>& Ns);

Table replicate_table1(const ReplicateOptions& opts);
Table replicate_table4(const ReplicateOptions& opts);
Table replicate_table5(const ReplicateOptions& opts);
Table replicate_table6(const ReplicateOptions& opts);
Table replicate_example55(const ReplicateOptions& opts);
/// (ρ, k, nrmG) series on the 2D β = 0.5, N = 33 instance, 200 outer steps.
Table replicate_figure2(const ReplicateOptions& opts);

/// Dispatch by name: 1, 4, 5, 6, example5.5, figure2.
Table replicate(const std::string& which, const ReplicateOptions& opts);

}  // namespace qsphere
