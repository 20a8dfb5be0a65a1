#pragma once

#include "pmsfem/gmsfem/offline.hpp"
#include "pmsfem/mesher/coarse_grid.hpp"

namespace pmsfem::gmsfem {

/// Coarse P1 hat functions sampled at the nodes of a fine finite element space.
struct PartitionOfUnity {
  std::size_t num_coarse_nodes = 0;
  std::vector<linalg::Vector> values;  ///< values[i][fine node]

  double at(int coarse_node, int fine_node) const {
    return values[static_cast<std::size_t>(coarse_node)][static_cast<std::size_t>(fine_node)];
  }
};

PartitionOfUnity build_partition_of_unity(const mesher::CoarseGrid& coarse, const fem::FeSpace& space);

enum class RankPolicy {
  Throw,  ///< RankDeficientCoarseSpace when the rows are linearly dependent
  Drop,   ///< remove rows found dependent by the pivoted factorization
};

struct CoarseSpace {
  linalg::CsrMatrix R;                       ///< one row per coarse basis function, over all fine DOFs
  std::vector<int> row_node;                 ///< coarse node of each row
  std::vector<int> row_mode;                 ///< offline mode index of each row
  std::vector<std::size_t> dropped;          ///< candidate rows removed by RankPolicy::Drop

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(R.rows()); }
};

/// Rows χ_i ψ_k for every coarse node i and retained mode k, zeroed on
/// constrained DOFs. Linear independence is checked with a pivoted Cholesky
/// of the mass Gram matrix (relative cutoff `rank_tol`).
CoarseSpace assemble_coarse_space(const fem::FineSystem& system, const PartitionOfUnity& pou, const std::vector<LocalBasis>& bases,
                                  RankPolicy policy = RankPolicy::Throw, double rank_tol = 1e-10);

enum class CoarsePressure {
  CoarseNodes,  ///< continuous piecewise linear on the coarse grid
  CoarseCells,  ///< piecewise constant on coarse triangles
  FineNodes,    ///< the fine P1 pressure space
};

struct CoarseSolution {
  linalg::Vector coefficients;  ///< coarse velocity or primary field coefficients
  linalg::Vector coarse_pressure;
  fem::Solution fine;           ///< downscaled to the fine space
};

/// Galerkin solve on the coarse space for Laplace and elasticity, followed by
/// iterative refinement. Throws SingularCoarseMatrix.
CoarseSolution coarse_solve(const CoarseSpace& space, const fem::FineSystem& system);

/// Mixed coarse Stokes solve with a mean-zero pressure, through the pressure
/// Schur complement. Throws CoarseInfSupFailure when the coarse pair has more
/// than the constant pressure in its discrete divergence kernel.
CoarseSolution coarse_solve_stokes(const CoarseSpace& space, const fem::FineSystem& system, const mesher::FineMesh& mesh,
                                   const mesher::CoarseGrid& coarse, CoarsePressure pressure = CoarsePressure::CoarseNodes);

} // namespace pmsfem::gmsfem
