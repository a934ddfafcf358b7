#pragma once

#include <cstddef>
#include <vector>

namespace leafwalk::projdyn {

// Minimum-cost perfect matching on a dense n x n cost matrix (row-major).
// Shortest augmenting paths with vertex potentials, O(n^3).
//
// Returns the optimal total cost; `row_to_col[i]` receives the column
// assigned to row i.
double solve_assignment(const std::vector<double>& cost, std::size_t n, std::vector<std::size_t>& row_to_col);

}  // namespace leafwalk::projdyn
