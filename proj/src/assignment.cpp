#include "leafwalk/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace leafwalk::projdyn {

double solve_assignment(const std::vector<double>& cost, std::size_t n, std::vector<std::size_t>& row_to_col) {
  if (cost.size() != n * n) throw std::invalid_argument("cost matrix size mismatch");
  row_to_col.assign(n, 0);
  if (n == 0) return 0.0;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // 1-based columns; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> col_owner(n + 1, kNone), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 0; row < n; ++row) {
    col_owner[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r = col_owner[col0];
      const double* crow = cost.data() + r * n;
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = crow[j - 1] - u[r + 1] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j] + 1] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (col_owner[col0] != kNone);
    do {
      const std::size_t col1 = way[col0];
      col_owner[col0] = col_owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[col_owner[j]] = j - 1;
  }
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + row_to_col[i]];
  return total;
}

}  // namespace leafwalk::projdyn
