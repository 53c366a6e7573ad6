#pragma once

#include <vector>

#include "tdaf/linalg.hpp"

namespace tdaf::detail {

// Emits scale * m at block offset (row_off, col_off). Rows r with
// (*skip_rows)[r] != 0 are left out so the caller can replace them.
inline void append_block(std::vector<Triplet>& out, const SparseMatrix& m, int row_off, int col_off, double scale,
                         const std::vector<char>* skip_rows) {
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (skip_rows && (*skip_rows)[it.row()]) continue;
      out.emplace_back(row_off + it.row(), col_off + c, scale * it.value());
    }
  }
}

// Same for scale * m^T; skip_rows indexes rows of the transpose.
inline void append_transposed_block(std::vector<Triplet>& out, const SparseMatrix& m, int row_off, int col_off,
                                    double scale, const std::vector<char>* skip_rows) {
  for (int c = 0; c < m.outerSize(); ++c) {
    if (skip_rows && (*skip_rows)[c]) continue;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      out.emplace_back(row_off + c, col_off + it.row(), scale * it.value());
    }
  }
}

}  // namespace tdaf::detail
