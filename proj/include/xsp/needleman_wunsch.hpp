// Copyright 2026 The xsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Global sequence alignment with a linear gap model. Traceback is
// deterministic: diagonal beats a gap in B beats a gap in A on ties.

#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace xsp {

struct NwScoring {
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
};

struct NwResult {
  double score = 0.0;
  // (index in A, index in B) for every diagonal step, match or mismatch,
  // in increasing order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

template <typename SeqA, typename SeqB>
NwResult needleman_wunsch(const SeqA& a, const SeqB& b,
                          NwScoring scoring = {}) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<double>> h(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) h[i][0] = h[i - 1][0] + scoring.gap;
  for (std::size_t j = 1; j <= m; ++j) h[0][j] = h[0][j - 1] + scoring.gap;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double diag = h[i - 1][j - 1] +
                    (a[i - 1] == b[j - 1] ? scoring.match : scoring.mismatch);
      double up = h[i - 1][j] + scoring.gap;    // gap in B, consumes a[i-1]
      double left = h[i][j - 1] + scoring.gap;  // gap in A, consumes b[j-1]
      double best = diag;
      if (up > best) best = up;
      if (left > best) best = left;
      h[i][j] = best;
    }
  }
  NwResult result;
  result.score = h[n][m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      double diag = h[i - 1][j - 1] +
                    (a[i - 1] == b[j - 1] ? scoring.match : scoring.mismatch);
      if (h[i][j] == diag) {
        result.pairs.emplace_back(i - 1, j - 1);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && h[i][j] == h[i - 1][j] + scoring.gap) {
      --i;
      continue;
    }
    --j;
  }
  std::reverse(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace xsp
