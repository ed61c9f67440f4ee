#pragma once

#include "parnorm/norms.hpp"

namespace parnorm::detail {

// Maximizes num(A x) / den(x) over nonzero x in the column span of `basis`
// (orthonormal columns) by multi-start sampling followed by a pattern search
// along the projected coordinate and coordinate-difference directions.
template <class S>
NormEstimate<S> maximize_ratio(const Mat<S>& a, const Mat<S>& basis, const NormSpec<S>& num,
                               const NormSpec<S>& den, const SearchOptions& opts);

}  // namespace parnorm::detail
