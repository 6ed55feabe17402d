#pragma once

#include "ctxsal/types.hpp"

namespace ctxsal {

/// Fraction of proposal pixels that are salient: |M ∩ S| / |M|.
double sal_object(const BinaryMask& m, const BinaryMask& s);

/// Salient fraction of M minus salient fraction of its context, clamped at 0.
double sal_context(const BinaryMask& m, const BinaryMask& c, const BinaryMask& s);

}  // namespace ctxsal
