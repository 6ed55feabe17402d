#include "ctxsal/labels.hpp"

#include <algorithm>

namespace ctxsal {

double sal_object(const BinaryMask& m, const BinaryMask& s) {
  const auto area = mask_area(m);
  if (area == 0) throw Error(ErrorCode::EmptyMask, "sal_object of an empty proposal");
  return static_cast<double>(intersection_area(m, s)) / static_cast<double>(area);
}

double sal_context(const BinaryMask& m, const BinaryMask& c, const BinaryMask& s) {
  const auto context_area = mask_area(c);
  if (context_area == 0) throw Error(ErrorCode::EmptyContext, "sal_context with an empty context");
  const double inside = sal_object(m, s);
  const double outside = static_cast<double>(intersection_area(c, s)) / static_cast<double>(context_area);
  return std::max(inside - outside, 0.0);
}

}  // namespace ctxsal
