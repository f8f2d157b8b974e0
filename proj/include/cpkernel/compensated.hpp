#pragma once

#include <cmath>

namespace cpkernel {

/// Kahan compensated accumulator.  Keeps summation error at the level of a
/// couple of ulps of the running sum, independent of the number of terms.
template <class T>
struct BasicKahanSum {
  T sum = 0;
  T carry = 0;

  void add(T x) {
    const T y = x - carry;
    const T t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  T value() const { return sum; }
};

using KahanSum = BasicKahanSum<double>;
}  // namespace cpkernel
