#!/usr/bin/env python3
"""Emit include/nblab/detail/bernoulli_table.hpp: B_{2k}/(2k)! for k = 1..100."""
import mpmath

mpmath.mp.dps = 40
K = 100
print("// Generated by tools/gen_bernoulli_table.py. Do not edit.")
print("#pragma once")
print()
print("#include <array>")
print()
print("namespace nblab::detail {")
print()
print("/// B_{2k}/(2k)! for k = 1..%d, stored at index k-1." % K)
print("inline constexpr std::array<double, %d> kBernoulliOverFactorial{{" % K)
for k in range(1, K + 1):
    v = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
    print("    %s," % mpmath.nstr(v, 20))
print("}};")
print()
print("}  // namespace nblab::detail")
