#!/usr/bin/env python3
# Copyright 2026 The cimotifs Authors
# SPDX-License-Identifier: Apache-2.0
"""Emit one reduction routine per array size m in [2, max_elements].

Routine m keeps the m array elements in m named scalars a1..am, reduces each
over the collapsed (outer, inner) loop nest as an independent scalar
reduction, and writes them back to a[0..m-1].

Output depends only on --max-elements, so the header is reproducible.
"""

import argparse
import sys

CEILING = 256
FLOOR = 2


def csv(prefix, n):
    return ", ".join(f"{prefix}{i}" for i in range(1, n + 1))


def routine(m):
    lines = []
    lines.append("template <class Term>")
    lines.append(f"void reduction{m}(std::int64_t outer, std::int64_t inner, const Term& term, "
                 "float* a, int workers) {")
    for i in range(1, m + 1):
        lines.append(f"  float a{i} = a[{i - 1}];")
    lines.append("#pragma omp parallel for collapse(2) schedule(static) num_threads(workers) \\")
    lines.append(f"    reduction(+ : {csv('a', m)})")
    lines.append("  for (std::int64_t i = 0; i < outer; ++i) {")
    lines.append("    for (std::int64_t j = 0; j < inner; ++j) {")
    for i in range(1, m + 1):
        lines.append(f"      a{i} += term(i, j, {i - 1});")
    lines.append("    }")
    lines.append("  }")
    for i in range(1, m + 1):
        lines.append(f"  a[{i - 1}] = a{i};")
    lines.append("}")
    return "\n".join(lines)


def header(max_elements):
    out = []
    out.append("// Copyright 2026 The cimotifs Authors")
    out.append("// SPDX-License-Identifier: Apache-2.0")
    out.append("//")
    out.append(f"// Generated by codegen/gen_scalar_reductions.py --max-elements {max_elements}.")
    out.append("// Do not edit; rerun the generator instead.")
    out.append("")
    out.append("#pragma once")
    out.append("")
    out.append("#include <cstddef>")
    out.append("#include <cstdint>")
    out.append("")
    out.append("namespace cimotifs::generated {")
    out.append("")
    out.append(f"inline constexpr std::size_t kMinElements = {FLOOR};")
    out.append(f"inline constexpr std::size_t kMaxElements = {max_elements};")
    out.append("")
    out.append("template <class Term>")
    out.append("using ScalarReduction = void (*)(std::int64_t, std::int64_t, const Term&, float*, int);")
    out.append("")
    for m in range(FLOOR, max_elements + 1):
        out.append(routine(m))
        out.append("")
    out.append("/// Routine for a size known at compile time; sizes outside the generated")
    out.append("/// range fail to build.")
    out.append("template <std::size_t M, class Term>")
    out.append("constexpr ScalarReduction<Term> scalar_reduction_fixed() noexcept {")
    out.append("  static_assert(M >= kMinElements && M <= kMaxElements,")
    out.append("                \"no generated scalar reduction for this array size\");")
    out.append("  if constexpr (false) {")
    for m in range(FLOOR, max_elements + 1):
        out.append(f"  }} else if constexpr (M == {m}) {{")
        out.append(f"    return &reduction{m}<Term>;")
    out.append("  } else {")
    out.append("    return nullptr;")
    out.append("  }")
    out.append("}")
    out.append("")
    out.append("/// Routine for a runtime size, or nullptr outside the generated range.")
    out.append("template <class Term>")
    out.append("ScalarReduction<Term> scalar_reduction(std::size_t m) noexcept {")
    out.append("  switch (m) {")
    for m in range(FLOOR, max_elements + 1):
        out.append(f"    case {m}: return &reduction{m}<Term>;")
    out.append("    default: return nullptr;")
    out.append("  }")
    out.append("}")
    out.append("")
    out.append("}  // namespace cimotifs::generated")
    out.append("")
    return "\n".join(out)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-elements", type=int, default=CEILING)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()
    if args.max_elements > CEILING:
        print(f"error: --max-elements {args.max_elements} exceeds the ceiling of {CEILING}",
              file=sys.stderr)
        return 2
    if args.max_elements < FLOOR:
        print(f"error: --max-elements must be >= {FLOOR}", file=sys.stderr)
        return 2
    text = header(args.max_elements)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
