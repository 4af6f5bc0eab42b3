#!/usr/bin/env python3
"""Minimal SMT-LIB2 runner: bridges the external-solver client to python-z3.

Usage: smt_shim.py <script.smt2>
Prints sat/unsat/unknown and, on sat, (define-fun ...) model lines.
"""
import sys

try:
    import z3
except ImportError:
    print("unknown")
    sys.exit(0)


def main() -> int:
    if len(sys.argv) != 2:
        print("unknown")
        return 0
    solver = z3.Solver()
    solver.from_file(sys.argv[1])
    verdict = solver.check()
    if verdict == z3.sat:
        print("sat")
        model = solver.model()
        for decl in model.decls():
            value = model[decl]
            if z3.is_bv_value(value):
                width = value.size()
                print(
                    f"(define-fun {decl.name()} () (_ BitVec {width}) "
                    f"#b{value.as_long():0{width}b})"
                )
    elif verdict == z3.unsat:
        print("unsat")
    else:
        print("unknown")
    return 0


if __name__ == "__main__":
    sys.exit(main())
