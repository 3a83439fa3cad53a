#!/usr/bin/env python3
"""Regenerates the text data embedded into the library.

Basis sets come from the Basis Set Exchange, angular rules from scipy.
Both outputs are checked in; this script only needs to run when a table
changes.

    pip install basis_set_exchange scipy
    python3 scripts/gen_data.py
"""
import pathlib

import basis_set_exchange as bse
from scipy.integrate import lebedev_rule

ROOT = pathlib.Path(__file__).resolve().parent.parent
SYMBOLS = ["H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
           "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar"]
LETTERS = {0: "S", 1: "P"}


def write_basis(name):
    data = bse.get_basis(name, elements=list(range(1, 19)))
    lines = [f"# {name} for H-Ar, generated from the Basis Set Exchange"]
    for z, sym in enumerate(SYMBOLS, start=1):
        lines.append(f"ELEMENT {sym}")
        for shell in data["elements"][str(z)]["electron_shells"]:
            exps = shell["exponents"]
            # SP shells share exponents; they are split into separate S and P shells.
            for l, coefs in zip(shell["angular_momentum"], shell["coefficients"]):
                lines.append(f"SHELL {LETTERS[l]} {len(exps)}")
                for e, c in zip(exps, coefs):
                    lines.append(f"{float(e):.10E} {float(c):.10E}")
        lines.append("END")
    (ROOT / "data" / "basis" / f"{name}.basis").write_text("\n".join(lines) + "\n")


def write_lebedev():
    lines = ["# Lebedev angular rules: LEBEDEV <points> <degree>, then x y z weight (weights sum to 4pi)"]
    for degree in (7, 9, 15, 23, 29):
        pts, w = lebedev_rule(degree)
        lines.append(f"LEBEDEV {len(w)} {degree}")
        for i in range(len(w)):
            lines.append(f"{pts[0, i]: .17e} {pts[1, i]: .17e} {pts[2, i]: .17e} {w[i]:.17e}")
        lines.append("END")
    (ROOT / "data" / "lebedev.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    write_basis("sto-3g")
    write_basis("6-31g")
    write_lebedev()
