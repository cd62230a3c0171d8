#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Solve a CPLEX-LP file with an external MILP solver (HiGHS via scipy).

Usage: solve_lp.py <model.lp>
Prints "objective <value>" on success. Supports the LP subset this project
emits: Maximize / Subject To / Bounds / Binaries / Generals / End, with
expressions possibly wrapped across continuation lines.
"""
import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, Bounds, milp

TOKEN = re.compile(r"<=|>=|=|\+|-|[A-DF-Za-df-z_][A-Za-z0-9_]*|[0-9][0-9.eE+-]*|\.[0-9]+")


def tokenize(text):
    return TOKEN.findall(text)


def parse_terms(tokens):
    """tokens -> list[(coef, name)], trailing (relation, rhs) if present."""
    terms, rel, rhs = [], None, None
    sign, coef = 1.0, None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("<=", ">=", "="):
            rel = tok
            rhs = float(tokens[i + 1]) if tokens[i + 1] not in ("+", "-") else float(tokens[i + 1] + tokens[i + 2])
            break
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                coef = float(tok)
            except ValueError:
                terms.append((sign * (1.0 if coef is None else coef), tok))
                sign, coef = 1.0, None
        i += 1
    return terms, rel, rhs


def main(path):
    sections = {"objective": [], "constraints": [], "bounds": [], "binaries": [], "generals": []}
    section = None
    for raw in open(path):
        line = raw.split("\\")[0].rstrip("\n")
        stripped = line.strip()
        if not stripped:
            continue
        if stripped in ("Maximize", "Minimize"):
            section = "objective"
            sense = 1.0 if stripped == "Maximize" else -1.0
            continue
        if stripped == "Subject To":
            section = "constraints"
            continue
        if stripped == "Bounds":
            section = "bounds"
            continue
        if stripped == "Binaries":
            section = "binaries"
            continue
        if stripped == "Generals":
            section = "generals"
            continue
        if stripped == "End":
            break
        sections[section].append(stripped)

    # constraint starts carry a "label:" prefix; continuation lines do not
    blocks = []
    for line in sections["constraints"]:
        if re.match(r"^[A-Za-z_][A-Za-z0-9_]*\s*:", line):
            blocks.append(line.split(":", 1)[1])
        else:
            blocks[-1] += " " + line
    obj_text = " ".join(sections["objective"])
    obj_text = obj_text.split(":", 1)[1] if ":" in obj_text else obj_text

    names = {}

    def nid(name):
        return names.setdefault(name, len(names))

    obj_terms, _, _ = parse_terms(tokenize(obj_text))
    cons = []
    for block in blocks:
        terms, rel, rhs = parse_terms(tokenize(block))
        cons.append((terms, rel, rhs))
        for _, name in terms:
            nid(name)
    for _, name in obj_terms:
        nid(name)
    for line in sections["binaries"] + sections["generals"]:
        for name in tokenize(line):
            nid(name)

    n = len(names)
    c = np.zeros(n)
    for coef, name in obj_terms:
        c[nid(name)] += -sense * coef  # milp minimizes

    rows, cols, vals, lo, hi = [], [], [], [], []
    for r, (terms, rel, rhs) in enumerate(cons):
        for coef, name in terms:
            rows.append(r)
            cols.append(nid(name))
            vals.append(coef)
        if rel == "<=":
            lo.append(-np.inf)
            hi.append(rhs)
        elif rel == ">=":
            lo.append(rhs)
            hi.append(np.inf)
        else:
            lo.append(rhs)
            hi.append(rhs)
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(cons), n))

    integrality = np.zeros(n)
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    for line in sections["binaries"]:
        for name in tokenize(line):
            integrality[nid(name)] = 1
            upper[nid(name)] = 1.0
    for line in sections["generals"]:
        for name in tokenize(line):
            integrality[nid(name)] = 1

    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integrality,
               bounds=Bounds(lower, upper))
    if not res.success:
        print("solve failed:", res.message, file=sys.stderr)
        return 1
    print("objective %.9f" % (-res.fun if sense > 0 else res.fun))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
