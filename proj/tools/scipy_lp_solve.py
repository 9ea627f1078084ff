#!/usr/bin/env python3
"""Solve a CPLEX LP file with scipy's HiGHS MILP interface.

Usage: scipy_lp_solve.py MODEL.lp SOLUTION.txt [--time-limit SECONDS] [--presolve]

HiGHS presolve is off by default: on the threshold models, whose big-M rows
separate states by an eps close to the solver's feasibility tolerance, it
has reported suboptimal points as optimal.

Reads the LP subset written by prepaid (Maximize/Minimize, Subject To,
Bounds, Binary/General, End) and writes `status <word>` followed by one
`name value` line per variable.
"""

import argparse
import math
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_array

TOKEN = re.compile(
    r"<=|>=|=<|=>|[<>=]|[+-]|:"
    r"|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?![\w.])"
    r"|[^\s:<>=+-]+"
)
SECTIONS = {
    "maximize": "max", "maximise": "max", "maximum": "max", "max": "max",
    "minimize": "min", "minimise": "min", "minimum": "min", "min": "min",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binary": "bin", "binaries": "bin", "bin": "bin",
    "general": "gen", "generals": "gen", "gen": "gen",
    "end": "end",
}


def is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return tok.lower() in ("inf", "infinity")


def to_float(tok):
    low = tok.lower()
    if low in ("inf", "infinity", "+inf", "+infinity"):
        return math.inf
    if low in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


class Model:
    def __init__(self):
        self.names = []
        self.index = {}
        self.sense = "max"
        self.objective = {}
        self.rows = []  # (name, {var: coef}, op, rhs)
        self.lower = {}
        self.upper = {}
        self.integer = set()
        self.binary = set()

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
        return self.index[name]


def parse_linear(tokens):
    """Terms from tokens like ['+', '2', 'x', '-', 'y']; returns {name: coef}."""
    terms = {}
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if is_number(tok) and coef is None:
            coef = float(tok)
            continue
        value = sign * (1.0 if coef is None else coef)
        terms[tok] = terms.get(tok, 0.0) + value
        sign, coef = 1.0, None
    return terms


def split_label(tokens):
    if len(tokens) >= 2 and tokens[1] == ":":
        return tokens[0], tokens[2:]
    return None, tokens


def parse(path):
    model = Model()
    section = None
    buffer = []

    def flush_row():
        if not buffer:
            return
        name, toks = split_label(buffer)
        ops = [i for i, t in enumerate(toks) if t in ("<=", ">=", "=", "<", ">", "=<", "=>")]
        if not ops:
            raise ValueError("constraint without a sense: " + " ".join(buffer))
        i = ops[0]
        op = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">="}.get(toks[i], toks[i])
        rhs_toks = toks[i + 1:]
        rhs = to_float("".join(rhs_toks))
        terms = parse_linear(toks[:i])
        for n in terms:
            model.var(n)
        model.rows.append((name or "r%d" % len(model.rows), terms, op, rhs))
        buffer.clear()

    with open(path) as fh:
        for raw in fh:
            line = raw.split("\\", 1)[0].strip()
            if not line:
                continue
            key = " ".join(line.lower().split())
            if key in SECTIONS:
                if section == "st":
                    flush_row()
                section = SECTIONS[key]
                if section in ("max", "min"):
                    model.sense = section
                continue
            toks = TOKEN.findall(line)
            if section in ("max", "min"):
                _, toks = split_label(toks)
                for n, c in parse_linear(toks).items():
                    model.var(n)
                    model.objective[n] = model.objective.get(n, 0.0) + c
            elif section == "st":
                if buffer and split_label(toks)[0] is not None:
                    flush_row()
                buffer.extend(toks)
                if any(t in ("<=", ">=", "=", "<", ">", "=<", "=>") for t in buffer) and not (
                    buffer[-1] in ("<=", ">=", "=", "<", ">", "=<", "=>", "-", "+")
                ):
                    flush_row()
            elif section == "bounds":
                parse_bound(model, line)
            elif section in ("bin", "gen"):
                for n in line.split():
                    model.var(n)
                    (model.binary if section == "bin" else model.integer).add(n)
            elif section == "end":
                break
    return model


def parse_bound(model, line):
    parts = line.replace("<=", " <= ").replace(">=", " >= ").split()
    if len(parts) == 2 and parts[1].lower() == "free":
        model.var(parts[0])
        model.lower[parts[0]] = -math.inf
        model.upper[parts[0]] = math.inf
    elif len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
        model.var(parts[2])
        model.lower[parts[2]] = to_float(parts[0])
        model.upper[parts[2]] = to_float(parts[4])
    elif len(parts) == 3 and parts[1] in ("<=", ">=", "="):
        name, op, val = parts
        if is_number(name):
            name, val = val, name
            op = {"<=": ">=", ">=": "<="}.get(op, op)
        model.var(name)
        v = to_float(val)
        if op in ("<=", "="):
            model.upper[name] = v
        if op in (">=", "="):
            model.lower[name] = v
    else:
        raise ValueError("unsupported bound: " + line)


def solve(model, time_limit, presolve=False):
    n = len(model.names)
    c = np.zeros(n)
    for name, coef in model.objective.items():
        c[model.index[name]] = coef
    if model.sense == "max":
        c = -c
    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    integrality = np.zeros(n)
    for name, i in model.index.items():
        if name in model.binary:
            lb[i], ub[i] = 0.0, 1.0
            integrality[i] = 1
        if name in model.integer:
            integrality[i] = 1
        if name in model.lower:
            lb[i] = model.lower[name]
        if name in model.upper:
            ub[i] = model.upper[name]
    constraints = []
    if model.rows:
        r, cidx, vals, lo, hi = [], [], [], [], []
        for k, (_, terms, op, rhs) in enumerate(model.rows):
            for name, coef in terms.items():
                r.append(k)
                cidx.append(model.index[name])
                vals.append(coef)
            lo.append(rhs if op in (">=", "=") else -np.inf)
            hi.append(rhs if op in ("<=", "=") else np.inf)
        A = coo_array((vals, (r, cidx)), shape=(len(model.rows), n)).tocsr()
        constraints.append(LinearConstraint(A, lo, hi))
    options = {"presolve": presolve}
    if time_limit:
        options["time_limit"] = time_limit
    return milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(lb, ub), options=options)


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--presolve", action="store_true", help="enable HiGHS presolve")
    args = ap.parse_args(argv)

    model = parse(args.lp)
    res = solve(model, args.time_limit, args.presolve)
    if res.status == 0:
        status = "optimal"
    elif res.x is not None:
        status = "feasible"
    elif res.status == 2:
        status = "infeasible"
    else:
        status = "error"
    with open(args.sol, "w") as out:
        out.write("status %s\n" % status)
        if res.x is not None:
            for name, value in zip(model.names, res.x):
                if name in model.binary or name in model.integer:
                    value = float(round(value))
                out.write("%s %r\n" % (name, float(value)))
    print("scipy milp: %s (%s)" % (status, res.message))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
