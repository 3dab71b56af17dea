#!/usr/bin/env python3
"""Regenerate the solved operating points stored in data/case*.m.

Parses each MATPOWER case, solves the AC power flow with SciPy's MINPACK
root finder (an implementation wholly independent of the C++ solver in this
repository), sanity-checks the result, and rewrites the bus-matrix Vm/Va
columns with the high-precision solution. The stored voltages serve as the
reference values the C++ Newton-Raphson solver is tested against.

Usage: python3 scripts/solve_cases.py [data/case14.m ...]
"""

import re
import sys

import numpy as np
from scipy.optimize import root

PQ, PV, SLACK = 1, 2, 3


def parse_matrix(text, name):
    m = re.search(r"mpc\.%s\s*=\s*\[(.*?)\];" % name, text, re.S)
    if m is None:
        raise ValueError("matrix %s not found" % name)
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";")
        if not line:
            continue
        rows.append([float(tok) for tok in line.split()])
    return np.array(rows)


def parse_case(path):
    text = open(path).read()
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([\d.eE+-]+)\s*;", text).group(1))
    return {
        "base": base,
        "bus": parse_matrix(text, "bus"),
        "gen": parse_matrix(text, "gen"),
        "branch": parse_matrix(text, "branch"),
        "text": text,
    }


def build_ybus(case):
    bus, branch, base = case["bus"], case["branch"], case["base"]
    n = bus.shape[0]
    idx = {int(b): i for i, b in enumerate(bus[:, 0])}
    Y = np.zeros((n, n), dtype=complex)
    for row in branch:
        if row[10] == 0:
            continue
        f, t = idx[int(row[0])], idx[int(row[1])]
        ys = 1.0 / complex(row[2], row[3])
        bc = row[4]
        tap = row[8] if row[8] != 0 else 1.0
        shift = np.deg2rad(row[9])
        tcplx = tap * np.exp(1j * shift)
        Y[f, f] += (ys + 1j * bc / 2) / (tap * tap)
        Y[f, t] += -ys / np.conj(tcplx)
        Y[t, f] += -ys / tcplx
        Y[t, t] += ys + 1j * bc / 2
    for i in range(n):
        Y[i, i] += complex(bus[i, 4], bus[i, 5]) / base
    return Y, idx


def solve_case(case):
    bus, gen, base = case["bus"], case["gen"], case["base"]
    n = bus.shape[0]
    Y, idx = build_ybus(case)
    types = bus[:, 1].astype(int)
    slack = int(np.where(types == SLACK)[0][0])
    pv = np.where(types == PV)[0]
    pq = np.where(types == PQ)[0]
    non_slack = np.array([i for i in range(n) if i != slack])

    # net specified injections, per unit
    p_spec = -bus[:, 2] / base
    q_spec = -bus[:, 3] / base
    vset = np.ones(n)
    vset[pq] = 1.0
    for row in gen:
        if row[7] <= 0:
            continue
        i = idx[int(row[0])]
        p_spec[i] += row[1] / base
        vset[i] = row[5]
    slack_ang = np.deg2rad(bus[slack, 8])

    def unpack(z):
        th = np.full(n, slack_ang)
        vm = vset.copy()
        th[non_slack] = z[: n - 1]
        vm[pq] = z[n - 1 :]
        return th, vm

    def residual(z):
        th, vm = unpack(z)
        V = vm * np.exp(1j * th)
        S = V * np.conj(Y @ V)
        dp = p_spec[non_slack] - S.real[non_slack]
        dq = q_spec[pq] - S.imag[pq]
        return np.concatenate([dp, dq])

    z0 = np.concatenate([np.full(n - 1, slack_ang), np.ones(len(pq))])
    sol = root(residual, z0, method="hybr", tol=1e-13)
    res = residual(sol.x)
    if not sol.success or np.max(np.abs(res)) > 1e-10:
        raise RuntimeError("power flow did not converge: %s, |F|=%g"
                           % (sol.message, np.max(np.abs(res))))
    th, vm = unpack(sol.x)
    return th, vm, np.max(np.abs(res))


def check_connected(case):
    bus, branch = case["bus"], case["branch"]
    idx = {int(b): i for i, b in enumerate(bus[:, 0])}
    n = bus.shape[0]
    adj = [[] for _ in range(n)]
    for row in branch:
        if row[10] == 0:
            continue
        f, t = idx[int(row[0])], idx[int(row[1])]
        adj[f].append(t)
        adj[t].append(f)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        raise RuntimeError("network is not connected: %d of %d buses reachable"
                           % (len(seen), n))


def rewrite(path, case, th, vm):
    bus = case["bus"]
    lines = []
    for i in range(bus.shape[0]):
        row = bus[i].copy()
        row[7] = vm[i]
        row[8] = np.rad2deg(th[i])
        cells = []
        for j, v in enumerate(row):
            if j in (7, 8):
                cells.append("%.12g" % v)
            else:
                cells.append("%g" % v)
        lines.append("\t" + "\t".join(cells) + ";")
    new_matrix = "mpc.bus = [\n" + "\n".join(lines) + "\n];"
    text = re.sub(r"mpc\.bus\s*=\s*\[.*?\];", new_matrix, case["text"], flags=re.S)
    open(path, "w").write(text)


def main(paths):
    for path in paths:
        case = parse_case(path)
        check_connected(case)
        th, vm, worst = solve_case(case)
        load = case["bus"][:, 2].sum()
        gen_p = case["gen"][case["gen"][:, 7] > 0, 1].sum()
        print("%s: N=%d M=%d gens=%d load=%.1f MW genP=%.1f MW  "
              "V in [%.4f, %.4f]  |F|max=%.2e"
              % (path, case["bus"].shape[0], case["branch"].shape[0],
                 case["gen"].shape[0], load, gen_p, vm.min(), vm.max(), worst))
        if vm.min() < 0.85 or vm.max() > 1.15:
            raise RuntimeError("solved voltages outside plausible band")
        rewrite(path, case, th, vm)


if __name__ == "__main__":
    args = sys.argv[1:] or ["data/case14.m", "data/case30.m",
                            "data/case57.m", "data/case118.m"]
    main(args)
