"""Acceptance suite.

Each criterion is a function returning ``(ok, detail)``. Under pytest every
criterion prints one ``PASS``/``FAIL`` line and then asserts; running the file
directly prints the same lines without pytest.
"""

import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qhc import classical as cl
from qhc import factorize as fz
from qhc import quantum as qm
from qhc.indexmap import IndexMap, enumerate_factorizations
from qhc.io import load_json, map_from_json, matrix_from_json
from qhc.sampler import random_density, random_hermitian, random_simplex, sample_classical

FIX = Path(__file__).resolve().parent.parent / "fixtures"
EXACT = 1e-12
INEQ = 1e-10


def fixture(name):
    return load_json(FIX / name)


def bipartitions(N):
    return [IndexMap.row_major(*f.factors) for f in enumerate_factorizations(N, 2)]


def criterion_1():
    """Mean, joint-view sum and factor correlation agree on the roulette observable."""
    F = cl.ClassicalObservable(fixture("observables/roulette_F.json")["values"])
    F1 = fixture("observables/lift_F1.json")["values"]
    F2 = fixture("observables/lift_F2.json")["values"]
    m = IndexMap.row_major(2, 2)
    factors = [np.array([1.0, -1.0]), np.array([1.0, -1.0])]
    assert np.array_equal(cl.lift_factor(m, 1, factors[0]).values, F1)
    assert np.array_equal(cl.lift_factor(m, 2, factors[1]).values, F2)
    F_tensor = m.to_tensor(F.values)

    start = time.perf_counter()
    worst = 0.0
    for seed in range(10_000):
        p = random_simplex(4, seed)
        direct = cl.mean(p, F)
        joint = float(np.sum(cl.joint_view(p, m).tensor() * F_tensor))
        corr = cl.mean_as_correlation(p, m, factors)
        worst = max(worst, abs(direct - joint), abs(direct - corr), abs(joint - corr))
    elapsed = time.perf_counter() - start
    ok = worst <= EXACT and elapsed < 5.0
    return ok, f"max pairwise diff {worst:.2e} (<= 1e-12), {elapsed:.2f}s (< 5s)"


def criterion_2():
    """Trace against the Kronecker product equals the product of lifts; lifts commute."""
    maps = {4: [(2, 2)], 6: [(2, 3), (3, 2)], 8: [(2, 4), (4, 2), (2, 2, 2)], 12: [(3, 4), (2, 6), (2, 2, 3)]}
    start = time.perf_counter()
    worst = worst_comm = 0.0
    for N, shapes in maps.items():
        for i in range(1000):
            seed = 1_000_000 * N + i
            rho = random_density(N, seed)
            shape = shapes[i % len(shapes)]
            m = IndexMap.row_major(*shape)
            facs = [random_hermitian(n, seed + 17 * (k + 1)) for k, n in enumerate(shape)]
            via_kron = qm.expectation(rho, qm.kron(facs))
            via_lifts = qm.mean_as_quantum_correlation(rho, m, facs)
            worst = max(worst, abs(via_kron - via_lifts))
            worst_comm = max(worst_comm, max(qm.lift_commutators(m, facs).values()))
    elapsed = time.perf_counter() - start
    ok = worst <= EXACT and worst_comm <= EXACT and elapsed < 60.0
    return ok, f"max diff {worst:.2e}, max commutator {worst_comm:.2e} (<= 1e-12), {elapsed:.2f}s (< 60s)"


def criterion_3():
    """Subadditivity sweeps, product-form slack and the Bell fixture."""
    sizes = [4, 6, 8, 12]
    violations = checks = 0
    min_slack = math.inf
    for i in range(10_000):
        N = sizes[i % 4]
        p = random_simplex(N, 3_000_000 + i)
        for m in bipartitions(N):
            r = cl.check_subadditivity(p, m, tol=INEQ)
            checks += 1
            violations += not r.holds
            min_slack = min(min_slack, r.slack)
    for i in range(1000):
        N = sizes[i % 4]
        rho = random_density(N, 4_000_000 + i)
        for m in bipartitions(N):
            r = qm.check_quantum_subadditivity(rho, m, tol=INEQ)
            checks += 1
            violations += not r.holds
            min_slack = min(min_slack, r.slack)

    # product-form inputs saturate the bound
    product_slack = 0.0
    for i in range(200):
        a, b = random_simplex(3, 5_000_000 + i).probs, random_simplex(4, 6_000_000 + i).probs
        m = IndexMap.row_major(3, 4)
        product_slack = max(product_slack, abs(cl.check_subadditivity(np.outer(a, b).ravel(), m).slack))
        ra, rb = random_density(2, 7_000_000 + i).entries, random_density(3, 8_000_000 + i).entries
        rep = qm.check_quantum_subadditivity(np.kron(ra, rb), IndexMap.row_major(2, 3))
        product_slack = max(product_slack, abs(rep.slack))

    bell = qm.check_quantum_subadditivity(matrix_from_json(fixture("matrices/bell.json")), IndexMap.row_major(2, 2))
    bell_err = max(abs(bell.S12), abs(bell.S1 - math.log(2)), abs(bell.S2 - math.log(2)))

    ok = violations == 0 and product_slack <= INEQ and bell_err <= EXACT
    return ok, (f"{violations} violations in {checks} checks (min slack {min_slack:.2e}), "
                f"product slack {product_slack:.2e} (<= 1e-10), Bell error {bell_err:.2e} (<= 1e-12)")


def criterion_4():
    """Strong subadditivity on 2x2x2, classical and quantum."""
    m = IndexMap.row_major(2, 2, 2)
    violations = 0
    min_slack = math.inf
    for i in range(10_000):
        r = cl.check_strong_subadditivity(random_simplex(8, 9_000_000 + i), m, tol=INEQ)
        violations += not r.holds
        min_slack = min(min_slack, r.slack)
    for i in range(1000):
        r = qm.check_quantum_ssa(random_density(8, 10_000_000 + i), m, tol=INEQ)
        violations += not r.holds
        min_slack = min(min_slack, r.slack)
    return violations == 0, f"{violations} violations in 11000 instances (min slack {min_slack:.2e})"


def criterion_5():
    """Kronecker products are recovered; rank-2 perturbations are rejected."""
    shapes = [(n, m) for n in (2, 3) for m in (2, 3, 4)]
    worst = 0.0
    failures = accepted = 0
    rng = np.random.default_rng(5)
    for i in range(1000):
        n, k = shapes[i % len(shapes)]
        m = IndexMap.row_major(n, k)
        a, b = random_hermitian(n, 11_000_000 + i), random_hermitian(k, 12_000_000 + i)
        target = np.kron(a, b)
        res = fz.factor_quantum(target, m)
        if not res.success:
            failures += 1
            continue
        worst = max(worst, float(np.max(np.abs(np.kron(*res.factors) - target))))

        c, d = random_hermitian(n, 13_000_000 + i), random_hermitian(k, 14_000_000 + i)
        weight = rng.uniform(0.1, 1.0)
        accepted += fz.factor_quantum(target + weight * np.kron(c, d), m).success
    ok = failures == 0 and worst <= INEQ and accepted == 0
    return ok, (f"{failures} round-trip failures, max residual {worst:.2e} (<= 1e-10), "
                f"{accepted}/1000 rank-2 inputs accepted")


def criterion_6():
    """Diagonal density matrices reproduce the classical results."""
    sizes = [4, 6, 8, 12]
    worst = 0.0
    for i in range(1000):
        N = sizes[i % 4]
        p = random_simplex(N, 15_000_000 + i)
        rng = np.random.default_rng(i)
        values = rng.normal(size=N)
        rho = qm.DensityMatrix.diagonal(p.probs)
        obs = qm.QuantumObservable.diagonal(values)
        diffs = [
            qm.expectation(rho, obs) - cl.mean(p, values),
            qm.von_neumann_entropy(rho) - cl.shannon_entropy(p),
        ]
        for m in bipartitions(N):
            diffs.append(qm.check_quantum_subadditivity(rho, m).slack - cl.check_subadditivity(p, m).slack)
        worst = max(worst, max(abs(d) for d in diffs))
    return worst <= EXACT, f"max classical/quantum diff {worst:.2e} (<= 1e-12)"


def criterion_7():
    """Monte Carlo error on the roulette fixture shrinks as L**-0.5."""
    p = fixture("states/roulette.json")["probs"]
    F = fixture("observables/roulette_F.json")["values"]
    Ls = [10**3, 10**4, 10**5, 10**6]
    rms = []
    outside = 0
    worst_z = 0.0
    for L in Ls:
        errs = []
        for seed in range(1, 21):
            rep = sample_classical(p, F, L, seed)
            err = rep.empirical_mean - rep.exact_mean
            errs.append(err)
            z = abs(err) / rep.standard_error_estimate
            worst_z = max(worst_z, z)
            outside += z > 5
        rms.append(math.sqrt(np.mean(np.square(errs))))
    slope = float(np.polyfit(np.log(Ls), np.log(rms), 1)[0])
    ok = abs(slope + 0.5) <= 0.1 and outside == 0
    return ok, f"slope {slope:.3f} (-0.5 +- 0.1), {outside}/80 runs beyond 5 SE (worst {worst_z:.2f} SE)"


def _round_trips(m):
    box = itertools.product(*(range(1, n + 1) for n in m.factorization.factors))
    for s in range(1, m.total + 1):
        if m.encode(m.decode(s)) != s:
            return False
    return all(m.decode(m.encode(idx)) == idx for idx in box)


def criterion_8():
    """Fixture listings match and every map round-trips."""
    listings = {
        "maps/colmajor_3x2.json": IndexMap.col_major(3, 2),
        "maps/roulette_2x2.json": IndexMap.row_major(2, 2),
        "maps/tripartite_2x2x2.json": IndexMap.row_major(2, 2, 2),
    }
    mismatched = []
    for name, m in listings.items():
        table = [list(idx) for idx in m.multi_indices]
        raw = json.loads((FIX / name).read_text())
        if table != raw["convention"]["table"] or map_from_json(raw).multi_indices != m.multi_indices:
            mismatched.append(name)

    rng = np.random.default_rng(8)
    maps = failures = 0
    for N in range(2, 65):
        shapes = [(N,)]
        for parts in (2, 3):
            if N >= 4:
                shapes += [f.factors for f in enumerate_factorizations(N, parts)]
        for shape in shapes:
            row = IndexMap.row_major(*shape)
            table = [row.multi_indices[k] for k in rng.permutation(N)]
            for m in (row, IndexMap.col_major(*shape), IndexMap.explicit(shape, table)):
                maps += 1
                failures += not _round_trips(m)
    ok = not mismatched and failures == 0
    return ok, f"listings mismatched: {mismatched or 'none'}, {failures}/{maps} maps failed round trips"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def report_line(k, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"


@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + report_line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for k, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        print(report_line(k, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
