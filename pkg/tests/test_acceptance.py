"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from twinlattice.coxeter import INF, CoxeterSystem, dihedral, growth_coefficients
from twinlattice.diagrams import flat_rank, qi_family
from twinlattice.distortion import (
    build_sigma, check_lift, distortion_experiment, factorize, lift_gallery, word_length_ball,
)
from twinlattice.integrability import CONVERGES, integrability_check
from twinlattice.twintree import (
    LETTERS, MINUS, PLUS, Chamber, base_chamber, bruhat_cell, codistance, diag_t,
    iwahori_member, panel, weyl_lift,
)

from .oracles import chamber_bfs

DIAGRAMS = Path(__file__).resolve().parent.parent / "diagrams"
SEEDS = {2: 20261015, 3: 20261016}


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


def test_criterion_1_non_distortion_certificates(report):
    start = time.perf_counter()
    problems = []
    stats = {}
    for p in (2, 3):
        sigma = build_sigma(p)
        res = distortion_experiment(p, 500, 12, seed=SEEDS[p])
        rows = res["rows"]
        bad = [r.gamma_id for r in rows if sigma.product(r.word) != r.gamma]
        over = [r.gamma_id for r in rows if r.d_x >= 1 and r.factor_len > 2 * r.d_x]
        if len(rows) != 500 or bad or over or res["summary"]["violations"]:
            problems.append((p, bad[:5], over[:5], res["summary"]["violations"]))
        stats[p] = res["summary"]["max_ratio"]
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 300
    report(1, ok, f"1000 certificates recompose, factor_len <= 2 d_X, max ratio "
                  f"{stats.get(2, 0):.3f}/{stats.get(3, 0):.3f}, {elapsed:.0f}s; problems={problems}")


def test_criterion_2_lower_inequality(report):
    sigma = build_sigma(2)
    ball = word_length_ball(2, 4)
    failures = []
    for g, exact in ball.items():
        cert = factorize(g, sigma)
        if not (cert.d_x <= 2 * exact and exact <= len(cert)):
            failures.append((exact, cert.d_x, len(cert)))
    report(2, not failures, f"{len(ball)} elements of the radius-4 ball; failures={failures[:5]}")


def test_criterion_3_gallery_lifting(report):
    rng = random.Random(3)
    p = 2
    passed = 0
    for _ in range(200):
        x = base_chamber(PLUS, p)
        for _ in range(rng.randint(0, 4)):
            x = rng.choice(panel(x, rng.choice(LETTERS))[1:])
        gal = [x]
        for _ in range(rng.randint(0, 8)):
            gal.append(rng.choice(panel(gal[-1], rng.choice(LETTERS))))
        lifted = lift_gallery(gal, Chamber(MINUS, x.rep))
        if all(check_lift(gal, lifted).values()):
            passed += 1
    report(3, passed == 200, f"{passed}/200 lifted galleries opposite, Opp-adjacent, in-apartment")


def test_criterion_4_geometry(report):
    p = 2
    mismatches = 0
    counted = 0
    levels = {}
    for sign in (PLUS, MINUS):
        levels[sign] = chamber_bfs(sign, p, 6)
        for d, level in enumerate(levels[sign]):
            for x in level:
                counted += 1
                mismatches += bruhat_cell(x.rep, sign).w.length != d

    rng = random.Random(4)
    cm = base_chamber(MINUS, p)
    law_checks = law_fail = 0
    while law_checks < 200:
        y = base_chamber(PLUS, p)
        for _ in range(rng.randint(1, 6)):
            y = rng.choice(panel(y, rng.choice(LETTERS))[1:])
        w = codistance(cm, y)
        if not w.length:
            continue
        y2 = rng.choice(panel(y, w.last)[1:])
        law_checks += 1
        law_fail += codistance(cm, y2) != w.times(w.last)

    diag_ok = True
    for k in range(1, 6):
        g = diag_t(k, p)
        cert = bruhat_cell(g, PLUS)
        valid = (cert.w.length == 2 * k and iwahori_member(cert.left, PLUS)
                 and iwahori_member(cert.right, PLUS) and cert.left * weyl_lift(cert.w, p) * cert.right == g)
        if k <= 3:
            x = Chamber(PLUS, g)
            valid = valid and any(x == y for y in levels[PLUS][2 * k])
        diag_ok = diag_ok and valid
    ok = mismatches == 0 and law_fail == 0 and diag_ok
    report(4, ok, f"{counted} chambers within radius 6 agree with BFS ({mismatches} mismatches); "
                  f"update law {law_checks - law_fail}/{law_checks}; diag(t^k) lengths 2k: {diag_ok}")


def test_criterion_5_flat_rank(report):
    a1t = flat_rank(dihedral(INF)).R
    a2t = flat_rank(CoxeterSystem("abc", [[1, 3, 3], [3, 1, 3], [3, 3, 1]])).R
    a2 = flat_rank(dihedral(3)).R
    a3 = flat_rank(CoxeterSystem("abc", [[1, 3, 2], [3, 1, 3], [2, 3, 1]])).R
    reps = [flat_rank(qi_family(k)) for k in range(1, 6)]
    rs = [r.R for r in reps]
    ok = ((a1t, a2t, a2, a3) == (1, 2, 0, 0) and rs == [2, 4, 6, 8, 10]
          and all(a < b for a, b in zip(rs, rs[1:]))
          and all(r.bounds == (r.R, 2 * r.R) for r in reps))
    report(5, ok, f"~A1={a1t} ~A2={a2t} A2={a2} A3={a3}; qi_family R={rs} with bounds (R, 2R)")


def test_criterion_6_integrability(report):
    coeffs = growth_coefficients(dihedral(INF), 20).coefficients
    rep = integrability_check(dihedral(INF), 2, 2, 60)
    delta = rep.partial_sums[60] - rep.partial_sums[50]
    fin = integrability_check(dihedral(3), 2, 2, 10)
    ok = (coeffs[1:] == (2,) * 20 and 0 <= delta < Fraction(1, 10**9) and rep.verdict == CONVERGES
          and fin.verdict == CONVERGES and fin.finite and fin.total == Fraction(33, 8))
    report(6, ok, f"c_1..c_20 all 2: {coeffs[1:] == (2,) * 20}; S_60 - S_50 = {float(delta):.3e}; "
                  f"verdicts {rep.verdict}/{fin.verdict}; A2 exact sum {fin.total}")


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "twinlattice", *args], capture_output=True, cwd=cwd)


def test_criterion_7_determinism(report, tmp_path):
    commands = [
        ["flat-rank", "--diagram", str(DIAGRAMS / "qi_family_3.json")],
        ["flat-rank", "--diagram", str(DIAGRAMS / "affine_A2.json"), "--json"],
        ["qi-table", "--max-k", "5"],
        ["growth", "--diagram", str(DIAGRAMS / "H3.json"), "--n", "16"],
        ["integrability", "--diagram", str(DIAGRAMS / "affine_A2.json"), "--qmin", "2", "--p", "1", "--n", "40"],
        ["factorize", "--p", "3", "--matrix", "[[1+t, t], [1, 1]]"],
    ]
    differing = []
    for args in commands:
        a, b = _cli(args, tmp_path), _cli(args, tmp_path)
        if a.stdout != b.stdout or a.returncode != b.returncode or a.returncode != 0:
            differing.append(args[0])
    runs = []
    for name in ("a.csv", "b.csv"):
        res = _cli(["distortion", "--p", "2", "--samples", "25", "--max-len", "8", "--seed", "5",
                    "--out", name], tmp_path)
        runs.append((res.returncode, res.stdout, (tmp_path / name).read_bytes()))
    if runs[0] != runs[1] or runs[0][0] != 0:
        differing.append("distortion")
    report(7, not differing, f"{len(commands) + 1} commands run twice; differing={differing}")
