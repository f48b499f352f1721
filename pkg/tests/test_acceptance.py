"""End-to-end acceptance checks, one per criterion, at full size."""

import time

import pytest

from curvelab import experiments as ex
from curvelab.cli import main

RESULTS: dict = {}


def record(name, ok, detail=""):
    RESULTS[name] = (ok, detail)
    assert ok, f"{name}: {detail}"


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def test_1_intersection_oracle():
    r, sec = timed(ex.intersection_oracle, seed=0, pairs=500, weight_bound=10)
    record("1 intersection oracle", r["passed"] and r["pairs"] >= 500 and sec <= 120,
           f"{r['pairs']} pairs, {len(r['mismatches'])} mismatches, {sec:.1f}s")


def test_2_dagger_puncture_independence():
    r, sec = timed(ex.dagger_independence, seed=0, pairs=200, radius_cap=4, weight_bound=12)
    record("2 dagger puncture independence", r["passed"] and sec <= 600,
           f"{r['agree']}/{r['pairs']} agree, unresolved {r['unresolved_rate']}, "
           f"{len(r['geodesic_failures'])} geodesic failures, {sec:.1f}s")


def test_3_four_point_hyperbolicity():
    r, sec = timed(ex.hyperbolicity, seed=0, quadruples=10_000, radius=3)
    c, s, d = r["curve_closed"], r["surviving"], r["dagger_matched"]
    record("3 four-point hyperbolicity", r["passed"] and sec <= 600,
           f"worst deficiency closed {c['worst_deficiency']}, surviving {s['worst_deficiency']}, "
           f"dagger {d['worst_deficiency']} ({d['resolved']} matched), {sec:.1f}s")


def test_4_push_translation():
    r, sec = timed(ex.translation, n_max=10, monotone_levels=6)
    t = r["translation"]
    record("4 point-push translation", r["passed"] and sec <= 600,
           f"verdict {t['verdict']}, lower {t['lower']}, monotone {r['monotone']['passed']}, {sec:.1f}s")


def test_5_independence():
    r, sec = timed(ex.independence, k_max=6, thresholds=(2, 3, 4))
    ks = {B: w["k"] for B, w in r["witnesses"].items()}
    record("5 independence", r["passed"] and sec <= 300,
           f"projection {r['projection']}, witnesses {ks}, {sec:.1f}s")


def test_6_quasimorphism():
    r, sec = timed(ex.quasimorphism, seed=0, samples=500, antisymmetry=100)
    record("6 quasi-morphism", r["passed"] and sec <= 900,
           f"defect {r['defect']['value']}->{r['defect']['doubled']}, scl bound {r['scl_lower_bound']['value']}, "
           f"{sec:.1f}s")


def test_7_determinism(tmp_path):
    reports = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        assert main(["run", "reproduce-all", "--seed", "7", "--out", str(out)]) == 0
        reports.append((out / "report.json").read_bytes())
    record("7 determinism", reports[0] == reports[1], f"{len(reports[0])} bytes per report")
