"""The desk-scale experiments, each returning a JSON-ready dict with a ``passed`` flag.

Reports carry no timings, so equal seeds give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import random
from fractions import Fraction
from importlib import resources

from .arrangements import CapacityExceeded, bigon_intersection, random_layering
from .curves import CurveClass, intersection_number, normal_class
from .dynamics import (independence_test, monotone_projection_check, pair_costs, project_axis, quasi_axis,
                       separation_growth, translation_estimate)
from .graphs import (CURVE, SURVIVING, SampleSpec, dagger_delta_estimate, dagger_distance, delta_estimate,
                     enumerate_classes, geodesic_off_marked, _adjacent)
from .mcg import LoopWord, anosov, axis_curve, is_filling, point_push
from .qm import (QmSpec, defect_estimate, homogenize, inverse_word, qm_value, random_word, sample_pairs,
                 scl_lower_bound)
from .surfaces import make_surface


def fixture(kind: str, name: str) -> dict:
    return json.loads(resources.files("curvelab").joinpath("fixtures", kind, f"{name}.json").read_text())


def fixture_hash() -> str:
    h = hashlib.sha256()
    root = resources.files("curvelab").joinpath("fixtures")
    for kind in sorted(p.name for p in root.iterdir() if p.is_dir()):
        for f in sorted(root.joinpath(kind).iterdir(), key=lambda p: p.name):
            if f.name.endswith(".json"):
                h.update(f"{kind}/{f.name}\0".encode())
                h.update(f.read_bytes())
    return h.hexdigest()


def shipped_loop(n_marked: int | None = None):
    data = fixture("loops", "push_p1")
    surface = make_surface(data["genus"], n_marked or data["n_marked"])
    return surface, LoopWord(data["base"], data["letters"])


def shipped_curve(name: str, n_marked: int) -> CurveClass:
    data = fixture("curves", f"{name}_n{n_marked}")
    return normal_class(make_surface(data["genus"], data["n_marked"]), data["weights"])


def intersection_oracle(seed: int = 0, pairs: int = 500, weight_bound: int = 10) -> dict:
    rng = random.Random(seed)
    rows, mismatches = [], []
    for n in (1, 2):
        surface = make_surface(1, n)
        classes = enumerate_classes(surface, weight_bound, CURVE)
        for i in range(pairs // 2):
            a, b = rng.choice(classes), rng.choice(classes)
            fast = intersection_number(a, b)
            slow = bigon_intersection(a, b, random.Random(rng.random()))
            row = {"n": n, "index": i, "a": list(a.weights), "b": list(b.weights), "production": fast, "oracle": slow}
            if n == 1:
                (p, q), (r, s) = a.slope, b.slope
                row["det"] = abs(p * s - q * r)
            rows.append(row)
            if fast != slow or row.get("det", fast) != fast:
                mismatches.append(row)
    return {"pairs": len(rows), "mismatches": mismatches, "passed": not mismatches and len(rows) >= pairs}


def dagger_independence(seed: int = 0, pairs: int = 200, class_bound: int = 10, radius_cap: int = 4,
                        weight_bound: int = 12) -> dict:
    """d† through two different valid puncture sets, on random transverse pairs."""
    surface = make_surface(1, 2)
    classes = enumerate_classes(surface, class_bound, SURVIVING)
    rng = random.Random(seed)
    done = skipped = unresolved = agree = 0
    disagreements, geodesic_failures = [], []
    hist: dict = {}
    while done < pairs:
        a, b = rng.choice(classes), rng.choice(classes)
        cfg = random_layering(surface, [a.weights, b.weights], rng)
        try:
            r1 = dagger_distance(cfg, radius_cap=radius_cap, weight_bound=weight_bound)
            r2 = dagger_distance(cfg, radius_cap=radius_cap, weight_bound=weight_bound, placement="last", extra=1)
        except CapacityExceeded:
            skipped += 1
            continue
        done += 1
        if not (r1.resolved and r2.resolved):
            unresolved += 1
            continue
        hist[r1.value] = hist.get(r1.value, 0) + 1
        if r1.value == r2.value:
            agree += 1
        else:
            disagreements.append({"index": done - 1, "a": list(a.weights), "b": list(b.weights),
                                  "first": r1.value, "second": r2.value})
        path = r1.witness_path
        if len(path) >= 2 and path[0].weights != path[-1].weights:
            geo = geodesic_off_marked(path[0], path[-1], radius_cap, weight_bound)
            ok = (isinstance(geo, list) and len(geo) - 1 == r1.value
                  and all(_adjacent(u, v) for u, v in zip(geo, geo[1:])))
            if not ok:
                geodesic_failures.append(done - 1)
    rate = Fraction(unresolved, pairs)
    return {"pairs": pairs, "agree": agree, "unresolved": unresolved, "unresolved_rate": str(rate),
            "capacity_skipped": skipped, "histogram": {str(k): v for k, v in sorted(hist.items())},
            "disagreements": disagreements, "geodesic_failures": geodesic_failures,
            "passed": not disagreements and not geodesic_failures and rate < Fraction(1, 20)}


def hyperbolicity(seed: int = 0, quadruples: int = 10_000, radius: int = 3, weight_bound: int = 12) -> dict:
    spec = SampleSpec(radius=radius, weight_bound=weight_bound, quadruples=quadruples, seed=seed)
    closed = delta_estimate(make_surface(1, 0), CURVE, spec)
    surv = delta_estimate(make_surface(1, 2), SURVIVING, spec)
    dag = dagger_delta_estimate(make_surface(1, 2), spec)
    finite = closed.resolved > 0 and surv.resolved > 0 and dag.resolved > 0
    return {"curve_closed": closed.to_json(), "surviving": surv.to_json(), "dagger_matched": dag.to_json(),
            "margin": 4, "passed": finite and dag.worst <= surv.worst + 4}


def translation(n_max: int = 10, monotone_levels: int = 6, weight_bound: int = 12) -> dict:
    surface, gamma = shipped_loop()
    psi = point_push(surface, gamma)
    filling = is_filling(surface, gamma)
    shadow_ok = psi.shadow in (((1, 0), (0, 1)), ((-1, 0), (0, -1)))
    est = translation_estimate(psi, SURVIVING, shipped_curve("horizontal", 2), n_max, weight_bound)
    big, _ = shipped_loop(3)
    mono = monotone_projection_check(point_push(big, gamma), ("p1", "p2"), shipped_curve("horizontal", 3),
                                     monotone_levels, weight_bound)
    ok = filling and shadow_ok and est.verdict == "Hyperbolic" and est.lower > 0 and mono.passed
    return {"loop": gamma.to_json(), "is_filling": filling, "shadow": [list(r) for r in psi.shadow],
            "translation": est.to_json(), "monotone": mono.to_json(), "passed": ok}


def independence(k_max: int = 6, thresholds=(2, 3, 4), n_max: int = 8, weight_bound: int = 12) -> dict:
    surface, gamma = shipped_loop()
    psi, phi = point_push(surface, gamma), anosov(surface)
    x = shipped_curve("horizontal", 2)
    axis = quasi_axis(psi, x, n_max, SURVIVING, weight_bound)
    vertex = project_axis(axis)
    growth = separation_growth(phi, x, k_max)
    increasing = all(a[1] < b[1] for a, b in zip(growth[1:], growth[2:]))
    witnesses = {}
    for B in thresholds:
        for k in range(0, k_max + 1):
            rep = independence_test(axis, axis.translate(phi ** k), B)
            if rep.verdict == "Independent":
                witnesses[str(B)] = rep.to_json() | {"k": k}
                break
    return {"axis": axis.to_json(), "projection": list(vertex), "separation": [[k, d] for k, d in growth],
            "strictly_increasing": increasing, "witnesses": witnesses,
            "passed": increasing and len(witnesses) == len(thresholds)}


def independent_spec(k: int = 3, weight_bound: int = 12) -> QmSpec:
    surface, gamma = shipped_loop()
    costs, segment = pair_costs(point_push(surface, gamma), anosov(surface), k, shipped_curve("horizontal", 2),
                                weight_bound)
    return QmSpec("a", tuple(costs.items()), radius=8, segment=tuple(c.weights for c in segment))


def quasimorphism(seed: int = 0, k: int = 3, samples: int = 500, antisymmetry: int = 100) -> dict:
    spec = independent_spec(k)
    rng = random.Random(seed)
    words = [random_word(rng, 8) for _ in range(antisymmetry)]
    anti = [w for w in words if qm_value(spec, w) != -qm_value(spec, inverse_word(w))]
    pairs = sample_pairs(2 * samples, 4, seed)
    d1, d2 = defect_estimate(spec, pairs[:samples]), defect_estimate(spec, pairs)
    stable = d1 > 0 and abs(d2 - d1) < d1 / 10
    growth = [(n, qm_value(spec, "a" * n) / n) for n in range(1, 5)]
    hom = homogenize(spec, "a", defect=d2)
    scl = scl_lower_bound(spec, "a", d2)
    ok = (qm_value(spec, "") == 0 and not anti and stable and min(v for _, v in growth) > 0 and scl > 0)
    return {"spec": spec.to_json(), "identity": str(qm_value(spec, "")), "antisymmetry_failures": anti,
            "defect": {"samples": samples, "value": str(d1), "doubled": str(d2), "kind": "empirical lower bound"},
            "growth": [[n, str(v)] for n, v in growth],
            "homogenized": {"estimate": str(hom.estimate),
                            "table": [[n, str(a), str(b), str(c)] for n, a, b, c in hom.rows]},
            "scl_lower_bound": {"value": str(scl), "kind": "estimate (sampled defect)"}, "passed": ok}


def reproduce_all(seed: int = 7) -> dict:
    return {"seed": seed, "fixtures": fixture_hash(),
            "intersection": intersection_oracle(seed),
            "dagger": dagger_independence(seed),
            "hyperbolicity": hyperbolicity(seed),
            "translation": translation(),
            "independence": independence(),
            "qm": quasimorphism(seed)}
