"""The acceptance checks, one function per criterion.

Each check takes a RunConfig and returns a :class:`Check`; the harness in
``report`` runs them in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convexbody import (
    EuclideanBall,
    KpBody,
    LqBall,
    Polytope,
    YES,
    NO,
    disk_in_kp_radius,
    inscribed_ball_excluder,
    scalability_lower_bound,
    simplex_bounded,
    standard_position,
    subquadratic_certify,
)
from .matrange import (
    MatrixRangeBody,
    ParaboloidError,
    aep_dilation_search,
    paraboloid_bound,
    refute_dilation_kp,
    wmax_membership,
)
from .mixedsets import (
    MixedTuple,
    NoFiniteMaximalDilation,
    NotMaximalInputError,
    dilate_to_maximal,
    is_maximal,
    mixed_member,
    random_member,
    witness_dilation,
)
from .numkernel import op_norm, random_complex, random_hermitian, random_unitary
from .pencil import (
    MatrixTuple,
    build_mixed_pencil,
    conjugation_witness_check,
    decompose_tuple,
    recompose_tuple,
    spectrahedron_member,
)

PASS, FAIL, UNCERTAIN, INCONCLUSIVE = "pass", "fail", "boundary-uncertain", "inconclusive"

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
ELLIPSE_A1 = SIGMA_X
ELLIPSE_A2 = np.diag([0.0, 1.0]).astype(complex)


@dataclass
class Check:
    name: str
    topic: str
    inputs: dict
    status: str
    evidence: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    wall_time: float | None = None


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _witness_problems(t: MixedTuple, w) -> list:
    bad = []
    margin = mixed_member(w.dilated).margin
    if margin < -1e-9:
        bad.append(f"witness not a member (margin {margin:.3e})")
    comp = w.dilated.compress(t.level).max_entry_distance(t)
    if comp > 1e-9:
        bad.append(f"compression off by {comp:.3e}")
    if not w.nontriviality > 1e-9:
        bad.append(f"trivial witness ({w.nontriviality:.3e})")
    return bad


# --- mixed row contractions -------------------------------------------------

def check_maximality_biconditional(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 1])
    tol = cfg.tol
    target, evaluated, skipped, n_max, n_wit = 500, 0, 0, 0, 0
    problems = []
    min_wit_margin, max_comp, min_nontriv = math.inf, 0.0, math.inf
    attempts = 0
    while evaluated < target and attempts < 5 * target:
        attempts += 1
        d = int(rng.integers(1, 4))
        g = int(rng.integers(0, 4))
        n = int(rng.integers(1, 7))
        kinds = ["interior", "boundary", "boundary"] + (["singular"] if d == 1 else [])
        kind = kinds[int(rng.integers(len(kinds)))]
        t = random_member(d, g, n, rng, kind)
        v = is_maximal(t, tol, with_witness=False)
        if v.boundary_uncertain:
            skipped += 1
            continue
        evaluated += 1
        try:
            w = witness_dilation(t, tol)
        except NotMaximalInputError:
            w = None
        if v.is_maximal != (w is None):
            problems.append(f"instance {attempts}: classifier {v.is_maximal}, witness {w is not None}")
            continue
        if w is None:
            n_max += 1
            continue
        n_wit += 1
        bad = _witness_problems(t, w)
        problems.extend(f"instance {attempts}: {b}" for b in bad)
        min_wit_margin = min(min_wit_margin, mixed_member(w.dilated).margin)
        max_comp = max(max_comp, w.dilated.compress(n).max_entry_distance(t))
        min_nontriv = min(min_nontriv, w.nontriviality)
    ok = evaluated >= target and not problems
    return Check(
        "1-maximality-biconditional", "maximality-criterion",
        {"seed": cfg.seed, "target": target, "d_max": 3, "g_max": 3, "n_max": 6}, _status(ok),
        {"evaluated": evaluated, "skipped_uncertain": skipped, "maximal": n_max, "with_witness": n_wit,
         "min_witness_margin": min_wit_margin, "max_compression_error": max_comp,
         "min_nontriviality": min_nontriv, "problems": problems[:10]},
        {"membership": 1e-9, "compression": 1e-9, "nontriviality": 1e-9, **cfg.tol.to_dict()},
    )


def check_unitary_law(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 2])
    problems = []
    max_eq = 0.0
    for i in range(100):
        n = int(rng.integers(1, 7))
        v = is_maximal(MixedTuple((random_unitary(n, rng),)), cfg.tol)
        max_eq = max(max_eq, v.eq_margin)
        if not v.is_maximal:
            problems.append(f"unitary {i} classified non-maximal")
    nonmax = 0
    for i in range(100):
        n = int(rng.integers(1, 7))
        T = random_complex(n, rng)
        t = MixedTuple((0.9 * T / op_norm(T),))
        v = is_maximal(t, cfg.tol)
        if v.is_maximal or v.witness is None:
            problems.append(f"contraction {i} classified maximal")
            continue
        bad = _witness_problems(t, v.witness)
        if bad:
            problems.append(f"contraction {i}: {bad}")
        else:
            nonmax += 1
    return Check(
        "2-unitary-law", "unitary-maximality", {"seed": cfg.seed, "count": 100, "scale": 0.9},
        _status(not problems),
        {"max_unitary_eq_margin": max_eq, "nonmaximal_with_valid_witness": nonmax, "problems": problems[:10]},
        cfg.tol.to_dict(),
    )


def check_no_finite_maximal(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 3])
    problems = []
    min_excess = math.inf
    raised = 0
    for i in range(100):
        d = int(rng.integers(2, 4))
        g = int(rng.integers(0, 4))
        n = int(rng.integers(1, 7))
        t = random_member(d, g, n, rng, "boundary" if i % 2 else "interior")
        v = is_maximal(t, cfg.tol, with_witness=False)
        if v.is_maximal:
            problems.append(f"instance {i} classified maximal")
        excess = v.blockrow_rank_deficit - (d - 1) * n
        min_excess = min(min_excess, excess)
        if excess < 0:
            problems.append(f"instance {i}: deficit {v.blockrow_rank_deficit} < {(d - 1) * n}")
        try:
            dilate_to_maximal(t)
        except NoFiniteMaximalDilation:
            raised += 1
    if raised != 100:
        problems.append("dilate_to_maximal did not refuse every d >= 2 input")
    return Check(
        "3-no-finite-maximal", "no-finite-maximal-elements", {"seed": cfg.seed, "count": 100},
        _status(not problems),
        {"min_deficit_excess": min_excess, "dilation_refusals": raised, "problems": problems[:10]},
        cfg.tol.to_dict(),
    )


def check_dilation_algorithm(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 4])
    delta = cfg.delta
    problems = []
    max_defect, max_back = 0.0, 0.0
    for i in range(200):
        g = int(rng.integers(0, 4))
        n = int(rng.integers(1, 7))
        kind = ("interior", "boundary", "singular")[i % 3]
        t = random_member(1, g, n, rng, kind)
        out, _ = dilate_to_maximal(t, delta, cfg.tol)
        defect = float(np.linalg.norm(np.eye(out.level) - out.sum_square()))
        back = out.compress(n).max_entry_distance(t)
        max_defect, max_back = max(max_defect, defect), max(max_back, back)
        if defect > 1e-9:
            problems.append(f"instance {i}: sum-square defect {defect:.3e}")
        if not is_maximal(out, cfg.tol, with_witness=False).is_maximal:
            problems.append(f"instance {i}: output not maximal")
        if back > 2e-3:
            problems.append(f"instance {i}: compression distance {back:.3e}")
    return Check(
        "4-dilation-algorithm", "maximal-dilation", {"seed": cfg.seed, "count": 200, "delta": delta},
        _status(not problems),
        {"max_sumsquare_defect": max_defect, "max_compression_distance": max_back, "problems": problems[:10]},
        {"defect": 1e-9, "compression": 2e-3, **cfg.tol.to_dict()},
    )


def check_hand_dilation(cfg) -> Check:
    t = MixedTuple((np.array([[0.5]]),), (np.array([[0.0]]),))
    out, shift = dilate_to_maximal(t, cfg.delta, cfg.tol)
    S_ref = np.array([[0.5, math.sqrt(3) / 2], [-0.5, 1 / (2 * math.sqrt(3))]])
    Y_ref = np.diag([0.0, math.sqrt(2 / 3)])
    S, Y = out.T[0], out.X[0]
    err_S = float(np.max(np.abs(S - S_ref)))
    err_Y = float(np.max(np.abs(Y - Y_ref)))
    defect = float(np.max(np.abs(np.eye(2) - out.sum_square())))
    det = complex(np.linalg.det(S))
    ok = err_S <= 1e-12 and err_Y <= 1e-12 and defect <= 1e-12 and abs(det) > 1e-12
    return Check(
        "5-hand-dilation", "maximal-dilation", {"T": 0.5, "X": 0.0}, _status(ok),
        {"S_error": err_S, "Y_error": err_Y, "sumsquare_defect": defect, "det_S": abs(det), "shift": shift},
        {"entries": 1e-12},
    )


def check_pencil_agreement(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 6])
    compared, skipped, disagree = 0, 0, []
    for i in range(500):
        d = int(rng.integers(0, 3))
        g = int(rng.integers(0 if d else 1, 3))
        n = int(rng.integers(1, 5))
        t = MixedTuple(tuple(random_complex(n, rng) for _ in range(d)),
                       tuple(random_hermitian(n, rng) for _ in range(g)))
        t = t.scaled(math.sqrt(rng.uniform(0.5, 1.5) / op_norm(t.sum_square())))
        direct = mixed_member(t, cfg.tol)
        if abs(direct.margin) <= 1e-9:
            skipped += 1
            continue
        P = build_mixed_pencil(d, g)
        via_pencil = spectrahedron_member(P, decompose_tuple(t.as_matrix_tuple()), cfg.tol)
        compared += 1
        if via_pencil.is_psd != direct.is_psd:
            disagree.append(i)
    return Check(
        "6-pencil-agreement", "pencil-presentation", {"seed": cfg.seed, "count": 500}, _status(not disagree),
        {"compared": compared, "skipped_near_boundary": skipped, "disagreements": disagree[:10]},
        {"margin_band": 1e-9, **cfg.tol.to_dict()},
    )


def check_conjugation_witness(cfg) -> Check:
    E12 = np.array([[0, 1], [0, 0]], dtype=complex)
    E22 = np.array([[0, 0], [0, 1]], dtype=complex)
    t = MixedTuple((E12, E22))
    Z = decompose_tuple(t.as_matrix_tuple())
    res = conjugation_witness_check(Z, build_mixed_pencil(2, 0), cfg.tol)
    conj = recompose_tuple(Z.conj(), (False, False))
    conj_t = MixedTuple(tuple(conj.entries))
    top = float(np.linalg.eigvalsh(conj_t.sum_square())[-1])
    margin = mixed_member(t, cfg.tol).margin
    ok = abs(margin) <= 1e-12 and abs(top - 2.0) <= 1e-12 and res["verdict"] == "witness-violates"
    return Check(
        "7-conjugation-witness", "conjugation-closure", {"T": ["E12", "E22"]}, _status(ok),
        {"member_margin": margin, "conjugate_top_eigenvalue": top, **res}, {"entries": 1e-12},
    )


# --- matrix ranges ----------------------------------------------------------

def check_paraboloid_constant(cfg) -> Check:
    cert = paraboloid_bound([ELLIPSE_A1, ELLIPSE_A2], [0, 0], [0, -1], samples=10_000, seed=cfg.seed)
    ok = abs(cert.M - 0.25) <= 1e-12 and cert.min_slack >= -1e-9
    return Check(
        "8a-paraboloid-constant", "paraboloid-bound", {"A": "ellipse range", "point": [0, 0], "direction": [0, -1]},
        _status(ok), {"M": cert.M, "eps": cert.eps, "min_slack": cert.min_slack, "samples": cert.samples},
        {"M": 1e-12, "slack": 1e-9},
    )


def check_disk_typed_failure(cfg) -> Check:
    """The disk tuple is asked to raise a hypothesis failure at every boundary point."""
    outcomes = []
    for th in np.linspace(0, 2 * np.pi, 24, endpoint=False):
        u = np.array([math.cos(th), math.sin(th)])
        try:
            cert = paraboloid_bound([SIGMA_Z, SIGMA_X], u, u, samples=2000, seed=cfg.seed)
            outcomes.append({"theta": float(th), "raised": False, "M": cert.M, "min_slack": cert.min_slack})
        except ParaboloidError as exc:
            outcomes.append({"theta": float(th), "raised": True, "error": type(exc).__name__})
    raised = sum(o["raised"] for o in outcomes)
    return Check(
        "8b-disk-typed-failure", "paraboloid-bound", {"A": "anticommuting pair", "points": 24},
        _status(raised == len(outcomes)),
        {"raised": raised, "certificates_issued": len(outcomes) - raised, "outcomes": outcomes[:4]}, {},
    )


def check_subquadratic_trichotomy(cfg) -> Check:
    rows, problems = [], []
    for p in (1.25, 1.5, 1.75, 2.0, 2.5, 3.0):
        K = KpBody(p)
        S = standard_position(K, [0, 0], [0, -1], n2d=cfg.n_directions)
        sq = subquadratic_certify(S, r0=cfg.r0, steps=cfg.radius_steps)
        ball = inscribed_ball_excluder(K, [0, 0], directions=None)
        want_sq, want_ball = (YES, NO) if p < 2 else (NO, YES)
        rows.append({"p": p, "subquadratic": sq["verdict"], "growth": sq.get("growth"),
                     "ball": ball["verdict"], "ball_radius": ball.get("radius")})
        if sq["verdict"] != want_sq or ball["verdict"] != want_ball:
            problems.append(f"p = {p}: subquadratic {sq['verdict']}, ball {ball['verdict']}")
        if sq["verdict"] == YES and ball["verdict"] == YES:
            problems.append(f"p = {p}: both flags set")
    return Check(
        "9-subquadratic-trichotomy", "decay-rate-criterion", {"p": [1.25, 1.5, 1.75, 2, 2.5, 3]},
        _status(not problems), {"rows": rows, "problems": problems},
        {"r0": cfg.r0, "steps": cfg.radius_steps},
    )


def check_sb_aep_gap(cfg) -> Check:
    K = KpBody(1.5)
    sb = simplex_bounded(K, [0, 0])
    sq = subquadratic_certify(standard_position(K, [0, 0], [0, -1]), r0=cfg.r0, steps=cfg.radius_steps)
    search = aep_dilation_search(K)
    hit = aep_dilation_search(KpBody(2.0))
    ok = (sb["verdict"] == NO and sq["verdict"] == YES and not search["found"] and search["tested"] >= 1000
          and hit["found"] and hit["a"][0] > 0)
    return Check(
        "10-sb-vs-aep-gap", "simplex-bounded-gap", {"p": 1.5, "grid": "20 x 5 x 26"}, _status(ok),
        {"simplex_bounded": sb["verdict"], "subquadratic": sq["verdict"], "search_found": search["found"],
         "candidates": search["tested"], "k2_hit": {k: hit.get(k) for k in ("a", "b", "beta", "wmax_margin")}},
        {"psd_tol": cfg.tol.psd_tol},
    )


def check_disk_containment(cfg) -> Check:
    rows = [disk_in_kp_radius(1.5, c, samples=10_000) for c in (1e-2, 1e-3)]
    expect = {1e-2: 0.009996625, 1e-3: 0.001 - 3.375e-9}
    ok = all(r["min_margin"] >= -1e-12 and abs(r["r"] - expect[r["c"]]) <= 1e-15 for r in rows)
    return Check(
        "11-disk-containment", "disk-containment", {"p": 1.5, "c": [1e-2, 1e-3]}, _status(ok),
        {"rows": [{k: r[k] for k in ("c", "r", "min_margin", "min_f_gap")} for r in rows]}, {"margin": 1e-12},
    )


def check_scalability_bound(cfg) -> Check:
    a, b = scalability_lower_bound(1.5, 0.01), scalability_lower_bound(1.5, 0.001)
    ratio = b["M_bound"] / a["M_bound"]
    ok = (abs(a["M_bound"] - 14.8148) <= 1e-4 and abs(b["M_bound"] - 148.148) <= 1e-3
          and a["rel_diff"] <= 1e-9 and b["rel_diff"] <= 1e-9 and abs(ratio - 10) <= 1e-9)
    return Check(
        "12-scalability-bound", "non-scalability", {"p": 1.5, "c": [0.01, 0.001]}, _status(ok),
        {"M_0.01": a["M_bound"], "M_0.001": b["M_bound"], "threshold_rel_diff": [a["rel_diff"], b["rel_diff"]],
         "ratio": ratio},
        {"M_0.01": 1e-4, "M_0.001": 1e-3, "threshold": 1e-9, "ratio": 1e-9},
    )


def level_one_bodies() -> dict:
    return {
        "disk": EuclideanBall([0.0, 0.0], 1.0),
        "kp1.5": KpBody(1.5),
        "square": Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]]),
        "l3-ball": LqBall(3.0, [0.2, -0.1], 0.8),
        "ellipse-range": MatrixRangeBody([ELLIPSE_A1, ELLIPSE_A2]),
    }


def check_wmax_sanity(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 13])
    res = wmax_membership(EuclideanBall([0, 0], 1.0), [SIGMA_Z, SIGMA_X])
    disagreements = {}
    for name, K in level_one_bodies().items():
        lo = -K.support(-np.eye(2))
        hi = K.support(np.eye(2))
        pad = 0.2 * (hi - lo)
        P = rng.uniform(lo - pad, hi + pad, size=(1000, 2))
        inside = K.contains(P)
        bad = 0
        for x, c in zip(P, inside):
            if wmax_membership(K, [x[:1, None], x[1:, None]]).member != bool(c):
                bad += 1
        disagreements[name] = bad
    ok = res.member and abs(res.margin) <= 1e-9 and not any(disagreements.values())
    return Check(
        "13-wmax-sanity", "wmax-membership", {"seed": cfg.seed, "points_per_body": 1000, "directions": 720},
        _status(ok), {"anticommuting_margin": res.margin, "anticommuting_member": res.member,
                      "level_one_disagreements": disagreements},
        {"margin": 1e-9, "psd_tol": cfg.tol.psd_tol},
    )


def check_refutation(cfg) -> Check:
    rng = np.random.default_rng([cfg.seed, 14])
    triples = [(0.2, 0.0, 0.16)]
    while len(triples) < 100:
        a = float(rng.uniform(-1, 1))
        if a == 0:
            continue
        triples.append((a, float(rng.uniform(-1, 1)), float(rng.uniform(0, 2))))
    problems, min_margin = [], math.inf
    for a, b, beta in triples:
        r = refute_dilation_kp(1.5, a, b, beta)
        if not r["found"] or not r["margin"] > 0:
            problems.append((a, b, beta))
        else:
            min_margin = min(min_margin, r["margin"])
    hand = refute_dilation_kp(1.5, 0.2, 0.0, 0.16)
    ok = (not problems and hand["t"] == 0.5 and abs(hand["lhs"] - 0.0721) <= 1e-4 and hand["rhs"] == 0.04)
    return Check(
        "14-refutation", "kp-refutation", {"seed": cfg.seed, "p": 1.5, "count": 100}, _status(ok),
        {"failures": problems[:10], "min_margin": min_margin, "hand_case": hand}, {"lhs": 1e-4},
    )


ALL_CHECKS = (
    check_maximality_biconditional,
    check_unitary_law,
    check_no_finite_maximal,
    check_dilation_algorithm,
    check_hand_dilation,
    check_pencil_agreement,
    check_conjugation_witness,
    check_paraboloid_constant,
    check_disk_typed_failure,
    check_subquadratic_trichotomy,
    check_sb_aep_gap,
    check_disk_containment,
    check_scalability_bound,
    check_wmax_sanity,
    check_refutation,
)
