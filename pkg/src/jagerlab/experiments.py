"""Monte Carlo verification harness and plot-data emission.

Everything here is reproducible by construction: each sampled orbit is
seeded by (seed, sample index) through a counter-style seed sequence, so
results do not depend on evaluation order, and reports and CSV files are
byte-identical across runs with the same configuration.

Checks follow one shape: sample, classify, count failures, record the
worst violation and how many points fell inside a boundary dead zone
(those are skipped, never guessed).  A report passes iff every gated
check has zero failures; reconciliation data for the literal comparison
region is carried as information only.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import gmpy2
import numpy as np

from . import _orbit, geometry
from .geometry import GammaMode, Location
from .scalar import DomainError, Mode, NumericContext, TolerancePolicy

#: parameter grid exercised by the default verification suite
DEFAULT_K_GRID = (0.3, 0.5, 0.9, 1.0, 1.5, 2.7)

RESIDUAL_TOL = 1e-8         # pairing-identity tolerance (extended precision)
HYPERBOLA_TOL = 1e-9
WITNESS_COINCIDENCE_TOL = 1e-12
WITNESS_MIN_SEPARATION = 0.1

_ENV_WORKERS = "JAGER_LAB_THREADS"


def _workers_from_env() -> int:
    raw = os.environ.get(_ENV_WORKERS, "")
    try:
        return max(1, min(int(raw), os.cpu_count() or 1))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    k_list: tuple = DEFAULT_K_GRID
    samples: int = 10_000
    n_min: int = 1
    n_max: int = 30
    seed: int = 42
    mode: Mode = Mode.EXTENDED
    bits: int = 128
    tol: TolerancePolicy = field(default_factory=TolerancePolicy)
    stratify_first_digit: bool = False
    # caps the worker pool; evaluation is sequential today and per-index
    # seeding keeps results identical under any future pool size
    workers: int = field(default_factory=_workers_from_env)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")

    def context(self) -> NumericContext:
        return NumericContext(self.mode, self.bits, self.tol)

    def to_dict(self) -> dict:
        return {
            "k_list": [float(k) for k in self.k_list],
            "samples": self.samples,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "seed": self.seed,
            "mode": self.mode.value,
            "bits": self.bits,
            "eps_compare": self.tol.eps_compare,
            "eps_snap": self.tol.eps_snap,
            "eps_boundary": self.tol.eps_boundary,
            "stratify_first_digit": self.stratify_first_digit,
        }


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([e & 0xFFFFFFFFFFFFFFFF for e in entropy]))


def _k_salt(k) -> int:
    return int(np.float64(k).view(np.uint64))


def x0_from_index(seed: int, index: int, k=None, strata: int = 0) -> float:
    """Uniform x0 in (0,1) keyed by (seed, index); order-independent.

    With strata > 0 the first digit is forced to index % strata, which
    populates thin large-digit strips faster.
    """
    rng = _rng(seed, index)
    if strata > 0 and k is not None:
        a = index % strata
        k = float(k)
        lo, hi = k / (k + a + 1.0), k / (k + a)
        hi = min(hi, 1.0)
        x = lo + (hi - lo) * rng.random()
    else:
        x = rng.random()
    while x <= 0.0 or x >= 1.0:
        x = rng.random()
    return float(x)


@dataclass(frozen=True)
class PairRecord:
    """One emitted approximation pair with its orbit state."""

    k: float
    index: int
    n: int
    u: float
    v: float
    x: float
    y: float
    digit: int
    terminal: bool


def iter_jager_pairs(cfg: ExperimentConfig, k):
    """Yield PairRecords for one parameter value, per the configuration."""
    kf = float(k)
    strata = 8 if cfg.stratify_first_digit else 0
    for i in range(cfg.samples):
        x0 = x0_from_index(cfg.seed, i, k=kf, strata=strata)
        steps = _orbit.trace(kf, x0, cfg.n_max,
                             snap_eps=cfg.tol.eps_snap,
                             base_bits=max(cfg.bits, 128))
        th_prev = x0 / kf
        for s in steps:
            th = float(s.theta)
            if s.n >= cfg.n_min:
                yield PairRecord(kf, i, s.n, th_prev, th,
                                 float(s.x), float(s.y), s.digit, s.terminal)
            th_prev = th


def sample_jager_pairs(cfg: ExperimentConfig):
    """Stream of pair records over the whole parameter grid."""
    for k in cfg.k_list:
        yield from iter_jager_pairs(cfg, k)


# -- check results and reports ----------------------------------------------


@dataclass
class CheckResult:
    name: str
    k: float | None
    samples: int
    failures: int
    boundary_skips: int = 0
    worst_residual: float = 0.0
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "k": self.k,
            "samples": self.samples,
            "failures": self.failures,
            "boundary_skips": self.boundary_skips,
            "worst_residual": self.worst_residual,
            "info": self.info,
        }


@dataclass
class VerificationReport:
    config: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.failures == 0 for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": "jagerlab-report/1",
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# -- individual checks -------------------------------------------------------


def correspondence_check(cfg: ExperimentConfig) -> list[CheckResult]:
    """Residual of the pairing identity over sampled orbits, per k.

    Every step of every orbit must satisfy the identity to RESIDUAL_TOL;
    terminated orbits contribute their defined steps and are counted.
    """
    out = []
    for k in cfg.k_list:
        kf = float(k)
        worst = 0.0
        failures = terminated = steps_seen = 0
        for i in range(cfg.samples):
            x0 = x0_from_index(cfg.seed, i)
            steps = _orbit.trace(kf, x0, cfg.n_max,
                                 snap_eps=cfg.tol.eps_snap,
                                 base_bits=max(cfg.bits, 128))
            for s in steps:
                if s.n < cfg.n_min:
                    continue
                steps_seen += 1
                if s.residual > worst:
                    worst = s.residual
                if s.residual >= RESIDUAL_TOL:
                    failures += 1
            if steps[-1].terminal:
                terminated += 1
        out.append(CheckResult(
            name="correspondence", k=kf, samples=steps_seen,
            failures=failures, worst_residual=worst,
            info={"orbits": cfg.samples, "terminated_orbits": terminated,
                  "tolerance": RESIDUAL_TOL},
        ))
    out.append(_pinned_golden_check())
    return out


def _pinned_golden_check() -> CheckResult:
    """Fixed-point orbit pin: at k=1 the golden point has limit pair
    (1/sqrt5, 1/sqrt5) and the identity holds to 1e-9 along the way."""
    with gmpy2.context(precision=192):
        x0 = (gmpy2.sqrt(gmpy2.mpfr(5)) - 1) / 2
        steps = _orbit.trace(1, x0, 30, base_bits=192)
    worst = max(s.residual for s in steps)
    limit = 1.0 / math.sqrt(5.0)
    gap = abs(float(steps[-1].theta) - limit)
    failures = int(worst >= 1e-9) + int(gap >= 1e-6)
    return CheckResult(
        name="correspondence_pinned_golden", k=1.0, samples=len(steps),
        failures=failures, worst_residual=worst,
        info={"theta_30_gap_to_limit": gap, "limit": limit},
    )


def hyperbola_check(cfg: ExperimentConfig) -> list[CheckResult]:
    """4k * u * v <= 1 + tol for every sampled pair."""
    out = []
    for k in cfg.k_list:
        kf = float(k)
        worst = 0.0
        failures = count = 0
        for rec in iter_jager_pairs(cfg, kf):
            count += 1
            excess = 4.0 * kf * rec.u * rec.v - 1.0
            if excess > worst:
                worst = excess
            if excess > HYPERBOLA_TOL:
                failures += 1
        out.append(CheckResult(
            name="hyperbola_bound", k=kf, samples=count, failures=failures,
            worst_residual=max(worst, 0.0),
            info={"max_4kuv_minus_1": worst, "tolerance": HYPERBOLA_TOL},
        ))
    return out


def containment_check(cfg: ExperimentConfig) -> list[CheckResult]:
    """Sampled pairs must lie in the constructive union of strip images.

    Failures count points classified outside by more than eps_boundary.
    Classification against the literal comparison region is recorded as
    reconciliation data and never gates the check.  The near-axis probe
    records the largest v seen at u < 0.05, where the two region
    descriptions disagree.
    """
    eps = cfg.tol.eps_boundary
    out = []
    for k in cfg.k_list:
        kf = float(k)
        failures = boundary = count = literal_disagree = terminal_pairs = 0
        worst = 0.0
        probe_v = 0.0
        for rec in iter_jager_pairs(cfg, kf):
            count += 1
            if rec.terminal:
                terminal_pairs += 1
            margin = geometry.gamma_margin(kf, (rec.u, rec.v), GammaMode.CONSTRUCTIVE)
            loc = Location.INSIDE if margin > eps else (
                Location.OUTSIDE if margin < -eps else Location.BOUNDARY)
            if loc is Location.OUTSIDE:
                failures += 1
                worst = max(worst, -margin)
            elif loc is Location.BOUNDARY:
                boundary += 1
            lit = geometry.gamma_contains(kf, (rec.u, rec.v), GammaMode.LITERAL, eps)
            if (lit is Location.OUTSIDE) != (loc is Location.OUTSIDE):
                literal_disagree += 1
            if rec.u < 0.05 and rec.v > probe_v:
                probe_v = rec.v
        out.append(CheckResult(
            name="containment_constructive", k=kf, samples=count,
            failures=failures, boundary_skips=boundary, worst_residual=worst,
            info={
                "literal_outside_disagreements": literal_disagree,
                "terminal_pairs": terminal_pairs,
                "probe_max_v_at_u_below_0.05": probe_v,
                "literal_upper_edge_v": 1.0 / (kf + 1.0),
                "constructive_upper_edge_v": 1.0 / kf,
            },
        ))
    return out


def _strip_point(rng, k: float, a: int):
    x = rng.random()
    while x <= 0.0:
        x = rng.random()
    y = -(k + a) - rng.random()
    return x, y


def region_two_sided_check(k, a_values=(0, 1, 2), samples: int = 10_000,
                           seed: int = 42, eps_boundary: float = 1e-9) -> list[CheckResult]:
    """Image regions checked in both directions, one result per digit.

    forward: uniform strip samples map inside the predicted region;
    reverse: rejection samples of the predicted region have a preimage
    root inside the strip.  Digit 0 with k < 1 uses the five-curve
    region; every other case uses the image quadrangle.
    """
    kf = float(k)
    out = []
    for a in a_values:
        use_p0 = (a == 0 and kf < 1.0)
        quad = None if use_p0 else geometry.pa_sharp_quad(kf, a)

        def classify(q):
            if use_p0:
                return geometry.p0_sharp_contains(kf, q, eps_boundary)
            return quad.classify(q, eps_boundary)

        rng = _rng(seed, 211, _k_salt(kf), a)
        fwd_fail = fwd_boundary = 0
        worst = 0.0
        for _ in range(samples):
            x, y = _strip_point(rng, kf, a)
            q = geometry.psi(kf, (x, y))
            loc = classify(q)
            if loc is Location.OUTSIDE:
                fwd_fail += 1
                m = geometry._p0_margin(kf, q[0], q[1]) if use_p0 else quad.signed_margin(q)
                worst = max(worst, -m)
            elif loc is Location.BOUNDARY:
                fwd_boundary += 1

        # reverse: bounding box is (0, 1/k] x [0, 1/k] for the five-curve
        # region (u <= 1/k and v < 1/k there); quadrangles use their own
        if use_p0:
            u_lo, u_hi, v_hi = 1e-12, 1.0 / kf, 1.0 / kf
        else:
            us = [float(p[0]) for p in quad.vertices]
            vs = [float(p[1]) for p in quad.vertices]
            u_lo, u_hi, v_hi = min(us), max(us), max(vs)
        strip = geometry.Strip(kf, a)
        rng = _rng(seed, 212, _k_salt(kf), a)
        rev_fail = accepted = draws = 0
        max_draws = 200 * samples
        while accepted < samples and draws < max_draws:
            draws += 1
            q = (u_lo + (u_hi - u_lo) * rng.random(), v_hi * rng.random())
            if classify(q) is not Location.INSIDE:
                continue
            accepted += 1
            roots = geometry.psi_preimage(kf, q)
            if not any(strip.contains_with_slack(r, 1e-12) for r in roots):
                rev_fail += 1
        out.append(CheckResult(
            name="region_two_sided", k=kf, samples=samples,
            failures=fwd_fail + rev_fail,
            boundary_skips=fwd_boundary, worst_residual=worst,
            info={"digit": a, "region": "p0_curves" if use_p0 else "quadrangle",
                  "forward_failures": fwd_fail, "reverse_failures": rev_fail,
                  "reverse_accepted": accepted, "reverse_draws": draws},
        ))
    return out


# -- injectivity witnesses ---------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """Two distinct orbit-state points with the same image under the map.

    Both lie in the digit-0 strip, p2 is the reflection of p1 across
    x + y = 0, and their images coincide to floating-point identity.
    """

    k: float
    p1: tuple
    p2: tuple
    image: tuple
    separation: float
    coincidence: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "p1": list(self.p1),
            "p2": list(self.p2),
            "image": list(self.image),
            "separation": self.separation,
            "coincidence": self.coincidence,
        }


def injectivity_witness(k, seed: int = 42,
                        min_separation: float = WITNESS_MIN_SEPARATION) -> Witness:
    """Produce a fold witness for k < 1: p1 != p2 with psi(p1) == psi(p2).

    Takes p1 = (x, -x') with k < x' < x < 1, so both p1 and its
    reflection sit inside the digit-0 strip.  Refuses k >= 1, where
    every strip lies strictly below the fold line, and k so close to 1
    that the requested separation cannot fit inside the folded square.
    """
    kf = float(k)
    if kf >= 1.0:
        raise DomainError(
            "no witness exists for k >= 1: orbit states satisfy x + y < 0, "
            "and the map is injective below the fold"
        )
    if kf <= 0.0:
        raise DomainError("k must be positive")
    # guaranteed gap (1-k)*0.82 along each axis, diagonal sqrt(2) of that
    if math.sqrt(2.0) * 0.82 * (1.0 - kf) <= min_separation:
        raise DomainError(
            f"separation {min_separation} is unattainable: the folded square "
            f"for k={kf} only spans {math.sqrt(2) * (1 - kf):.4f} diagonally"
        )
    rng = _rng(seed, 777, _k_salt(kf))
    r1, r2 = (float(r) for r in rng.random(2))
    x_low = kf + (1.0 - kf) * (0.01 + 0.08 * r1)
    x_high = 1.0 - (1.0 - kf) * (0.01 + 0.08 * r2)
    p1 = (x_high, -x_low)
    p2 = geometry.reflect(p1)
    image1 = geometry.psi(kf, p1)
    image2 = geometry.psi(kf, p2)
    coincidence = max(abs(image1[0] - image2[0]), abs(image1[1] - image2[1]))
    separation = math.hypot(p1[0] - p2[0], p1[1] - p2[1])
    strip = geometry.Strip(kf, 0)
    if not (strip.contains(p1) and strip.contains(p2)):
        raise RuntimeError("witness construction left the digit-0 strip")
    if coincidence >= WITNESS_COINCIDENCE_TOL or separation <= min_separation:
        raise RuntimeError("witness construction failed its own contract")
    return Witness(kf, p1, p2, image1, separation, coincidence)


def witness_grid_check(ks=None, seed: int = 42) -> CheckResult:
    """A valid witness for every k on the sub-unit grid, plus a refusal
    probe at k = 1."""
    if ks is None:
        ks = [round(0.1 * i, 1) for i in range(1, 10)]
    failures = 0
    worst = 0.0
    records = []
    for k in ks:
        try:
            w = injectivity_witness(k, seed)
        except (DomainError, RuntimeError) as exc:
            failures += 1
            records.append({"k": float(k), "error": str(exc)})
            continue
        worst = max(worst, w.coincidence)
        records.append(w.to_dict())
    refusal_ok = False
    try:
        injectivity_witness(1.0, seed)
    except DomainError:
        refusal_ok = True
    if not refusal_ok:
        failures += 1
    return CheckResult(
        name="injectivity_witness_grid", k=None, samples=len(ks),
        failures=failures, worst_residual=worst,
        info={"witnesses": records, "k1_refusal": refusal_ok},
    )


def identities_check() -> CheckResult:
    """A battery of closed-form pins evaluated at machine precision."""
    from fractions import Fraction

    checks = []

    def pin(name, ok):
        checks.append({"name": name, "ok": bool(ok)})

    for k in (0.3, 1.0, 2.5):
        u, v = geometry.psi(k, (1.0, -1.0))
        pin(f"psi(1,-1)@k={k}", abs(u - 0.5) < 1e-15 and abs(v - 1 / (2 * k)) < 1e-15)
        roots = geometry.psi_preimage(k, (0.5, 1 / (2 * k)))
        pin(f"double_root@k={k}",
            len(roots) <= 2 and min(abs(r[0] - 1) + abs(r[1] + 1) for r in roots) < 1e-9)
    quad = geometry.pa_sharp_quad(Fraction(1), 0)
    pin("quad_k1_a0", quad.vertices == (
        (Fraction(1), Fraction(0)), (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 2), Fraction(0))))
    # exact pairing identity and determinant on a rational orbit
    steps = _orbit.trace(Fraction(5, 7), Fraction(3, 10), 12, exact=True)
    pin("exact_residual_zero", all(s.residual == 0.0 for s in steps))
    det_ok = True
    pp, pc = Fraction(1), Fraction(0)
    qp, qc = Fraction(0), Fraction(1)
    kq = Fraction(5, 7)
    for s in steps:
        pp, pc = pc, (kq + s.digit) * pc + kq * pp
        qp, qc = qc, (kq + s.digit) * qc + kq * qp
        det_ok &= (pp * qc - pc * qp) == (-kq) ** s.n
    pin("determinant_exact", det_ok)
    g = (math.sqrt(5.0) - 1.0) / 2.0
    u, v = geometry.psi(1.0, (g, -(1.0 + g)))
    pin("golden_pair", abs(u - 1 / math.sqrt(5)) < 1e-12 and abs(v - 1 / math.sqrt(5)) < 1e-12)
    failures = sum(1 for c in checks if not c["ok"])
    return CheckResult(
        name="unit_identities", k=None, samples=len(checks),
        failures=failures, info={"pins": checks},
    )


# -- suite orchestration ------------------------------------------------------

SUITES = ("identities", "correspondence", "hyperbola", "containment",
          "regions", "witness")


def run_verification(cfg: ExperimentConfig, suites=SUITES) -> VerificationReport:
    checks: list[CheckResult] = []
    for suite in suites:
        if suite == "identities":
            checks.append(identities_check())
        elif suite == "correspondence":
            checks.extend(correspondence_check(cfg))
        elif suite == "hyperbola":
            checks.extend(hyperbola_check(cfg))
        elif suite == "containment":
            checks.extend(containment_check(cfg))
        elif suite == "regions":
            for k in cfg.k_list:
                checks.extend(region_two_sided_check(
                    k, samples=cfg.samples, seed=cfg.seed,
                    eps_boundary=cfg.tol.eps_boundary))
        elif suite == "witness":
            checks.append(witness_grid_check(seed=cfg.seed))
        else:
            raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    return VerificationReport(config=cfg.to_dict(), checks=checks)


# -- file emission -------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_region_csv(path, curves) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "u", "v"])
        for curve in curves:
            for (u, v) in curve.points:
                writer.writerow([curve.label, _fmt(u), _fmt(v)])


def write_pairs_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "x0_seed_index", "n", "u", "v", "x_n", "y_n", "a_n"])
        for r in records:
            writer.writerow([
                _fmt(r.k), r.index, r.n, _fmt(r.u), _fmt(r.v),
                _fmt(r.x), _fmt(r.y), r.digit,
            ])


def region_curves_for_plot(k, arc_points: int = 256, quad_digits=None) -> list:
    """All boundary curves for one parameter: the literal quadrangle
    edges, the strip-image quadrangles, and for k < 1 the five-curve
    boundary plus the bridging arc."""
    kf = float(k)
    curves = []
    quad = geometry.corollary_quad(kf)
    poly = quad.closed_polyline()
    for i in range(4):
        curves.append(geometry.LabeledCurve(
            f"corollary_edge_{i + 1}", (poly[i], poly[i + 1])))
    if quad_digits is None:
        quad_digits = range(0, 4) if kf >= 1.0 else range(1, 4)
    for a in quad_digits:
        q = geometry.pa_sharp_quad(kf, a)
        curves.append(geometry.LabeledCurve(
            f"pa_quad_{a}", tuple(q.closed_polyline())))
    if kf < 1.0:
        curves.extend(geometry.p0_boundary_curves(kf, arc_points=arc_points))
        curves.append(geometry.hyperbola_arc(kf, arc_points))
    return curves


def emit_plot_data(k, output_dir, samples: int = 2000, n_max: int = 30,
                   seed: int = 42, arc_points: int = 256) -> dict:
    """Write region_boundary.csv and jager_pairs.csv for one parameter.

    Returns the written paths.  Identical arguments produce identical
    bytes.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    region_path = out / "region_boundary.csv"
    pairs_path = out / "jager_pairs.csv"
    write_region_csv(region_path, region_curves_for_plot(k, arc_points))
    cfg = ExperimentConfig(k_list=(float(k),), samples=samples,
                           n_min=1, n_max=n_max, seed=seed)
    write_pairs_csv(pairs_path, iter_jager_pairs(cfg, float(k)))
    return {"region_boundary": str(region_path), "jager_pairs": str(pairs_path)}
