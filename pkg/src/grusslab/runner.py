"""Seeded suite runner: trial parameters, batched evaluation, report assembly.

Trials are split into blocks of :data:`BLOCK_SIZE` consecutive indices.
Each block is evaluated as one batch, and the block boundaries depend only
on the trial count, so a report is identical for any number of workers.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .covariance import (
    gruss_operator_terms,
    kittaneh_terms,
    lemma_y1_terms,
    thm13_terms,
    thm51_terms,
    x3_terms,
)
from .instances import InstanceConfig, gen_complex, gen_pd, gen_scalars, gen_unit_vector, trial_seed
from .operator_suites import OPERATOR_DOMAIN, OPERATOR_SUITES, operator_terms
from .opmeans import PositivePair
from .prng import ALGORITHM
from .quadrature import QuadratureConfig
from .scalar_suites import (
    REL_TOL,
    SCALAR_SUITES,
    SUITE_DOMAIN,
    check_gruss_base,
    eq67_terms,
    scalar_terms,
)
from .weights import ALL_WEIGHT_NAMES, weight

COVARIANCE_SUITES = ("THM51", "KITTANEH", "X3_REM11", "LEMMA_Y1", "THM13", "GRUSS_OP")
EXTRA_SCALAR_SUITES = ("GRUSS_BASE", "EQ6_EQ7")
ALL_SUITES = SCALAR_SUITES + EXTRA_SCALAR_SUITES + OPERATOR_SUITES + COVARIANCE_SUITES

V_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
S_GRID = (0.1, 0.5, 1.0)
SCALAR_RANGE = (1e-3, 1e3)
LEMMA_RANGE = (1e-2, 1e2)
EQ67_RANGE = (1.0001, 1e7)
BLOCK_SIZE = 32

_USES_V = {"THM1", "OP_HERON", "OP_POWER_AG", "OP_POWER_HG"}
_USES_WEIGHT = {"THM1", "CHAIN", "THM2", "OP_HERON", "OP_HEINZ_LOG", "OP_POWER_AG", "OP_POWER_HG"}


@dataclass(frozen=True)
class RunConfig:
    suites: tuple = ALL_SUITES
    dim: int = 4
    trials: int = 100
    seed: int = 0
    tol_psd: float | None = None
    quad_atol: float = QuadratureConfig.atol
    quad_rtol: float = QuadratureConfig.rtol
    weights: tuple = ALL_WEIGHT_NAMES
    format: str = "json"
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 1 <= self.dim <= 64:
            raise ValueError("dim must lie in [1, 64]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        unknown = [s for s in self.suites if s not in ALL_SUITES]
        if unknown or not self.suites:
            raise ValueError(f"unknown suite(s): {', '.join(unknown) or '(none)'}")
        if not self.weights:
            raise ValueError("need at least one weight")
        for w in self.weights:
            weight(w)
        if self.tol_psd is not None and not self.tol_psd >= 0:
            raise ValueError("tol_psd must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(atol=self.quad_atol, rtol=self.quad_rtol)

    def provenance(self) -> dict:
        """Everything that determines the report; the worker count is excluded."""
        d = asdict(self)
        del d["workers"]
        d["suites"] = list(self.suites)
        d["weights"] = list(self.weights)
        return d


# ---------------------------------------------------------------------------
# trial parameters and digests


def trial_params(suite: str, seed: int, trial: int, dim: int, weights) -> dict:
    """Parameters of one trial; everything else is drawn from ``seed XOR trial``."""
    p = {"suite": suite, "seed": seed, "trial": trial, "dim": dim}
    if suite in _USES_V:
        p["v"] = V_GRID[trial % len(V_GRID)]
    if suite in _USES_WEIGHT:
        p["weight"] = weights[(trial // len(V_GRID)) % len(weights)]
    if suite == "OP_ENTROPY":
        p["s"] = S_GRID[trial % len(S_GRID)]
    if suite == "GRUSS_BASE":
        k = len(weights)
        p["f"] = weights[trial % k]
        p["g"] = weights[(trial // k) % k]
    return p


_DIGEST_KEYS = ("suite", "seed", "trial", "dim", "v", "weight", "s", "f", "g")
_INT_KEYS = {"seed", "trial", "dim"}
_FLOAT_KEYS = {"v", "s"}


def digest(p: dict) -> str:
    return ";".join(f"{k}={p[k]:g}" if k in _FLOAT_KEYS else f"{k}={p[k]}" for k in _DIGEST_KEYS if k in p)


def parse_digest(text: str) -> dict:
    """Inverse of :func:`digest`; raises ValueError on malformed input."""
    p: dict = {}
    for part in text.strip().split(";"):
        key, sep, val = part.partition("=")
        if not sep or key not in _DIGEST_KEYS:
            raise ValueError(f"bad digest field {part!r}")
        p[key] = int(val) if key in _INT_KEYS else float(val) if key in _FLOAT_KEYS else val
    for key in ("suite", "seed", "trial", "dim"):
        if key not in p:
            raise ValueError(f"digest lacks {key}")
    if p["suite"] not in ALL_SUITES:
        raise ValueError(f"unknown suite {p['suite']!r}")
    return p


# ---------------------------------------------------------------------------
# batched evaluation


def _seeds(ps):
    return [trial_seed(p["seed"], p["trial"]) for p in ps]


def _pd_stack(ps, index):
    return np.stack([gen_pd(InstanceConfig(p["dim"], s), index)[0] for p, s in zip(ps, _seeds(ps))])


def _pd_with_bounds(ps, index):
    mats, lo, hi = [], [], []
    for p, s in zip(ps, _seeds(ps)):
        M, lam = gen_pd(InstanceConfig(p["dim"], s), index)
        mats.append(M)
        lo.append(lam[0])
        hi.append(lam[-1])
    return np.stack(mats), np.array(lo), np.array(hi)


def _vectors(ps):
    return np.stack([gen_unit_vector(p["dim"], s) for p, s in zip(ps, _seeds(ps))])


def _records(ps, margin, tol, gain=None, quad_error=None, details=None) -> list[dict]:
    out = []
    for i, p in enumerate(ps):
        m, t = float(margin[i]), float(tol[i])
        rec = {
            "trial": p["trial"], "digest": digest(p), "margin": m, "tol": t,
            "refinement_gain": None if gain is None else float(gain[i]),
            "quadrature_error": 0.0 if quad_error is None else float(quad_error[i]),
            "holds": bool(m >= -t),
        }
        if details is not None:
            rec["details"] = details(i)
        out.append(rec)
    return out


def _groups(ps, *keys):
    """Indices of ``ps`` grouped by the values of ``keys``, in first-seen order."""
    groups: dict = {}
    for i, p in enumerate(ps):
        groups.setdefault(tuple(p.get(k) for k in keys), []).append(i)
    return groups


def _scalar_block(suite, ps, qcfg):
    ab = np.stack([gen_scalars(s, 2, *SCALAR_RANGE, log=True) for s in _seeds(ps)])
    n = len(ps)
    margin, tol, gain, qerr = (np.empty(n) for _ in range(4))
    links = np.zeros((n, 3))
    for (w,), idx in _groups(ps, "weight").items():
        g = weight(w, *SUITE_DOMAIN[suite]) if w is not None else None
        v = np.array([ps[i].get("v", 0.5) for i in idx])
        r = scalar_terms(suite, ab[idx, 0], ab[idx, 1], v, g, qcfg)
        margin[idx], tol[idx], gain[idx], qerr[idx] = r["margin"], r["tol"], r["gain"], r["quad_error"]
        if suite == "CHAIN":
            links[idx] = r["link_margins"].T

    def details(i):
        d = {"a": float(ab[i, 0]), "b": float(ab[i, 1])}
        if suite == "CHAIN":
            d["link_margins"] = [float(z) for z in links[i]]
        return d

    return _records(ps, margin, tol, gain, qerr, details)


def _eq67_block(ps):
    x = np.array([gen_scalars(s, 1, *EQ67_RANGE, log=True)[0] for s in _seeds(ps)])
    lhs6, lhs7, rhs = eq67_terms(x)
    m6, m7 = rhs - lhs6, rhs - lhs7
    t6, t7 = REL_TOL * (rhs + lhs6), REL_TOL * (rhs + lhs7)
    # report the member closer to failing, relative to its own tolerance
    use7 = m7 / t7 < m6 / t6
    return _records(ps, np.where(use7, m7, m6), np.where(use7, t7, t6), details=lambda i: {
        "x": float(x[i]), "lhs6": float(lhs6[i]), "lhs7": float(lhs7[i]), "rhs": float(rhs[i])})


def _gruss_base_block(ps, qcfg):
    reps = [check_gruss_base(f, g, f.g_lo, f.g_hi, g.g_lo, g.g_hi, qcfg)
            for f, g in ((weight(p["f"]), weight(p["g"])) for p in ps)]
    return _records(ps, [r.margin for r in reps], [r.tol for r in reps],
                    quad_error=[r.quadrature_error for r in reps], details=lambda i: reps[i].details)


def _operator_block(suite, ps, qcfg, tol_psd):
    A, B = _pd_stack(ps, 0), _pd_stack(ps, 1)
    n = len(ps)
    margin, tol, gain, qerr = (np.empty(n) for _ in range(4))
    lo, hi = OPERATOR_DOMAIN[suite]
    for (s,), idx in _groups(ps, "s").items():
        pair = PositivePair(A[idx], B[idx])
        v = np.array([ps[i].get("v", 0.5) for i in idx])
        gs = [weight(ps[i].get("weight", "affine"), lo, hi) for i in idx]
        r = operator_terms(suite, pair, v, gs, 1.0 if s is None else s, qcfg, tol_psd)
        margin[idx], tol[idx], gain[idx], qerr[idx] = r["min_eig_diff"], r["tol"], r["gain"], r["quad_error"]
    return _records(ps, margin, tol, gain, qerr)


def _covariance_block(suite, ps, tol_psd):
    if suite == "LEMMA_Y1":
        q = np.stack([gen_scalars(s, 4, *LEMMA_RANGE, log=True) for s in _seeds(ps)])
        r = lemma_y1_terms(*q.T)
        return _records(ps, r["margin"], r["tol"], details=lambda i: {"abcd": [float(z) for z in q[i]]})
    x = _vectors(ps)
    if suite in ("THM51", "KITTANEH"):
        T = np.stack([gen_complex(p["dim"], s) for p, s in zip(ps, _seeds(ps))])
        r = (thm51_terms if suite == "THM51" else kittaneh_terms)(T, x)
        return _records(ps, r["margin"], np.broadcast_to(r["tol"], r["margin"].shape))
    if suite == "X3_REM11":
        r = x3_terms(_pd_stack(ps, 0), _pd_stack(ps, 1), x)
        lm = r["link_margins"] / r["chain_tol"]
        # one margin per trial: the worst of the bound and its chain, each scaled by its tolerance
        scaled = np.minimum(r["margin"] / r["tol"], lm.min(axis=0))
        return _records(ps, scaled * r["tol"], r["tol"], details=lambda i: {
            "x3_margin": float(r["margin"][i]), "link_margins": [float(z) for z in r["link_margins"][:, i]]})
    A, la, ha = _pd_with_bounds(ps, 0)
    B, lb, hb = _pd_with_bounds(ps, 1)
    bounds = (la, ha, lb, hb)
    if suite == "THM13":
        r = thm13_terms(A, B, bounds, x, tol_psd)
        tol = r["tol"]

        def details(i):
            links = {k: float(v[i]) for k, v in r["links"].items()}
            return {
                "bounds": [float(la[i]), float(ha[i]), float(lb[i]), float(hb[i])],
                "lhs": float(r["lhs"][i]), "rhs": float(r["rhs"][i]), "plain": float(r["plain"][i]),
                "c_A": float(r["c_A"][i]), "c_B": float(r["c_B"][i]), "quotient": float(r["quotient"][i]),
                "links": links, "failing_links": [k for k, v in links.items() if v < -float(tol[i])],
                "correction_nonnegative": bool(r["correction_nonnegative"][i]),
            }

        return _records(ps, r["margin"], tol, gain=r["correction"], details=details)
    r = gruss_operator_terms(A, B, bounds, x, tol_psd)
    return _records(ps, r["margin"], r["tol"], details=lambda i: {
        "link_margins": [float(z) for z in r["links"][:, i]]})


def evaluate(suite: str, ps: list[dict], qcfg: QuadratureConfig | None = None,
             tol_psd: float | None = None) -> list[dict]:
    """Evaluate a batch of trials of one suite; records come back in input order."""
    qcfg = qcfg or QuadratureConfig()
    if suite in SCALAR_SUITES:
        return _scalar_block(suite, ps, qcfg)
    if suite == "EQ6_EQ7":
        return _eq67_block(ps)
    if suite == "GRUSS_BASE":
        return _gruss_base_block(ps, qcfg)
    if suite in OPERATOR_SUITES:
        return _operator_block(suite, ps, qcfg, tol_psd)
    if suite in COVARIANCE_SUITES:
        return _covariance_block(suite, ps, tol_psd)
    raise ValueError(f"unknown suite {suite!r}")


def _task(args):
    suite, ps, qcfg, tol_psd = args
    return evaluate(suite, ps, qcfg, tol_psd)


def _summary(suite: str, records: list[dict]) -> dict:
    gains = [r["refinement_gain"] for r in records if r["refinement_gain"] is not None]
    failures = []
    for r in records:
        if not r["holds"]:
            f = {k: r[k] for k in ("digest", "margin", "tol")}
            if "details" in r:
                f["details"] = r["details"]
            failures.append(f)
    return {
        "id": suite,
        "trials": len(records),
        "failures": failures,
        "worst_margin": min(r["margin"] for r in records),
        "refinement_gain": {"min": min(gains), "mean": float(np.mean(gains))} if gains else None,
        "quadrature_error_max": max(r["quadrature_error"] for r in records),
    }


def run_records(cfg: RunConfig) -> dict[str, list[dict]]:
    """Per-suite trial records, ordered by trial index."""
    tasks = []
    for suite in cfg.suites:
        ps = [trial_params(suite, cfg.seed, t, cfg.dim, cfg.weights) for t in range(cfg.trials)]
        for start in range(0, len(ps), BLOCK_SIZE):
            tasks.append((suite, ps[start:start + BLOCK_SIZE], cfg.quadrature, cfg.tol_psd))
    if cfg.workers == 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_task, tasks))
    out: dict[str, list[dict]] = {s: [] for s in cfg.suites}
    for (suite, *_), recs in zip(tasks, results):
        out[suite].extend(recs)
    return out


def build_report(cfg: RunConfig, records: dict[str, list[dict]]) -> dict:
    return {
        "config": cfg.provenance(),
        "suites": [_summary(s, records[s]) for s in cfg.suites],
        "version": {"package": __version__, "prng": ALGORITHM},
    }


def report_failures(report: dict) -> int:
    return sum(len(s["failures"]) for s in report["suites"])


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


CSV_FIELDS = ("suite", "trial", "digest", "margin", "tol", "refinement_gain", "quadrature_error", "holds")


def render_csv(records: dict[str, list[dict]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for suite, recs in records.items():
        for r in recs:
            w.writerow([suite] + [("" if r[k] is None else repr(r[k]) if isinstance(r[k], float) else r[k])
                                  for k in CSV_FIELDS[1:]])
    return buf.getvalue()


def replay(text: str, qcfg: QuadratureConfig | None = None, tol_psd: float | None = None) -> dict:
    """Re-evaluate the single trial named by a failure digest."""
    p = parse_digest(text)
    return evaluate(p["suite"], [p], qcfg, tol_psd)[0]


def default_workers() -> int:
    return os.cpu_count() or 1
