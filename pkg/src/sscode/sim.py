"""Seeded Monte Carlo sweeps over SNR and decoder configurations.

Trial ``i`` at SNR point ``p`` draws everything it needs (true index,
source phase, noise) from the substream keyed by ``(seed, p, i)``, so a
sweep is reproducible regardless of which decoders run or how many
threads share the work. All decoders see the same realization.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import SourceMode, complex_noise, noise_variance, substream_rng
from .codebook import Codebook, build_codebook, manifold
from .decoders import GEOMETRIC_KINDS, DecoderConfig, antenna_tables, decode
from .numtheory import ArrayGeometry, bose_chowla_set

CSV_COLUMNS = [
    "decoder", "z", "k", "g", "snr_db", "trials", "errors", "p_err",
    "ci_lo", "ci_hi", "mean_decode_ns", "mean_candidates",
]

CHUNK = 256


def default_source_mode(cfg: DecoderConfig) -> SourceMode:
    """Phase-blind decoders get a random source phase; the geometric family needs x = 1."""
    return SourceMode.FIXED_UNIT if cfg.kind in GEOMETRIC_KINDS else SourceMode.RANDOM_PHASE


@dataclass
class SweepPlan:
    m: int = 19
    snr_db_points: Sequence[float] = (0.0,)
    trials_per_point: int = 1000
    decoders: Sequence[DecoderConfig] = (DecoderConfig("map"),)
    seed: int = 0
    source_modes: Optional[dict] = None
    geometry: Optional[ArrayGeometry] = None

    def __post_init__(self):
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        for s in self.snr_db_points:
            if math.isnan(s) or s == -math.inf:
                raise ValueError(f"invalid SNR point {s}")
        if not self.decoders:
            raise ValueError("at least one decoder is required")

    def source_mode(self, cfg: DecoderConfig) -> SourceMode:
        if self.source_modes and cfg.label in self.source_modes:
            return SourceMode(self.source_modes[cfg.label])
        return default_source_mode(cfg)

    def resolve_geometry(self) -> ArrayGeometry:
        return self.geometry if self.geometry is not None else bose_chowla_set(self.m)

    def as_dict(self) -> dict:
        geom = self.resolve_geometry()
        return {
            "m": geom.m,
            "n": geom.modulus,
            "positions": list(geom.positions),
            "snr_db_points": [float(s) for s in self.snr_db_points],
            "trials_per_point": self.trials_per_point,
            "seed": self.seed,
            "decoders": [
                {**asdict(d), "label": d.label, "source_mode": self.source_mode(d).value}
                for d in self.decoders
            ],
        }


@dataclass
class PointResult:
    decoder: DecoderConfig
    snr_db: float
    source_mode: str
    trials: int = 0
    errors: int = 0
    decode_ns: list = field(default_factory=list, repr=False)
    candidates: list = field(default_factory=list, repr=False)

    @property
    def p_err(self) -> float:
        return self.errors / self.trials

    @property
    def wilson_ci95(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.trials)

    @property
    def mean_decode_ns(self) -> float:
        return float(np.mean(self.decode_ns)) if self.decode_ns else 0.0

    @property
    def median_decode_ns(self) -> float:
        return float(np.median(self.decode_ns)) if self.decode_ns else 0.0

    @property
    def mean_candidates(self) -> float:
        return float(np.mean(self.candidates)) if self.candidates else 0.0


@dataclass
class SweepResult:
    plan: SweepPlan
    points: list

    def get(self, label: str, snr_db: float) -> PointResult:
        for p in self.points:
            if p.decoder.label == label and p.snr_db == snr_db:
                return p
        raise KeyError((label, snr_db))

    def rows(self, timing: bool = True) -> list[dict]:
        out = []
        for p in self.points:
            lo, hi = p.wilson_ci95
            d = p.decoder
            out.append({
                "decoder": d.kind,
                "z": d.z if d.kind == "window" else "",
                "k": d.k if d.kind in ("modified-geometric", "geo-reduced-map") else "",
                "g": d.shortlist_size(self.plan.resolve_geometry().modulus) if d.kind == "geo-reduced-map" else "",
                "snr_db": _fmt(p.snr_db),
                "trials": p.trials,
                "errors": p.errors,
                "p_err": _fmt(p.p_err),
                "ci_lo": _fmt(lo),
                "ci_hi": _fmt(hi),
                "mean_decode_ns": _fmt(p.mean_decode_ns) if timing else "",
                "mean_candidates": _fmt(p.mean_candidates),
            })
        return out

    def to_csv(self, header_line: Optional[str] = None, timing: bool = True) -> str:
        buf = io.StringIO()
        if header_line:
            buf.write(f"# {header_line}\n")
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows(timing))
        return buf.getvalue()

    def to_json(self, timing: bool = True) -> str:
        return json.dumps({"plan": self.plan.as_dict(), "results": self.rows(timing)}, indent=2)


def _fmt(x: float) -> str:
    return repr(float(x))


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = max(0.0, centre - half)
    hi = min(1.0, centre + half)
    # guard the endpoints against rounding
    if errors == 0:
        lo = 0.0
    if errors == trials:
        hi = 1.0
    return lo, hi


def draw_trial(geom: ArrayGeometry, seed: int, point: int, trial: int, variance: float):
    """True 1-based index, unit source phase, and noise for one trial."""
    rng = substream_rng(seed, point, trial)
    n = int(rng.integers(1, geom.modulus + 1))
    phase = complex(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
    noise = complex_noise(rng, geom.m, variance) if variance > 0 else np.zeros(geom.m, complex)
    return n, phase, noise


def _run_chunk(plan, book, point_idx, snr_db, trials, modes, timing):
    geom = book.geometry
    var = noise_variance(snr_db)
    ndec = len(plan.decoders)
    errors = [0] * ndec
    ns = [[] for _ in range(ndec)]
    cands = [[] for _ in range(ndec)]
    for i in trials:
        n, phase, w = draw_trial(geom, plan.seed, point_idx, i, var)
        h = manifold(geom, n)
        received = {
            SourceMode.FIXED_UNIT: h + w,
            SourceMode.RANDOM_PHASE: h * phase + w,
        }
        for j, cfg in enumerate(plan.decoders):
            y = received[modes[j]]
            t0 = time.perf_counter_ns() if timing else 0
            out = decode(y, cfg, book)
            if timing:
                ns[j].append(time.perf_counter_ns() - t0)
            cands[j].append(out.candidate_count_examined)
            errors[j] += out.estimated_index != n
    return errors, ns, cands


def run_sweep(
    plan: SweepPlan,
    threads: int = 1,
    timing: bool = True,
    book: Optional[Codebook] = None,
) -> SweepResult:
    """Paired Monte Carlo error-rate estimate for every (decoder, SNR) point."""
    geom = plan.resolve_geometry()
    if book is None:
        book = build_codebook(geom)
    # build shared caches before any worker starts
    antenna_tables(geom)
    for cfg in plan.decoders:
        if cfg.kind == "window":
            book.window_words(cfg.z)
    modes = [plan.source_mode(c) for c in plan.decoders]
    if threads <= 0:
        threads = os.cpu_count() or 1

    points = []
    for p_idx, snr in enumerate(plan.snr_db_points):
        chunks = [range(s, min(s + CHUNK, plan.trials_per_point)) for s in range(0, plan.trials_per_point, CHUNK)]
        if threads == 1 or len(chunks) == 1:
            parts = [_run_chunk(plan, book, p_idx, snr, c, modes, timing) for c in chunks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: _run_chunk(plan, book, p_idx, snr, c, modes, timing), chunks))
        for j, cfg in enumerate(plan.decoders):
            res = PointResult(cfg, float(snr), modes[j].value)
            res.trials = plan.trials_per_point
            for errors, ns, cands in parts:
                res.errors += errors[j]
                res.decode_ns.extend(ns[j])
                res.candidates.extend(cands[j])
            points.append(res)
    return SweepResult(plan, points)


def ordered_within_ci(worse: PointResult, better: PointResult) -> bool:
    """``p(worse) >= p(better)`` holds outright or the 95% intervals overlap."""
    if worse.p_err >= better.p_err:
        return True
    return worse.wilson_ci95[1] >= better.wilson_ci95[0]


@dataclass
class ScalingReport:
    m_points: list
    median_ns: dict
    slopes: dict
    candidates: dict
    operations: dict
    operation_slopes: dict

    def as_dict(self) -> dict:
        return asdict(self)


def operation_count(cfg: DecoderConfig, out, m: int) -> int:
    """Machine-independent work: complex multiply-adds for correlations, plus quantizations and votes."""
    if cfg.kind in ("map", "window"):
        return out.candidate_count_examined * m
    votes = out.auxiliary["votes_cast"]
    if cfg.kind == "geo-reduced-map":
        return m + votes + out.candidate_count_examined * m
    return m + votes


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def runtime_scaling(
    decoders: Sequence[DecoderConfig],
    m_points: Sequence[int],
    trials: int = 200,
    snr_db: float = 10.0,
    seed: int = 0,
    warmup: int = 20,
) -> ScalingReport:
    """Median wall time per decode versus M, with the fitted log-log slope."""
    if len(m_points) < 3:
        raise ValueError("need at least three m points to fit a slope")
    median_ns = {c.label: [] for c in decoders}
    cand = {c.label: [] for c in decoders}
    ops = {c.label: [] for c in decoders}
    for m in m_points:
        geom = bose_chowla_set(m)
        book = build_codebook(geom)
        antenna_tables(geom)
        var = noise_variance(snr_db)
        signals = []
        for i in range(trials + warmup):
            n, _, w = draw_trial(geom, seed, m, i, var)
            h = manifold(geom, n)
            signals.append(h + w)
        for cfg in decoders:
            if cfg.kind == "window":
                book.window_words(cfg.z)
            times = []
            counts = []
            work = []
            for i, y in enumerate(signals):
                t0 = time.perf_counter_ns()
                out = decode(y, cfg, book)
                dt = time.perf_counter_ns() - t0
                if i >= warmup:
                    times.append(dt)
                    counts.append(out.candidate_count_examined)
                    work.append(operation_count(cfg, out, m))
            median_ns[cfg.label].append(float(np.median(times)))
            cand[cfg.label].append(float(np.mean(counts)))
            ops[cfg.label].append(float(np.mean(work)))
    slopes = {label: loglog_slope(m_points, t) for label, t in median_ns.items()}
    op_slopes = {label: loglog_slope(m_points, w) for label, w in ops.items()}
    return ScalingReport(list(m_points), median_ns, slopes, cand, ops, op_slopes)
