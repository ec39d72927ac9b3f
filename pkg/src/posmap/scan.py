"""Job-level evaluation: detector bundles, parameter sweeps and onset bisection.

These are the pure functions behind the command-line front end.  Targets
and maps are given as the same JSON-style descriptors the CLI accepts.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import channels, discrimination, moments, states
from .errors import NoSignChange, NumericalFailure, ParameterOutOfRange
from .maps import PositiveMap, Reduction, map_from_dict
from .serialization import decode_density

STATE_DETECTORS = ("T1", "T2", "T3", "P3PPT", "HankelPT")
CHANNEL_DETECTORS = ("T4", "T5")
CHANNEL_PARAM = {"depolarizing": "p", "dephasing": "v"}


class NonMonotoneVerdict(NumericalFailure):
    pass


def worker_count() -> int:
    cap = os.environ.get("POSMAP_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def ordered_map(func: Callable, items: Sequence) -> list:
    """``[func(x) for x in items]``, possibly evaluated on a thread pool."""
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# -- targets -----------------------------------------------------------------

def is_channel_target(target: dict) -> bool:
    return "channel" in target


def build_state(target: dict, param: float | None = None, seed: int = 0) -> tuple[np.ndarray, int, int]:
    name = target.get("state")
    if name == "matrix":
        return decode_density(target)
    if name == "random_schmidt":
        d = int(target.get("d", 3))
        r = int(target.get("rank", target.get("r", 1)))
        sample = states.random_schmidt_bounded(d, r, int(target.get("num_terms", 4)), seed)
        return sample.state, d, d
    if param is None:
        param = target.get("param")
    return states.state_from_family(name, int(target.get("d", 3)), param)


def build_channel(target: dict, param: float | None = None) -> channels.Channel:
    desc = dict(target)
    if param is not None:
        key = CHANNEL_PARAM.get(desc.get("channel"))
        if key is None:
            raise ParameterOutOfRange(f"channel {desc.get('channel')!r} has no scan parameter")
        desc[key] = param
    elif "param" in desc and desc.get("channel") in CHANNEL_PARAM:
        desc.setdefault(CHANNEL_PARAM[desc["channel"]], desc["param"])
    return channels.channel_from_dict(desc)


def build_map(map_desc: dict | None, d: int) -> PositiveMap:
    if map_desc is None:
        return Reduction(d, 1.0)
    return map_from_dict(map_desc, d)


def default_detectors(map_: PositiveMap | None, channel: bool) -> list[str]:
    if channel:
        return ["T4", "T5"]
    return ["T1", "T2"] if isinstance(map_, Reduction) else ["T3"]


# -- single evaluations --------------------------------------------------------

@dataclass(frozen=True)
class Evaluation:
    moments: moments.MomentVector
    reports: dict  # detector name -> DetectionReport
    det_h1: float
    det_h2: float | None


def _hankel_dets(s: moments.MomentVector) -> tuple[float, float | None]:
    v = s.as_array()
    h1 = float(np.linalg.det(moments.hankel_matrix(v, 1)))
    h2 = float(np.linalg.det(moments.hankel_matrix(v, 2))) if len(v) >= 5 else None
    return h1, h2


def evaluate_state(rho, dA: int, dB: int, map_: PositiveMap, detectors: Sequence[str], m: int = 2,
                   n_max: int = moments.DEFAULT_NMAX, subsystem: str = "B") -> Evaluation:
    _check_depth(n_max, m)
    s = moments.map_moments(map_, rho, dA, dB, n_max, subsystem)
    reports = {}
    p = None
    for det in detectors:
        if det == "T1":
            reports[det] = moments.theorem1_check(s)
        elif det in ("T2", "T3"):
            reports[det] = moments.hankel_criterion(s, m, detector=det)
        elif det in ("P3PPT", "HankelPT"):
            if p is None:
                p = moments.pt_moments(rho, dA, dB, n_max)
            reports[det] = moments.p3_ppt_check(p) if det == "P3PPT" else moments.pt_hankel_check(p, m)
        else:
            raise ParameterOutOfRange(f"detector {det!r} does not apply to states")
    return Evaluation(s, reports, *_hankel_dets(s))


def evaluate_channel(ch: channels.Channel, r: int, detectors: Sequence[str], m: int = 2,
                     n_max: int = moments.DEFAULT_NMAX, k: float | None = None) -> Evaluation:
    _check_depth(n_max, m)
    e = channels.channel_moments(ch, r, n_max, k)
    reports = {}
    for det in detectors:
        if det == "T4":
            reports[det] = channels.theorem4_check(e)
        elif det == "T5":
            reports[det] = channels.theorem5_check(e, m)
        else:
            raise ParameterOutOfRange(f"detector {det!r} does not apply to channels")
    return Evaluation(e, reports, *_hankel_dets(e))


def _check_depth(n_max: int, m: int) -> None:
    if m < 1 or n_max < 2 * m + 1:
        raise ParameterOutOfRange(f"n_max={n_max} is too small for Hankel order m={m} (need {2 * m + 1})")


# -- sweeps --------------------------------------------------------------------

def grid_points(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ParameterOutOfRange("a scan grid needs at least 2 steps")
    return np.linspace(start, stop, steps)


def scan_columns(n_max: int, detectors: Sequence[str], channel: bool) -> list[str]:
    prefix = "e" if channel else "s"
    return (["parameter"] + [f"{prefix}{i}" for i in range(1, n_max + 1)]
            + ["detH1", "detH2", "min_eig_S"] + list(detectors))


def scan_row(param: float, ev: Evaluation, detectors: Sequence[str]) -> dict:
    row = {"parameter": float(param)}
    prefix = "e" if isinstance(ev.moments, channels.ChannelMomentVector) else "s"
    for i, x in enumerate(ev.moments.values, start=1):
        row[f"{prefix}{i}"] = x
    row["detH1"] = ev.det_h1
    row["detH2"] = ev.det_h2
    row["min_eig_S"] = ev.moments.min_eigenvalue
    for det in detectors:
        row[det] = ev.reports[det].verdict
    return row


def scan_state(target: dict, map_desc: dict | None, grid: np.ndarray, detectors: Sequence[str] | None = None,
               m: int = 2, n_max: int = moments.DEFAULT_NMAX, seed: int = 0, subsystem: str = "B") -> list[dict]:
    def one(x):
        rho, dA, dB = build_state(target, float(x), seed)
        map_ = build_map(map_desc, dB if subsystem == "B" else dA)
        dets = list(detectors or default_detectors(map_, False))
        return scan_row(x, evaluate_state(rho, dA, dB, map_, dets, m, n_max, subsystem), dets)

    return ordered_map(one, list(grid))


def scan_channel(target: dict, r: int, grid: np.ndarray, detectors: Sequence[str] | None = None,
                 m: int = 2, n_max: int = moments.DEFAULT_NMAX, k: float | None = None) -> list[dict]:
    dets = list(detectors or default_detectors(None, True))

    def one(x):
        return scan_row(x, evaluate_channel(build_channel(target, float(x)), r, dets, m, n_max, k), dets)

    return ordered_map(one, list(grid))


# -- thresholds ----------------------------------------------------------------

def bisect_onset(predicate: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-4,
                 prescan: int = 32) -> float:
    """Locate the parameter where ``predicate`` changes value inside ``[lo, hi]``.

    A ``prescan``-point scan checks that the verdict changes exactly once,
    then bisection narrows the change to an interval of width ``tol``.
    Returns the midpoint of that interval.
    """
    xs = np.linspace(lo, hi, prescan)
    vals = [bool(predicate(float(x))) for x in xs]
    changes = [i for i in range(1, prescan) if vals[i] != vals[i - 1]]
    if not changes:
        raise NoSignChange(f"verdict is {vals[0]} across [{lo}, {hi}]")
    if len(changes) > 1:
        raise NonMonotoneVerdict(f"verdict changes {len(changes)} times across [{lo}, {hi}]")
    i = changes[0]
    a, b, va = float(xs[i - 1]), float(xs[i]), vals[i - 1]
    while b - a > tol:
        mid = 0.5 * (a + b)
        if bool(predicate(mid)) == va:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def detector_predicate(target: dict, detector: str, map_desc: dict | None = None, r: int = 1, m: int = 2,
                       n_max: int = moments.DEFAULT_NMAX, seed: int = 0) -> Callable[[float], bool]:
    if is_channel_target(target):
        def pred(x):
            return evaluate_channel(build_channel(target, x), r, [detector], m, n_max).reports[detector].detected
    else:
        def pred(x):
            rho, dA, dB = build_state(target, x, seed)
            ev = evaluate_state(rho, dA, dB, build_map(map_desc, dB), [detector], m, n_max)
            return ev.reports[detector].detected
    return pred


def bisect_threshold(target: dict, map_desc: dict | None, detector: str, lo: float, hi: float,
                     tol: float = 1e-4, r: int = 1, m: int = 2, n_max: int = moments.DEFAULT_NMAX) -> float:
    return bisect_onset(detector_predicate(target, detector, map_desc, r, m, n_max), lo, hi, tol)


def discriminate(rho, dA: int, r: int) -> dict:
    report = discrimination.discrimination_witness(rho, dA, r)
    pair = discrimination.reduction_channel_pair(rho.shape[0] // dA, r)
    e2e = discrimination.end_to_end_advantage(rho, dA, r)
    return {"witness": report.to_dict(), "end_to_end_advantage": e2e, "reference_value": pair.k_scale,
            "difference_law_defect": pair.choi_difference_defect()}
