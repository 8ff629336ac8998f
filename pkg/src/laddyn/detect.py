"""Event detection and parameter sweeps.

Locates entanglement-transfer events (all entanglement on the last rung)
and W-state events (all six pairwise concurrences equal to 1/2) in the
numeric evolution, refines each against the closed-form event structure,
and generates the sweep data behind the time/coupling surface plots.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic, dynamics, measures, model
from .errors import ValidationError

ALL_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
LEG_CLASS_PAIRS = ((1, 3), (1, 4), (2, 3), (2, 4))

#: representative pair per observable class, used for sweep columns
CLASS_REPRESENTATIVE = {
    analytic.PairClass.FIRST_RUNG: (1, 2),
    analytic.PairClass.LEG: (1, 3),
    analytic.PairClass.LAST_RUNG: (3, 4),
}

TRANSFER = "transfer"
W_STATE = "w_state"

_REFINE_WIDTH = 1e-10
_MERGE_WINDOW = 1e-6


@dataclass(frozen=True)
class EventRecord:
    """One detected event with its closed-form prediction and residual."""

    kind: str
    n: int
    t_detected: float
    t_predicted: float
    residual: float
    fidelity: float | None = None


@dataclass(frozen=True)
class SweepRow:
    """All class-level observables at one (d, t) grid point."""

    d: float
    t: float
    c_first: float
    c_last: float
    c_leg: float
    chi_xx_first: float
    chi_yy_first: float
    chi_zz_first: float
    chi_xx_leg: float
    chi_yy_leg: float
    chi_zz_leg: float
    chi_xx_last: float
    chi_yy_last: float
    chi_zz_last: float
    s_tot_z: float


def w_fidelity(amps) -> float:
    """Overlap with the nearest member of the W family: (sum_j |b_j|)^2 / 4.

    The per-site phases of a W state are free, so the fidelity is maximized
    over them; the maximum is attained by aligning each phase with arg b_j,
    which gives this closed form.
    """
    b = np.abs(np.asarray(amps, dtype=complex))
    return float(b.sum() ** 2 / 4.0)


def _default_propagator(d: float,
                        graph: model.CouplingGraph = model.DEFAULT_GRAPH) -> dynamics.Propagator:
    h = model.build_hamiltonian(model.ModelParams(d=d), graph)
    return dynamics.make_propagator(h, model.initial_state())


def _bisect(f, lo: float, hi: float) -> float | None:
    """Root of f by bisection, or None when f does not change sign on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        return None
    while hi - lo > _REFINE_WIDTH:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _merge_events(events: list[EventRecord]) -> list[EventRecord]:
    """Collapse detections closer than the merge window, keeping the smaller residual."""
    events = sorted(events, key=lambda e: e.t_detected)
    merged: list[EventRecord] = []
    for ev in events:
        if merged and abs(ev.t_detected - merged[-1].t_detected) < _MERGE_WINDOW:
            if ev.residual < merged[-1].residual:
                merged[-1] = ev
        else:
            merged.append(ev)
    return merged


def _six_concurrences(psi) -> dict:
    return {
        pair: float(measures.concurrence_series(psi[None], *pair)[0])
        for pair in ALL_PAIRS
    }


def _scan_params(d: float, t_max: float, coarse_dt: float):
    if not t_max > 0.0:
        raise ValidationError(f"t_max must be positive, got {t_max}")
    if not coarse_dt > 0.0:
        raise ValidationError(f"coarse_dt must be positive, got {coarse_dt}")
    sp = analytic.spectral_params(d)  # validates d > 0
    return sp.mu + sp.nu


def find_transfer_events(d: float, t_max: float, coarse_dt: float = 0.01,
                         tol: float = 1e-9,
                         graph: model.CouplingGraph = model.DEFAULT_GRAPH) -> list[EventRecord]:
    """Transfer events: local maxima of C_{3,4} reaching 1 while all others vanish.

    Candidates come from a coarse numeric scan; each is refined by bisecting
    the closed-form derivative of C_{3,4} (proportional to sin((mu+nu)t/2))
    to 1e-10 in t and then checked numerically: C_{3,4} >= 1-tol, C_{1,2} <= tol
    and every leg-class concurrence <= tol.  Empty result if t_max is below
    the first event.
    """
    s = _scan_params(d, t_max, coarse_dt)
    prop = _default_propagator(d, graph)
    ts = dynamics.time_grid(0.0, t_max, coarse_dt)
    c_last = measures.concurrence_series(dynamics.evolve_states(prop, ts), 3, 4)

    events = []
    interior = np.flatnonzero(
        (c_last[1:-1] >= c_last[:-2]) & (c_last[1:-1] >= c_last[2:])
    ) + 1
    for i in interior:
        t_star = _bisect(lambda t: math.sin(s * t / 2.0), ts[i - 1], ts[i + 1])
        if t_star is None or t_star > t_max:
            continue
        psi = dynamics.evolve(prop, t_star)
        conc = _six_concurrences(psi)
        residual = max(
            1.0 - conc[(3, 4)],
            conc[(1, 2)],
            *(conc[p] for p in LEG_CLASS_PAIRS),
        )
        if conc[(3, 4)] < 1.0 - tol or conc[(1, 2)] > tol or any(
            conc[p] > tol for p in LEG_CLASS_PAIRS
        ):
            continue
        n = int(round((t_star * s / (2.0 * math.pi) - 1.0) / 2.0))
        if n < 0:
            continue
        events.append(EventRecord(
            kind=TRANSFER,
            n=n,
            t_detected=float(t_star),
            t_predicted=analytic.transfer_times(d, n),
            residual=float(residual),
        ))
    return _merge_events(events)


def find_w_events(d: float, t_max: float, coarse_dt: float = 0.01,
                  tol: float = 1e-9,
                  graph: model.CouplingGraph = model.DEFAULT_GRAPH) -> list[EventRecord]:
    """W-state events: all six pairwise concurrences within tol of 1/2.

    Candidates are sign changes of the numeric C_{1,2} - C_{3,4}; each is
    refined by bisecting the closed-form difference cos((mu+nu)t/2) and then
    verified numerically.  Each event reports the phase-maximized W fidelity.
    """
    s = _scan_params(d, t_max, coarse_dt)
    prop = _default_propagator(d, graph)
    ts = dynamics.time_grid(0.0, t_max, coarse_dt)
    states = dynamics.evolve_states(prop, ts)
    diff = (measures.concurrence_series(states, 1, 2)
            - measures.concurrence_series(states, 3, 4))

    events = []
    # <= 0 keeps a root that lands exactly on a grid point; duplicates merge
    crossings = np.flatnonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) <= 0)
    for i in crossings:
        t_star = _bisect(lambda t: math.cos(s * t / 2.0), ts[i], ts[i + 1])
        if t_star is None or t_star > t_max:
            continue
        psi = dynamics.evolve(prop, t_star)
        conc = _six_concurrences(psi)
        residual = max(abs(c - 0.5) for c in conc.values())
        if residual > tol:
            continue
        fid = w_fidelity(dynamics.one_particle_amplitudes(psi))
        if fid < 1.0 - tol:
            continue
        n = int(round((t_star * s / math.pi - 1.0) / 2.0))
        if n < 0:
            continue
        events.append(EventRecord(
            kind=W_STATE,
            n=n,
            t_detected=float(t_star),
            t_predicted=analytic.w_times(d, n),
            residual=float(residual),
            fidelity=fid,
        ))
    return _merge_events(events)


def _sweep_one_d(d: float, t_grid: np.ndarray,
                 graph: model.CouplingGraph) -> list[SweepRow]:
    prop = _default_propagator(d, graph)
    states = dynamics.evolve_states(prop, t_grid)
    cols = {}
    for cls, (p, q) in CLASS_REPRESENTATIVE.items():
        cols[cls] = {
            "c": measures.concurrence_series(states, p, q),
            "xx": measures.correlation_series(states, p, q, "x", "x"),
            "yy": measures.correlation_series(states, p, q, "y", "y"),
            "zz": measures.correlation_series(states, p, q, "z", "z"),
        }
    sz = measures.total_spin_series(states, "z")
    first = cols[analytic.PairClass.FIRST_RUNG]
    leg = cols[analytic.PairClass.LEG]
    last = cols[analytic.PairClass.LAST_RUNG]
    return [
        SweepRow(
            d=float(d), t=float(t),
            c_first=float(first["c"][i]), c_last=float(last["c"][i]),
            c_leg=float(leg["c"][i]),
            chi_xx_first=float(first["xx"][i]), chi_yy_first=float(first["yy"][i]),
            chi_zz_first=float(first["zz"][i]),
            chi_xx_leg=float(leg["xx"][i]), chi_yy_leg=float(leg["yy"][i]),
            chi_zz_leg=float(leg["zz"][i]),
            chi_xx_last=float(last["xx"][i]), chi_yy_last=float(last["yy"][i]),
            chi_zz_last=float(last["zz"][i]),
            s_tot_z=float(sz[i]),
        )
        for i, t in enumerate(t_grid)
    ]


def sweep(d_grid, t_grid, graph: model.CouplingGraph = model.DEFAULT_GRAPH,
          workers: int = 1) -> list[SweepRow]:
    """Observables over the Cartesian product of grids, ordered d-major then t.

    Duplicate d values are dropped with a warning.  Per-d work units are
    independent; workers > 1 evaluates them in a thread pool with the output
    order unchanged.
    """
    ds = [float(x) for x in np.atleast_1d(np.asarray(d_grid, dtype=float))]
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if len(ds) == 0 or ts.size == 0:
        raise ValidationError("sweep grids must be non-empty")
    if any(not dv > 0.0 for dv in ds):
        raise ValidationError("all sweep d values must be > 0")
    unique = list(dict.fromkeys(ds))
    if len(unique) != len(ds):
        warnings.warn("duplicate d values in sweep grid were dropped", stacklevel=2)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda dv: _sweep_one_d(dv, ts, graph), unique))
    else:
        chunks = [_sweep_one_d(dv, ts, graph) for dv in unique]
    return [row for chunk in chunks for row in chunk]


def w_time_curves(d_grid, n_max: int = 9) -> np.ndarray:
    """W times t_w(d, n) for n = 0..n_max, shape (n_max+1, len(d_grid)).

    Row n equals (2n+1) times row 0 exactly, and every row is strictly
    decreasing in d.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValidationError(f"n_max must be a non-negative integer, got {n_max!r}")
    ds = np.atleast_1d(np.asarray(d_grid, dtype=float))
    if ds.size == 0:
        raise ValidationError("d grid must be non-empty")
    base = np.array([analytic.w_times(float(dv), 0) for dv in ds])
    return np.array([(2 * n + 1) * base for n in range(int(n_max) + 1)])
