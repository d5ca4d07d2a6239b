"""Monte Carlo harness: single trials, phase scans and coupling checks.

Seeds are derived, never drawn: trial ``i`` under master seed ``S`` samples
its hypergraph from ``derive_seed(S, 2 i)`` and its vertex permutation from
``derive_seed(S, 2 i + 1)``.  The initial set of size ``a`` is the first
``a`` entries of that permutation, so the sets are nested across ``a`` and
the final size is monotone in ``a`` for every trial.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import mild_process, percolation, query_process
from .hashing import mix64
from .hypergraph import Hypergraph, sample_explicit
from .theory import RegimeParams, a_crit, a_star, regime_margin

log = logging.getLogger(__name__)

PROCESSES = ("bootstrap", "query", "mild", "all")
LARGE_FRACTION = 0.9
SCAN_COLUMNS = ("ratio", "a", "trials", "frac_large", "frac_small", "frac_other",
                "mean_final", "mean_steps")


def derive_seed(master: int, index: int) -> int:
    return mix64(int(master), int(index))


@dataclass(frozen=True)
class TrialConfig:
    params: RegimeParams
    a: int
    process: str = "bootstrap"
    master_seed: int = 0
    trial_index: int = 0
    verbose_trace: bool = False

    def __post_init__(self):
        if not 0 <= self.a <= self.params.n:
            raise ValueError(f"a={self.a} must lie in [0, n]")
        if self.process not in PROCESSES:
            raise ValueError(f"process must be one of {PROCESSES}")


@dataclass
class TrialRecord:
    k: int
    r: int
    n: int
    p: float
    a: int
    a_over_ac: float
    a_star: float
    seed: int
    process: str
    final_size: int
    productive_steps: int
    runtime_ms: float
    outcome: str
    regime_ok: bool = True
    sizes: dict = field(default_factory=dict)  # per-process final sizes when process == "all"
    trace: dict | None = None

    def as_dict(self) -> dict:
        out = asdict(self)
        if out["trace"] is None:
            out.pop("trace")
        return out


def classify(final_size: int, n: int, a_star_value: float) -> str:
    if final_size <= a_star_value:
        return "small"
    if final_size >= LARGE_FRACTION * n:
        return "large"
    return "other"


def trial_inputs(params: RegimeParams, master_seed: int, index: int) -> tuple[Hypergraph, np.ndarray]:
    """Hypergraph and vertex permutation for one trial."""
    h = sample_explicit(params.n, params.k, params.p, derive_seed(master_seed, 2 * index))
    perm = np.random.default_rng(derive_seed(master_seed, 2 * index + 1)).permutation(params.n)
    return h, perm


def _run_process(name: str, h: Hypergraph, r: int, A0: np.ndarray, params: RegimeParams,
                 verbose: bool = False):
    """(final set size, productive steps, trace json) for one process."""
    if name == "bootstrap":
        state = percolation.init(h, r, A0, verbose=verbose)
        percolation.run(state)
        return state.size, percolation.productive_steps(state.trace), percolation.trace_json(state)
    if name == "query":
        state = query_process.init(h, r, A0)
        query_process.run_state(state)
        tr = query_process.trace_json(state)
        return tr["final_size"], query_process.productive_steps(state.trace), tr
    if name == "mild":
        state = mild_process.init(h, r, A0)
        schedule = mild_schedule(params, len(A0))
        mild_process.run_state(state, schedule)
        tr = mild_process.trace_json(state)
        return tr["final_size"], mild_process.productive_steps(state.trace), tr
    raise ValueError(name)


def mild_schedule(params: RegimeParams, c0: int) -> mild_process.MildSchedule:
    """Batch schedule for the mild process; falls back to activate-all off-regime."""
    try:
        return mild_process.MildSchedule.from_params(params.with_side("supercritical"), c0)
    except ValueError:
        eps = 2.0 * params.delta / (1.0 - params.delta)
        if eps < 1.0:
            sup = RegimeParams(params.n, params.k, params.r, params.p, eps, params.delta, "supercritical")
            return mild_process.MildSchedule.from_params(sup, c0)
        return mild_process.MildSchedule.activate_all()


def run_trial(config: TrialConfig) -> TrialRecord:
    params = config.params
    a_s = a_star(params)
    a_c = a_crit(params)
    ok = regime_margin(params)[2]
    if not ok:
        log.warning("parameters (n=%d, k=%d, p=%g) are outside the regime margins",
                    params.n, params.k, params.p)
    start = time.perf_counter()
    h, perm = trial_inputs(params, config.master_seed, config.trial_index)
    A0 = np.sort(perm[: config.a])
    names = ("mild", "bootstrap", "query") if config.process == "all" else (config.process,)
    sizes, steps, trace = {}, {}, None
    for name in names:
        sizes[name], steps[name], tr = _run_process(name, h, params.r, A0, params, config.verbose_trace)
        if config.verbose_trace and name == names[-1]:
            trace = tr
    main = "bootstrap" if config.process == "all" else config.process
    elapsed = (time.perf_counter() - start) * 1e3
    return TrialRecord(
        k=params.k, r=params.r, n=params.n, p=params.p, a=config.a,
        a_over_ac=config.a / a_c, a_star=a_s,
        seed=derive_seed(config.master_seed, 2 * config.trial_index),
        process=config.process, final_size=int(sizes[main]), productive_steps=int(steps[main]),
        runtime_ms=elapsed, outcome=classify(sizes[main], params.n, a_s), regime_ok=ok,
        sizes=sizes if config.process == "all" else {}, trace=trace,
    )


# ------------------------------------------------------------------ scans


def parse_ratios(text: str) -> list[float]:
    """``"LO:HI:STEP"`` (inclusive, rounded to 12 digits) or a comma list."""
    if ":" not in text:
        return [float(x) for x in text.split(",") if x.strip()]
    lo, hi, step = (float(x) for x in text.split(":"))
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _scan_trial(args) -> list[tuple[int, int]]:
    params, sizes, master_seed, index, process = args
    h, perm = trial_inputs(params, master_seed, index)
    out = []
    for a in sizes:
        final, steps, _ = _run_process(process, h, params.r, np.sort(perm[:a]), params)
        out.append((int(final), int(steps)))
    return out


def phase_scan(params: RegimeParams, ratios, trials: int, master_seed: int,
               process: str = "bootstrap", n_jobs: int = 1) -> list[dict]:
    """Per-ratio outcome fractions with a = round(ratio * a_c).

    Every trial shares one hypergraph and one permutation across all ratios.
    Trials may run in worker processes; results are merged by trial index.
    """
    ratios = [float(x) for x in ratios]
    if any(x < 0 for x in ratios):
        raise ValueError("ratios must be non-negative")
    a_c, a_s = a_crit(params), a_star(params)
    sizes = [min(params.n, int(round(x * a_c))) for x in ratios]
    jobs = [(params, sizes, master_seed, i, process) for i in range(trials)]
    if n_jobs and n_jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_scan_trial, jobs))
    else:
        results = [_scan_trial(job) for job in jobs]

    rows = []
    for j, (ratio, a) in enumerate(zip(ratios, sizes)):
        finals = np.array([res[j][0] for res in results], dtype=float)
        steps = np.array([res[j][1] for res in results], dtype=float)
        outcomes = [classify(int(f), params.n, a_s) for f in finals]
        denom = max(trials, 1)
        rows.append({
            "ratio": ratio, "a": a, "trials": trials,
            "frac_large": outcomes.count("large") / denom,
            "frac_small": outcomes.count("small") / denom,
            "frac_other": outcomes.count("other") / denom,
            "mean_final": float(finals.mean()) if trials else 0.0,
            "mean_steps": float(steps.mean()) if trials else 0.0,
            "finals": finals.astype(int).tolist(),
        })
    return rows


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in SCAN_COLUMNS])
    return buf.getvalue()


# --------------------------------------------------------------- sandwich


@dataclass
class SandwichReport:
    trials: int
    violations: int
    triples: list[tuple[int, int, int]]
    shuffled_orders: int = 0
    details: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def sandwich_instance(h: Hypergraph, r: int, A0, schedule: mild_process.MildSchedule | None = None,
                      shuffles: int = 0, rng: np.random.Generator | None = None):
    """Run all three processes on one instance.

    Returns ``((|C_f|, |A_f|, |B_f|), violations)`` where violations lists the
    failed inclusions, including those under ``shuffles`` random
    within-family orders of the query-process.
    """
    A0 = sorted(int(v) for v in A0)
    schedule = schedule or mild_process.MildSchedule.activate_all()
    C_f, _ = mild_process.run(h, r, A0, schedule=schedule)
    state = percolation.init(h, r, A0)
    A_f, _ = percolation.run(state)
    B_f, _ = query_process.run(h, r, A0)
    bad = []
    if not C_f <= A_f:
        bad.append("mild not inside bootstrap")
    if not A_f <= B_f:
        bad.append("bootstrap not inside query (canonical order)")
    if shuffles:
        rng = rng if rng is not None else np.random.default_rng(0)
        for s in range(shuffles):
            B_s, _ = query_process.run(h, r, A0, rng=rng)
            if not A_f <= B_s:
                bad.append(f"bootstrap not inside query (shuffle {s})")
    return (len(C_f), len(A_f), len(B_f)), bad


def sandwich_check(params: RegimeParams, a: int, trials: int, master_seed: int,
                   shuffles: int = 0, shuffle_trials: int | None = None) -> SandwichReport:
    """Check C_f within A_f within B_f on ``trials`` independent instances."""
    report = SandwichReport(trials, 0, [])
    for i in range(trials):
        h, perm = trial_inputs(params, master_seed, i)
        A0 = np.sort(perm[:a])
        extra = shuffles if shuffle_trials is None or i < shuffle_trials else 0
        rng = np.random.default_rng(derive_seed(master_seed, 2 * trials + i))
        triple, bad = sandwich_instance(h, params.r, A0, mild_schedule(params, a), extra, rng)
        report.triples.append(triple)
        report.shuffled_orders += extra
        if bad:
            report.violations += 1
            report.details.extend(f"trial {i}: {msg}" for msg in bad)
    return report
