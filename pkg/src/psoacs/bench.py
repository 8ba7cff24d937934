"""Cross-instance evaluation of named ACS parameter sets."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from .acs import AcsParams, TrialResult, run_trial
from .seeding import derive_rng, name_key
from .tsplib import TspInstance

#: TSPLIB optimal tour lengths of the bundled instances.
KNOWN_OPTIMA = {
    "eil51": 426,
    "eil76": 538,
    "eil101": 629,
    "kroA100": 21282,
    "kroB100": 22141,
    "rat99": 1211,
}

PARAM_KEYS = ("q0", "phi_exp", "beta", "rho", "alpha", "neighbor_frac", "num_ants")


@dataclass(frozen=True)
class ParamPreset:
    name: str
    params: AcsParams


def _tuned(name, alpha, beta, rho, phi, na, q0, frac):
    return ParamPreset(name, AcsParams(q0=q0, phi_exp=phi, beta=beta, rho=rho, alpha=alpha,
                                       neighbor_frac=frac, num_ants=na))


def _builtin() -> dict[str, ParamPreset]:
    rows = [
        _tuned("P_eil51", 0.36, 7, 0.40, 1, 1, 0.54, 0.18),
        _tuned("P_eil76", 0.21, 5, 0.40, 1, 5, 0.58, 0.20),
        _tuned("P_eil101", 0.71, 7, 0.23, 2, 7, 0.78, 0.12),
        _tuned("P_kroA100", 0.64, 4, 0.24, 1, 4, 0.64, 0.12),
        _tuned("P_kroB100", 0.71, 1, 0.08, 1, 39, 0.86, 0.12),
        _tuned("P_rat99", 0.15, 3, 0.28, 1, 9, 0.95, 0.00),
    ]
    # classic ACS and GA-tuned ACS, each expanded over neighbourhood fractions 0.1..0.9
    for prefix, alpha, beta, rho, q0 in (("PACS", 0.10, 2, 0.10, 0.9), ("ACS_GA", 0.20, 6, 0.20, 0.7)):
        rows += [_tuned(f"{prefix}-{i}", alpha, beta, rho, 1, 10, q0, i / 10) for i in range(1, 10)]
    return {p.name: p for p in rows}


PRESETS = _builtin()


def get_preset(name: str) -> ParamPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None


def format_preset(preset: ParamPreset) -> str:
    p = preset.params
    lines = [f"name={preset.name}"] + [f"{k}={getattr(p, k)}" for k in PARAM_KEYS]
    return "\n".join(lines) + "\n"


def format_presets(presets) -> str:
    return "\n".join(format_preset(p) for p in presets)


def parse_presets(text: str) -> list[ParamPreset]:
    """Read blank-line separated ``key=value`` blocks. ``#`` starts a comment."""
    blocks, current = [], {}
    for lineno, raw in enumerate(text.splitlines() + [""], start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if current:
                blocks.append((lineno, current))
                current = {}
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        current[key.strip()] = value.strip()
    out = []
    for lineno, block in blocks:
        missing = [k for k in ("name",) + PARAM_KEYS if k not in block]
        if missing:
            raise ValueError(f"preset ending at line {lineno} lacks {', '.join(missing)}")
        kw = {k: float(block[k]) for k in PARAM_KEYS}
        for k in ("phi_exp", "beta", "num_ants"):
            kw[k] = int(kw[k])
        out.append(ParamPreset(block["name"], AcsParams(**kw)))
    names = [p.name for p in out]
    if len(set(names)) != len(names):
        raise ValueError("duplicate preset names")
    return out


@dataclass
class EvalRecord:
    preset: str
    instance: str
    trials: int
    avg_length: float
    min_length: int
    avg_time_to_best: float
    avg_total_time: float
    raw: list = None

    @classmethod
    def from_trials(cls, preset: str, instance: str, results: list[TrialResult]) -> "EvalRecord":
        lengths = [r.best_length for r in results]
        return cls(
            preset=preset,
            instance=instance,
            trials=len(results),
            avg_length=statistics.fmean(lengths),
            min_length=min(lengths),
            avg_time_to_best=statistics.fmean(r.time_to_best for r in results),
            avg_total_time=statistics.fmean(r.total_time for r in results),
            raw=list(results),
        )


def _trial_job(args):
    inst, preset, iterations, seed, t = args
    rng = derive_rng(seed, "trial", name_key(preset.name), name_key(inst.name), t)
    return run_trial(inst, preset.params, iterations, rng)


def _make_jobs(inst, preset, trials, iterations, seed):
    if trials < 1 or iterations < 1:
        raise ValueError("trials and iterations must be >= 1")
    return [(inst, preset, iterations, seed, t) for t in range(trials)]


def _run(jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(_trial_job, jobs))
    return [_trial_job(j) for j in jobs]


def evaluate_preset(inst: TspInstance, preset: ParamPreset, trials: int, iterations: int,
                    seed: int, workers: int = 1) -> EvalRecord:
    """Run ``trials`` independent ACS trials. Trial ``t`` is seeded from
    (seed, preset name, instance name, t), so the numbers do not depend on
    which other cells are run or on the worker count."""
    results = _run(_make_jobs(inst, preset, trials, iterations, seed), workers)
    return EvalRecord.from_trials(preset.name, inst.name, results)


def cross_matrix(instances, presets, trials: int, iterations: int, seed: int,
                 workers: int = 1) -> list[EvalRecord]:
    """One record per (preset, instance), presets-major."""
    instances, presets = list(instances), list(presets)
    if not instances or not presets:
        raise ValueError("need at least one instance and one preset")
    cells = [(p, i) for p in presets for i in instances]
    jobs = [job for p, i in cells for job in _make_jobs(i, p, trials, iterations, seed)]
    results = _run(jobs, workers)
    return [EvalRecord.from_trials(p.name, i.name, results[k * trials:(k + 1) * trials])
            for k, (p, i) in enumerate(cells)]


CSV_HEADER = ("preset", "instance", "trials", "avg_length", "min_length",
              "avg_time_to_best_s", "avg_total_time_s")
RAW_HEADER = ("preset", "instance", "trial", "best_length", "best_iteration",
              "time_to_best_s", "total_time_s", "tour")


def emit_csv(records) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(CSV_HEADER)
    for r in records:
        out.writerow([r.preset, r.instance, r.trials, f"{r.avg_length:.2f}", r.min_length,
                      f"{r.avg_time_to_best:.3f}", f"{r.avg_total_time:.3f}"])
    return buf.getvalue()


def parse_csv(text: str) -> list[EvalRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("not an aggregate CSV: header mismatch")
    names = [f.name for f in fields(EvalRecord)][:len(CSV_HEADER)]
    casts = (str, str, int, float, int, float, float)
    return [EvalRecord(**{n: c(v) for n, c, v in zip(names, casts, row)}) for row in rows[1:]]


def emit_raw_csv(records) -> str:
    """Per-trial results so aggregates can be recomputed without rerunning."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(RAW_HEADER)
    for r in records:
        for t, tr in enumerate(r.raw or []):
            out.writerow([r.preset, r.instance, t, tr.best_length, tr.best_iteration,
                          f"{tr.time_to_best:.3f}", f"{tr.total_time:.3f}",
                          " ".join(map(str, tr.tour_labels))])
    return buf.getvalue()
