"""Experiment runner: config ingestion, seeded parallel sweeps, persistence.

Replicate r of a run with master seed s draws only from substreams indexed
by r (product mode uses (s, 2r) and (s, 2r+1) for the two factors), so the
set of sample values is independent of worker count and scheduling; outputs
are byte-identical for any --workers value.

Persistence formats:

* sample CSV: ``# key=value`` metadata lines (one per line, keys sorted,
  label first), a ``replicate,value`` header, then one row per replicate in
  replicate order.  Floats are serialized with repr (shortest round-trip);
  failed replicates are recorded as ``nan``, never filled.
* reports: JSON with fixed keys, referencing artifact paths together with
  their sha256 checksums.
"""

from __future__ import annotations

import hashlib
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .airy import AiryDiscretization, sample_tw
from .eig import EigConfig, EigNonConvergence, banded_largest_eig, tridiag_extreme_eig
from .ensemble import EnsembleParams, laguerre_matrix, potential_path, sample_bidiagonal
from .product import product_similarity
from .scaling import ScalingConstants, coupled_scaling, closed_form_Cn, closed_form_cn, single_scaling
from .stats import SampleBatch, KSReport, ks_two_sample, moments
from .variates import split_stream

MODES = ("product", "single", "tw-reference")


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    mode: str
    beta: float = 1.0
    n: int | None = None
    p: int | None = None
    q: int | None = None
    reps: int = 100
    seed: int = 0
    workers: int = 1
    out: Path = Path(".")
    tol: float | None = None
    mesh: float | None = None
    cutoff: float | None = None

    def __post_init__(self):
        self.out = Path(self.out)
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise ConfigError(f"beta must be positive and finite, got {self.beta}")
        if self.mode == "product":
            if self.n is None or self.p is None or self.q is None:
                raise ConfigError("product mode requires n, p and q")
            if not 1 <= self.n <= self.p <= self.q:
                raise ConfigError(
                    f"product mode requires 1 <= n <= p <= q, got ({self.n}, {self.p}, {self.q})"
                )
        elif self.mode == "single":
            if self.n is None or self.p is None:
                raise ConfigError("single mode requires n and p")
            if not 1 <= self.n <= self.p:
                raise ConfigError(f"single mode requires 1 <= n <= p, got ({self.n}, {self.p})")
        try:
            self.eig_config()
            if self.mode == "tw-reference":
                self.airy_disc()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def eig_config(self) -> EigConfig:
        return EigConfig(rel_tol=self.tol) if self.tol is not None else EigConfig()

    def airy_disc(self) -> AiryDiscretization:
        kwargs = {}
        if self.mesh is not None:
            kwargs["h"] = self.mesh
        if self.cutoff is not None:
            kwargs["L"] = self.cutoff
        return AiryDiscretization(beta=self.beta, **kwargs)


# --- config files ---------------------------------------------------------

_INT_KEYS = {"n", "p", "q", "reps", "seed", "workers"}
_FLOAT_KEYS = {"beta", "tol", "mesh", "cutoff"}
_STR_KEYS = {"out", "mode"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def load_config_file(path: Path | str) -> dict:
    """Parse a ``key = value`` config file; unknown keys are hard errors."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def resolve_config(mode: str, flags: dict, config_path: Path | str | None = None) -> ExperimentConfig:
    """Merge precedence: explicit flags > config file > defaults."""
    merged: dict = {}
    if config_path is not None:
        merged.update(load_config_file(config_path))
    file_mode = merged.pop("mode", None)
    if file_mode is not None and file_mode != mode:
        raise ConfigError(f"config file sets mode={file_mode!r} but the command runs {mode!r}")
    merged.update({k: v for k, v in flags.items() if v is not None})
    try:
        return ExperimentConfig(mode=mode, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# --- replicate workers (top level for picklability) ------------------------


def _product_replicate(args: tuple, r: int) -> float:
    n, p, q, beta, seed, rel_tol, mu_n, stat_denom = args
    stream_p = split_stream(seed, 2 * r)
    stream_q = split_stream(seed, 2 * r + 1)
    B_p = sample_bidiagonal(EnsembleParams(n=n, kappa=p, beta=beta), stream_p)
    B_q = sample_bidiagonal(EnsembleParams(n=n, kappa=q, beta=beta), stream_q)
    S = product_similarity(B_q, laguerre_matrix(B_p))
    try:
        # Factor entries use substreams 0..2n-2; index 2n-1 is free for the
        # eigensolver start vector.
        lam = banded_largest_eig(S, EigConfig(rel_tol=rel_tol), stream=stream_q.substream(2 * n - 1))
    except EigNonConvergence:
        return math.nan
    return (lam - mu_n) / stat_denom


def _single_replicate(args: tuple, r: int) -> float:
    n, kappa, beta, seed, rel_tol, mu, sigma = args
    stream = split_stream(seed, r)
    B = sample_bidiagonal(EnsembleParams(n=n, kappa=kappa, beta=beta), stream)
    lam = tridiag_extreme_eig(laguerre_matrix(B), "largest", EigConfig(rel_tol=rel_tol))
    return (lam - mu) / sigma


def _tw_replicate(args: tuple, r: int) -> float:
    beta, h, L, seed, rel_tol = args
    disc = AiryDiscretization(beta=beta, h=h, L=L)
    return sample_tw(disc, split_stream(seed, r), EigConfig(rel_tol=rel_tol))


def _path_replicate(args: tuple, r: int):
    n, i, beta, seed = args
    stream = split_stream(seed, r)
    B = sample_bidiagonal(EnsembleParams(n=n, kappa=i, beta=beta), stream)
    return potential_path(B, single_scaling(n, i)).values


def _pmap(fn, count: int, workers: int) -> list:
    if workers <= 1:
        return [fn(r) for r in range(count)]
    with multiprocessing.get_context().Pool(workers) as pool:
        return pool.map(fn, range(count), chunksize=max(1, count // (workers * 4)))


# --- persistence -----------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(s: str):
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            continue
    return s


def write_batch_csv(path: Path, label: str, params: dict, rows: np.ndarray) -> None:
    """Write replicate-ordered rows with a ``# key=value`` metadata block."""
    lines = [f"# label={label}"]
    lines += [f"# {k}={_format_value(params[k])}" for k in sorted(params)]
    lines.append("replicate,value")
    lines += [f"{r},{repr(float(v))}" for r, v in enumerate(rows)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_batch_csv(path: Path | str) -> SampleBatch:
    """Load a sample CSV back into a batch; NaN rows are dropped and counted."""
    path = Path(path)
    label = None
    params: dict = {}
    rows: list[float] = []
    in_rows = False
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            if key == "label":
                label = value
            else:
                params[key] = _parse_value(value)
            continue
        if line == "replicate,value":
            in_rows = True
            continue
        if not in_rows:
            raise ConfigError(f"{path}:{lineno}: unexpected line before header: {line!r}")
        try:
            _, _, value = line.partition(",")
            rows.append(float(value))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad row {line!r}") from exc
    if label is None or not rows:
        raise ConfigError(f"{path}: not a sample CSV (missing label or rows)")
    order = np.array(rows)
    ok = ~np.isnan(order)
    if not ok.any():
        raise ConfigError(f"{path}: every replicate is missing")
    params["failures"] = int((~ok).sum())
    return SampleBatch(label=label, params=params, values=order[ok], order=order[ok])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --- experiment pipeline ----------------------------------------------------


@dataclass
class RunReport:
    config: dict
    constants: dict | None
    moments: dict
    failures: int
    batch_path: str
    batch_sha256: str
    report_path: str
    wall_seconds: float
    per_replicate_seconds: float
    sample_batch: SampleBatch = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "constants": self.constants,
            "moments": self.moments,
            "failures": self.failures,
            "artifacts": {
                "samples_csv": {"path": self.batch_path, "sha256": self.batch_sha256}
            },
            "timing": {
                "wall_seconds": self.wall_seconds,
                "per_replicate_seconds": self.per_replicate_seconds,
            },
        }


def scaling_report(n: int, p: int, q: int, beta: float) -> dict:
    """Every product constant plus the printed closed forms and their status."""
    sc = coupled_scaling(n, p, q, beta)
    cf_cn = closed_form_cn(n, p, q)
    cf_Cn = closed_form_Cn(n, p, q)
    cube = sc.c_n**3
    return {
        "n": n,
        "p": p,
        "q": q,
        "beta": beta,
        "per_matrix": {
            "p": {"m": sc.sp.m, "mu": sc.sp.mu, "sigma": sc.sp.sigma},
            "q": {"m": sc.sq.m, "mu": sc.sq.mu, "sigma": sc.sq.sigma},
        },
        "m_n": sc.m_n,
        "a_n": sc.a_n,
        "b_n": sc.b_n,
        "d_n": sc.d_n,
        "c_n": sc.c_n,
        "C_n": sc.C_n,
        "beta0": sc.beta0,
        "mu_n": sc.mu_n,
        "stat_denom": sc.stat_denom,
        "closed_form_cn": cf_cn,
        "closed_form_cn_note": (
            "equals c_n**3 (cube of the operative constant); "
            f"relative difference {abs(cf_cn - cube) / cube:.3e}"
        ),
        "closed_form_Cn": cf_Cn,
        "closed_form_Cn_note": (
            "matches operative C_n"
            if abs(cf_Cn - sc.C_n) <= 1e-12 * sc.C_n
            else f"differs from operative C_n={sc.C_n!r} (printed form; known discrepancy for p != q)"
        ),
    }


def _constants_for(config: ExperimentConfig) -> tuple[dict | None, ScalingConstants | None]:
    if config.mode == "product":
        sc = coupled_scaling(config.n, config.p, config.q, config.beta)
        return scaling_report(config.n, config.p, config.q, config.beta), sc
    if config.mode == "single":
        s = single_scaling(config.n, config.p)
        return {"n": s.n, "i": s.i, "m": s.m, "mu": s.mu, "sigma": s.sigma}, None
    return None, None


def _config_echo(config: ExperimentConfig) -> dict:
    return {
        "mode": config.mode,
        "n": config.n,
        "p": config.p,
        "q": config.q,
        "beta": config.beta,
        "reps": config.reps,
        "seed": config.seed,
        "workers": config.workers,
        "out": str(config.out),
        "tol": config.eig_config().rel_tol,
        "mesh": config.mesh,
        "cutoff": config.cutoff,
    }


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Run one Monte Carlo sweep and persist the sample batch plus a report."""
    config.validate()
    t0 = time.perf_counter()
    rel_tol = config.eig_config().rel_tol
    constants_dict, sc = _constants_for(config)

    if config.mode == "product":
        args = (config.n, config.p, config.q, config.beta, config.seed, rel_tol, sc.mu_n, sc.stat_denom)
        fn = partial(_product_replicate, args)
        params = {"n": config.n, "p": config.p, "q": config.q, "beta": config.beta,
                  "beta0": sc.beta0, "seed": config.seed, "M": config.reps,
                  "generator": "laguerre-product"}
    elif config.mode == "single":
        s = single_scaling(config.n, config.p)
        args = (config.n, config.p, config.beta, config.seed, rel_tol, s.mu, s.sigma)
        fn = partial(_single_replicate, args)
        params = {"n": config.n, "p": config.p, "beta": config.beta,
                  "seed": config.seed, "M": config.reps, "generator": "laguerre-single"}
    else:
        disc = config.airy_disc()
        args = (config.beta, disc.h, disc.L, config.seed, rel_tol)
        fn = partial(_tw_replicate, args)
        params = {"beta": config.beta, "mesh": disc.h, "cutoff": disc.L,
                  "seed": config.seed, "M": config.reps, "generator": "stochastic-airy"}

    rows = np.array(_pmap(fn, config.reps, config.workers))
    failures = int(np.isnan(rows).sum())
    params["failures"] = failures

    config.out.mkdir(parents=True, exist_ok=True)
    batch_path = config.out / f"{config.mode}-samples.csv"
    write_batch_csv(batch_path, config.mode, params, rows)

    batch = read_batch_csv(batch_path)
    mom = moments(batch)
    wall = time.perf_counter() - t0
    report = RunReport(
        config=_config_echo(config),
        constants=constants_dict,
        moments={
            "mean": mom.mean,
            "variance": mom.variance,
            "skewness": mom.skewness,
            "se_mean": mom.se_mean,
            "se_variance": mom.se_variance,
        },
        failures=failures,
        batch_path=str(batch_path),
        batch_sha256=_sha256(batch_path),
        report_path=str(config.out / f"{config.mode}-report.json"),
        wall_seconds=wall,
        per_replicate_seconds=wall / config.reps,
        sample_batch=batch,
    )
    write_json(Path(report.report_path), report.to_dict())
    return report


def compare_batches(path_a: Path | str, path_b: Path | str, out: Path | str | None = None) -> tuple[KSReport, dict]:
    """KS-compare two persisted batches; returns the report and its JSON payload."""
    a = read_batch_csv(path_a)
    b = read_batch_csv(path_b)
    ks = ks_two_sample(a, b)
    payload = {
        "D": ks.D,
        "p_value": ks.p_value,
        "n_a": ks.n_a,
        "n_b": ks.n_b,
        "batch_a": {"path": str(path_a), "label": a.label, "params": a.params},
        "batch_b": {"path": str(path_b), "label": b.label, "params": b.params},
    }
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "ks-report.json", payload)
    return ks, payload


def mean_potential_path(
    n: int, i: int, beta: float, M: int, seed: int, workers: int = 1
) -> dict[str, np.ndarray]:
    """Empirical mean of the potential path over M replicates.

    Returns arrays x (grid k/m), mean, stderr and the reference x^2/2.
    """
    if M < 1:
        raise ConfigError(f"reps must be >= 1, got {M}")
    paths = np.array(_pmap(partial(_path_replicate, (n, i, beta, seed)), M, workers))
    x = np.arange(1, n) / single_scaling(n, i).m
    return {
        "x": x,
        "mean": paths.mean(axis=0),
        "stderr": paths.std(axis=0, ddof=1) / math.sqrt(M) if M > 1 else np.zeros(n - 1),
        "reference": 0.5 * x * x,
    }


def write_potential_csv(path: Path, result: dict[str, np.ndarray]) -> None:
    lines = ["x,mean,stderr,reference"]
    for k in range(len(result["x"])):
        lines.append(
            ",".join(repr(float(result[col][k])) for col in ("x", "mean", "stderr", "reference"))
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
