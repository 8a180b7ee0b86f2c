"""Command-line experiment harness.

Every scenario the library supports is runnable from one entry point:
spectral sweeps over distance walks, exhaustive distance minima, the
special-vector battery, Monte Carlo runs of the correction algorithms,
list-recovery of planted codewords, subgrid sampling deviation, the
interpolating-set construction, and the counting identity behind the
representation decomposition.

Conventions shared by every subcommand:

* parameters come from an optional ``key = value`` config file plus flags;
  flags win on conflict,
* a master ``--seed`` splits into independent per-trial streams keyed by
  (seed, scenario label, trial index), so re-running any configuration
  reproduces its metrics exactly,
* every run emits a self-describing artifact -- CSV for sweep tables, JSON
  for nested reports -- carrying a schema version and the resolved
  configuration, written to ``--out`` or stdout,
* validation happens before any computation; bad parameters exit with
  code 2 and budget overruns with code 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .budget import CapacityError, check_capacity
from .correction import (
    ConstructionFailure,
    NoisyOracle,
    SearchFailure,
    base_reduce,
    build_gadget,
    build_interpolating_set,
    recursive_reduce,
    subgrid_error_reduce,
    torsion_correct,
    torsion_scheme,
)
from .fields import grid_minimum_matches_formula, is_prime
from .groups import AbelianGroup
from .juntas import (
    JuntaPolynomial,
    grid_min_nonzero,
    min_slice_nonzero_prime,
    random_polynomial,
    slice_nonzero_lower_bound,
)
from .listcorr import local_list_correct
from .seeding import derive_rng
from .slices import SliceSpec, slice_size
from .subgrids import random_subgrid, sampling_deviation
from .tableaux import (
    chi_support,
    chi_vector,
    column_group_order,
    count_syt,
    count_syt_backtrack,
    enumerate_ssyt,
    gram_det,
    mean_under,
    partitions,
    partitions_dominating,
    young_rule_sides,
)
from .walks import (
    independence_report,
    spectral_report,
    walk_from_distance,
    walk_odlsz,
    walk_subgrid_identification,
)

SCHEMA_VERSION = 1


class ValidationError(ValueError):
    """Unusable parameters; reported on stderr and mapped to exit code 2."""


# --------------------------------------------------------------------------
# configuration plumbing


@dataclass
class ExperimentConfig:
    """Resolved inputs of one run: scenario name, string-valued parameters
    (file values already overridden by flags), master seed and output sink."""

    scenario: str
    params: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    out: Optional[Path] = None
    workers: int = 1

    def stream(self, label: str, trial: int):
        return derive_rng(self.seed, label, trial)

    def echo(self) -> dict:
        """The configuration as written into every artifact."""
        return dict(self.params, seed=str(self.seed), workers=str(self.workers))


def load_config_file(path) -> dict[str, str]:
    """Parse a plain ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_COMMON_KEYS = {"config", "seed", "out", "workers", "func", "scenario"}


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the config file (if any) under the command-line flags."""
    params = load_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in _COMMON_KEYS or value is None:
            continue
        params[key] = value
    seed = _to_int(params.pop("seed", None) or args.seed or "0", "seed")
    workers = _to_int(params.pop("workers", None) or args.workers or "1", "workers")
    if workers < 1:
        raise ValidationError("workers must be at least 1")
    out = Path(args.out) if args.out else (Path(params.pop("out")) if "out" in params else None)
    return ExperimentConfig(args.scenario, params, seed=seed, out=out, workers=workers)


def _to_int(text, name: str) -> int:
    try:
        return int(str(text), 0)
    except ValueError as exc:
        raise ValidationError(f"{name} must be an integer, got {text!r}") from exc


def get_int(params, name, default=None, minimum=None) -> int:
    if name not in params:
        if default is None:
            raise ValidationError(f"missing required parameter --{name.replace('_', '-')}")
        value = default
    else:
        value = _to_int(params[name], name)
    if minimum is not None and value < minimum:
        raise ValidationError(f"{name} must be at least {minimum}, got {value}")
    return value


def get_int_list(params, name, default=None) -> list[int]:
    if name not in params:
        if default is None:
            raise ValidationError(f"missing required parameter --{name.replace('_', '-')}")
        return list(default)
    parts = [p for p in str(params[name]).replace(" ", "").split(",") if p]
    if not parts:
        raise ValidationError(f"{name} must list at least one integer")
    return [_to_int(p, name) for p in parts]


def get_fraction(params, name, default=None) -> Fraction:
    raw = params.get(name, default)
    if raw is None:
        raise ValidationError(f"missing required parameter --{name.replace('_', '-')}")
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{name} must be a rational number, got {raw!r}") from exc


def get_float(params, name, default=None) -> float:
    raw = params.get(name, default)
    if raw is None:
        raise ValidationError(f"missing required parameter --{name.replace('_', '-')}")
    try:
        return float(raw)
    except ValueError as exc:
        raise ValidationError(f"{name} must be a number, got {raw!r}") from exc


def get_choice(params, name, choices, default=None) -> str:
    raw = params.get(name, default)
    if raw is None:
        raise ValidationError(f"missing required parameter --{name.replace('_', '-')}")
    value = str(raw).lower()
    if value not in choices:
        raise ValidationError(f"{name} must be one of {sorted(choices)}, got {raw!r}")
    return value


def parse_group(text) -> AbelianGroup:
    """``Z6``, ``6`` and ``Z2x3`` all denote cyclic/product groups."""
    raw = str(text).strip()
    body = raw[1:] if raw[:1] in ("Z", "z") else raw
    try:
        factors = tuple(int(p) for p in body.replace("*", "x").split("x"))
    except ValueError as exc:
        raise ValidationError(f"cannot parse group {raw!r}") from exc
    if not factors or any(f < 2 for f in factors):
        raise ValidationError(f"group factors must all be at least 2, got {raw!r}")
    return AbelianGroup(factors)


def group_label(group: AbelianGroup) -> str:
    return "Z" + "x".join(str(f) for f in group.factors)


def parse_delta(text, s: int, n: int):
    """A distance profile: ``balanced`` or rows like ``1,1;1,1``."""
    if n % s:
        raise ValidationError(f"balanced slices need s | n, got s={s} n={n}")
    m = n // s
    raw = str(text).strip().lower()
    if raw == "balanced":
        if m % s:
            raise ValidationError(
                f"the fully balanced profile needs s | n/s, got s={s} n={n}"
            )
        return [[m // s] * s for _ in range(s)]
    try:
        rows = [
            [int(v) for v in row.split(",")] for row in str(text).strip().split(";")
        ]
    except ValueError as exc:
        raise ValidationError(f"cannot parse profile {text!r}") from exc
    return rows


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% score interval for a binomial proportion."""
    if trials <= 0:
        raise ValidationError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# --------------------------------------------------------------------------
# artifact writing


def emit_json(cfg: ExperimentConfig, results, wall_time_ms: float) -> dict:
    record = {
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "config": cfg.echo(),
        "results": results,
        "wall_time_ms": round(wall_time_ms, 3),
    }
    text = json.dumps(record, indent=2)
    if cfg.out is not None:
        cfg.out.write_text(text + "\n")
        print(f"wrote {cfg.out}")
    else:
        print(text)
    return record


def emit_csv(cfg: ExperimentConfig, fieldnames, rows) -> list[dict]:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if cfg.out is not None:
        cfg.out.write_text(text)
        print(f"wrote {len(rows)} row(s) to {cfg.out}")
    else:
        sys.stdout.write(text)
    return rows


def _base_row(cfg: ExperimentConfig) -> dict:
    return {"schema_version": SCHEMA_VERSION, "scenario": cfg.scenario, "seed": cfg.seed}


# --------------------------------------------------------------------------
# spectra


SPECTRA_FIELDS = [
    "schema_version", "scenario", "family", "s", "n", "profile", "sigma2",
    "lambda2", "spectrum", "symmetric", "doubly_stochastic", "indep_epsilon",
    "seed", "wall_time_ms",
]


def _spectrum_cell(report) -> str:
    return ";".join(f"{v:.6g}x{m}" for v, m in report.multiplicities)


def cmd_spectra(cfg: ExperimentConfig) -> list[dict]:
    p = cfg.params
    family = get_choice(p, "family", {"wdelta", "odlsz", "subgrid"})
    s = get_int(p, "s", minimum=2)
    indep_k = get_int(p, "indep_k", default=2, minimum=1)
    rows_mode = get_choice(p, "rows", {"canonical", "all"}, default="canonical")
    if family == "subgrid":
        sizes = [s * s * k for k in get_int_list(p, "k")]
    else:
        sizes = get_int_list(p, "n")
    rows = []
    for size in sizes:
        started = time.perf_counter()
        if family == "wdelta":
            delta = parse_delta(p.get("delta", "balanced"), s, size)
            walk = walk_from_distance(SliceSpec.balanced(s, size), delta)
            profile = ";".join(",".join(str(v) for v in row) for row in delta)
        elif family == "odlsz":
            if size % s:
                raise ValidationError(f"odlsz needs s | n, got s={s} n={size}")
            walk = walk_odlsz(s, size)
            profile = "odlsz"
        else:
            walk = walk_subgrid_identification(s, size // (s * s))
            profile = f"identify-k{size // (s * s)}"
        report = spectral_report(walk)
        indep = independence_report(walk, indep_k, rows=rows_mode)
        rows.append(
            _base_row(cfg)
            | {
                "family": family,
                "s": s,
                "n": size,
                "profile": profile,
                "sigma2": f"{report.sigma2:.12g}",
                "lambda2": "" if report.lambda2 is None else f"{report.lambda2:.12g}",
                "spectrum": _spectrum_cell(report),
                "symmetric": walk.is_symmetric(),
                "doubly_stochastic": walk.is_doubly_stochastic(),
                "indep_epsilon": str(indep.epsilon),
                "wall_time_ms": round(1000 * (time.perf_counter() - started), 3),
            }
        )
    return emit_csv(cfg, SPECTRA_FIELDS, rows)


# --------------------------------------------------------------------------
# distance


DISTANCE_FIELDS = [
    "schema_version", "scenario", "mode", "s", "p", "n", "d", "group",
    "minimum", "bound", "matches", "seed", "wall_time_ms",
]


def cmd_distance(cfg: ExperimentConfig) -> list[dict]:
    p = cfg.params
    mode = get_choice(p, "mode", {"grid", "junta", "multislice"})
    ns = get_int_list(p, "n")
    ds = get_int_list(p, "d")
    rows = []
    for n in ns:
        for d in ds:
            started = time.perf_counter()
            row = _base_row(cfg) | {"mode": mode, "n": n, "d": d, "p": "", "group": ""}
            if mode == "grid":
                prime = get_int(p, "p", minimum=2)
                if not is_prime(prime):
                    raise ValidationError(f"p must be prime, got {prime}")
                if d < 0:
                    raise ValidationError("d must be nonnegative")
                minimum, formula = grid_minimum_matches_formula(prime, n, d)
                row |= {
                    "s": prime,
                    "p": prime,
                    "group": f"F{prime}",
                    "minimum": str(minimum),
                    "bound": str(formula),
                    "matches": minimum == formula,
                }
            elif mode == "junta":
                s = get_int(p, "s", minimum=2)
                group = parse_group(p.get("group", "Z2"))
                count, achievers = grid_min_nonzero(s, n, d, group)
                frac = Fraction(count, s**n)
                row |= {
                    "s": s,
                    "group": group_label(group),
                    "minimum": str(frac),
                    "bound": str(Fraction(1, s**d)),
                    "matches": frac == Fraction(1, s**d),
                }
            else:
                s = get_int(p, "s", minimum=2)
                prime = get_int(p, "p", default=2, minimum=2)
                if not is_prime(prime):
                    raise ValidationError(f"p must be prime, got {prime}")
                if n % s:
                    raise ValidationError(f"balanced slices need s | n, got s={s} n={n}")
                counts = SliceSpec.balanced(s, n).counts
                if any(c < d for c in counts):
                    raise ValidationError(
                        f"need n/s >= d for the multinomial bound, got n={n} s={s} d={d}"
                    )
                count, _ = min_slice_nonzero_prime(s, n, d, prime)
                bound = slice_nonzero_lower_bound(counts, d)
                row |= {
                    "s": s,
                    "p": prime,
                    "group": f"Z{prime}",
                    "minimum": str(count),
                    "bound": str(bound),
                    "matches": count >= bound,
                }
            row["wall_time_ms"] = round(1000 * (time.perf_counter() - started), 3)
            rows.append(row)
    return emit_csv(cfg, DISTANCE_FIELDS, rows)


# --------------------------------------------------------------------------
# chi-vectors


def cmd_chi_vectors(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    s = get_int(p, "s", minimum=2)
    n = get_int(p, "n", minimum=s)
    lam2_max = get_int(p, "lam2_max", default=2, minimum=1)
    if n % s:
        raise ValidationError(f"balanced slices need s | n, got s={s} n={n}")
    started = time.perf_counter()
    mu = SliceSpec.balanced(s, n).counts
    size = slice_size(SliceSpec.balanced(s, n))
    check_capacity(size, "slice for the special-vector battery")
    uniform = [Fraction(1, size)] * size
    families = []
    for lam in partitions_dominating(mu):
        if lam == (n,) or (len(lam) > 1 and lam[1] > lam2_max):
            continue
        tabs = enumerate_ssyt(lam, mu)
        vectors = [chi_vector(lam, tab, s) for tab in tabs]
        sup = max((max(abs(v) for v in vec) for vec in vectors), default=0)
        order = column_group_order(lam)
        det = gram_det(vectors)
        families.append(
            {
                "lam": list(lam),
                "tableaux": len(tabs),
                "mean_zero": all(mean_under(uniform, vec) == 0 for vec in vectors),
                "sup_norm": sup,
                "column_group_order": order,
                "sup_within_bound": sup <= order,
                "gram_det": str(det),
                "gram_det_float": float(det),
                "support_size": len(chi_support(lam)),
            }
        )
    results = {
        "s": s,
        "n": n,
        "mu": list(mu),
        "slice_size": size,
        "families": families,
        "all_mean_zero": all(f["mean_zero"] for f in families),
        "all_sup_bounded": all(f["sup_within_bound"] for f in families),
        "min_gram_det": min((f["gram_det_float"] for f in families), default=None),
    }
    return emit_json(cfg, results, 1000 * (time.perf_counter() - started))


# --------------------------------------------------------------------------
# correct (Monte Carlo success rates of the correction algorithms)


@lru_cache(maxsize=8)
def _cached_scheme(s: int, d: int, exponent: int):
    return torsion_scheme(s, d, exponent)


@lru_cache(maxsize=8)
def _cached_gadget(n: int, s: int, d: int, rho_str: Optional[str]):
    rho = Fraction(rho_str) if rho_str else None
    return build_gadget(n, s, d, rho) if rho is not None else build_gadget(n, s, d)


def _correct_trial(payload) -> bool:
    """One Monte Carlo round; module-level so worker processes can run it."""
    (alg, seed, trial, s, n, d, k, factors, rate, exponent, depth, rho_str) = payload
    rng = derive_rng(seed, f"correct:{alg}", trial)
    group = AbelianGroup(factors)
    truth = random_polynomial(s, n, d, group, rng)
    if rate > 0:
        oracle = NoisyOracle.random_errors(truth, rate, seed=int(rng.integers(2**63)))
    else:
        oracle = NoisyOracle.exact(truth)
    x = bytes(int(v) for v in rng.integers(0, s, size=n))
    if alg == "subgrid":
        got = subgrid_error_reduce(oracle, x, k, d, rng)
    elif alg == "torsion":
        got = torsion_correct(oracle, _cached_scheme(s, d, exponent), rng, x=x)
    elif alg == "base":
        got = base_reduce(oracle, x, rng, gadget=_cached_gadget(n, s, d, rho_str))
    else:
        got = recursive_reduce(
            oracle, x, depth, rng, gadget=_cached_gadget(n, s, d, rho_str)
        )
    return got == truth.evaluate(x)


def _map_trials(fn, payloads, workers: int):
    if workers <= 1:
        return [fn(p) for p in payloads]
    chunk = max(1, len(payloads) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=chunk))


CORRECT_FIELDS = [
    "schema_version", "scenario", "alg", "s", "n", "d", "group", "error_rate",
    "k_or_scheme", "trials", "successes", "success_rate", "wilson_low",
    "wilson_high", "queries_per_call", "seed", "wall_time_ms",
]


def cmd_correct(cfg: ExperimentConfig) -> list[dict]:
    p = cfg.params
    alg = get_choice(p, "alg", {"subgrid", "torsion", "base", "recursive"})
    s = get_int(p, "s", minimum=2)
    d = get_int(p, "d", minimum=0)
    trials = get_int(p, "trials", default=100, minimum=1)
    rate = get_float(p, "rate", default="0")
    if not 0 <= rate < 1:
        raise ValidationError(f"rate must lie in [0, 1), got {rate}")
    k = exponent = depth = 0
    rho_str = p.get("rho")
    if rho_str is not None:
        rho = get_fraction(p, "rho")
        if not 0 < rho < 1:
            raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    if alg == "subgrid":
        n = get_int(p, "n", minimum=2)
        k = get_int(p, "k", minimum=1)
        if not d < k <= n:
            raise ValidationError(f"need d < k <= n, got d={d} k={k} n={n}")
        group = parse_group(p.get("group", "Z2"))
        check_capacity(trials * s**k, "subgrid correction sweep")
        label = str(k)
        queries = s**k
    elif alg == "torsion":
        if s != 2:
            raise ValidationError("the torsion corrector handles the Boolean grid only")
        exponent = get_int(p, "M", minimum=2)
        group = parse_group(p.get("group", f"Z{exponent}"))
        if exponent % group.exponent:
            raise ValidationError(
                f"group exponent {group.exponent} must divide M={exponent}"
            )
        scheme = _cached_scheme(s, d, exponent)
        n = get_int(p, "n", default=scheme.slice_length, minimum=1)
        label = f"slice{scheme.slice_length}"
        queries = scheme.query_count
        check_capacity(trials * queries, "torsion correction sweep")
    else:
        n = get_int(p, "n", minimum=1)
        group = parse_group(p.get("group", "Z2"))
        gadget = _cached_gadget(n, s, d, rho_str)
        label = f"q{gadget.q}"
        queries = 3 * gadget.q
        if alg == "recursive":
            depth = get_int(p, "depth", default=1, minimum=0)
            queries = (3 * gadget.q) ** depth
            label += f":depth{depth}"
        check_capacity(trials * max(queries, 1), "gadget correction sweep")
    started = time.perf_counter()
    payloads = [
        (alg, cfg.seed, t, s, n, d, k, group.factors, rate, exponent, depth, rho_str)
        for t in range(trials)
    ]
    outcomes = _map_trials(_correct_trial, payloads, cfg.workers)
    successes = sum(outcomes)
    low, high = wilson_interval(successes, trials)
    row = _base_row(cfg) | {
        "alg": alg,
        "s": s,
        "n": n,
        "d": d,
        "group": group_label(group),
        "error_rate": rate,
        "k_or_scheme": label,
        "trials": trials,
        "successes": successes,
        "success_rate": f"{successes / trials:.6g}",
        "wilson_low": f"{low:.6g}",
        "wilson_high": f"{high:.6g}",
        "queries_per_call": queries,
        "wall_time_ms": round(1000 * (time.perf_counter() - started), 3),
    }
    return emit_csv(cfg, CORRECT_FIELDS, [row])


# --------------------------------------------------------------------------
# list-correct (two planted codewords at equal distance)


def cmd_list_correct(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    s = get_int(p, "s", default=2)
    if s != 2:
        raise ValidationError("the planted-pair scenario runs on the Boolean grid")
    d = get_int(p, "d", default=1)
    if d != 1:
        raise ValidationError("the planted-pair scenario is a degree-1 experiment")
    n = get_int(p, "n", default=10, minimum=4)
    trials = get_int(p, "trials", default=20, minimum=1)
    points = get_int(p, "points", default=5, minimum=1)
    eps = get_fraction(p, "eps", default="1/5")
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    k_approx = get_int(p, "k_approx", default=4, minimum=d + 1)
    ell = get_int(p, "ell", default=4, minimum=1)
    k_unique = get_int(p, "k_unique", default=3, minimum=d + 1)
    if max(k_approx, k_unique) > n:
        raise ValidationError("subgrid dimensions cannot exceed the ambient arity")
    group = AbelianGroup((2,))
    cross = JuntaPolynomial(s, n, group, {((0, 1), (1, 1)): (1,)})
    first_coord = JuntaPolynomial(s, n, group, {((0, 1),): (1,)})
    started = time.perf_counter()
    tallies = {"both": 0, "first_only": 0, "second_only": 0, "neither": 0}
    total_queries = 0
    for trial in range(trials):
        rng = cfg.stream("list-correct", trial)
        base = random_polynomial(s, n, d, group, rng)
        received = base + cross
        second = base + first_coord
        oracle = NoisyOracle.exact(received)
        xs = [bytes(int(v) for v in rng.integers(0, s, size=n)) for _ in range(points)]
        outputs = local_list_correct(
            oracle, d, eps, xs, rng, k_approx=k_approx, ell=ell, k_unique=k_unique
        )
        recovered = [
            any(
                all(values[x] == planted.evaluate(x) for x in xs)
                for _, values in outputs
            )
            for planted in (base, second)
        ]
        key = {
            (True, True): "both",
            (True, False): "first_only",
            (False, True): "second_only",
            (False, False): "neither",
        }[tuple(recovered)]
        tallies[key] += 1
        total_queries += oracle.queries
    low, high = wilson_interval(tallies["both"], trials)
    results = {
        "params": {
            "s": s, "n": n, "d": d, "eps": str(eps), "points": points,
            "k_approx": k_approx, "ell": ell, "k_unique": k_unique,
        },
        "planted_codewords": {
            "count": 2,
            "construction": {
                "received": "random degree-1 base plus the product of the first "
                "two coordinate indicators",
                "first": "the base itself (distance exactly 1/4)",
                "second": "base plus the first coordinate indicator (distance exactly 1/4)",
            },
        },
        "recovered": tallies,
        "trials": trials,
        "success_rate": tallies["both"] / trials,
        "wilson_interval": [round(low, 6), round(high, 6)],
        "total_queries": total_queries,
    }
    return emit_json(cfg, results, 1000 * (time.perf_counter() - started))


# --------------------------------------------------------------------------
# sampling (subgrid deviation against a fixed membership table)


@lru_cache(maxsize=4)
def _membership_table(s: int, n: int, kind: str, density_str: str, seed: int):
    check_capacity(s**n, "ambient membership table")
    if kind == "random":
        rng = derive_rng(seed, "sampling:set")
        return np.asarray(rng.random(s**n) < float(Fraction(density_str)), dtype=bool)
    digits = np.arange(s**n, dtype=np.int64)
    counts = np.zeros((s, s**n), dtype=np.int64)
    for _ in range(n):
        digits, rem = np.divmod(digits, s)
        for letter in range(s):
            counts[letter] += rem == letter
    return np.all(counts == n // s, axis=0)


def _sampling_trial(payload) -> float:
    (s, n, k, kind, density_str, seed, trial) = payload
    membership = _membership_table(s, n, kind, density_str, seed)
    rng = derive_rng(seed, "sampling", trial)
    return sampling_deviation(random_subgrid(s, n, k, rng), membership)


def cmd_sampling(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    s = get_int(p, "s", default=2, minimum=2)
    n = get_int(p, "n", minimum=2)
    k = get_int(p, "k", minimum=1)
    if k > n:
        raise ValidationError(f"need k <= n, got k={k} n={n}")
    kind = get_choice(p, "set", {"random", "slice"}, default="random")
    if kind == "slice" and n % s:
        raise ValidationError(f"the slice membership set needs s | n, got s={s} n={n}")
    density = get_fraction(p, "density", default="1/2")
    if not 0 < density < 1:
        raise ValidationError(f"density must lie in (0, 1), got {density}")
    trials = get_int(p, "trials", default=2000, minimum=1)
    eps = get_float(p, "eps", default="0.2")
    eta = get_float(p, "eta", default="0.1")
    check_capacity(s**n, "ambient membership table")
    check_capacity(trials * s**k, "sampling sweep")
    started = time.perf_counter()
    density_str = str(density)
    payloads = [(s, n, k, kind, density_str, cfg.seed, t) for t in range(trials)]
    deviations = np.asarray(_map_trials(_sampling_trial, payloads, cfg.workers))
    membership = _membership_table(s, n, kind, density_str, cfg.seed)
    freq_above = float(np.mean(deviations > eps))
    results = {
        "s": s, "n": n, "k": k, "set": kind,
        "membership_density": float(membership.mean()),
        "trials": trials,
        "eps": eps,
        "eta": eta,
        "quantiles": {
            q: round(float(np.quantile(deviations, qq)), 6)
            for q, qq in [("p50", 0.5), ("p90", 0.9), ("p99", 0.99)]
        },
        "max_deviation": round(float(deviations.max()), 6),
        "mean_deviation": round(float(deviations.mean()), 6),
        "freq_above_eps": freq_above,
        "within_target": freq_above <= eta,
    }
    return emit_json(cfg, results, 1000 * (time.perf_counter() - started))


# --------------------------------------------------------------------------
# interp-set


def cmd_interp_set(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    s = get_int(p, "s", minimum=2)
    d = get_int(p, "d", minimum=0)
    r = get_int(p, "r", minimum=s)
    m = get_int(p, "m", minimum=1)
    n = get_int(p, "n", default=12, minimum=1)
    checks = get_int(p, "checks", default=5, minimum=0)
    group = parse_group(p.get("group", "Z6"))
    if r % s:
        raise ValidationError(f"the block construction needs s | r, got s={s} r={r}")
    started = time.perf_counter()
    iset = build_interpolating_set(s, d, r, m, rng=cfg.stream("interp-set:build", 0))
    slack = max((abs(iset.weight_slack(b)) for b in iset.points), default=Fraction(0))
    matches = 0
    for i in range(checks):
        rng = cfg.stream("interp-set:check", i)
        truth = random_polynomial(s, n, d, group, rng)
        value = iset.correct(NoisyOracle.exact(truth), rng)
        matches += value == truth.evaluate(bytes([1]) * n)
    results = {
        "s": s, "d": d, "r": r, "m": m,
        "size": len(iset.points),
        "k": iset.k,
        "total_weight": iset.total_weight,
        "block_weights": list(iset.block_weights),
        "max_weight_slack": str(slack),
        "slack_bound": str(Fraction(d, iset.total_weight)),
        "coefficient_l1": int(sum(abs(c) for c in iset.coeffs.values())),
        "checks": checks,
        "checks_passed": matches,
        "all_checks_passed": matches == checks,
        "queries_per_correction": len(iset.points),
    }
    return emit_json(cfg, results, 1000 * (time.perf_counter() - started))


# --------------------------------------------------------------------------
# young-check


def cmd_young_check(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    s_values = get_int_list(p, "s", default=[2, 3])
    cap = get_int(p, "cap", default=5000, minimum=1)
    hook_max = get_int(p, "hook_max", default=10, minimum=1)
    if any(s < 2 for s in s_values):
        raise ValidationError("every s must be at least 2")
    started = time.perf_counter()
    identity_rows = []
    for s in s_values:
        n = s
        while slice_size(SliceSpec.balanced(s, n)) <= cap:
            lhs, rhs = young_rule_sides(s, n)
            identity_rows.append(
                {"s": s, "n": n, "slice_size": rhs, "lhs": lhs, "equal": lhs == rhs}
            )
            n += s
    partition_count = 0
    hook_ok = True
    for n in range(1, hook_max + 1):
        for lam in partitions(n):
            partition_count += 1
            if count_syt(lam) != count_syt_backtrack(lam):
                hook_ok = False
    results = {
        "young_rule": identity_rows,
        "identity_holds_everywhere": all(r["equal"] for r in identity_rows),
        "hook_check": {
            "max_n": hook_max,
            "partitions": partition_count,
            "all_equal": hook_ok,
        },
        "all_ok": hook_ok and all(r["equal"] for r in identity_rows),
    }
    return emit_json(cfg, results, 1000 * (time.perf_counter() - started))


# --------------------------------------------------------------------------
# parser and dispatch


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key = value file; flags override it")
    sub.add_argument("--seed", help="master seed for every random stream")
    sub.add_argument("--out", help="artifact path (default: stdout)")
    sub.add_argument("--workers", help="parallel worker processes (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multislice",
        description="Experiment harness for walks, distances and correction "
        "on balanced multislices.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)

    spectra = sub.add_parser("spectra", help="singular values of the slice walks")
    for flag in ("--family", "--s", "--n", "--k", "--delta", "--rows", "--indep-k"):
        spectra.add_argument(flag)
    spectra.set_defaults(func=cmd_spectra)

    distance = sub.add_parser("distance", help="exhaustive minimum-distance tables")
    for flag in ("--mode", "--s", "--p", "--n", "--d", "--group"):
        distance.add_argument(flag)
    distance.set_defaults(func=cmd_distance)

    chi = sub.add_parser("chi-vectors", help="the special-vector battery")
    for flag in ("--s", "--n", "--lam2-max"):
        chi.add_argument(flag)
    chi.set_defaults(func=cmd_chi_vectors)

    correct = sub.add_parser("correct", help="Monte Carlo correction success rates")
    for flag in (
        "--alg", "--s", "--n", "--d", "--k", "--group", "--rate", "--trials",
        "--M", "--depth", "--rho",
    ):
        correct.add_argument(flag)
    correct.set_defaults(func=cmd_correct)

    lst = sub.add_parser("list-correct", help="recover two planted codewords")
    for flag in (
        "--s", "--n", "--d", "--eps", "--trials", "--points", "--k-approx",
        "--ell", "--k-unique",
    ):
        lst.add_argument(flag)
    lst.set_defaults(func=cmd_list_correct)

    sampling = sub.add_parser("sampling", help="subgrid sampling deviation")
    for flag in ("--s", "--n", "--k", "--set", "--density", "--trials", "--eps", "--eta"):
        sampling.add_argument(flag)
    sampling.set_defaults(func=cmd_sampling)

    interp = sub.add_parser("interp-set", help="build and verify an interpolating set")
    for flag in ("--s", "--d", "--r", "--m", "--n", "--group", "--checks"):
        interp.add_argument(flag)
    interp.set_defaults(func=cmd_interp_set)

    young = sub.add_parser("young-check", help="counting identity and hook formula")
    for flag in ("--s", "--cap", "--hook-max"):
        young.add_argument(flag)
    young.set_defaults(func=cmd_young_check)

    for command in sub.choices.values():
        _add_common(command)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        args.func(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3
    except (ConstructionFailure, SearchFailure) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
