"""Reproducible verification harness.

Generates seeded trial instances, runs the requested check suites, and
assembles a machine-readable report.  Every trial derives its own seed
from (config seed, suite, dimension, trial index) through a seed sequence,
so identical configurations produce identical numbers regardless of which
suites run or in what order.

Suites
------
``thm41`` / ``thm51``   sandwich identities, independently drawn operators
``thm42`` / ``thm52``   representation of f(L1)-f(L2) / f(L1)R-Rf(L2)
``thm43`` / ``thm53``   operator-Lipschitz margins
``s2``                  Hilbert-Schmidt margins
``oracles``             kernel cross-checks (Schur/spectral/RK4 oracles,
                        Cayley round trip, contraction and resolvent bounds)
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from dissipcalc import dissipative, doi, funcalc, linalg
from dissipcalc.errors import ConfigError, ValidationError
from dissipcalc.funcalc import AnalyticFunction

SUITE_ORDER = ("thm41", "thm42", "thm43", "s2", "thm51", "thm52", "thm53", "oracles")
_SUITE_INDEX = {name: i for i, name in enumerate(SUITE_ORDER)}

SCHEMA_VERSION = 1

# Fixed thresholds of the oracle suite (independent of config tolerances).
SCHUR_ORACLE_TOL = 1e-10
SELFADJOINT_ORACLE_TOL = 1e-9
EXPM_RK4_TOL = 1e-8
# RK4 is expensive: run it on every RK4_SUBSAMPLE-th trial, small dims only.
RK4_SUBSAMPLE = 10
RK4_MAX_DIM = 6
# Every GENERAL_PERTURBATION_CYCLE-th pair trial perturbs with an arbitrary
# (non-dissipative) matrix and re-validates; failed re-validation skips the
# trial.
GENERAL_PERTURBATION_CYCLE = 4

SEMIGROUP_TIMES = (0.1, 0.5, 1.0, 2.0)
RESOLVENT_SAMPLES = (-1j, 1.0 - 2.0j, -5.0 - 0.1j)


def default_functions() -> tuple[tuple[str, AnalyticFunction], ...]:
    return (
        ("res_i", funcalc.resolvent_fn(1.0, -1j)),
        ("exp_1", funcalc.exponential_fn(1.0, 1.0)),
        ("mix", funcalc.exponential_fn(1.0, 0.5) + funcalc.resolvent_fn(3.0, -2j)),
    )


@dataclass(frozen=True)
class Tolerances:
    tol_thm: float = 1e-8
    tol_lip: float = 1e-8
    tol_kernel: float = 1e-9

    def validate(self) -> None:
        for name in ("tol_thm", "tol_lip", "tol_kernel"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive", field=name)


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple[int, ...] = (2, 4, 8, 16)
    trials: int = 50
    seed: int = 1
    functions: tuple[tuple[str, AnalyticFunction], ...] = field(
        default_factory=default_functions
    )
    perturbation_scale: float = 0.1
    quad_nodes: int = doi.DEFAULT_QUAD_NODES
    tolerances: Tolerances = field(default_factory=Tolerances)
    suites: tuple[str, ...] = SUITE_ORDER

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", field="trials")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError("dims must be a nonempty list of integers >= 1", field="dims")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0", field="seed")
        if self.perturbation_scale <= 0:
            raise ConfigError("perturbation_scale must be positive", field="perturbation_scale")
        if self.quad_nodes < 1:
            raise ConfigError("quad_nodes must be >= 1", field="quad_nodes")
        self.tolerances.validate()
        for s in self.suites:
            if s not in SUITE_ORDER:
                raise ConfigError(
                    f"unknown suite {s!r}; valid: {', '.join(SUITE_ORDER)}",
                    field="suites",
                )
        names = [name for name, _ in self.functions]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate function names", field="function")


@dataclass(frozen=True)
class TrialRecord:
    suite: str
    seed: int
    dim: int
    function: str
    metric: str
    kind: str  # "residual" or "margin"
    value: float
    threshold: float
    passed: bool
    lhs: float | None = None
    rhs: float | None = None
    wall_time: float = 0.0


@dataclass(frozen=True)
class SuiteSummary:
    suite: str
    records: int
    failures: int
    max_residual: float | None
    min_margin: float | None
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    records: tuple[TrialRecord, ...]
    summaries: tuple[SuiteSummary, ...]
    passed: bool


def _residual_record(suite, seed, dim, function, metric, value, threshold, dt) -> TrialRecord:
    return TrialRecord(
        suite=suite,
        seed=seed,
        dim=dim,
        function=function,
        metric=metric,
        kind="residual",
        value=float(value),
        threshold=float(threshold),
        passed=bool(value <= threshold),
        wall_time=dt,
    )


def _margin_record(suite, seed, dim, function, metric, lhs, rhs, tol, dt) -> TrialRecord:
    margin = float(rhs - lhs)
    threshold = float(-tol * rhs)
    return TrialRecord(
        suite=suite,
        seed=seed,
        dim=dim,
        function=function,
        metric=metric,
        kind="margin",
        value=margin,
        threshold=threshold,
        passed=bool(margin >= threshold),
        lhs=float(lhs),
        rhs=float(rhs),
        wall_time=dt,
    )


def _trial_rng(seed: int, suite: str, dim: int, trial: int):
    ss = np.random.SeedSequence((seed, _SUITE_INDEX[suite], dim, trial))
    derived = int(ss.generate_state(1, np.uint64)[0])
    return derived, np.random.default_rng(derived)


def _draw_pair(cfg: ExperimentConfig, rng, dim: int, trial: int):
    """L1 and L2 = L1 + perturbation; None when a general perturbation fails
    the dissipativity re-check (that trial is skipped)."""
    l1 = dissipative.random_dissipative(dim, rng)
    if trial % GENERAL_PERTURBATION_CYCLE == GENERAL_PERTURBATION_CYCLE - 1:
        k0 = cfg.perturbation_scale * 0.5 * dissipative.random_matrix(dim, rng)
        l2m = l1.matrix + k0
        if not dissipative.is_dissipative(l2m):
            return None
        return dissipative.make_pair(l1, dissipative.from_matrix(l2m))
    pert = dissipative.random_dissipative(dim, rng, cfg.perturbation_scale)
    return dissipative.perturbed_pair(l1, pert)


def _unit_norm_matrix(dim: int, rng) -> np.ndarray:
    r0 = dissipative.random_matrix(dim, rng)
    return r0 / linalg.op_norm(r0)


def _run_pair_suite(cfg, suite, dim, trial) -> list[TrialRecord]:
    seed, rng = _trial_rng(cfg.seed, suite, dim, trial)
    pair = _draw_pair(cfg, rng, dim, trial)
    if pair is None:
        return []
    r = _unit_norm_matrix(dim, rng) if suite in ("thm52", "thm53") else None
    out = []
    for name, f in cfg.functions:
        t0 = time.perf_counter()
        if suite == "thm42":
            value = doi.theorem42_residual(f, pair, cfg.quad_nodes)
            rec = _residual_record(suite, seed, dim, name, "thm42_residual",
                                   value, cfg.tolerances.tol_thm, time.perf_counter() - t0)
        elif suite == "thm52":
            value = doi.quasicommutator_residual(f, pair.first, pair.second, r, cfg.quad_nodes)
            rec = _residual_record(suite, seed, dim, name, "thm52_residual",
                                   value, cfg.tolerances.tol_thm, time.perf_counter() - t0)
        elif suite == "thm43":
            lhs, rhs = doi.lipschitz_margin(f, pair)
            rec = _margin_record(suite, seed, dim, name, "thm43_margin",
                                 lhs, rhs, cfg.tolerances.tol_lip, time.perf_counter() - t0)
        elif suite == "thm53":
            lhs, rhs = doi.quasicommutator_margin(f, pair.first, pair.second, r)
            rec = _margin_record(suite, seed, dim, name, "thm53_margin",
                                 lhs, rhs, cfg.tolerances.tol_lip, time.perf_counter() - t0)
        elif suite == "s2":
            lhs, rhs = doi.s2_margin(f, pair)
            rec = _margin_record(suite, seed, dim, name, "s2_margin",
                                 lhs, rhs, cfg.tolerances.tol_lip, time.perf_counter() - t0)
        else:  # pragma: no cover
            raise ValueError(suite)
        out.append(rec)
    return out


def _run_independent_suite(cfg, suite, dim, trial) -> list[TrialRecord]:
    seed, rng = _trial_rng(cfg.seed, suite, dim, trial)
    l1 = dissipative.random_dissipative(dim, rng)
    l2 = dissipative.random_dissipative(dim, rng)
    r = _unit_norm_matrix(dim, rng) if suite == "thm51" else None
    out = []
    for name, f in cfg.functions:
        t0 = time.perf_counter()
        if suite == "thm41":
            value = doi.theorem41_residual(f, l1, l2, cfg.quad_nodes)
            metric = "thm41_residual"
        else:
            value = doi.theorem51_residual(f, l1, l2, r, cfg.quad_nodes)
            metric = "thm51_residual"
        out.append(_residual_record(suite, seed, dim, name, metric,
                                    value, cfg.tolerances.tol_thm,
                                    time.perf_counter() - t0))
    return out


def _run_oracle_trial(cfg, dim, trial) -> list[TrialRecord]:
    suite = "oracles"
    seed, rng = _trial_rng(cfg.seed, suite, dim, trial)
    tol = cfg.tolerances.tol_kernel
    out = []

    l = dissipative.random_dissipative(dim, rng)
    lnorm = linalg.op_norm(l.matrix)

    t0 = time.perf_counter()
    t_cayley = dissipative.cayley(l)
    back = dissipative.inverse_cayley(t_cayley)
    value = linalg.op_norm(back.matrix - l.matrix) / (1.0 + lnorm)
    out.append(_residual_record(suite, seed, dim, "-", "cayley_roundtrip",
                                value, tol, time.perf_counter() - t0))

    t0 = time.perf_counter()
    out.append(_margin_record(suite, seed, dim, "-", "cayley_contraction",
                              linalg.op_norm(t_cayley), 1.0, tol,
                              time.perf_counter() - t0))

    t0 = time.perf_counter()
    growth = max(
        linalg.op_norm(linalg.expm(1j * s * l.matrix)) for s in SEMIGROUP_TIMES
    )
    out.append(_margin_record(suite, seed, dim, "-", "semigroup_contraction",
                              growth, 1.0, tol, time.perf_counter() - t0))

    t0 = time.perf_counter()
    worst = max(
        linalg.op_norm(dissipative.resolvent(l, lam)) * abs(lam.imag)
        for lam in RESOLVENT_SAMPLES
    )
    out.append(_margin_record(suite, seed, dim, "-", "resolvent_bound",
                              worst, 1.0, tol, time.perf_counter() - t0))

    # Diagonal Schur-product and self-adjoint spectral oracles, per function.
    z_diag = rng.standard_normal(dim) + 1j * np.abs(rng.standard_normal(dim))
    w_diag = rng.standard_normal(dim) + 1j * np.abs(rng.standard_normal(dim))
    k_diag = dissipative.random_matrix(dim, rng)
    l1d = dissipative.from_matrix(np.diag(z_diag))
    l2d = dissipative.from_matrix(np.diag(w_diag))

    h1 = dissipative.random_matrix(dim, rng)
    h1 = 0.5 * (h1 + h1.conj().T)
    hp = dissipative.random_matrix(dim, rng)
    hp = cfg.perturbation_scale * 0.5 * (hp + hp.conj().T)
    zero = np.zeros((dim, dim))
    lsa1 = dissipative.make_dissipative(h1, zero)
    lsa2 = dissipative.make_dissipative(h1 + hp, zero)
    k_sa = lsa1.matrix - lsa2.matrix

    for name, f in cfg.functions:
        decomposition = doi.haagerup_decompose(f, cfg.quad_nodes)

        t0 = time.perf_counter()
        got = doi.doi_apply(decomposition, l1d, l2d, k_diag)
        ref = doi.diagonal_schur_reference(f, z_diag, w_diag, k_diag)
        value = linalg.fro_norm(got - ref) / (1.0 + linalg.fro_norm(ref))
        out.append(_residual_record(suite, seed, dim, name, "schur_diagonal",
                                    value, SCHUR_ORACLE_TOL, time.perf_counter() - t0))

        t0 = time.perf_counter()
        got = doi.doi_apply(decomposition, lsa1, lsa2, k_sa)
        ref = doi.selfadjoint_reference(f, lsa1, lsa2, k_sa)
        value = linalg.op_norm(got - ref) / (1.0 + linalg.op_norm(ref))
        out.append(_residual_record(suite, seed, dim, name, "selfadjoint_doi",
                                    value, SELFADJOINT_ORACLE_TOL,
                                    time.perf_counter() - t0))

        t0 = time.perf_counter()
        value = funcalc.commutation_check(f, l)
        out.append(_residual_record(suite, seed, dim, name, "commutation",
                                    value, tol, time.perf_counter() - t0))

    if dim <= RK4_MAX_DIM and trial % RK4_SUBSAMPLE == 0:
        t0 = time.perf_counter()
        a0 = dissipative.random_matrix(dim, rng)
        a = 2.0 * a0 / linalg.op_norm(a0)
        value = linalg.fro_norm(linalg.expm(a) - linalg.expm_rk4_reference(a))
        out.append(_residual_record(suite, seed, dim, "-", "expm_rk4",
                                    value, EXPM_RK4_TOL, time.perf_counter() - t0))
    return out


def run_experiment(cfg: ExperimentConfig) -> VerificationReport:
    """Run all configured suites; deterministic for a given config."""
    cfg.validate()
    records: list[TrialRecord] = []
    for suite in (s for s in SUITE_ORDER if s in cfg.suites):
        for dim in cfg.dims:
            for trial in range(cfg.trials):
                if suite in ("thm42", "thm43", "s2", "thm52", "thm53"):
                    records.extend(_run_pair_suite(cfg, suite, dim, trial))
                elif suite in ("thm41", "thm51"):
                    records.extend(_run_independent_suite(cfg, suite, dim, trial))
                else:
                    records.extend(_run_oracle_trial(cfg, dim, trial))
    summaries = _summarize(records, [s for s in SUITE_ORDER if s in cfg.suites])
    passed = all(s.passed for s in summaries)
    return VerificationReport(records=tuple(records), summaries=tuple(summaries), passed=passed)


def _summarize(records, suites) -> tuple[SuiteSummary, ...]:
    out = []
    for suite in suites:
        recs = [r for r in records if r.suite == suite]
        residuals = [r.value for r in recs if r.kind == "residual"]
        margins = [r.value for r in recs if r.kind == "margin"]
        failures = sum(1 for r in recs if not r.passed)
        out.append(
            SuiteSummary(
                suite=suite,
                records=len(recs),
                failures=failures,
                max_residual=max(residuals) if residuals else None,
                min_margin=min(margins) if margins else None,
                passed=failures == 0,
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# Config file format: "key = value" lines plus "function NAME" ... "end"
# blocks holding the one-term-per-line function form.


def _parse_scalar(key: str, value: str, lineno: int):
    try:
        if key in ("trials", "seed", "quad_nodes"):
            return int(value)
        if key in ("perturbation_scale", "tol_thm", "tol_lip", "tol_kernel"):
            return float(value)
        if key == "dims":
            return tuple(int(v) for v in value.replace(",", " ").split())
        if key == "suites":
            return tuple(v for v in value.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"cannot parse value {value!r}", line=lineno, field=key) from exc
    raise ConfigError(f"unknown key {key!r}", line=lineno, field=key)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the key-value config format; raises ConfigError with line info."""
    scalars: dict = {}
    tols: dict = {}
    functions: list[tuple[str, AnalyticFunction]] = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].split("#", 1)[0].strip()
        i += 1
        if not line:
            continue
        if line.startswith("function"):
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError("expected 'function NAME'", line=lineno, field="function")
            name = parts[1]
            block: list[str] = []
            start = lineno
            while True:
                if i >= len(lines):
                    raise ConfigError(
                        f"function block {name!r} not closed with 'end'",
                        line=start, field="function",
                    )
                body = lines[i].split("#", 1)[0].strip()
                i += 1
                if body == "end":
                    break
                block.append(body)
            try:
                functions.append((name, funcalc.parse_function("\n".join(block))))
            except ValidationError as exc:
                raise ConfigError(str(exc), line=start, field=f"function {name}") from exc
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        parsed = _parse_scalar(key, value, lineno)
        if key.startswith("tol_"):
            tols[key] = parsed
        else:
            scalars[key] = parsed
    cfg = ExperimentConfig(
        **scalars,
        tolerances=Tolerances(**tols),
        **({"functions": tuple(functions)} if functions else {}),
    )
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Replace selected fields (CLI flags) and re-validate."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    cfg = replace(cfg, **clean)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Report emission.

_CSV_COLUMNS = ("suite", "seed", "dim", "function", "metric", "value", "threshold", "pass")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def report_to_csv(report: VerificationReport) -> str:
    """CSV body; wall times are deliberately excluded so identical configs
    produce byte-identical files."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for r in report.records:
        writer.writerow(
            [r.suite, r.seed, r.dim, r.function, r.metric,
             _fmt(r.value), _fmt(r.threshold), "true" if r.passed else "false"]
        )
    return buf.getvalue()


def report_to_json(report: VerificationReport) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "passed": report.passed,
        "summaries": [asdict(s) for s in report.summaries],
        "records": [asdict(r) for r in report.records],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> VerificationReport:
    payload = json.loads(text)
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema_version {payload.get('schema_version')!r}"
        )
    records = tuple(TrialRecord(**r) for r in payload["records"])
    summaries = tuple(SuiteSummary(**s) for s in payload["summaries"])
    return VerificationReport(
        records=records, summaries=summaries, passed=payload["passed"]
    )


def emit_report(report: VerificationReport, fmt: str, path) -> None:
    """Write the report as CSV or JSON."""
    if fmt == "csv":
        body = report_to_csv(report)
    elif fmt == "json":
        body = report_to_json(report)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)


__all__ = [
    "SUITE_ORDER",
    "Tolerances",
    "ExperimentConfig",
    "TrialRecord",
    "SuiteSummary",
    "VerificationReport",
    "default_functions",
    "run_experiment",
    "parse_config",
    "load_config",
    "with_overrides",
    "report_to_csv",
    "report_to_json",
    "report_from_json",
    "emit_report",
]
