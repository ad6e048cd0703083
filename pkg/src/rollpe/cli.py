"""Command-line harness: invariant sweeps, equivalence checks, benchmarks.

Each command runs a seeded sweep against the library and emits a
machine-readable report (JSON or CSV).  Residual fields are fully
deterministic for a fixed config; timing fields are not.  The process
exits 0 iff every threshold in the command's suite passed (benchmarks
and the attention demo are report-only and always pass).
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .attention import AttentionBatch, PEConfig, PEKind, attend, grad_check
from .multiplex import equivariance_violation_witness
from .roll_core import relative_form_score, roll_discrete, rollpe_score, shift_matrix
from .rope import classic_schedule, equivalence_residual, rope_apply
from .spectral import SpectralBranch, roll_continuous, roll_continuous_fft

__all__ = ["RunConfig", "Report", "run", "main"]

SCHEMA_VERSION = "1"

COMMANDS = (
    "equivariance-report",
    "rope-equivalence",
    "multiplex-witness",
    "grad-check",
    "bench",
    "attention-demo",
)

_THRESHOLDS = {
    "equivariance-report": 1e-12,
    "rope-equivalence": 1e-9,
    "multiplex-witness": 1e-3,   # minimum witness gap
    "grad-check": 1e-5,
}

_CSV_BASE_COLUMNS = ("trial", "n", "lambda", "p_q", "p_k", "residual")

# Target duration of one timed benchmark repeat; per-op loop counts are
# capped so a single repeat stays near this, with config.trials as the
# upper bound.
_BENCH_TARGET_S = 0.2


@dataclass
class RunConfig:
    command: str
    n: int = 8
    t: int = 8
    waves: int = 2
    lam: float = 1.0
    seed: int = 0
    trials: int = 100
    output_path: str | None = None
    format: str = "json"
    d_override: float | None = None
    bench_repeats: int = 5
    bench_warmup: int = 100

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.n < 1 or self.t < 1 or self.waves < 1:
            raise ValueError("n, t, and w must all be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.d_override is not None and not self.d_override > 0:
            raise ValueError("d override must be positive")
        if self.bench_repeats < 1 or self.bench_warmup < 0:
            raise ValueError("bench repeats must be >= 1 and warmup >= 0")
        if self.command in ("grad-check", "attention-demo") and self.n % 2 != 0:
            raise ValueError(f"{self.command} requires an even n (rotary/APE kinds)")
        if self.command == "attention-demo" and self.t > 256:
            raise ValueError("attention-demo supports at most t = 256")


@dataclass
class Report:
    command: str
    config: dict
    rows: list
    summary: dict
    schema_version: str = field(default=SCHEMA_VERSION)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "config": self.config,
            "rows": self.rows,
            "summary": self.summary,
        }


def _summarize_residuals(rows: list, threshold: float) -> dict:
    residuals = [r["residual"] for r in rows if r.get("residual") is not None]
    max_res = max(residuals) if residuals else 0.0
    mean_res = sum(residuals) / len(residuals) if residuals else 0.0
    return {
        "max_residual": max_res,
        "mean_residual": mean_res,
        "threshold": threshold,
        "passed": max_res <= threshold,
    }


def _base_row(trial: int, cfg: RunConfig, p_q=None, p_k=None, residual=None) -> dict:
    return {
        "trial": trial,
        "n": cfg.n,
        "lambda": cfg.lam,
        "p_q": p_q,
        "p_k": p_k,
        "residual": residual,
    }


def _cmd_equivariance_report(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    d = cfg.d_override if cfg.d_override is not None else float(cfg.n)
    pe = PEConfig(kind=PEKind.ROLL_DISCRETE)
    rows = []
    for trial in range(cfg.trials):
        q, k = rng.standard_normal((2, cfg.n))
        p_q, p_k, shift = (int(x) for x in rng.integers(-2 * cfg.n, 2 * cfg.n + 1, size=3))
        base = rollpe_score(q, k, p_q, p_k, d)
        res_shift = abs(rollpe_score(q, k, p_q + shift, p_k + shift, d) - base)
        res_rel = abs(base - relative_form_score(q, k, p_k - p_q, d))

        qm, km, vm = rng.standard_normal((3, cfg.t, cfg.n))
        pos = np.arange(cfg.t)
        before = attend(AttentionBatch(qm, km, vm, pos), pe, d).scores
        after = attend(AttentionBatch(qm, km, vm, pos + shift), pe, d).scores
        res_mat = float(np.abs(after - before).max())

        rows.append(
            _base_row(trial, cfg, p_q, p_k, max(res_shift, res_rel, res_mat))
        )
    return rows, _summarize_residuals(rows, _THRESHOLDS[cfg.command])


def _cmd_rope_equivalence(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for trial in range(cfg.trials):
        q, k = rng.standard_normal((2, cfg.n))
        p_q, p_k = rng.uniform(-3.0 * cfg.n, 3.0 * cfg.n, size=2)
        residual = equivalence_residual(q, k, p_q, p_k, cfg.lam)
        rows.append(_base_row(trial, cfg, float(p_q), float(p_k), residual))
    return rows, _summarize_residuals(rows, _THRESHOLDS[cfg.command])


def _cmd_multiplex_witness(cfg: RunConfig):
    threshold = _THRESHOLDS[cfg.command]
    witness = equivariance_violation_witness(
        cfg.n, cfg.waves, cfg.seed, budget=cfg.trials, gap_threshold=threshold
    )
    row = _base_row(0, cfg, witness.p_q, witness.p_k, witness.gap)
    row.update(
        {
            "found": witness.found,
            "shift": witness.t,
            "attempts": witness.attempts,
            "score_before": witness.score_before,
            "score_after": witness.score_after,
            "waves": cfg.waves,
        }
    )
    # One wave is provably shift-invariant: exhausting the budget is the
    # expected outcome there, while W >= 2 must produce a witness.
    passed = witness.found if cfg.waves >= 2 else not witness.found
    summary = {
        "max_residual": witness.gap,
        "mean_residual": witness.gap,
        "threshold": threshold,
        "found": witness.found,
        "passed": passed,
    }
    return [row], summary


def _demo_pe_configs(cfg: RunConfig) -> dict[str, PEConfig]:
    return {
        PEKind.NONE.value: PEConfig(kind=PEKind.NONE),
        PEKind.SINUSOIDAL_APE.value: PEConfig(kind=PEKind.SINUSOIDAL_APE),
        PEKind.ROLL_DISCRETE.value: PEConfig(kind=PEKind.ROLL_DISCRETE),
        PEKind.ROLL_CONTINUOUS.value: PEConfig(kind=PEKind.ROLL_CONTINUOUS, lam=cfg.lam),
        PEKind.ROPE.value: PEConfig(kind=PEKind.ROPE),
        PEKind.MULTIPLEXED_ROLL.value: PEConfig(
            kind=PEKind.MULTIPLEXED_ROLL, waves=cfg.waves
        ),
    }


def _cmd_grad_check(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    qm, km, vm = rng.standard_normal((3, cfg.t, cfg.n))
    batch = AttentionBatch(qm, km, vm, np.arange(cfg.t))
    rows = []
    for trial, (name, pe) in enumerate(_demo_pe_configs(cfg).items()):
        row = _base_row(trial, cfg, residual=grad_check(pe, batch, eps=1e-5))
        row["kind"] = name
        rows.append(row)
    return rows, _summarize_residuals(rows, _THRESHOLDS[cfg.command])


def _cmd_attention_demo(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    qm, km, vm = rng.standard_normal((3, cfg.t, cfg.n))
    d = cfg.d_override
    positions = np.arange(cfg.t)
    shift = 5
    rows = []
    gaps = {}
    trial = 0
    for name, pe in _demo_pe_configs(cfg).items():
        before = attend(AttentionBatch(qm, km, vm, positions), pe, d).scores
        after = attend(AttentionBatch(qm, km, vm, positions + shift), pe, d).scores
        gaps[name] = float(np.abs(after - before).max())
        for i in range(cfg.t):
            for j in range(cfg.t):
                row = _base_row(
                    trial, cfg, int(positions[i]), int(positions[j]),
                    abs(float(after[i, j]) - float(before[i, j])),
                )
                row.update(
                    {
                        "kind": name,
                        "score": float(before[i, j]),
                        "score_shifted": float(after[i, j]),
                        "shift": shift,
                    }
                )
                rows.append(row)
                trial += 1
    summary = {
        "max_residual": max(r["residual"] for r in rows),
        "mean_residual": sum(r["residual"] for r in rows) / len(rows),
        "max_gap_per_kind": gaps,
        "passed": True,
    }
    return rows, summary


def _median_time(fn, loops: int, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(loops):
            fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def _bench_one(fn, cfg: RunConfig):
    start = time.perf_counter()
    for _ in range(cfg.bench_warmup):
        fn()
    elapsed = time.perf_counter() - start
    per_call = elapsed / max(cfg.bench_warmup, 1)
    loops = max(1, min(cfg.trials, int(_BENCH_TARGET_S / max(per_call, 1e-9))))
    median = _median_time(fn, loops, cfg.bench_repeats)
    return loops, median, loops / median


def _cmd_bench(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    q = rng.standard_normal(n)
    p_int, p_frac = 3, 0.37

    ops = {
        "roll_discrete": lambda: roll_discrete(q, p_int),
        "shift_matmul_oracle": lambda: shift_matrix(n, p_int) @ q,
        "roll_continuous_dense": lambda: roll_continuous(
            q, p_frac, cfg.lam, SpectralBranch.CENTERED
        ),
        "roll_continuous_fft": lambda: roll_continuous_fft(q, p_frac, cfg.lam),
    }
    if n % 2 == 0:
        sched = classic_schedule(n)
        ops["rope_apply"] = lambda: rope_apply(q, p_frac, sched)

    rows = []
    throughput = {}
    for trial, (name, fn) in enumerate(ops.items()):
        loops, median, ops_per_sec = _bench_one(fn, cfg)
        throughput[name] = ops_per_sec
        row = _base_row(trial, cfg)
        row.update(
            {"op": name, "loops": loops, "median_s": median, "ops_per_sec": ops_per_sec}
        )
        rows.append(row)

    agreement = 0.0
    for _ in range(32):
        sample = rng.standard_normal(n)
        p = float(rng.uniform(-2 * n, 2 * n))
        dense = roll_continuous(sample, p, cfg.lam, SpectralBranch.CENTERED)
        agreement = max(
            agreement, float(np.abs(roll_continuous_fft(sample, p, cfg.lam) - dense).max())
        )

    summary = {
        "ops_per_sec": throughput,
        "roll_vs_matmul_speedup": throughput["roll_discrete"]
        / throughput["shift_matmul_oracle"],
        "fft_vs_dense_speedup": throughput["roll_continuous_fft"]
        / throughput["roll_continuous_dense"],
        "fft_vs_dense_residual": agreement,
        "passed": True,
    }
    return rows, summary


_RUNNERS = {
    "equivariance-report": _cmd_equivariance_report,
    "rope-equivalence": _cmd_rope_equivalence,
    "multiplex-witness": _cmd_multiplex_witness,
    "grad-check": _cmd_grad_check,
    "bench": _cmd_bench,
    "attention-demo": _cmd_attention_demo,
}


def run(config: RunConfig) -> Report:
    """Execute one command and, if an output path is set, write the report."""
    config.validate()
    start = time.perf_counter()
    rows, summary = _RUNNERS[config.command](config)
    summary["elapsed_s"] = time.perf_counter() - start  # timing field, not deterministic
    report = Report(
        command=config.command, config=asdict(config), rows=rows, summary=summary
    )
    if config.output_path:
        write_report(report, config.output_path, config.format)
    return report


def render_csv(report: Report) -> str:
    extras = []
    for row in report.rows:
        for key in row:
            if key not in _CSV_BASE_COLUMNS and key not in extras:
                extras.append(key)
    out = []
    writer_target = _StringList(out)
    writer = csv.writer(writer_target)
    writer.writerow(list(_CSV_BASE_COLUMNS) + extras)
    for row in report.rows:
        writer.writerow(
            [row.get(col, "") for col in _CSV_BASE_COLUMNS]
            + [row.get(col, "") for col in extras]
        )
    return "".join(out)


class _StringList:
    def __init__(self, sink: list):
        self._sink = sink

    def write(self, text: str):
        self._sink.append(text)


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2)


def write_report(report: Report, path: str, fmt: str) -> None:
    text = render_json(report) if fmt == "json" else render_csv(report)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
        if not text.endswith("\n"):
            handle.write("\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rollpe",
        description="Invariant sweeps, equivalence checks, and benchmarks "
        "for roll / rotary positional encodings.",
    )
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--n", type=int, default=8, help="vector / head dimension")
    parser.add_argument("--t", type=int, default=8, help="tokens per attention batch")
    parser.add_argument("--w", dest="waves", type=int, default=2, help="wave count W")
    parser.add_argument("--lambda", dest="lam", type=float, default=1.0,
                        help="wavelength stretch")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--out", dest="output_path", default=None,
                        help="report file path (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--d-override", dest="d_override", type=float, default=None,
                        help="override the sqrt(d) normalizer (default: n)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        n=args.n,
        t=args.t,
        waves=args.waves,
        lam=args.lam,
        seed=args.seed,
        trials=args.trials,
        output_path=args.output_path,
        format=args.format,
        d_override=args.d_override,
    )
    try:
        report = run(config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.output_path:
        print(f"{config.command}: wrote {config.format} report to {config.output_path}")
    else:
        print(render_json(report) if config.format == "json" else render_csv(report))
    return 0 if report.summary.get("passed", True) else 1


if __name__ == "__main__":
    sys.exit(main())
