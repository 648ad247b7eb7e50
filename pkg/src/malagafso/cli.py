"""Command-line front end: metric sweeps over an SNR grid written as CSV.

Every value comes from a library call; nothing is computed here besides
the grid.  Run ``python -m malagafso --help`` for the flags.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import metrics, montecarlo, stats
from .channel import UnifiedChannel, build_unified, lognormal_sigma_map, rytov_variance
from .config import ConfigError, LinkConfig, load_config, parse_mode
from .metrics import BinaryModulation, MAryScheme

__all__ = ["SweepSpec", "SweepResult", "run_sweep", "lognormal_map_cmd", "main"]

OUTDIR_ENV = "MALAGAFSO_OUTDIR"
METRICS = ("pdf", "cdf", "op", "si", "ber", "ser", "capacity", "moments")
METHODS = ("exact", "asym", "asym-dom", "asym-moments", "low-snr", "mc")
ALLOWED = {
    "pdf": {"exact"},
    "cdf": {"exact", "asym", "asym-dom", "mc"},
    "op": {"exact", "asym", "asym-dom", "mc"},
    "si": {"exact", "mc"},
    "ber": {"exact", "asym", "asym-dom", "mc"},
    "ser": {"exact", "mc"},
    "capacity": {"exact", "asym", "asym-dom", "asym-moments", "low-snr", "mc"},
    "moments": {"exact", "mc"},
}


@dataclass
class SweepSpec:
    """One metric over an SNR grid.

    For ``pdf`` and ``cdf`` the grid is the SNR argument ``gamma`` (dB) at
    fixed ``mu_db``; for every other metric it is ``mu`` itself, read as the
    electrical SNR or (``axis="average"``) the average SNR.
    """

    metric: str
    link: LinkConfig
    start: float
    stop: float
    step: float
    methods: tuple = ("exact",)
    axis: str = "electrical"
    gamma_th: float = 1.0
    mu_db: float = 0.0
    order: float = 1.0
    mod: Optional[BinaryModulation] = None
    scheme: Optional[MAryScheme] = None
    seed: int = 2024
    samples: int = 1_000_000
    jobs: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if not self.start < self.stop:
            raise ValueError("SNR grid needs start < stop")
        if not self.step > 0:
            raise ValueError("SNR grid needs step > 0")
        if not self.methods:
            raise ValueError("at least one method is required")
        bad = [m for m in self.methods if m not in ALLOWED[self.metric]]
        if bad:
            raise ValueError(f"method(s) {', '.join(bad)} not available for {self.metric}; "
                             f"choose from {', '.join(sorted(ALLOWED[self.metric]))}")
        if self.axis not in ("electrical", "average"):
            raise ValueError(f"axis must be electrical or average, got {self.axis!r}")
        if self.metric == "ber" and self.mod is None:
            self.mod = BinaryModulation.get("dbpsk")
        if self.metric == "ser" and self.scheme is None:
            self.scheme = MAryScheme("MPSK", 4)

    def grid(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(n), 10)


@dataclass
class SweepResult:
    """Rows of ``(snr_db, method, value, std_error)`` plus provenance lines."""

    header: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        buf.write("snr_db,method,value,std_error\n")
        for snr, method, value, err in self.rows:
            v = "" if value is None else repr(float(value))
            e = "" if err is None else (err if isinstance(err, str) else repr(float(err)))
            buf.write(f"{snr!r},{method},{v},{e}\n")
        return buf.getvalue()


def _base_channel(spec: SweepSpec) -> UnifiedChannel:
    link = spec.link
    return build_unified(link.params(), link.pointing(), link.mode, 1.0, link.I_l)


def _channel_at(base: UnifiedChannel, spec: SweepSpec, x_db: float) -> UnifiedChannel:
    if spec.metric in ("pdf", "cdf"):
        mu_db = spec.mu_db
    else:
        mu_db = x_db
    if spec.axis == "average":
        return base.with_average_snr(10 ** (mu_db / 10))
    return base.with_snr_db(mu_db)


def _evaluate(args):
    """Value and standard error of one grid point and method."""
    spec, base, i, x_db, method = args
    ch = _channel_at(base, spec, x_db)
    metric = spec.metric
    if method == "mc":
        rng = montecarlo.RngStream(spec.seed, (METRICS.index(metric), i))
        if metric in ("cdf", "op"):
            gth = 10 ** (x_db / 10) if metric == "cdf" else spec.gamma_th
            return montecarlo.empirical_metric("op", ch, rng, spec.samples, gamma_th=gth)
        if metric == "moments":
            g = montecarlo.sample_snr(ch, rng, spec.samples).values ** spec.order
            return float(np.mean(g)), float(np.std(g, ddof=1) / math.sqrt(len(g)))
        return montecarlo.empirical_metric(metric, ch, rng, spec.samples,
                                           mod=spec.mod, scheme=spec.scheme)
    if metric == "pdf":
        return stats.pdf_snr(ch, 10 ** (x_db / 10)), None
    if metric == "cdf":
        return stats.cdf_snr(ch, 10 ** (x_db / 10), method), None
    if metric == "op":
        return metrics.outage_probability(ch, spec.gamma_th, method), None
    if metric == "si":
        return metrics.scintillation_index(ch), None
    if metric == "ber":
        return metrics.ber_binary(ch, spec.mod, method), None
    if metric == "ser":
        return metrics.ser_mary(ch, spec.scheme), None
    if metric == "capacity":
        return metrics.ergodic_capacity(ch, method), None
    return stats.moment(ch, spec.order), None


def _safe_evaluate(args):
    try:
        return _evaluate(args)
    except (ArithmeticError, ValueError) as exc:
        return None, f"error={type(exc).__name__}"


def _header(spec: SweepSpec, base: UnifiedChannel) -> list:
    link = spec.link
    p = base.params
    lines = [
        f"metric={spec.metric}",
        f"kind={base.kind}",
        f"alpha={p.alpha} beta={p.beta} rho={p.rho} omega={p.omega} b0={p.b0} phase={p.phase}",
        f"xi={base.pe.xi} A0={base.pe.A0} I_l={base.I_l}",
        f"r={base.r} mode={base.mode.name.lower()}",
        f"axis={'gamma_db' if spec.metric in ('pdf', 'cdf') else spec.axis + '_snr_db'}",
        f"seed={spec.seed} samples={spec.samples}",
    ]
    if link.preset:
        lines.append(f"preset={link.preset}")
    if spec.metric in ("pdf", "cdf"):
        lines.append(f"mu_db={spec.mu_db} ({spec.axis})")
    if spec.metric == "op":
        lines.append(f"gamma_th={spec.gamma_th}")
    if spec.metric == "ber":
        lines.append(f"mod={spec.mod.name} p={spec.mod.p} q={spec.mod.q}")
    if spec.metric == "ser":
        lines.append(f"scheme={spec.scheme}")
    if spec.metric == "moments":
        lines.append(f"order={spec.order}")
    if spec.metric == "capacity":
        lines.append("capacity=" + ("lower bound" if metrics.capacity_is_lower_bound(base)
                                    else "exact") + " (bits per channel use)")
    if link.geometry is not None:
        lines.append(f"rytov_variance={rytov_variance(link.geometry)!r}")
    return lines


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the sweep and, when ``spec.out`` is set, write the CSV there."""
    base = _base_channel(spec)
    grid = spec.grid()
    tasks = [(spec, base, i, float(x), m) for i, x in enumerate(grid) for m in spec.methods]
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as ex:
            values = list(ex.map(_safe_evaluate, tasks))
    else:
        values = [_safe_evaluate(t) for t in tasks]
    res = SweepResult(_header(spec, base))
    for (_, _, _, x, m), (val, err) in zip(tasks, values):
        res.rows.append((x, m, val, err))
    if spec.out:
        with open(spec.out, "w", newline="") as fh:
            fh.write(res.to_csv())
    return res


def lognormal_map_cmd(link: LinkConfig, out=None) -> tuple[float, float]:
    """Print the moment-matched lognormal ``sigma_I`` and ``sigma_I^2``."""
    out = out or sys.stdout
    ch = build_unified(link.params(), link.pointing(), link.mode, 1.0, link.I_l)
    sigma = lognormal_sigma_map(ch)
    print(f"r={ch.r} kind={ch.kind} sigma_I={sigma:.6f} sigma_I^2={sigma * sigma:.6f}", file=out)
    return sigma, sigma * sigma


# -- argument parsing ----------------------------------------------------------

def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:step in dB")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _parse_xi(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("xi must be positive")
    return v


def _channel_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--config", help="INI file with channel settings (flags override it)")
    g.add_argument("--preset", choices=("p1", "p2", "p3"), help="named (alpha, beta) pair")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=int)
    g.add_argument("--rho", type=float, help="1 selects the Gamma-Gamma form")
    g.add_argument("--omega", type=float)
    g.add_argument("--b0", type=float)
    g.add_argument("--phase", type=float, help="LOS/scatter phase difference [rad]")
    x = g.add_mutually_exclusive_group()
    x.add_argument("--xi", type=_parse_xi, help="beam-width to jitter ratio")
    x.add_argument("--no-pointing", action="store_true", help="negligible pointing error")
    g.add_argument("--mode", choices=("het", "imdd"), help="detection technique")


def _link_from_args(a) -> LinkConfig:
    link = load_config(a.config) if a.config else LinkConfig()
    if a.preset:
        link.apply_preset(a.preset)
    for key in ("alpha", "rho", "omega", "b0", "phase"):
        v = getattr(a, key)
        if v is not None:
            setattr(link, key, v)
    if a.beta is not None:
        link.beta = a.beta
    if a.no_pointing:
        link.xi = math.inf
    elif a.xi is not None:
        link.xi = a.xi
    if a.mode:
        link.mode = parse_mode(a.mode)
    return link


def _out_path(name: Optional[str]) -> Optional[str]:
    if name is None or name == "-":
        return None
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(name):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, name)
    return name


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="malagafso",
        description="Performance of FSO links over Malaga turbulence with pointing errors.")
    sub = p.add_subparsers(dest="command", required=True)

    sw = argparse.ArgumentParser(add_help=False)
    _channel_flags(sw)
    s = sw.add_argument_group("sweep")
    s.add_argument("--snr", type=_parse_grid, default=(0.0, 50.0, 1.0),
                   help="grid start:stop:step in dB (default 0:50:1)")
    s.add_argument("--axis", choices=("electrical", "average"), default="electrical",
                   help="read the grid as electrical SNR (default) or average SNR")
    s.add_argument("--method", action="append",
                   help=f"one of {', '.join(METHODS)}; repeat or comma-separate")
    s.add_argument("--mod", default="dbpsk", help="binary modulation for ber")
    s.add_argument("--scheme", default="4psk", help="M-ary scheme for ser, e.g. 8psk, 4am, 16qam")
    s.add_argument("--gth", type=float, default=1.0, help="outage threshold (linear)")
    s.add_argument("--mu-db", type=float, default=0.0, help="fixed SNR for pdf/cdf sweeps")
    s.add_argument("--order", type=float, default=1.0, help="moment order for moments")
    s.add_argument("--seed", type=int, default=2024)
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--out", help=f"CSV path (relative paths go under ${OUTDIR_ENV}); default stdout")

    q = sub.add_parser("sweep", parents=[sw], help="metric sweep over an SNR grid")
    q.add_argument("--metric", choices=METRICS, required=True)
    for m in METRICS:
        sub.add_parser(m, parents=[sw], help=f"shorthand for sweep --metric {m}")

    ln = sub.add_parser("lognormal-map", help="moment-matched lognormal sigma_I")
    _channel_flags(ln)
    return p


def _attach_negative_grid(argv: list) -> list:
    # "--snr -30:0:1" would otherwise read the grid as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--snr":
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"--snr={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    a = parser.parse_args(_attach_negative_grid(argv))
    try:
        link = _link_from_args(a)
        if a.command == "lognormal-map":
            lognormal_map_cmd(link)
            return 0
        metric = a.metric if a.command == "sweep" else a.command
        methods = []
        for item in a.method or ["exact"]:
            methods.extend(x.strip() for x in item.split(",") if x.strip())
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            parser.error(f"unknown method(s): {', '.join(unknown)}")
        spec = SweepSpec(metric, link, *a.snr, methods=tuple(methods), axis=a.axis,
                         gamma_th=a.gth, mu_db=a.mu_db, order=a.order,
                         mod=BinaryModulation.get(a.mod) if metric == "ber" else None,
                         scheme=MAryScheme.parse(a.scheme) if metric == "ser" else None,
                         seed=a.seed, samples=a.samples, jobs=a.jobs, out=_out_path(a.out))
        res = run_sweep(spec)
        if spec.out is None:
            sys.stdout.write(res.to_csv())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
