"""Command-line front end: parameter ingestion, sweeps, verification, output.

Subcommands: tc | exponents | xi | vertex | verify | scan.  Configuration is
flat ``section.key = value`` text (JSON with the same sections is also
accepted); unknown keys are rejected.  Output is deterministic: identical
configs produce byte-identical CSV/JSON.  All energies are reported in units
of the photon gap delta_c unless ``out.physical_units = true``.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import critical, ladder, sectors
from .ladder import CONVENTIONS, KernelScalars
from .model import (
    ConstantLifetime,
    DiagonalMixture,
    DomainError,
    FermiLiquidLifetime,
    Fock,
    ModelParams,
    Thermal,
    Vacuum,
)
from .useries import RationalFunction, taylor

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Flat run configuration; round-trips losslessly through text and JSON."""

    # defaults give gtilde*delta_c = 0.02, c2 = 0.25, vacuum T_c = 0.04*delta_c
    g0: float = 1.7771531752633465
    delta_c: float = 1.0
    q0: float = 0.001
    e_f: float = 100.0
    k_f: float = 1.0
    lifetime: str = "constant:0.04"
    convention: str = "canonical"
    states: tuple[str, ...] = ("vacuum", "fock:1", "fock:3", "thermal")
    gamma_window: tuple[float, float] = (1e-6, 1e-3)
    gamma_points: int = 24
    nu_window: tuple[float, float] = (1e-5, 1e-3)
    nu_points: int = 8
    anisotropy: float = 1.0
    fock_form: str = "reduced"
    xi_reduced_t: float = 1e-4
    quad_rel_tol: float = 1e-6
    verify_dctau: float = 1e3
    verify_t_over_delta: float = 0.4
    out_format: str = "csv"
    physical_units: bool = False

    _KEYMAP = {
        "model.g0": "g0",
        "model.delta_c": "delta_c",
        "model.q0": "q0",
        "model.e_f": "e_f",
        "model.k_f": "k_f",
        "model.lifetime": "lifetime",
        "model.convention": "convention",
        "states.list": "states",
        "fit.gamma_window": "gamma_window",
        "fit.gamma_points": "gamma_points",
        "fit.nu_window": "nu_window",
        "fit.nu_points": "nu_points",
        "fit.anisotropy": "anisotropy",
        "fit.fock_form": "fock_form",
        "fit.xi_reduced_t": "xi_reduced_t",
        "quad.rel_tol": "quad_rel_tol",
        "verify.dctau": "verify_dctau",
        "verify.t_over_delta": "verify_t_over_delta",
        "out.format": "out_format",
        "out.physical_units": "physical_units",
    }

    def params(self) -> ModelParams:
        return ModelParams(self.g0, self.delta_c, self.q0, self.e_f, self.k_f)

    def lifetime_model(self):
        if self.lifetime == "fermi-liquid":
            return FermiLiquidLifetime()
        if self.lifetime.startswith("constant:"):
            return ConstantLifetime(float(self.lifetime.split(":", 1)[1]))
        raise ConfigError(f"unknown lifetime model {self.lifetime!r}")

    def state_objects(self):
        return [parse_state(tok) for tok in self.states]

    def emit(self) -> str:
        lines = []
        for key in sorted(self._KEYMAP):
            attr = self._KEYMAP[key]
            val = getattr(self, attr)
            if isinstance(val, tuple) and attr == "states":
                txt = ", ".join(val)
            elif isinstance(val, tuple):
                txt = ",".join(_fmt(x) for x in val)
            elif isinstance(val, bool):
                txt = "true" if val else "false"
            elif isinstance(val, float):
                txt = _fmt(val)
            else:
                txt = str(val)
            lines.append(f"{key} = {txt}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return cls._from_mapping(_flatten_json(json.loads(text)))
        pairs = {}
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {ln}: expected key = value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key in pairs:
                raise ConfigError(f"line {ln}: duplicate key {key!r}")
            pairs[key] = val
        return cls._from_mapping(pairs)

    @classmethod
    def _from_mapping(cls, pairs: dict) -> "RunConfig":
        kwargs = {}
        for key, val in pairs.items():
            if key not in cls._KEYMAP:
                raise ConfigError(f"unknown config key {key!r}")
            attr = cls._KEYMAP[key]
            kwargs[attr] = _convert(attr, val)
        return cls(**kwargs)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _convert(attr: str, val):
    if isinstance(val, (list, tuple)):
        val = ",".join(str(v) for v in val)
    val = str(val).strip()
    if attr == "states":
        return tuple(_split_states(val))
    if attr in ("gamma_window", "nu_window"):
        lo, hi = (float(s) for s in val.split(","))
        if not 0 < lo < hi:
            raise ConfigError(f"{attr}: need 0 < lo < hi, got {val!r}")
        return (lo, hi)
    if attr in ("gamma_points", "nu_points"):
        return int(val)
    if attr == "physical_units":
        if val.lower() in ("true", "1", "yes"):
            return True
        if val.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{attr}: expected boolean, got {val!r}")
    if attr in ("lifetime", "convention", "fock_form", "out_format"):
        if attr == "convention" and val not in CONVENTIONS:
            raise ConfigError(f"unknown convention {val!r}")
        if attr == "out_format" and val not in ("csv", "json", "plot-script"):
            raise ConfigError(f"unknown output format {val!r}")
        if attr == "fock_form" and val not in ("reduced", "power"):
            raise ConfigError(f"unknown fock_form {val!r}")
        return val
    try:
        return float(val)
    except ValueError as exc:
        raise ConfigError(f"{attr}: expected number, got {val!r}") from exc


def _flatten_json(obj: dict) -> dict:
    flat = {}
    for section, body in obj.items():
        if not isinstance(body, dict):
            raise ConfigError(f"JSON config section {section!r} must be an object")
        for key, val in body.items():
            flat[f"{section}.{key}"] = val
    return flat


def _split_states(text: str) -> list[str]:
    """Split a comma list of state tokens; commas inside {...} stay put."""
    out, buf, depth = [], [], 0
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            tok = "".join(buf).strip()
            if tok:
                out.append(tok)
            buf = []
        else:
            buf.append(ch)
    tok = "".join(buf).strip()
    if tok:
        out.append(tok)
    if depth != 0:
        raise ConfigError(f"unbalanced braces in states list {text!r}")
    return out


def parse_state(token: str):
    """Parse one state token: vacuum | fock:N | thermal[:beta=X] | mix:{n:w,...}."""
    tok = token.strip()
    try:
        if tok == "vacuum":
            return Vacuum()
        if tok.startswith("fock:"):
            return Fock(int(tok.split(":", 1)[1]))
        if tok == "thermal":
            return Thermal()
        if tok.startswith("thermal:beta="):
            return Thermal(float(tok.split("=", 1)[1]))
        if tok.startswith("mix:{") and tok.endswith("}"):
            body = tok[len("mix:{"):-1]
            weights = {}
            for part in body.replace(";", ",").split(","):
                part = part.strip()
                if not part:
                    continue
                n, w = part.split(":")
                weights[int(n)] = float(w)
            return DiagonalMixture(weights)
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"cannot parse state token {token!r}: {exc}") from exc
    raise ConfigError(f"cannot parse state token {token!r}")


def state_label(state) -> str:
    if isinstance(state, Vacuum):
        return "vacuum"
    if isinstance(state, Fock):
        return f"fock:{state.n}"
    if isinstance(state, Thermal):
        return "thermal" if state.beta is None else f"thermal:beta={_fmt(state.beta)}"
    if isinstance(state, DiagonalMixture):
        inner = ",".join(f"{n}:{_fmt(w)}" for n, w in state.weights.items())
        return "mix:{%s}" % inner
    return repr(state)


# ---------------------------------------------------------------------------
# result table and emitters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    state: str
    quantity: str
    value: float
    uncertainty: float = float("nan")
    window_lo: float = float("nan")
    window_hi: float = float("nan")
    r_squared: float = float("nan")
    provenance: str = ""
    note: str = ""


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    COLUMNS = (
        "state", "quantity", "value", "uncertainty",
        "window_lo", "window_hi", "r_squared", "provenance", "note",
    )

    def add(self, **kw):
        self.rows.append(Row(**kw))

    def to_csv(self) -> str:
        out = [",".join(self.COLUMNS)]
        for r in self.rows:
            cells = []
            for col in self.COLUMNS:
                v = getattr(r, col)
                cells.append(_fmt(v) if isinstance(v, float) else _csv_quote(str(v)))
            out.append(",".join(cells))
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "rows": [
                {col: getattr(r, col) for col in self.COLUMNS} for r in self.rows
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _csv_quote(cell: str) -> str:
    if any(c in cell for c in ',"\n\r'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def emit(table: ResultTable, fmt: str, out_dir: Path, stem: str) -> list[Path]:
    """Write the table; plot-script emits the CSV plus a command file."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        path = out_dir / f"{stem}.csv"
        path.write_text(table.to_csv(), encoding="utf-8")
        written.append(path)
    elif fmt == "json":
        path = out_dir / f"{stem}.json"
        path.write_text(table.to_json(), encoding="utf-8")
        written.append(path)
    elif fmt == "plot-script":
        csv_path = out_dir / f"{stem}.csv"
        csv_path.write_text(table.to_csv(), encoding="utf-8")
        written.append(csv_path)
        quantities = sorted({r.quantity for r in table.rows})
        lines = [f"# plot commands for {csv_path.name}", "set datafile separator ','"]
        for q in quantities:
            lines.append(
                f"plot '{csv_path.name}' using 1:3 with points title '{q}'"
            )
        script = out_dir / f"{stem}.plot"
        script.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(script)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    return written


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _scale(cfg: RunConfig) -> float:
    """Energies are reported in units of delta_c unless overridden."""
    return 1.0 if cfg.physical_units else cfg.delta_c


def _length_scale(cfg: RunConfig) -> float:
    """Lengths carry energy**-0.5 here, so they scale with sqrt(delta_c)."""
    return 1.0 if cfg.physical_units else math.sqrt(cfg.delta_c)


def cmd_tc(cfg: RunConfig) -> ResultTable:
    p, lt = cfg.params(), cfg.lifetime_model()
    table = ResultTable()
    unit = _scale(cfg)
    for state in cfg.state_objects():
        crit = critical.critical_temperature_for_state(state, p, lt, cfg.convention)
        note = ""
        if isinstance(state, (Vacuum, Fock, DiagonalMixture)):
            note = "vacuum-kernel root (occupation-independent)"
        if crit.flagged:
            note = (note + "; " if note else "") + (
                f"{crit.n_brackets} crossings, refined largest downward"
            )
        table.add(
            state=state_label(state),
            quantity="t_c",
            value=crit.t_c / unit,
            uncertainty=crit.residual,
            provenance=f"critical.find_tc[{crit.mode}]",
            note=note,
        )
    return table


def _exponent_rows(args):
    cfg, tok = args
    p, lt = cfg.params(), cfg.lifetime_model()
    state = parse_state(tok)
    rows = []
    try:
        g = critical.fit_gamma(
            state, p, lt, cfg.convention, cfg.gamma_window, cfg.gamma_points
        )
        rows.append(Row(
            state=tok, quantity="gamma", value=g.exponent,
            uncertainty=g.residual_max, window_lo=g.window[0], window_hi=g.window[1],
            r_squared=g.r_squared, provenance="critical.fit_gamma",
        ))
    except critical.FitRejected as exc:
        rows.append(Row(
            state=tok, quantity="gamma", value=float("nan"),
            provenance="critical.fit_gamma", note=f"REJECTED: {exc}",
        ))
    try:
        nu = critical.fit_nu(
            state, p, lt, cfg.convention, cfg.nu_window, cfg.nu_points,
            anisotropy=cfg.anisotropy, fock_form=cfg.fock_form,
            rel_tol=cfg.quad_rel_tol,
        )
        rows.append(Row(
            state=tok, quantity="nu", value=nu.exponent,
            uncertainty=nu.residual_max, window_lo=nu.window[0], window_hi=nu.window[1],
            r_squared=nu.r_squared, provenance="critical.fit_nu",
        ))
    except critical.FitRejected as exc:
        rows.append(Row(
            state=tok, quantity="nu", value=float("nan"),
            provenance="critical.fit_nu", note=f"REJECTED: {exc}",
        ))
    return rows


def cmd_exponents(cfg: RunConfig, jobs: int = 1) -> ResultTable:
    table = ResultTable()
    tasks = [(cfg, tok) for tok in cfg.states]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rows in pool.map(_exponent_rows, tasks):
                table.rows.extend(rows)
    else:
        for t in tasks:
            table.rows.extend(_exponent_rows(t))
    return table


def cmd_xi(cfg: RunConfig) -> ResultTable:
    p, lt = cfg.params(), cfg.lifetime_model()
    table = ResultTable()
    unit = _length_scale(cfg)
    t_red = cfg.xi_reduced_t

    def xi_of(state):
        crit = critical.critical_temperature_for_state(state, p, lt, cfg.convention)
        prof = critical.correlation_function(
            state, p, lt, crit.t_c * (1.0 + t_red),
            anisotropy=cfg.anisotropy, fock_form=cfg.fock_form,
            rel_tol=cfg.quad_rel_tol, convention=cfg.convention,
        )
        return prof

    base = xi_of(Vacuum())
    for state in cfg.state_objects():
        prof = xi_of(state)
        table.add(
            state=state_label(state), quantity="xi", value=prof.xi * unit,
            window_lo=prof.fit_window[0] * unit, window_hi=prof.fit_window[1] * unit,
            r_squared=prof.r_squared,
            provenance=f"critical.correlation_function[{prof.engine}]",
            note=f"reduced_t={_fmt(t_red)}",
        )
        table.add(
            state=state_label(state), quantity="xi_ratio", value=prof.xi / base.xi,
            provenance="critical.correlation_function",
            note="relative to vacuum",
        )
    return table


def cmd_vertex(cfg: RunConfig) -> ResultTable:
    """On-shell hierarchy values and the P-resolved vertex on a small grid."""
    p, lt = cfg.params(), cfg.lifetime_model()
    table = ResultTable()
    unit = _scale(cfg)
    t_red = cfg.xi_reduced_t
    for state in cfg.state_objects():
        crit = critical.critical_temperature_for_state(state, p, lt, cfg.convention)
        T = crit.t_c * (1.0 + t_red)
        k = KernelScalars.from_model(p, lt, T, cfg.convention)
        table.add(
            state=state_label(state), quantity="gamma_on_shell",
            value=float(ladder.vertex_for_state(state, k)) * unit,
            provenance="ladder.vertex_for_state", note=f"reduced_t={_fmt(t_red)}",
        )
        slope = critical._slope_for_state(state, p, lt, cfg.convention, crit)
        for P in (0.0, 0.05, 0.1):
            for theta in (0.0, math.pi / 4, math.pi / 2):
                v = critical.vertex_P(
                    state, P, theta, T, p, lt, cfg.anisotropy, cfg.fock_form,
                    cfg.convention, crit=crit, slope=slope,
                )
                table.add(
                    state=state_label(state), quantity=f"vertex_P[{_fmt(P)},{_fmt(theta)}]",
                    value=v * unit, provenance="critical.vertex_P",
                )
    return table


def cmd_scan(cfg: RunConfig, n_grid: int = 60) -> ResultTable:
    """Kernel masses and on-shell vertices over a temperature grid."""
    p, lt = cfg.params(), cfg.lifetime_model()
    table = ResultTable()
    unit = _scale(cfg)
    ts = np.geomspace(1e-4 * p.e_f, 0.5 * p.e_f, n_grid)
    for T in ts:
        k = KernelScalars.from_model(p, lt, float(T), cfg.convention)
        note = f"T={_fmt(T / unit)}"
        table.add(state="-", quantity="m_vac", value=float(k.m_vac),
                  provenance="ladder.KernelScalars", note=note)
        table.add(state="-", quantity="m_th", value=float(k.m_th),
                  provenance="ladder.KernelScalars", note=note)
    return table


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _random_rational_kernel(rng: random.Random) -> KernelScalars:
    a = Fraction(rng.randint(1, 60), 100)
    c2 = Fraction(rng.randint(1, 25), 100)
    while a + 2 * c2 == 1:
        c2 += Fraction(1, 1000)
    gamma0 = Fraction(-rng.randint(1, 9), rng.randint(1, 5))
    return KernelScalars(gamma0=gamma0, a_bcs=a, c2=c2)


def run_verify(cfg: RunConfig, inject_fault: bool = False) -> tuple[bool, dict]:
    """Full invariant suite; returns (all_passed, machine-readable report)."""
    checks = []
    rng = random.Random(20240917)

    def record(name, passed, detail):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    # exact scalar closure identity behind the thermal rearrangement
    worst = Fraction(0)
    for _ in range(20):
        x = Fraction(rng.randint(1, 99), 100)
        lhs = 1 + 4 * x / (1 - x) ** 2
        rhs = ((1 + x) / (1 - x)) ** 2
        worst = max(worst, abs(lhs - rhs))
    record("thermal_identity", worst == 0, f"max |lhs-rhs| = {worst}")

    # recursion vs series oracle on random rational kernels
    ok_all, worst_txt = True, "0"
    for i in range(5):
        k = _random_rational_kernel(rng)
        rep = ladder.oracle_check(12, k, mutate_f=inject_fault)
        if not rep.ok:
            ok_all = False
            worst_txt = str(rep.max_abs_discrepancy)
    record("oracle_equivalence", ok_all, f"n<=12, 5 kernels, max discrepancy {worst_txt}")

    k0 = KernelScalars(gamma0=Fraction(-1), a_bcs=Fraction(1, 10), c2=Fraction(1, 100))
    rep = ladder.thermal_resummation_check(k0, Fraction(1, 3))
    record(
        "thermal_resummation",
        rep.residual < 1e-8 and rep.tail < 1e-12,
        f"residual {rep.residual:.3e}, tail {rep.tail:.3e}, N={rep.n_used}",
    )

    kg = KernelScalars(gamma0=Fraction(-1), a_bcs=Fraction(3, 10), c2=Fraction(0))
    hier = ladder.solve_fock_hierarchy(8, kg)
    collapse = all(v == hier.values[0] for v in hier.values)
    sys_g = sectors.build_sector_system(
        KernelScalars(
            gamma0=Fraction(-1), a_bcs=Fraction(3, 10), c2=Fraction(1, 100),
            gtilde=Fraction(1, 100), dct=Fraction(10),
        ),
        zero_dk=True,
    )
    sol_g = sectors.solve_sector_system(sys_g)
    collapse2 = sol_g == RationalFunction((Fraction(-1),)) / RationalFunction((Fraction(7, 10),))
    record("gaussian_collapse", collapse and collapse2,
           "c2=0 hierarchy constant; zero-Keldysh sector solve is state-free")

    kx = KernelScalars(
        gamma0=Fraction(-2), a_bcs=Fraction(1, 4), c2=Fraction(1, 64),
        gtilde=Fraction(1, 80), dct=Fraction(10),
    )
    sol = sectors.solve_sector_system(sectors.build_sector_system(kx))
    closed = ladder.intermediate_vertex_closed_form(kx)
    series_match = taylor(sol / RationalFunction((1, -1)), 10) == list(
        ladder.solve_fock_hierarchy(10, kx).values
    )
    record("sector_chain", sol == closed and series_match,
           "linear solve == closed form; series == hierarchy (exact)")

    p = ModelParams(g0=1.0, delta_c=1.0, q0=0.0, e_f=100.0, k_f=1.0)
    lt = ConstantLifetime(1.0 / cfg.verify_dctau)
    T = cfg.verify_t_over_delta * p.delta_c
    qr = sectors.bcs_kernel_quadrature(p, lt, T)
    record(
        "bcs_quadrature",
        abs(qr.value.real - 1.0) < 1e-3,
        f"ratio-1 = {qr.value.real - 1.0:.3e} at dc*tau={cfg.verify_dctau:g}, "
        f"{qr.evaluations} evaluations",
    )

    off = sectors.offshell_bcs_cancellation(p, lt, T)
    record(
        "offshell_cancellation",
        off.ratio < 1e-2,
        f"|sum|/|leading| = {off.ratio:.3e} at dc*tau={cfg.verify_dctau:g}",
    )

    from scipy.special import k0 as bessel_k0

    pc = cfg.params()
    ltc = cfg.lifetime_model()
    crit = critical.find_tc(pc, ltc, "thermal", cfg.convention)
    slope = critical.mass_slope(pc, ltc, "thermal", cfg.convention, tc=crit.t_c)
    T = crit.t_c * (1.0 + 1e-4)
    a = cfg.anisotropy
    mt = slope * (T - crit.t_c)
    kappa = math.sqrt(mt / a)
    rs = np.geomspace(1.0 / kappa, 10.0 / kappa, 7)
    prof = critical.correlation_function(
        Thermal(), pc, ltc, T, r_grid=rs, anisotropy=a, isotropic=True,
        rel_tol=cfg.quad_rel_tol, convention=cfg.convention,
    )
    oracle = abs(ladder.bare_vertex(pc)) * bessel_k0(kappa * rs) / (2 * math.pi * a)
    rel = float(np.max(np.abs(np.array(prof.values) / oracle - 1.0)))
    record("correlation_bessel", rel < 1e-4, f"max rel dev {rel:.3e} on r in [xi, 10 xi]")

    passed = all(c["passed"] for c in checks)
    report = {
        "schema_version": SCHEMA_VERSION,
        "all_passed": passed,
        "fault_injected": inject_fault,
        "checks": checks,
    }
    return passed, report


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cavitypairing",
        description="Pairing criticality of cavity-coupled electrons, by photon state.",
    )
    ap.add_argument("--config", type=Path, help="config file (key=value text or JSON)")
    ap.add_argument("--convention", choices=sorted(CONVENTIONS), help="kernel convention override")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--format", choices=("csv", "json", "plot-script"), help="output format override")
    ap.add_argument("--strict", action="store_true", help="fail on rejected fits")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("tc", "exponents", "xi", "vertex", "scan"):
        sub.add_parser(name)
    v = sub.add_parser("verify")
    v.add_argument("--inject-fault", action="store_true",
                   help="corrupt the hierarchy coupling (negative control)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig.parse(args.config.read_text(encoding="utf-8")) if args.config else RunConfig()
        if args.convention:
            cfg = replace(cfg, convention=args.convention)
        if args.format:
            cfg = replace(cfg, out_format=args.format)
        cfg.params()
        cfg.lifetime_model()
        cfg.state_objects()
    except (ConfigError, DomainError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "verify":
            passed, report = run_verify(cfg, inject_fault=args.inject_fault)
            out = args.out
            out.mkdir(parents=True, exist_ok=True)
            (out / "verify.json").write_text(
                json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            for c in report["checks"]:
                print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']} - {c['detail']}")
            print(f"report: {out / 'verify.json'}")
            return EXIT_OK if passed else EXIT_VERIFY

        if args.command == "tc":
            table = cmd_tc(cfg)
        elif args.command == "exponents":
            table = cmd_exponents(cfg, jobs=max(1, args.jobs))
        elif args.command == "xi":
            table = cmd_xi(cfg)
        elif args.command == "vertex":
            table = cmd_vertex(cfg)
        elif args.command == "scan":
            table = cmd_scan(cfg)
        else:  # pragma: no cover
            raise AssertionError(args.command)
    except (critical.BracketError, critical.SlopeError, sectors.QuadratureError,
            ladder.CriticalityError, DomainError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    rejected = [r for r in table.rows if r.note.startswith("REJECTED")]
    for path in emit(table, cfg.out_format, args.out, args.command):
        print(f"wrote {path}")
    for r in table.rows:
        print(f"{r.state:>18s}  {r.quantity:<14s} {_fmt(r.value)}  {r.note}")
    if rejected:
        print(f"warning: {len(rejected)} fit(s) rejected", file=sys.stderr)
        if args.strict:
            return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
