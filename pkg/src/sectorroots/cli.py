"""Command-line front end.

Every subcommand reads its parameters from flags, then an optional flat
``key=value`` config file, then built-in defaults (in that order of precedence),
writes its tabular output as schema-tagged CSV and prints a JSON summary.
Exit codes: 0 ok, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NUMERICS_SCHEMA = "# schema: sectorroots.numerics/1"
ROUNDTRIP_SCHEMA = "# schema: sectorroots.roundtrip/1"
FRACTION_CUT = 0.75


class UsageError(Exception):
    pass


# name -> (parser, default, help)
OPTIONS: dict[str, tuple[Callable, object, str]] = {
    "N": (int, None, "size parameter (largest modulus, coset bound or c range)"),
    "alpha": (float, 0.0, "sector start angle in radians"),
    "beta": (float, 0.5 * math.pi, "sector end angle in radians"),
    "Z": (float, 0.1, "angular smoothing width"),
    "h": (int, None, "frequency (or largest frequency for profile commands)"),
    "d": (int, 1, "modulus divisor for linear and boundary sums"),
    "q": (int, 1, "level of Gamma_0(q)"),
    "out": (str, ".", "output directory"),
    "threads": (int, 1, "worker threads (output does not depend on it)"),
    "seed": (int, 20240611, "seed for sampled grids"),
    "delta": (float, 0.1, "radial band width Delta for boundary sets"),
    "X0": (float, 100.0, "base scale of the spectral test function"),
    "n": (str, "0,2,4", "comma-separated weights for selberg-roundtrip"),
    "t": (str, "0,1,2", "comma-separated spectral parameters for selberg-roundtrip"),
    "n_max": (int, 40, "largest weight in the positivity tail"),
    "pairs": (int, 100, "number of (g, h) pairs in the positivity grid"),
    "tables": (str, "", "comma-separated weights whose Phi tables are written"),
}

COMMAND_DEFAULTS = {
    "numerics": {"N": 10000},
    "weyl": {"N": 10000, "h": 5},
    "linear-sum": {"N": 1000, "h": 1},
    "boundary": {"N": 1000},
    "selberg-roundtrip": {},
    "positivity": {},
    "kloosterman": {"N": 500, "h": 20},
    "verify": {"N": 1000},
}


# ---------------------------------------------------------------------------
# configuration


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


@dataclass
class RunConfig:
    command: str
    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def sector(self, smooth: bool = False):
        from .lattice import SectorWindow

        try:
            return SectorWindow(self.alpha, self.beta, self.Z if smooth else 0.0)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def out_path(self, name: str) -> Path:
        path = Path(self.out)
        path.mkdir(parents=True, exist_ok=True)
        return path / name


def resolve_config(command: str, flags: dict, config_path: str | None) -> RunConfig:
    values = {k: opt[1] for k, opt in OPTIONS.items()}
    values.update(COMMAND_DEFAULTS.get(command, {}))
    if config_path:
        for key, raw in read_config_file(config_path).items():
            try:
                values[key] = OPTIONS[key][0](raw)
            except ValueError as exc:
                raise UsageError(f"config value {key}={raw!r}: {exc}") from exc
    values.update({k: v for k, v in flags.items() if v is not None and k in OPTIONS})
    if values["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return RunConfig(command, values)


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name} expects comma-separated integers") from exc


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name} expects comma-separated numbers") from exc


def _emit(payload: dict, cfg: RunConfig, name: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    cfg.out_path(name).write_text(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# subcommands


def numerics_rows(N: int, sector) -> list[tuple[int, int, int, float]]:
    """(index, prime, root, cumulative fraction of normalized roots in [0, 0.75])."""
    from .lattice import sequence_Y_arrays

    nu, n, _ = sequence_Y_arrays(N, sector)
    inside = np.cumsum(nu <= FRACTION_CUT * n)
    index = np.arange(1, nu.size + 1)
    return [(int(i), int(p), int(v), float(f)) for i, p, v, f in zip(index, n, nu, inside / index)]


def cmd_numerics(cfg: RunConfig) -> int:
    from .lattice import count_primes_1mod4, count_sector_points, count_sector_primes

    if cfg.N < 2:
        raise UsageError("numerics needs --N >= 2")
    sector = cfg.sector()
    rows = numerics_rows(cfg.N, sector)
    lines = [NUMERICS_SCHEMA, "index,prime,root,fraction"]
    lines += [f"{i},{p},{v},{f:.12f}" for i, p, v, f in rows]
    cfg.out_path("numerics.csv").write_text("\n".join(lines) + "\n")
    _emit({
        "N": cfg.N,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "total_primes": count_primes_1mod4(cfg.N),
        "sector_primes": count_sector_primes(cfg.N, sector),
        "sector_points": count_sector_points(cfg.N, sector),
        "final_fraction": rows[-1][3] if rows else None,
    }, cfg, "numerics_summary.json")
    return EXIT_OK


def cmd_weyl(cfg: RunConfig) -> int:
    from .weyl import discrepancy_trend, weyl_sums_profile, write_discrepancy_csv, write_profile_csv

    if cfg.N < 2 or cfg.h < 1:
        raise UsageError("weyl needs --N >= 2 and --h >= 1")
    sector = cfg.sector()
    rows = weyl_sums_profile(cfg.N, cfg.h, sector)
    cfg.out_path("weyl_profile.csv").write_text(write_profile_csv(rows))
    sizes = [10 ** k for k in range(2, int(math.log10(cfg.N)) + 1)] or [cfg.N]
    trend = discrepancy_trend(sizes, sector)
    cfg.out_path("discrepancy.csv").write_text(write_discrepancy_csv(trend))
    _emit({
        "N": cfg.N,
        "normalized_abs": {str(r.h): r.normalized_abs for r in rows if r.h > 0},
        "discrepancy": {str(n): d for n, d in trend},
    }, cfg, "weyl_summary.json")
    return EXIT_OK


def cmd_linear_sum(cfg: RunConfig) -> int:
    from .weyl import linear_sum

    if cfg.d < 1 or cfg.N < cfg.d:
        raise UsageError("linear-sum needs --d >= 1 and --N >= --d")
    value = linear_sum(cfg.d, cfg.h, cfg.N, cfg.sector())
    _emit({"d": cfg.d, "h": cfg.h, "N": cfg.N, "real": value.real, "imag": value.imag, "abs": abs(value)},
          cfg, "linear_sum.json")
    return EXIT_OK


def cmd_boundary(cfg: RunConfig) -> int:
    from .weyl import boundary_set

    try:
        report = boundary_set(cfg.N, cfg.d, cfg.Z, cfg.delta, cfg.sector())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit({
        "N": report.N, "d": report.d, "Z": report.Z, "Delta": report.Delta,
        "radial_count": report.radial_count, "angular_count": report.angular_count,
        "total": report.total,
        "xi_alpha_total": sum(report.xi_alpha.values()),
        "xi_beta_total": sum(report.xi_beta.values()),
    }, cfg, "boundary.json")
    return EXIT_OK


def cmd_selberg_roundtrip(cfg: RunConfig) -> int:
    from .selberg import SpectralTestFunction, selberg_roundtrip

    weights = _int_list(cfg.n, "n")
    ts = _float_list(cfg.t, "t")
    odd = [n for n in weights if n % 2]
    if odd:
        raise UsageError(f"odd weights {odd} carry no test function")
    if cfg.X0 <= 0:
        raise UsageError("--X0 must be positive")
    spectral = SpectralTestFunction(X0=cfg.X0)
    lines = [ROUNDTRIP_SCHEMA, "n,t,X,expected,recovered,rel_error"]
    worst = 0.0
    for n in weights:
        for t in ts:
            res = selberg_roundtrip(n, t, spectral.X_n(n), tol=1e-6)
            worst = max(worst, res.rel_error)
            lines.append(f"{n},{t:g},{res.X:g},{res.expected:.15e},{res.recovered.real:.15e},{res.rel_error:.6e}")
    cfg.out_path("roundtrip.csv").write_text("\n".join(lines) + "\n")
    ok = worst <= 1e-3
    _emit({"X0": cfg.X0, "weights": weights, "t": ts, "max_rel_error": worst, "ok": ok},
          cfg, "roundtrip_summary.json")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_positivity(cfg: RunConfig) -> int:
    from .selberg import (
        SpectralTestFunction,
        build_phi_table,
        calibrate_C,
        positivity_pairs,
        truncation_sensitivity,
    )

    if cfg.n_max < 2 or cfg.pairs < 2:
        raise UsageError("positivity needs --n-max >= 2 and --pairs >= 2")
    spectral = SpectralTestFunction(X0=cfg.X0)
    pairs = positivity_pairs(cfg.pairs, seed=cfg.seed)
    report = calibrate_C(pairs, cfg.n_max, spectral)
    sensitivity = truncation_sensitivity(pairs, spectral, cfg.n_max, 2 * cfg.n_max)
    ok = report.min_margin > 0 and sensitivity < 1e-6
    cfg.out_path("positivity.cfg").write_text(
        f"# calibrated on {cfg.pairs} pairs, seed {cfg.seed}\nC={report.C!r}\nX0={cfg.X0!r}\nn_max={cfg.n_max}\n"
    )
    for n in _int_list(cfg.tables, "tables"):
        if n % 2:
            raise UsageError("Phi tables exist for even weights only")
        table = build_phi_table(spectral.family(n), n)
        cfg.out_path(f"phi_{n}.csv").write_text(table.to_csv())
    _emit({
        "C": report.C, "X0": cfg.X0, "n_max": cfg.n_max, "pairs": cfg.pairs, "seed": cfg.seed,
        "min_margin": report.min_margin, "min_relative_margin": report.min_relative_margin,
        "truncation_sensitivity": sensitivity, "ok": ok,
    }, cfg, "positivity.json")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kloosterman(cfg: RunConfig) -> int:
    from .specfun import weil_violations

    if cfg.N < 1 or cfg.h < 1:
        raise UsageError("kloosterman needs --N >= 1 (largest c) and --h >= 1 (largest h)")
    bad = weil_violations(cfg.N, cfg.h)
    _emit({"c_max": cfg.N, "h_max": cfg.h, "violations": len(bad),
           "examples": [list(v) for v in bad[:10]]}, cfg, "kloosterman.json")
    return EXIT_OK if not bad else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify


def _check_bijection(cfg, fault):
    from .modular import verify_bijection

    report = verify_bijection(cfg.N)
    return report.ok, {"checked": report.checked, "matched": report.matched,
                       "mismatches": len(report.mismatches)}


def _check_kloosterman(cfg, fault):
    from ._numtheory import egcd
    from .specfun import kloosterman, weil_violations

    sign = -1.0 if fault == "kloosterman" else 1.0
    worst = 0.0
    for c in range(1, 61):
        for h in range(1, 8):
            oracle = sum(
                complex(math.cos(2 * math.pi * h * (x + egcd(x, c)[1]) / c),
                        math.sin(2 * math.pi * h * (x + egcd(x, c)[1]) / c))
                for x in range(1, c + 1) if math.gcd(x, c) == 1
            ) if c > 1 else 1.0
            worst = max(worst, abs(sign * kloosterman(h, c).value - oracle))
    bad = weil_violations(500, 20)
    ok = worst <= 1e-9 and not bad
    return ok, {"max_oracle_error": worst, "weil_violations": len(bad)}


def _check_gamma(cfg, fault):
    from .specfun import gamma

    worst = 0.0
    for t in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        g1 = abs(complex(gamma(0.5 + 1j * t))) ** 2
        g2 = abs(complex(gamma(2j * t))) ** 2
        worst = max(worst, abs(g1 / (math.pi / math.cosh(math.pi * t)) - 1.0),
                    abs(g2 / (math.pi / (2 * t * math.sinh(2 * math.pi * t))) - 1.0))
    return worst <= 1e-10, {"max_rel_error": worst}


def _check_whittaker(cfg, fault):
    from .specfun import WhittakerParams, whittaker_mellin_barnes, whittaker_series

    worst = 0.0
    for m in (0, 1, 2):
        for t in (0.5, 1.5, 3.0):
            for y in (0.1, 1.0, 5.0):
                p = WhittakerParams(m, t, y)
                a, b = whittaker_series(p), whittaker_mellin_barnes(p)
                worst = max(worst, abs(a - b) / abs(b))
    degenerate = abs(whittaker_mellin_barnes(WhittakerParams(1, -0.5j, 1.0)) - math.exp(-0.5)) / math.exp(-0.5)
    return worst <= 1e-8 and degenerate <= 1e-8, {"max_rel_error": worst, "degenerate_rel_error": degenerate}


def _check_puiseux(cfg, fault):
    from .selberg import puiseux_halfinteger_coeffs

    report = puiseux_halfinteger_coeffs()
    return report.max_relative <= 1e-6, {"max_relative": report.max_relative,
                                         "relative": {str(k): v for k, v in report.relative.items()}}


def _check_positivity(cfg, fault):
    from .selberg import SpectralTestFunction, calibrate_C, positivity_pairs

    report = calibrate_C(positivity_pairs(cfg.pairs, seed=cfg.seed), cfg.n_max, SpectralTestFunction(X0=cfg.X0))
    return report.min_margin > 0, {"C": report.C, "min_margin": report.min_margin,
                                   "min_relative_margin": report.min_relative_margin}


def _check_dual(cfg, fault):
    from .bump import build_F, build_G
    from .lattice import SectorWindow
    from .poincare import smooth_linear_form
    from .weyl import smooth_linear_sum

    G = build_G(SectorWindow(0.0, math.pi / 6, 0.05))
    worst = 0.0
    for q in (1, 2, 5):
        for h in (1, 2):
            for N in (50, 200):
                F = build_F(h, N)
                a, b = smooth_linear_form(q, h, N, F, G), smooth_linear_sum(q, h, N, F, G)
                worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return worst <= 1e-9, {"max_rel_error": worst}


CHECKS: dict[str, Callable] = {
    "bijection": _check_bijection,
    "kloosterman": _check_kloosterman,
    "gamma": _check_gamma,
    "whittaker": _check_whittaker,
    "puiseux": _check_puiseux,
    "positivity": _check_positivity,
    "dual": _check_dual,
}


def cmd_verify(cfg: RunConfig, only: list[str], fault: str | None) -> int:
    names = only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {sorted(CHECKS)}")
    if fault is not None and fault not in CHECKS:
        raise UsageError(f"unknown fault target {fault!r}")
    results = {}
    for name in names:
        start = time.perf_counter()
        try:
            ok, detail = CHECKS[name](cfg, fault)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results[name] = {"ok": bool(ok), "seconds": round(time.perf_counter() - start, 3), **detail}
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    failed = [n for n, r in results.items() if not r["ok"]]
    _emit({"checks": results, "failed": failed}, cfg, "verify_report.json")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name, (kind, _, help_text) in OPTIONS.items():
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, type=kind, default=None, help=help_text)
    common.add_argument("--config", default=None, help="flat key=value config file")

    parser = argparse.ArgumentParser(prog="sectorroots", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_DEFAULTS:
        p = sub.add_parser(name, parents=[common])
        if name == "verify":
            p.add_argument("--only", action="append", default=[], help="run only this check (repeatable)")
            p.add_argument("--inject-fault", default=None, help="deliberately break one check")
    return parser


HANDLERS = {
    "numerics": cmd_numerics,
    "weyl": cmd_weyl,
    "linear-sum": cmd_linear_sum,
    "boundary": cmd_boundary,
    "selberg-roundtrip": cmd_selberg_roundtrip,
    "positivity": cmd_positivity,
    "kloosterman": cmd_kloosterman,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args.command, vars(args), args.config)
        if args.command == "verify":
            only = [n for item in args.only for n in item.split(",") if n]
            return cmd_verify(cfg, only, args.inject_fault)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"sectorroots: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
