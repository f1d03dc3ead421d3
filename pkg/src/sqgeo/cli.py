"""Command line entry point: scans, evolutions, and verification suites.

Every flag can also be supplied through an environment variable with the
``SQGEO_`` prefix (``--n-max`` becomes ``SQGEO_N_MAX``); explicit flags win.
Outputs embed the resolved configuration: CSV files carry a ``# config``
comment line, JSON documents a ``config`` key, binary fields a header
field.  The thread count never enters any output, so runs at different
``--threads`` settings produce byte-identical artifacts.

Exit codes: 0 success, 2 invalid configuration, 3 numerical domain error
(departure from the admissible set, decay violation), 4 verification
suite failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import io as sqio
from .backend import get_backend
from .curvature import SCAN_FAMILIES, curvature_scan
from .spectral import MetricDegeneracyError, sobolev_symbol, SQRT_LAPLACIAN
from .sphere import CLUSTER_LIMIT, SphericalHarmonicIndex, conjugate_time, integrate_jacobi_ode
from .verify import SUITES, run_suite

ENV_PREFIX = "SQGEO_"
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4

SUBCOMMANDS = ("curvature", "conjugate", "jacobi-ode", "evolve", "expmap",
               "verify")

# flag name -> (python type, default); None default means "required"
_FLAGS: dict[str, dict[str, tuple]] = {
    "curvature": {
        "family": (str, "negative"), "n-max": (int, 10),
        "symbol": (str, "sqrt_laplacian"), "method": (str, "closed_form"),
        "format": (str, "csv"), "output": (str, "-"),
    },
    "conjugate": {
        "n-max": (int, 10), "format": (str, "csv"), "output": (str, "-"),
    },
    "jacobi-ode": {
        "n": (int, 2), "m": (int, 2), "c-real": (float, 1.0),
        "c-imag": (float, 0.0), "t-end": (float, 14.0), "dt": (float, 1e-3),
        "format": (str, "csv"), "output": (str, "-"),
    },
    "evolve": {
        "theta0": (str, "gaussian"), "t-end": (float, 1.0),
        "dt": (float, 0.03125), "box": (float, 4.0), "h-div": (int, 128),
        "gamma": (float, 0.5), "stride": (int, 16), "format": (str, "csv"),
        "with-energy": (bool, False), "output": (str, "-"),
        "backend": (str, "auto"), "threads": (int, 1),
    },
    "expmap": {
        "theta0": (str, "gaussian"), "dt": (float, 0.03125),
        "box": (float, 4.0), "h-div": (int, 128), "gamma": (float, 0.5),
        "output": (str, None),
        "backend": (str, "auto"), "threads": (int, 1),
    },
    "verify": {
        "suite": (str, "all"), "output": (str, "-"),
        "backend": (str, "auto"), "threads": (int, 1),
    },
}

# keys that must never be echoed into output artifacts
_UNECHOED = ("threads",)


class CLIValidationError(ValueError):
    """Configuration rejected before dispatch."""


@dataclass
class RunConfig:
    """A validated subcommand invocation: name plus key-value parameters."""

    subcommand: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise CLIValidationError(
                f"unknown subcommand {self.subcommand!r}")
        allowed = _FLAGS[self.subcommand]
        for key in self.parameters:
            if key not in allowed:
                raise CLIValidationError(
                    f"unknown parameter {key!r} for {self.subcommand}")
        resolved = {}
        for key, (typ, default) in allowed.items():
            if key in self.parameters and self.parameters[key] is not None:
                resolved[key] = self.parameters[key]
            else:
                env = os.environ.get(ENV_PREFIX + key.upper().replace("-", "_"))
                if env is not None:
                    try:
                        resolved[key] = (env.lower() in ("1", "true", "yes")
                                         if typ is bool else typ(env))
                    except ValueError as exc:
                        raise CLIValidationError(
                            f"bad environment override for {key}: {exc}")
                elif default is None:
                    raise CLIValidationError(
                        f"{self.subcommand} requires --{key}")
                else:
                    resolved[key] = default
        self.parameters = resolved
        self._validate_values()

    def _validate_values(self):
        p = self.parameters
        sub = self.subcommand
        if "format" in p and p["format"] not in ("csv", "json"):
            raise CLIValidationError(f"format must be csv or json")
        if "n-max" in p and p["n-max"] < 1:
            raise CLIValidationError("n-max must be >= 1")
        if sub == "curvature":
            if p["family"] not in SCAN_FAMILIES:
                raise CLIValidationError(
                    f"family must be one of {sorted(SCAN_FAMILIES)}")
            if p["method"] not in ("closed_form", "four_term"):
                raise CLIValidationError("method must be closed_form or four_term")
            _parse_symbol(p["symbol"])  # raises on nonsense
        if sub == "jacobi-ode":
            try:
                SphericalHarmonicIndex(p["n"], p["m"])
            except ValueError as exc:
                raise CLIValidationError(str(exc))
            if p["dt"] <= 0 or p["t-end"] <= 0:
                raise CLIValidationError("dt and t-end must be positive")
        if sub == "expmap" and p["output"] == "-":
            raise CLIValidationError("expmap writes binary; --output needs a path")
        if sub in ("evolve", "expmap"):
            from .flow.fields import PRESET_NAMES, grid_size
            if p["theta0"] not in PRESET_NAMES:
                raise CLIValidationError(
                    f"theta0 must be one of {PRESET_NAMES}")
            if p["dt"] <= 0:
                raise CLIValidationError("dt must be positive")
            if sub == "evolve" and p["t-end"] < 0:
                raise CLIValidationError("t-end must be >= 0")
            if p["box"] <= 0 or p["h-div"] < 4:
                raise CLIValidationError("need box > 0 and h-div >= 4")
            if not 0.0 < p["gamma"] < 1.0:
                raise CLIValidationError("gamma must lie in (0, 1)")
            if "stride" in p and p["stride"] < 1:
                raise CLIValidationError("stride must be >= 1")
            grid_size(p["box"], p["box"] / p["h-div"])
        if sub == "verify" and p["suite"] not in SUITES:
            raise CLIValidationError(f"suite must be one of {SUITES}")
        if "backend" in p and p["backend"] not in ("auto", "compiled", "numpy"):
            raise CLIValidationError("backend must be auto, compiled or numpy")
        if "threads" in p and p["threads"] < 1:
            raise CLIValidationError("threads must be >= 1")

    def echo(self) -> dict:
        doc = {k: v for k, v in self.parameters.items() if k not in _UNECHOED}
        doc["subcommand"] = self.subcommand
        return doc


def _parse_symbol(text: str):
    if text == "sqrt_laplacian":
        return SQRT_LAPLACIAN
    if text.startswith("sobolev:"):
        try:
            return sobolev_symbol(float(text.split(":", 1)[1]))
        except ValueError:
            pass
    raise CLIValidationError(
        "symbol must be 'sqrt_laplacian' or 'sobolev:<s>'")


def _emit_csv(path, columns, rows, config):
    text = sqio.csv_text(columns, rows, config)
    if path == "-":
        sys.stdout.write(text)
    else:
        from pathlib import Path
        Path(path).write_text(text, encoding="ascii")


def _emit_json(path, doc, config):
    if path == "-":
        sys.stdout.write(json.dumps(dict(doc, config=config), sort_keys=True,
                                    indent=2) + "\n")
    else:
        sqio.write_json_report(path, doc, config)


def cmd_curvature(cfg: RunConfig) -> int:
    p = cfg.parameters
    rows = curvature_scan(p["family"], p["n-max"], _parse_symbol(p["symbol"]),
                          method=p["method"])
    if p["format"] == "csv":
        table = [(str(n), k, ratio, p["method"]) for n, k, ratio in rows]
        _emit_csv(p["output"], ["n", "K", "K_over_n3", "method"], table,
                  cfg.echo())
    else:
        doc = {"rows": [{"n": n, "K": k, "K_over_n3": ratio,
                         "method": p["method"]} for n, k, ratio in rows]}
        _emit_json(p["output"], doc, cfg.echo())
    return EXIT_OK


def cmd_conjugate(cfg: RunConfig) -> int:
    p = cfg.parameters
    rows = []
    for n in range(1, p["n-max"] + 1):
        t = conjugate_time(n, n)
        rows.append((n, n, t, t - CLUSTER_LIMIT))
    if p["format"] == "csv":
        table = [(str(n), str(m), t, gap) for n, m, t, gap in rows]
        _emit_csv(p["output"], ["n", "m", "t_nm", "gap_to_limit"], table,
                  cfg.echo())
    else:
        doc = {"limit": CLUSTER_LIMIT,
               "rows": [{"n": n, "m": m, "t_nm": t, "gap_to_limit": gap}
                        for n, m, t, gap in rows]}
        _emit_json(p["output"], doc, cfg.echo())
    return EXIT_OK


def cmd_jacobi_ode(cfg: RunConfig) -> int:
    p = cfg.parameters
    C = complex(p["c-real"], p["c-imag"])
    times, hs, gs = integrate_jacobi_ode(p["n"], p["m"], C, p["t-end"],
                                         p["dt"])
    if p["format"] == "csv":
        table = [(t, h.real, h.imag, g.real, g.imag, abs(g))
                 for t, h, g in zip(times, hs, gs)]
        _emit_csv(p["output"],
                  ["t", "re_h", "im_h", "re_g", "im_g", "abs_g"], table,
                  cfg.echo())
    else:
        doc = {"rows": [{"t": t, "re_h": h.real, "im_h": h.imag,
                         "re_g": g.real, "im_g": g.imag, "abs_g": abs(g)}
                        for t, h, g in zip(times, hs, gs)]}
        _emit_json(p["output"], doc, cfg.echo())
    return EXIT_OK


def _build_theta(p):
    from .flow import preset_theta0
    return preset_theta0(p["theta0"], L=p["box"], h=p["box"] / p["h-div"],
                         gamma=p["gamma"])


def cmd_evolve(cfg: RunConfig) -> int:
    from .flow import evolve
    p = cfg.parameters
    theta = _build_theta(p)
    traj = evolve(theta, t_end=p["t-end"], dt=p["dt"],
                  backend=get_backend(p["backend"]), threads=p["threads"],
                  with_energy=p["with-energy"])
    if p["format"] == "csv":
        rows = sqio.trajectory_rows(traj, stride=p["stride"])
        _emit_csv(p["output"], ["t", "node_i", "node_j", "x1", "x2"], rows,
                  cfg.echo())
    else:
        doc = {"states": [
            dict(st.report.to_dict(), t=st.t,
                 **({"energy": st.energy} if st.energy is not None else {}))
            for st in traj.states]}
        _emit_json(p["output"], doc, cfg.echo())
    return EXIT_OK


def cmd_expmap(cfg: RunConfig) -> int:
    from .flow import exp_map
    p = cfg.parameters
    theta = _build_theta(p)
    flow = exp_map(theta, dt=p["dt"], backend=get_backend(p["backend"]),
                   threads=p["threads"])
    sqio.write_flow(p["output"], flow, config=cfg.echo())
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.parameters
    if p["backend"] != "auto":
        # RunConfig already applied the env override to the flag itself, so
        # propagating the resolved value to the selector keeps precedence
        os.environ["SQGEO_BACKEND"] = p["backend"]
    report = run_suite(p["suite"], threads=p["threads"])
    _emit_json(p["output"], report, cfg.echo())
    return EXIT_OK if report["pass"] else EXIT_VERIFY


_COMMANDS = {
    "curvature": cmd_curvature,
    "conjugate": cmd_conjugate,
    "jacobi-ode": cmd_jacobi_ode,
    "evolve": cmd_evolve,
    "expmap": cmd_expmap,
    "verify": cmd_verify,
}


def run(config: RunConfig) -> int:
    """Dispatch a validated config; maps numerical-domain errors to exit 3."""
    from .flow import DomainDepartureError, MembershipError
    from .flow.fields import DecayViolationError
    try:
        return _COMMANDS[config.subcommand](config)
    except (DomainDepartureError, MembershipError, DecayViolationError,
            MetricDegeneracyError) as exc:
        print(f"sqgeo {config.subcommand}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqgeo",
        description="Geodesic-flow toolkit: curvature scans, conjugate "
                    "points, and the planar flow map.")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, flags in _FLAGS.items():
        sp = subs.add_parser(name)
        for flag, (typ, default) in flags.items():
            opt = "--" + flag
            if name == "verify" and flag == "suite":
                sp.add_argument("suite", nargs="?", default=None,
                                choices=SUITES)
                continue
            if typ is bool:
                sp.add_argument(opt, action="store_const", const=True,
                                default=None)
            else:
                sp.add_argument(opt, type=typ, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {k.replace("_", "-"): v for k, v in vars(args).items()
              if k != "subcommand" and v is not None}
    try:
        config = RunConfig(args.subcommand, params)
    except CLIValidationError as exc:
        print(f"sqgeo: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
