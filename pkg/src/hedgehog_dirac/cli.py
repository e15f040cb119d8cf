"""
Command-line interface.

Exit codes: 0 success (or certified), 1 usage or input error, 2 no
certificate (no witness found within the configured search).
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import algebra_check
from .certify import DEFAULT_ELL_MAX, certify, certify_gap, certify_ground_state, example55
from .errors import DomainError, PreconditionError
from .profile import BUILTIN_PROFILES, Hedgehog, builtin_profile, load_profile_table, tabulated_profile
from .spectra import DEFAULT_LADDER, DEFAULT_R_MAX, energy_summary, scan_sectors

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCERTIFIED = 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated run parameters; see :data:`CONFIG_KEYS` for the file keys."""

    profile: str = "rational"
    scale: float = 1.0
    N: int = 1
    m: float = 1.0
    ladder: tuple = DEFAULT_LADDER
    r_max: float = DEFAULT_R_MAX
    ell_max: int = DEFAULT_ELL_MAX
    k_min: float = None
    k_max: float = None
    discrete: bool = True
    energy: bool = False
    out: str = None
    format: str = "json"

    def validate(self):
        if self.profile not in BUILTIN_PROFILES and not Path(self.profile).is_file():
            raise ConfigError(f"profile must be one of {sorted(BUILTIN_PROFILES)} or a table file, got {self.profile!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ConfigError(f"profile.scale must be positive, got {self.scale}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ConfigError(f"m must be positive, got {self.m}")
        if not self.ladder or any(int(n) != n or n < 8 for n in self.ladder):
            raise ConfigError(f"grid ladder must be integers >= 8, got {self.ladder}")
        if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError(f"grid ladder must be strictly increasing, got {self.ladder}")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ConfigError(f"grid.r_max must be positive, got {self.r_max}")
        if self.ell_max < 0:
            raise ConfigError(f"scan.ell_max must be nonnegative, got {self.ell_max}")
        for name in ("k_min", "k_max"):
            v = getattr(self, name)
            if v is not None and (not math.isfinite(v) or 2 * v != int(2 * v)):
                raise ConfigError(f"scan.{name} must be an integer or half-integer, got {v}")
        if self.k_min is not None and self.k_max is not None and self.k_min > self.k_max:
            raise ConfigError("scan.k_min must not exceed scan.k_max")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"output.format must be json or csv, got {self.format!r}")
        return self

    def hedgehog(self, m=None, scale=None):
        scale = self.scale if scale is None else scale
        if self.profile in BUILTIN_PROFILES:
            prof = builtin_profile(self.profile) if self.profile == "constant" else builtin_profile(self.profile, scale=scale)
        else:
            prof = tabulated_profile(*load_profile_table(self.profile), name=Path(self.profile).stem)
        return Hedgehog(prof, self.N, self.m if m is None else m)

    def k2_values(self):
        if self.k_min is None and self.k_max is None:
            return None
        bound = 2 * (abs(self.N) + 4)
        lo = int(2 * self.k_min) if self.k_min is not None else -bound
        hi = int(2 * self.k_max) if self.k_max is not None else bound
        return list(range(lo, hi + 1))


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text}")
    return int(v)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _ladder(text):
    return tuple(_int(p) for p in text.replace(",", " ").split())


CONFIG_KEYS = {
    "profile": ("profile", str),
    "profile.name": ("profile", str),
    "profile.scale": ("scale", float),
    "N": ("N", _int),
    "m": ("m", float),
    "grid.n": ("ladder", lambda s: (_int(s),)),
    "grid.ladder": ("ladder", _ladder),
    "grid.r_max": ("r_max", float),
    "scan.ell_max": ("ell_max", _int),
    "scan.k_min": ("k_min", float),
    "scan.k_max": ("k_max", float),
    "scan.discrete": ("discrete", _bool),
    "scan.energy": ("energy", _bool),
    "output.path": ("out", str),
    "output.format": ("format", str),
}


def load_config(path):
    """
    Parse a flat ``key = value`` file; ``#`` starts a comment.

    Unknown or repeated keys and malformed values raise :class:`ConfigError`.
    """
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        attr, conv = CONFIG_KEYS[key]
        if attr in values:
            raise ConfigError(f"{path}:{lineno}: {key!r} sets {attr!r} twice")
        try:
            values[attr] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    if "profile" in values and values["profile"] not in BUILTIN_PROFILES:
        values["profile"] = str((Path(path).parent / values["profile"]).resolve())
    return values


def _add_run_options(p, with_mass=True):
    p.add_argument("--config", help="flat 'key = value' file; flags override its values")
    p.add_argument("--profile", help=f"builtin profile ({', '.join(sorted(BUILTIN_PROFILES))}) or a two-column 'r F' table")
    p.add_argument("--scale", type=float, help="length scale a of the builtin profile (default 1)")
    p.add_argument("--N", type=int, help="winding number (default 1)")
    if with_mass:
        p.add_argument("--m", type=float, help="mass, > 0")
    p.add_argument("--ladder", type=_ladder, help="radial grid sizes, e.g. 512,1024,2048")
    p.add_argument("--r-max", dest="r_max", type=float, help=f"radial truncation (default {DEFAULT_R_MAX:g})")
    p.add_argument("--out", help="write the result here instead of standard output")
    p.add_argument("--format", choices=("json", "csv"), help="output format (certify: json only)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hedgehog-dirac",
        description="Discrete ground states and non-vanishing energies of Dirac operators on hedgehog backgrounds.",
        epilog="exit codes: 0 ok/certified, 1 error, 2 no witness found",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra-check", help="verify the Pauli/spin matrix identities and the block-norm equality")
    p.add_argument("--instances", type=int, default=50, help="random block instances (default 50)")

    p = sub.add_parser("certify", help="evaluate both sufficient conditions and emit a JSON certificate")
    _add_run_options(p)
    p.add_argument("--lmax", type=int, dest="ell_max", help=f"scan ell in [-lmax, lmax] (default {DEFAULT_ELL_MAX})")
    p.add_argument("--no-discrete", dest="discrete", action="store_const", const=False, help="mollifier witness only")
    p.add_argument("--energy", dest="energy", action="store_const", const=True, help="add the sector scan and energy bounds")

    p = sub.add_parser("spectrum", help="lowest eigenvalue of L in each grand-spin sector and the energy bounds")
    _add_run_options(p)
    p.add_argument("--k-min", dest="k_min", type=float, help="smallest grand spin k (integer or half-integer)")
    p.add_argument("--k-max", dest="k_max", type=float, help="largest grand spin k")

    p = sub.add_parser("sweep", help="CSV of witness values and verdicts along a parameter")
    _add_run_options(p)
    p.add_argument("--param", choices=("m", "scale"), default="m", help="swept parameter (default m)")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of values, endpoints included")
    p.add_argument("--lmax", type=int, dest="ell_max", help=f"scan ell in [-lmax, lmax] (default {DEFAULT_ELL_MAX})")
    p.add_argument("--discrete", dest="discrete", action="store_const", const=True, help="also run the discrete route (slower)")

    sub.add_parser("example55", help="reproduce the worked example for F(r) = pi/(r+1), N = 1")
    return parser


def _run_config(args, command):
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for attr in RunConfig.__dataclass_fields__:
        v = getattr(args, attr, None)
        if v is not None:
            values[attr] = v
    if command == "sweep":
        values.setdefault("discrete", False)
        values.setdefault("format", "csv")
        if args.param == "m":
            values.setdefault("m", args.start if args.start > 0 else 1.0)
    return RunConfig(**values).validate()


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_algebra(args):
    res = algebra_check(instances=args.instances)
    for name, dev in res["identities"].items():
        print(f"{name:32s} {dev:.3e}")
    print(f"max identity deviation: {res['max_identity_deviation']:.3e}")
    print(f"max block-norm relative error: {res['max_block_norm_rel_error']:.3e}")
    ok = res["max_identity_deviation"] == 0.0 and res["max_block_norm_rel_error"] <= 1e-12
    return EXIT_OK if ok else EXIT_UNCERTIFIED


def _cmd_certify(cfg):
    if cfg.format != "json":
        raise ConfigError("certificates are emitted as JSON only")
    cert = certify(
        cfg.hedgehog(),
        ell_max=cfg.ell_max,
        ladder=cfg.ladder,
        r_max=cfg.r_max,
        discrete=cfg.discrete,
        energy=cfg.energy,
        k2_values=cfg.k2_values(),
    )
    _emit(cert.to_json(), cfg.out)
    return EXIT_OK if cert.certified else EXIT_UNCERTIFIED


def _cmd_spectrum(cfg):
    h = cfg.hedgehog()
    scan = scan_sectors(h, cfg.k2_values(), cfg.ladder, cfg.r_max)
    summary = energy_summary(h, scan).to_dict()
    if cfg.format == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["k2", "channels", "finest", "extrapolated", "tolerance", "on_range_boundary"])
        for k2, rep in scan.items():
            chans = ";".join(f"{c['ell']}/{c['s']:+d}/{c['t']:+d}" for c in rep.operator["channels"])
            out.writerow([k2, chans, repr(rep.finest), repr(rep.extrapolated), repr(rep.tolerance), str(rep.on_range_boundary).lower()])
        _emit(buf.getvalue(), cfg.out)
        return EXIT_OK
    doc = {"sectors": {str(k): rep.to_dict() for k, rep in scan.items()}, "energy": summary}
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", cfg.out)
    return EXIT_OK


SWEEP_COLUMNS = (
    "param",
    "value",
    "witness_ell",
    "witness_t",
    "witness_value",
    "exists",
    "gap_paper",
    "gap_svd",
    "nonzero_energy_paper",
)


def _cmd_sweep(cfg, args):
    if args.steps < 1:
        raise ConfigError("--steps must be at least 1")
    values = np.linspace(args.start, args.stop, args.steps) if args.steps > 1 else np.array([args.start])
    if args.param in ("m", "scale") and np.any(values <= 0):
        raise ConfigError(f"{args.param} must stay positive over the sweep")
    rows = []
    for v in values:
        h = cfg.hedgehog(m=v) if args.param == "m" else cfg.hedgehog(scale=v)
        gs = certify_ground_state(h, cfg.ell_max, cfg.ladder, cfg.r_max, cfg.discrete)
        gap = certify_gap(h, gs["exists"])
        rows.append(
            {
                "param": args.param,
                "value": float(v),
                "witness_ell": gs["witness_ell"],
                "witness_t": gs["witness_t"],
                "witness_value": float(gs["witness_value_f0"]),
                "exists": gs["exists"],
                "gap_paper": gap["gap_paper"],
                "gap_svd": gap["gap_svd"],
                "nonzero_energy_paper": gap["nonzero_energy_paper"],
            }
        )
    if cfg.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", cfg.out)
        return EXIT_OK
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(SWEEP_COLUMNS)
    for row in rows:
        out.writerow([_csv_cell(row[c]) for c in SWEEP_COLUMNS])
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return v


def format_example_table(table):
    lines = [f"{'quantity':52s} {'reference':>12s} {'computed':>14s} {'rel. error':>11s}  ok"]
    for row in table:
        lines.append(
            f"{row['quantity']:52s} {row['reference']:>12s} {row['computed']:14.8g} {row['rel_error']:11.2e}  "
            f"{'yes' if row['ok'] else 'NO'}"
        )
    return "\n".join(lines) + "\n"


def _cmd_example55():
    _, table = example55()
    sys.stdout.write(format_example_table(table))
    return EXIT_OK if all(r["ok"] for r in table) else EXIT_UNCERTIFIED


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        if args.command == "algebra-check":
            return _cmd_algebra(args)
        if args.command == "example55":
            return _cmd_example55()
        cfg = _run_config(args, args.command)
        if args.command == "certify":
            return _cmd_certify(cfg)
        if args.command == "spectrum":
            return _cmd_spectrum(cfg)
        return _cmd_sweep(cfg, args)
    except (ConfigError, DomainError, PreconditionError, ValueError, OSError) as exc:
        print(f"hedgehog-dirac: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
