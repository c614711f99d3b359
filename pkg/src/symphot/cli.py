"""Command-line front end.

Three subcommands: ``overlap`` prints the analytic inner product of two
Gaussian wave packets (optionally cross-checked by quadrature),
``hom-sweep`` writes the two-photon coincidence dip over a detuning grid
as CSV (optionally rendering a figure next to it), and ``selfcheck``
runs the randomized engine-vs-reference suites.

Exit codes: 0 success, 1 a check failed, 2 bad usage, 3 I/O failure.
All output is deterministic for identical flags (and seed).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import SymphotError
from .experiments import HomConfig, sweep_hom
from .modes import (
    POL_A,
    POL_D,
    POL_H,
    POL_L,
    POL_R,
    POL_V,
    GaussianEnvelope,
    gaussian_overlap,
    quadrature_overlap,
)
from .selfcheck import format_report, run_selfcheck

_POLARIZATIONS = {"H": POL_H, "V": POL_V, "D": POL_D,
                  "A": POL_A, "R": POL_R, "L": POL_L}


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12f}{z.imag:+.12f}i"


def _check_sigma(parser: argparse.ArgumentParser, flag: str, value: float):
    if not value > 0.0:
        parser.error(f"{flag} must be positive, got {value}")


def _parse_range(parser: argparse.ArgumentParser, flag: str,
                 text: str) -> tuple[float, ...]:
    """``a:b:n`` -> n points from a to b inclusive; n = 1 requires a = b."""
    parts = text.split(":")
    if len(parts) != 3:
        parser.error(f"{flag} expects a:b:n, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        parser.error(f"{flag} expects numeric a:b:n, got {text!r}")
    if n < 1:
        parser.error(f"{flag} needs at least one point, got n={n}")
    if n == 1:
        if a != b:
            parser.error(f"{flag}: a single point requires a == b, got {text!r}")
        return (a,)
    return tuple(float(x) for x in np.linspace(a, b, n))


def cmd_overlap(args, parser) -> int:
    _check_sigma(parser, "--sigma1", args.sigma1)
    _check_sigma(parser, "--sigma2", args.sigma2)
    env1 = GaussianEnvelope(args.sigma1, args.tau1, args.omega1)
    env2 = GaussianEnvelope(args.sigma2, args.tau2, args.omega2)
    analytic = gaussian_overlap(env1, env2)
    print(_fmt_complex(analytic))
    if args.quadrature:
        numeric = quadrature_overlap(env1, env2)
        print(_fmt_complex(numeric))
        print(f"{abs(analytic - numeric):.6e}")
    return 0


def cmd_hom_sweep(args, parser) -> int:
    _check_sigma(parser, "--sigma1", args.sigma1)
    _check_sigma(parser, "--sigma2", args.sigma2)
    dtaus = _parse_range(parser, "--dtau-range", args.dtau_range)
    domegas = _parse_range(parser, "--domega-range", args.domega_range)
    config = HomConfig(sigma1=args.sigma1, sigma2=args.sigma2,
                       omega0=args.omega0,
                       dtau_values=dtaus, domega_values=domegas,
                       pol1=_POLARIZATIONS[args.pol1],
                       pol2=_POLARIZATIONS[args.pol2])
    result = sweep_hom(config)
    lines = ["delta_tau,delta_omega,gamma_sq,p_coinc"]
    for i, dtau in enumerate(dtaus):
        for j, domega in enumerate(domegas):
            lines.append(f"{dtau:.15g},{domega:.15g},"
                         f"{result.gamma_sq[i, j]:.15g},"
                         f"{result.p_coinc[i, j]:.15g}")
    try:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    if args.plot is not None:
        from .plotting import render_hom_figure

        plot_path = args.plot if args.plot != "" else args.out + ".png"
        try:
            render_hom_figure(result, plot_path)
        except OSError as exc:
            print(f"cannot write {plot_path}: {exc}", file=sys.stderr)
            return 3
    return 0


def cmd_selfcheck(args, parser) -> int:
    if args.cases < 0:
        parser.error(f"--cases must be non-negative, got {args.cases}")
    reports = run_selfcheck(seed=args.seed, cases=args.cases)
    text = format_report(reports, args.seed)
    if text:
        print(text)
    return 0 if all(rep.ok for rep in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symphot",
        description="symbolic continuous-mode photonics: overlaps, "
                    "coincidence sweeps, engine self-checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ov = sub.add_parser("overlap",
                          help="inner product of two Gaussian wave packets")
    p_ov.add_argument("--sigma1", type=float, required=True)
    p_ov.add_argument("--tau1", type=float, default=0.0)
    p_ov.add_argument("--omega1", type=float, default=0.0)
    p_ov.add_argument("--sigma2", type=float, required=True)
    p_ov.add_argument("--tau2", type=float, default=0.0)
    p_ov.add_argument("--omega2", type=float, default=0.0)
    p_ov.add_argument("--quadrature", action="store_true",
                      help="also print the numeric overlap and |difference|")
    p_ov.set_defaults(run=cmd_overlap)

    p_hom = sub.add_parser("hom-sweep",
                           help="two-photon coincidence dip over a "
                                "delay/detuning grid, written as CSV")
    p_hom.add_argument("--sigma1", type=float, default=1.0)
    p_hom.add_argument("--sigma2", type=float, default=1.0)
    p_hom.add_argument("--omega0", type=float, default=0.0)
    p_hom.add_argument("--dtau-range", default="-5:5:41", metavar="A:B:N")
    p_hom.add_argument("--domega-range", default="-5:5:41", metavar="A:B:N")
    p_hom.add_argument("--pol1", choices=sorted(_POLARIZATIONS), default="H")
    p_hom.add_argument("--pol2", choices=sorted(_POLARIZATIONS), default="H")
    p_hom.add_argument("--out", required=True, metavar="FILE")
    p_hom.add_argument("--plot", nargs="?", const="", default=None,
                       metavar="FILE",
                       help="also render a figure (default: OUT.png)")
    p_hom.set_defaults(run=cmd_hom_sweep)

    p_check = sub.add_parser("selfcheck",
                             help="randomized engine-vs-reference suites")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--cases", type=int, default=100)
    p_check.set_defaults(run=cmd_selfcheck)

    return parser


_RANGE_FLAGS = ("--dtau-range", "--domega-range")


def _merge_range_flags(argv: list[str]) -> list[str]:
    """Join ``--dtau-range -5:5:41`` into one ``flag=value`` token so
    argparse does not mistake the leading minus for an option."""
    out = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _RANGE_FLAGS and i + 1 < len(argv) \
                and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(_merge_range_flags(argv))
    try:
        return args.run(args, parser)
    except SymphotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
