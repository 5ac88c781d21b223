"""``lowres-mimo``: reproduce the rate, antenna and compensation experiments as CSV/JSON.

Exit status is 0 on success, 2 on a usage error and 1 on a numerical or
I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments as ex
from .errors import NumericalError, ParameterError
from .quantizer import parse_bits
from .receiver import Method, NoiseMode

log = logging.getLogger("lowres_mimo")

# per-subcommand defaults that differ from the shared flag defaults
_DEFAULTS = {
    "rate-vs-snr": dict(m=100, bits="1,2,3,inf", trials=500, method="mc,prop1"),
    "rate-vs-antennas": dict(m=None, bits="1,2,inf", trials=500, method="mc,prop1",
                             m_start=50, m_stop=500, m_step=25),
    "compensation": dict(m=100, bits="1,2,3"),
    "validate-aqnm": dict(m=32, k=8, bits="1,2,3,inf", trials=100),
    "alpha-table": dict(bits="1,2,3,4,5"),
}


def _csv_list(text: str, conv):
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise ParameterError("empty list")
    return [conv(s) for s in items]


def _add_common(p: argparse.ArgumentParser, *, snr_grid=False, snr_point=False, m_grid=False,
                mc=False):
    p.add_argument("--bits", help="comma-separated bit depths, e.g. 1,2,3,inf")
    p.add_argument("--m", type=int, help="number of BS antennas (M, or M_conv for compensation)")
    p.add_argument("--k", type=int, default=None, help="number of users (default 50)")
    p.add_argument("--tau", type=int, default=None, help="pilot length (default K)")
    if snr_grid:
        p.add_argument("--snr-start", type=float, default=-20.0)
        p.add_argument("--snr-stop", type=float, default=20.0)
        p.add_argument("--snr-step", type=float, default=5.0)
    if snr_point:
        p.add_argument("--snr", type=float, default=0.0, help="common SNR in dB (default 0)")
    if m_grid:
        p.add_argument("--m-start", type=int)
        p.add_argument("--m-stop", type=int)
        p.add_argument("--m-step", type=int)
    if mc:
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1,
                       help="threads for Monte-Carlo trials; output does not depend on it")
    p.add_argument("--out", default="-", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowres-mimo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("rate-vs-snr", "average rate versus SNR"),
                           ("rate-vs-antennas", "average rate versus number of antennas")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p, snr_grid=name == "rate-vs-snr", snr_point=name == "rate-vs-antennas",
                    m_grid=name == "rate-vs-antennas", mc=True)
        p.add_argument("--method", help="comma-separated subset of mc,theorem1,prop1,remark1,remark2")
        p.add_argument("--mode", choices=[m.value for m in NoiseMode], default=NoiseMode.APPROX_DIAGONAL.value,
                       help="Monte-Carlo SINR: approximate or exact quantizer-noise diagonal")

    p = sub.add_parser("compensation", help="antenna ratio M_low/M_conv versus SNR")
    _add_common(p, snr_grid=True)
    p.add_argument("--m-max", type=int, default=None, help="search ceiling (default 64*M_conv)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("validate-aqnm", help="exact quantizer vs AQNM end-to-end rates")
    _add_common(p, snr_point=True, mc=True)
    p.add_argument("--symbols", type=int, default=2000, help="data symbols per block")

    p = sub.add_parser("alpha-table", help="Lloyd-Max distortion factors")
    p.add_argument("--bits")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _spec(args) -> tuple[ex.SweepSpec, tuple[str, ...]]:
    d = _DEFAULTS[args.command]
    get = lambda name: getattr(args, name, None) if getattr(args, name, None) is not None else d.get(name)  # noqa: E731
    kw = dict(bits=_csv_list(get("bits"), parse_bits))
    if args.command == "alpha-table":
        return ex.SweepSpec(**kw), ex.ALPHA_COLUMNS
    kw.update(K=get("k") or 50, tau=get("tau"))
    if get("m") is not None:
        kw["M"] = get("m")
    if hasattr(args, "snr_start"):
        kw["snr_grid"] = ex.frange(args.snr_start, args.snr_stop, args.snr_step)
    if args.command == "rate-vs-antennas":
        kw["m_grid"] = list(range(get("m_start"), get("m_stop") + 1, get("m_step")))
        if not kw["m_grid"] or get("m_step") <= 0:
            raise ParameterError("empty antenna grid")
    if hasattr(args, "trials"):
        kw.update(trials=get("trials"), seed=args.seed, workers=args.workers)
    if hasattr(args, "method"):
        kw["methods"] = _csv_list(get("method"), lambda s: Method(s.strip().lower()))
        kw["mode"] = NoiseMode(args.mode)
    if args.command == "compensation":
        kw.update(M_max=args.m_max, workers=args.workers, methods=())
    if args.command == "validate-aqnm":
        kw.update(n_symbols=args.symbols, methods=())
    columns = {
        "rate-vs-snr": ex.RATE_COLUMNS,
        "rate-vs-antennas": ex.RATE_COLUMNS,
        "compensation": ex.COMPENSATION_COLUMNS,
        "validate-aqnm": ex.VALIDATION_COLUMNS,
    }[args.command]
    return ex.SweepSpec(**kw), columns


def run(args) -> str:
    spec, columns = _spec(args)
    if args.command == "rate-vs-snr":
        rows = ex.run_rate_vs_snr(spec)
    elif args.command == "rate-vs-antennas":
        rows = ex.run_rate_vs_antennas(spec, snr_db=args.snr)
    elif args.command == "compensation":
        rows = ex.run_compensation(spec)
    elif args.command == "validate-aqnm":
        rows = ex.run_validate_aqnm(spec, snr_db=args.snr)
    else:
        rows = ex.alpha_table(b for b in spec.bits)
    return ex.render(rows, columns, args.format)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = run(args)
    except (ParameterError, ValueError) as exc:
        print(f"lowres-mimo: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"lowres-mimo: numerical error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"lowres-mimo: cannot write output: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %d bytes", len(text))
    return 0


if __name__ == "__main__":
    sys.exit(main())
