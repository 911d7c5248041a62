"""``incapax`` command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .antideg import EPS_FEAS, MAX_ITER
from .forbidden import Family, classify_linear_map, family_superop
from .jsonio import FormatError, dumps_report, matrix_to_json, superop_from_json
from .locc import falsification_probe, nondistillability_report, perfect_protocol, random_protocol
from .opalg import TOL_PSD
from .report import AnalyzeOptions, ChannelSpec, analyze_channel, render_text
from .zoo import ZOO, parse_zoo_call

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("incapax")


def _default_seed() -> int:
    return int(os.environ.get("INCAPAX_SEED", "0"))


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = float(v)
    return params


def _specs(args) -> list[ChannelSpec]:
    specs = []
    extra = _parse_params(args.param)
    for text in args.zoo or []:
        name, params = parse_zoo_call(text)
        params.update(extra)
        specs.append(ChannelSpec(name, params))
    for path in args.channel or []:
        specs.append(ChannelSpec("", path=path))
    if not specs:
        raise ValueError("give at least one --zoo or --channel")
    return specs


def _emit(obj, args, text: str | None = None):
    if args.output == "text" and text is not None:
        print(text)
    else:
        print(dumps_report(obj, deterministic=args.deterministic))


def cmd_analyze(args) -> int:
    specs = _specs(args)
    opts = AnalyzeOptions(tol=args.tol, feas_tol=args.feas_tol, max_iter=args.max_iter, seed=args.seed)
    channels = [s.build() for s in specs]
    jobs = 1 if args.deterministic else max(1, args.jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        reports = list(pool.map(lambda cs: analyze_channel(cs[0], cs[1].label, opts), zip(channels, specs)))
    if args.output == "text":
        print("\n\n".join(render_text(r) for r in reports))
    else:
        print(dumps_report(reports[0] if len(reports) == 1 else reports, deterministic=args.deterministic))
    return EXIT_OK


def cmd_zoo(args) -> int:
    if args.output == "json":
        print(json.dumps({k: {"params": list(e.params), "summary": e.summary} for k, e in ZOO.items()},
                         indent=2, sort_keys=True))
    else:
        for name, entry in ZOO.items():
            print(f"{name}({', '.join(entry.params)})".ljust(36) + entry.summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .selfcheck import run_checks

    results = run_checks(args.seed)
    for name, ok, value, tol in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({value:.3e} < {tol:g})")
    return EXIT_OK if all(ok for _, ok, _, _ in results) else EXIT_NUMERIC


def cmd_classify_map(args) -> int:
    if args.map:
        r = superop_from_json(args.map)
    elif args.family:
        r = family_superop(Family(args.family), args.p, args.dim)
    else:
        raise ValueError("give --map FILE or --family")
    verdict = classify_linear_map(r, r.dim_in, args.samples, args.seed, tol_fit=args.tol_fit)
    out = {
        "status": verdict.status.value,
        "p": verdict.p,
        "fit_residual": verdict.residual,
        "span_residual": verdict.span_residual,
        "samples_used": verdict.samples_used,
        "sampling_incomplete": verdict.sampling_incomplete,
        "witness_min_choi_eig": verdict.witness_min_eig,
        "witness_unitary": None if verdict.witness_unitary is None
        else matrix_to_json(verdict.witness_unitary),
    }
    text = f"{out['status']}" + (f"  p={out['p']:.10g}" if out["p"] is not None else "")
    if verdict.witness_unitary is not None:
        text += f"  witness min Choi eig {verdict.witness_min_eig:.3e} after {verdict.samples_used} samples"
    elif verdict.sampling_incomplete:
        text += "  (sampling-incomplete: no witness found)"
    _emit(out, args, text)
    return EXIT_OK


def cmd_distill_check(args) -> int:
    specs = _specs(args)
    ch = specs[0].build()
    if args.protocol == "perfect":
        if ch.dim_in != 2:
            raise ValueError("the perfect protocol needs a qubit-input channel")
        proto = perfect_protocol(2)
    else:
        proto = random_protocol(ch.dim_in, ch.dim_out, 2, seed=args.seed)
    rep = nondistillability_report(ch, proto, samples=args.samples, seed=args.seed, tol=args.tol)
    rep["channel"] = specs[0].label
    rep["protocol"] = args.protocol
    if args.probes:
        probe = falsification_probe(ch, args.probes, seed=args.seed, tol=args.tol)
        probe.pop("residuals")
        rep["falsification_probe"] = probe
    text = "\n".join([
        f"channel      {rep['channel']}",
        f"PPT          {rep['ppt']['verdict']}  (min eig {rep['ppt']['min_eig']:.6g})",
        f"residual     {rep['distillation_residual']:.6g}",
        f"extraction   cp={rep['extraction']['cp']}  min Choi eig {rep['extraction']['min_choi_eig']:.6g}",
        rep["narrative"],
    ])
    _emit(rep, args, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--zoo", action="append", help="zoo channel, e.g. 'erasure(2,0.5)' or 'erasure'")
    common.add_argument("--channel", action="append", help="JSON channel file")
    common.add_argument("--param", action="append", help="zoo parameter k=v (repeatable)")
    common.add_argument("--tol", type=float, default=TOL_PSD, help="PSD tolerance")
    common.add_argument("--seed", type=int, default=_default_seed())
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--deterministic", action="store_true",
                        help="serial execution and rounded floats for byte-identical output")

    parser = argparse.ArgumentParser(prog="incapax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"incapax {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="run both incapacity tests")
    p.add_argument("--max-iter", type=int, default=MAX_ITER)
    p.add_argument("--feas-tol", type=float, default=EPS_FEAS)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("zoo", help="channel zoo")
    zsub = p.add_subparsers(dest="zoo_command", required=True)
    zl = zsub.add_parser("list", help="list zoo channels")
    zl.add_argument("--output", choices=("json", "text"), default="text")
    zl.set_defaults(func=cmd_zoo)

    p = sub.add_parser("verify", help="run the built-in property checks")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify-map", parents=[common], help="classify a linear map R")
    p.add_argument("--map", help="JSON superoperator file")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--tol-fit", type=float, default=1e-8)
    p.set_defaults(func=cmd_classify_map)

    p = sub.add_parser("distill-check", parents=[common], help="distillation and transpose-extraction report")
    p.add_argument("--protocol", choices=("perfect", "random"), default="perfect")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--probes", type=int, default=0, help="random protocols for the falsification probe")
    p.set_defaults(func=cmd_distill_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FormatError, KeyError, ValueError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"incapax: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"incapax: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
