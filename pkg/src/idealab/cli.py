"""Command-line front end: ``analyze``, ``construct``, ``experiment`` and ``replay``.

Exit codes: 0 success or decided verdict, 1 usage or config error,
2 undecided verdict, 3 not constructible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

from . import __version__
from .construction import NotConstructible, WitnessExhausted, construct
from .convergence import ConfigError, Convergence, eps_grid, i_cauchy, i_converges
from .experiments import (ExperimentConfig, FunctionFamily, cc1_demo, emeasure_experiment,
                          lk3_experiment, propg_experiment, resolve_sequence, tw3_experiment)
from .ideals import ideal_by_name
from .rng import ALGORITHM
from .sequences import DomainError

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED, EXIT_NOT_CONSTRUCTIBLE = 0, 1, 2, 3

EXPERIMENTS = ("lk3", "tw3", "cc1", "propg", "emeasure")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "undecided"
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--eps-min", type=float, default=None)
    p.add_argument("--out-dir", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="idealab", description="Ideal convergence of selections at finite scale.")
    parser.add_argument("--version", action="version", version=f"idealab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    a = sub.add_parser("analyze", help="decide ideal convergence of one sequence")
    a.add_argument("--seq", required=True,
                   help="harmonic, alternating, square-indicator, identity, family@x or a CSV path")
    a.add_argument("--ideal", default="density")
    _common(a)

    c = sub.add_parser("construct", help="build a selection along which the sequence diverges")
    c.add_argument("--seq", required=True)
    c.add_argument("--ideal", default="density")
    c.add_argument("--target", type=int, default=2 ** 16)
    c.add_argument("--perm", action="store_true", help="build a rearrangement instead")
    c.add_argument("--max-horizon", type=int, default=None)
    _common(c)

    e = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    e.add_argument("kind", choices=EXPERIMENTS)
    e.add_argument("-c", "--config", default=None, help="JSON or TOML file")
    e.add_argument("--ideal", default=None)
    e.add_argument("--seq", dest="sequence", default=None)
    e.add_argument("--family", default=None)
    e.add_argument("--trials", type=int, default=None)
    e.add_argument("--points", type=int, default=None)
    e.add_argument("--sampler", choices=("grid", "uniform"), default=None)
    e.add_argument("--target", type=int, default=None)
    e.add_argument("--workers", type=int, default=None)
    _common(e)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out-dir", default=None)
    return parser


def load_config(path: str) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if p.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except ValueError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a table/object")
    return data


def _write(out: Optional[Path], name: str, text: str) -> Optional[str]:
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    return str(out / name)


def _manifest(out: Optional[Path], command: str, argv: list[str], config: dict,
              seed: int, outputs: dict, timing: dict) -> None:
    if out is None:
        return
    payload = {"command": command, "argv": argv, "config": config, "seed": seed,
               "version": __version__, "rng": ALGORITHM,
               "outputs": {k: v for k, v in outputs.items() if v}, "timing": timing}
    _write(out, "manifest.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _strip_out_dir(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == "--out-dir":
            skip = True
        elif not tok.startswith("--out-dir="):
            out.append(tok)
    return out


def _fmt_point(p) -> str:
    return "-" if p is None else repr(p)


def cmd_analyze(args, argv) -> int:
    ideal = ideal_by_name(args.ideal)
    horizon = args.horizon or 10 ** 5
    grid = eps_grid(args.eps_min) if args.eps_min else eps_grid()
    x = resolve_sequence(args.seq, horizon)
    start = time.perf_counter()
    conv = i_converges(x, ideal, grid)
    cauchy = i_cauchy(x, ideal, grid)
    lines = [f"sequence: {args.seq}  horizon: {x.horizon}  ideal: {ideal.name}",
             f"i_converges: {conv.status.value}" + (f" (limit {_fmt_point(conv.limit)})" if conv.limit is not None else ""),
             f"i_cauchy: {cauchy.status.value}"]
    if conv.note:
        lines.append(f"note: {conv.note}")
    shown = next((c for c in conv.candidates if c.point == conv.limit), None) if conv.limit is not None else None
    shown = shown or (conv.candidates[0] if conv.candidates else None)
    lines.append(f"eps table (candidate {_fmt_point(shown.point if shown else None)}):")
    lines.append(f"  {'eps':>10}  {'exceptional set':>15}  {'cauchy anchor':>13}")
    for j, (eps, anchor) in enumerate(cauchy.anchors):
        ev = shown.evidence[j].verdict.value if shown else "-"
        lines.append(f"  {eps:>10.6g}  {ev:>15}  {anchor if anchor is not None else '-':>13}")
    lines.append("candidates:")
    for c in conv.candidates:
        state = "qualifies" if c.qualifies else ("rejected" if c.rejected else "open")
        lines.append(f"  {c.source:>14}  {_fmt_point(c.point):>24}  {state}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    out = Path(args.out_dir) if args.out_dir else None
    report = {"sequence": args.seq, "horizon": x.horizon, "ideal": ideal.name,
              "i_converges": conv.status.value, "limit": conv.limit, "i_cauchy": cauchy.status.value,
              "anchors": [list(a) for a in cauchy.anchors]}
    outputs = {"report": _write(out, "report.json", json.dumps(report, sort_keys=True, indent=2) + "\n")}
    _manifest(out, "analyze", argv, {"seq": args.seq, "ideal": ideal.name, "horizon": horizon,
                                     "grid": list(grid)}, 0, outputs,
              {"seconds": time.perf_counter() - start})
    decided = conv.status is not Convergence.UNDECIDED
    return EXIT_OK if decided else EXIT_UNDECIDED


def cmd_construct(args, argv) -> int:
    ideal = ideal_by_name(args.ideal)
    horizon = args.horizon or 2 ** 12
    seed = 0 if args.seed is None else args.seed
    x = resolve_sequence(args.seq, horizon)
    start = time.perf_counter()
    try:
        c = construct(x, ideal, args.target, seed, perm=args.perm, max_horizon=args.max_horizon)
    except (NotConstructible, WitnessExhausted) as exc:
        print(f"not constructible: {exc}", file=sys.stderr)
        return EXIT_NOT_CONSTRUCTIBLE
    replay = c.replay(ideal)
    kind = "perm" if args.perm else "subseq"
    print(f"{kind} of length {len(c.selection)} in {len(c.rounds)} rounds"
          + (" (witness pair exhausted)" if c.exhausted else ""))
    print(f"replay: {replay.status.value}")
    out = Path(args.out_dir) if args.out_dir else None
    outputs = {"selection": _write(out, f"{kind}.txt", c.selection.to_text()),
               "trace": _write(out, "trace.txt", c.trace_text())}
    _manifest(out, "construct", argv,
              {"seq": args.seq, "ideal": ideal.name, "horizon": horizon, "target": args.target,
               "perm": args.perm, "max_horizon": args.max_horizon, "replay": replay.status.value},
              seed, outputs, {"seconds": time.perf_counter() - start})
    return EXIT_OK


def experiment_config(args) -> ExperimentConfig:
    data = load_config(args.config) if args.config else {}
    for key in ("ideal", "sequence", "family", "trials", "points", "sampler", "target",
                "workers", "seed", "horizon", "eps_min"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    data.pop("kind", None)
    return ExperimentConfig.from_mapping(data)


def run_experiment(kind: str, cfg: ExperimentConfig):
    ideal = cfg.ideal_spec
    if kind in ("lk3", "emeasure"):
        if not cfg.sequence:
            raise ConfigError(f"{kind} needs a sequence")
        x = resolve_sequence(cfg.sequence, cfg.horizon)
        return (lk3_experiment if kind == "lk3" else emeasure_experiment)(x, ideal, cfg)
    if kind in ("tw3", "cc1"):
        if not cfg.family:
            raise ConfigError(f"{kind} needs a family")
        fam = FunctionFamily.parse(cfg.family)
        return (tw3_experiment if kind == "tw3" else cc1_demo)(fam, ideal, cfg)
    return propg_experiment(ideal, cfg)


def cmd_experiment(args, argv) -> int:
    return _experiment(args.kind, experiment_config(args), args.out_dir, argv)


def _experiment(kind: str, cfg: ExperimentConfig, out_dir: Optional[str], argv: list[str]) -> int:
    start = time.perf_counter()
    try:
        report = run_experiment(kind, cfg)
    except NotConstructible as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_NOT_CONSTRUCTIBLE
    elapsed = time.perf_counter() - start
    text = report.canonical_json()
    out = Path(out_dir) if out_dir else None
    if out is None:
        print(text, end="")
    else:
        print(f"{report.kind} [{report.label}] written to {out}")
    outputs = {"report": _write(out, "report.json", text),
               "tallies": _write(out, "tallies.csv", report.tallies_csv())}
    _manifest(out, "experiment", argv, {"kind": kind, **cfg.canonical(), "workers": cfg.workers},
              cfg.seed, outputs, {"seconds": elapsed})
    return EXIT_OK


def cmd_replay(args, argv) -> int:
    """Experiments rebuild from the config echo; other commands re-run their argv."""
    path = Path(args.manifest)
    try:
        manifest = json.loads(path.read_text())
        command = manifest["command"]
        recorded = list(manifest["argv"])
        config = dict(manifest["config"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"unusable manifest {path}: {exc}") from None
    out = args.out_dir or str(path.parent / "replay")
    if command == "experiment":
        kind = config.pop("kind")
        return _experiment(kind, ExperimentConfig.from_mapping(config), out, recorded)
    return main(_strip_out_dir(recorded) + ["--out-dir", out])


COMMANDS = {"analyze": cmd_analyze, "construct": cmd_construct,
            "experiment": cmd_experiment, "replay": cmd_replay}


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, argv)
    except UsageError as exc:
        print(f"idealab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DomainError, ValueError, OSError) as exc:
        print(f"idealab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
