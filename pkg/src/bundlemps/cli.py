"""Command-line front end: ``bundlemps {solve, overlap, metrics, verify}``.

Any long option can also be given in a ``key = value`` file passed with
``--config``; explicit command-line flags win over file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig, parse_indices, read_config_file
from .energy import LocalCouplings
from .errors import CacheIntegrityError, ResourceError, ValidationError
from .experiments import (PRESETS, SpectrumCache, preset_notes, preset_panels, run_metrics,
                          run_overlap, write_overlap_outputs)
from .io import atomic_write
from .models import MAX_SITES, ModelSpec
from .overlap import DEFAULT_CUTOFF, DEFAULT_FLOOR_LOG10, DEFAULT_THRESHOLD_LOG10

log = logging.getLogger("bundlemps")

_BOOL_KEYS = {"no_cache", "quick", "no_ultralocal", "verbose"}


def _add_model_args(p):
    p.add_argument("--model", choices=["tfim", "xxz"], default="tfim")
    p.add_argument("--sites", type=int, default=12)
    p.add_argument("--hx", type=float, default=0.01, help="TFIM transverse field")
    p.add_argument("--delta", type=float, default=1.0, help="XXZ anisotropy")


def _add_common(p):
    p.add_argument("--config", type=Path, help="key = value file with option defaults")
    p.add_argument("--cache-dir", type=Path, default=None,
                   help="spectrum cache (default $BUNDLEMPS_CACHE or ~/.cache/bundlemps)")
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bundlemps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="diagonalize a model and cache the full spectrum")
    _add_model_args(p)
    _add_common(p)
    p.add_argument("--print-all", action="store_true", help="print every energy")

    p = sub.add_parser("overlap", help="weighted overlap matrix of two bundles")
    _add_model_args(p)
    _add_common(p)
    p.add_argument("--preset", help="fig3, fig4, fig5 or a single panel such as fig3a")
    p.add_argument("--bundle-a", default="1", help="state indices, e.g. 1,2 or 1-10")
    p.add_argument("--bundle-b", default="1")
    p.add_argument("--bond", type=int, default=None, help="bond index (default middle)")
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD_LOG10,
                   help="log10 threshold for high-weight entries")
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR_LOG10,
                   help="log10 floor of the heatmap")
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("metrics", help="pairwise truncation and energy metrics")
    _add_model_args(p)
    _add_common(p)
    p.add_argument("--states", default="1,2,3,29,30")
    p.add_argument("--basis-state", type=int, default=None,
                   help="state whose natural orbitals form the basis (default first)")
    p.add_argument("--m", type=int, default=None,
                   help="kept orbitals (default smallest m with truncation error < 1e-3)")
    p.add_argument("--couplings", default=None, help="comma-separated C_i (default all 1)")
    p.add_argument("--no-ultralocal", action="store_true",
                   help="keep the full m x m block in the energy difference")
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("verify", help="run the invariant suites")
    _add_common(p)
    p.add_argument("--quick", action="store_true", help="small systems only (N <= 8)")
    return parser


def _apply_config_file(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    values = read_config_file(known.config)
    defaults = {}
    for key, value in values.items():
        if key in _BOOL_KEYS:
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = value
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest for a in sp._actions}
            unknown = set(defaults) - dests - {"command"}
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
            if unknown and sp is action.choices.get(argv[0] if argv else None):
                raise ValidationError(f"unknown config keys: {sorted(unknown)}")


def model_from_args(args) -> ModelSpec:
    if args.sites > MAX_SITES:
        raise ResourceError(f"N={args.sites} needs a {2**args.sites}^2 dense matrix; "
                            f"the limit is N={MAX_SITES}")
    if args.model == "tfim":
        return ModelSpec("tfim", args.sites, transverse_field=args.hx)
    return ModelSpec("xxz", args.sites, anisotropy=args.delta)


def _cache(args) -> SpectrumCache:
    return SpectrumCache(args.cache_dir, enabled=not args.no_cache)


def cmd_solve(args) -> int:
    model = model_from_args(args)
    cache = _cache(args)
    spec = cache.get(model)
    print(f"model: {model.key()}  states: {spec.size}")
    if cache.enabled:
        print(f"cache: {cache.path(model)}")
    shown = spec.energies if (args.print_all or spec.size <= 16) else spec.energies[:8]
    label = "energies" if len(shown) == spec.size else f"lowest {len(shown)} energies"
    print(f"{label}: " + " ".join(format(float(e), ".12g") for e in shown))
    return 0


def _overlap_jobs(args):
    if args.preset:
        return [(name, *PRESETS[name]) for name in preset_panels(args.preset)]
    return [(None, model_from_args(args), parse_indices(args.bundle_a),
             parse_indices(args.bundle_b))]


def cmd_overlap(args) -> int:
    cache = _cache(args)
    for panel, model, a, b in _overlap_jobs(args):
        out = args.out / panel if panel else args.out
        cfg = ExperimentConfig(model, a, b, args.bond, args.cutoff, args.threshold,
                               args.floor, out, not args.no_cache)
        spec = cache.get(cfg.model)
        result = run_overlap(spec, cfg.bundle_a, cfg.bundle_b, cfg.bond, cfg.cutoff,
                             cfg.threshold_log10, cfg.floor_log10)
        if panel:
            result.notes = [f"preset {panel}"] + preset_notes(cfg.bundle_a, cfg.bundle_b)
        write_overlap_outputs(cfg.output_dir, cfg.model, result, cfg.threshold_log10,
                              cfg.floor_log10)
        rep = result.report
        print(f"{panel or model.key()}: Gamma {rep.mask.shape[0]}x{rep.mask.shape[1]}, "
              f"kept rows {rep.kept_rows}, kept cols {rep.kept_cols}, "
              f"high-weight {rep.high_weight_count} -> {cfg.output_dir}")
    return 0


def cmd_metrics(args) -> int:
    model = model_from_args(args)
    states = parse_indices(args.states)
    spec = _cache(args).get(model)
    couplings = None
    if args.couplings:
        couplings = LocalCouplings([float(x) for x in args.couplings.split(",")])
    result = run_metrics(spec, states, args.basis_state, args.m, couplings,
                         ultralocal=not args.no_ultralocal)
    atomic_write(args.out / "metrics.csv", result.table_csv())
    header = f"model: {model.key()}\nstates: {list(states)}\n"
    atomic_write(args.out / "metrics_report.txt", header + result.report_text())
    print(f"{len(result.rows)} pairs, basis state {result.basis_state}, m={result.m} "
          f"-> {args.out}")
    for title, rep in (("r", result.r_report), ("|dE|", result.energy_report)):
        if rep is not None:
            print(f"axioms for {title}: {len(rep.violations)} violations, "
                  f"max triangle slack {rep.max_triangle_slack:.3e}")
    return 0


def cmd_verify(args) -> int:
    from .checks import run_suites

    cache = _cache(args)
    results = run_suites(quick=args.quick, cache=cache)
    n_fail = sum(len(r.failed) for r in results)
    n_pass = sum(len(r.passed) for r in results)
    print(f"{n_pass} invariants passed, {n_fail} failed")
    return 0 if n_fail == 0 else 1


COMMANDS = {"solve": cmd_solve, "overlap": cmd_overlap, "metrics": cmd_metrics,
            "verify": cmd_verify}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except CacheIntegrityError as exc:
        print(f"cache integrity failure: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
