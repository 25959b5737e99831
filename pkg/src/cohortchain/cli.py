"""Command-line front end.

Commands: estimate, validate, compare, synth, plot. Every run is
deterministic given its flags (including the seed); a plain-text metadata
sidecar records the resolved configuration hash, seed, and tool version
next to each output set. Rounded tables are derived from, and never
replace, the full-precision CSVs.

Exit codes: 0 success, 1 usage error, 2 data or estimation error,
3 validation failure.
"""

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, bootstrap, kde, percentile_ci
from .errors import CohortChainError, DegenerateEnsemble
from .estimate import (
    MarkovFullEstimator,
    MarkovReducedEstimator,
    TraditionalEstimator,
    persistence_rates,
)
from .records import LaGroup, SubgroupSpec, filter_subgroup, format_records, load_records
from .svgplot import render_line_chart
from .synth import brute_force_sygr, format_generator_spec, generate_panel, load_generator_spec

POSITIVE_CONTROL_TOL = 1e-9


class UsageError(CohortChainError):
    pass


def _fmt(v):
    return format(float(v), ".12g")


def round_pct(rate):
    """Nearest-integer percentage point, half away from zero."""
    return int(math.floor(rate * 100.0 + 0.5))


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_metadata(out_dir, args, extra=()):
    items = sorted(
        f"{k}={v}" for k, v in vars(args).items() if k != "func" and v is not None
    )
    digest = hashlib.sha256("\n".join(items).encode("utf-8")).hexdigest()
    lines = [
        f"version = {__version__}",
        f"seed = {getattr(args, 'seed', '')}",
        f"config_hash = {digest}",
    ]
    lines += [f"{k} = {v}" for k, v in extra]
    _write(Path(out_dir) / "metadata.txt", "\n".join(lines) + "\n")


def _load_inputs(paths):
    records = []
    for path in paths:
        records.extend(load_records(path))
    return records


def _subgroup_spec(args):
    return SubgroupSpec(
        aalana_only=args.aalana,
        first_gen_only=args.first_gen,
        college=args.college,
        la_group=LaGroup(args.la),
    )


def _bootstrap_cfg(args, seed=None):
    return BootstrapConfig(
        seed=args.seed if seed is None else seed,
        replicates=args.replicates,
        ci_level=args.ci,
    )


def _estimator_for(method, args):
    if method == "traditional":
        return TraditionalEstimator(args.cohort, args.horizon)
    if method == "markov-reduced":
        return MarkovReducedEstimator(args.cohort, args.horizon)
    if method == "markov-full":
        return MarkovFullEstimator(
            args.horizon, from_la_year=(args.la == "exposed")
        )
    raise UsageError(f"unknown method {method!r}")


def _summary_table(rows):
    """rows: (cohort_label, method, summary). Returns (full_csv, rounded_csv,
    rounded_txt)."""
    full = ["cohort,method,p2_5,median,p97_5,width"]
    rounded = ["cohort,method,p2_5,median,p97_5,width"]
    txt_rows = [("Cohort", "Method", "2.5th", "Median", "97.5th", "Width")]
    for label, method, s in rows:
        full.append(
            f"{label},{method},{_fmt(s.lo)},{_fmt(s.median)},{_fmt(s.hi)},{_fmt(s.width)}"
        )
        cells = (
            str(label),
            method,
            str(round_pct(s.lo)),
            str(round_pct(s.median)),
            str(round_pct(s.hi)),
            str(round_pct(s.width)),
        )
        rounded.append(",".join(cells))
        txt_rows.append(cells)
    widths = [max(len(r[i]) for r in txt_rows) for i in range(6)]
    txt = "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in txt_rows
    )
    return "\n".join(full) + "\n", "\n".join(rounded) + "\n", txt + "\n"


def _ensemble_csv(summary):
    lines = ["replicate,estimate"]
    for b, v in zip(summary.replicate_ids, summary.ensemble):
        lines.append(f"{int(b)},{_fmt(v)}")
    return "\n".join(lines) + "\n"


def cmd_estimate(args):
    if not args.input:
        raise UsageError("estimate requires at least one --input")
    if args.horizon is None:
        raise UsageError("estimate requires --horizon")
    records = filter_subgroup(_load_inputs(args.input), _subgroup_spec(args))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    methods = args.method or ["traditional", "markov-full"]
    if any(m in ("traditional", "markov-reduced") for m in methods) and args.cohort is None:
        raise UsageError("--cohort is required for traditional and markov-reduced")

    rows = []
    cfg = _bootstrap_cfg(args)
    for method in methods:
        estimator = _estimator_for(method, args)
        summary = bootstrap(records, estimator, cfg)
        label = args.cohort if args.cohort is not None else "all"
        rows.append((label, method, summary))
        if args.export_ensemble:
            _write(out_dir / f"ensemble_{method}.csv", _ensemble_csv(summary))

    full_csv, rounded_csv, rounded_txt = _summary_table(rows)
    _write(out_dir / "summary_full.csv", full_csv)
    _write(out_dir / "summary_rounded.csv", rounded_csv)
    _write(out_dir / "summary_rounded.txt", rounded_txt)
    _write_metadata(out_dir, args)
    sys.stdout.write(rounded_txt)
    return 0


def cmd_validate(args):
    if not args.input:
        raise UsageError("validate requires at least one --input")
    if args.horizon is None:
        raise UsageError("validate requires --horizon")
    records = _load_inputs(args.input)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    cohorts = sorted({r.cohort_year for r in records})
    cfg = _bootstrap_cfg(args)
    lines = [
        "cohort,status,traditional,markov_reduced,abs_diff,trad_ci_width,markov_ci_width"
    ]
    any_fail = False
    any_checked = False
    for cohort in cohorts:
        if args.horizon < cohort + 6:
            lines.append(f"{cohort},SKIP,,,,,")
            sys.stdout.write(f"{cohort}: SKIP (fewer than six observed years)\n")
            continue
        trad = TraditionalEstimator(cohort, args.horizon)
        reduced = MarkovReducedEstimator(cohort, args.horizon)
        s_trad = bootstrap(records, trad, cfg)
        s_red = bootstrap(records, reduced, cfg)
        diff = abs(s_trad.point - s_red.point)
        # test hook: lets the FAIL path be exercised deliberately
        diff += args.inject_error
        ok = diff <= POSITIVE_CONTROL_TOL
        any_checked = True
        any_fail = any_fail or not ok
        status = "PASS" if ok else "FAIL"
        lines.append(
            f"{cohort},{status},{_fmt(s_trad.point)},{_fmt(s_red.point)},"
            f"{_fmt(diff)},{_fmt(s_trad.width)},{_fmt(s_red.width)}"
        )
        sys.stdout.write(
            f"{cohort}: {status} |traditional - reduced| = {diff:.3e} "
            f"(CI widths {s_trad.width:.4f} vs {s_red.width:.4f})\n"
        )
    _write(out_dir / "validation.csv", "\n".join(lines) + "\n")
    _write_metadata(out_dir, args)
    if any_fail:
        sys.stdout.write("FAIL\n")
        return 3
    sys.stdout.write("PASS\n" if any_checked else "SKIP (no complete cohorts)\n")
    return 0


def _paired_difference(s_a, s_b):
    """Per-replicate differences for replicates that survived in both."""
    ids_a = {int(b): v for b, v in zip(s_a.replicate_ids, s_a.ensemble)}
    diffs = [
        v - ids_a[int(b)]
        for b, v in zip(s_b.replicate_ids, s_b.ensemble)
        if int(b) in ids_a
    ]
    return np.array(diffs)


def run_comparison(records, args, stratum, extra_spec):
    """One exposed-vs-unexposed comparison within a stratum; returns a dict
    of summaries and difference statistics."""
    base = filter_subgroup(records, extra_spec)
    seeds = np.random.SeedSequence(args.seed).generate_state(2, dtype=np.uint64)
    groups = {}
    for name, la_group, seed in (
        ("unexposed", LaGroup.UNEXPOSED, int(seeds[0])),
        ("exposed", LaGroup.EXPOSED, int(seeds[1])),
    ):
        members = filter_subgroup(base, SubgroupSpec(la_group=la_group))
        if not members:
            raise UsageError(f"{stratum}: {name} group is empty")
        estimator = MarkovFullEstimator(
            args.horizon, from_la_year=(la_group is LaGroup.EXPOSED)
        )
        groups[name] = (members, bootstrap(members, estimator, _bootstrap_cfg(args, seed)))

    s_un, s_ex = groups["unexposed"][1], groups["exposed"][1]
    diff_ens = _paired_difference(s_un, s_ex)
    d_lo, d_med, d_hi = percentile_ci(diff_ens, args.ci)
    persistence = {
        name: persistence_rates(
            members, args.horizon, from_la_year=(name == "exposed")
        )
        for name, (members, _s) in groups.items()
    }
    return {
        "stratum": stratum,
        "unexposed": s_un,
        "exposed": s_ex,
        "n_unexposed": len(groups["unexposed"][0]),
        "n_exposed": len(groups["exposed"][0]),
        "median_diff": s_ex.median - s_un.median,
        "diff_lo": d_lo,
        "diff_median": d_med,
        "diff_hi": d_hi,
        "ci_overlap": (s_ex.lo <= s_un.hi) and (s_un.lo <= s_ex.hi),
        "persistence": persistence,
    }


def cmd_compare(args):
    if not args.input:
        raise UsageError("compare requires at least one --input")
    if args.horizon is None:
        raise UsageError("compare requires --horizon")
    records = _load_inputs(args.input)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    strata = [
        (
            "all",
            SubgroupSpec(
                aalana_only=args.aalana,
                first_gen_only=args.first_gen,
                college=args.college,
            ),
        )
    ]
    if args.strata:
        strata.append(("aalana", SubgroupSpec(aalana_only=True, college=args.college)))
        strata.append(("first_gen", SubgroupSpec(first_gen_only=True, college=args.college)))

    results = [run_comparison(records, args, name, spec) for name, spec in strata]

    lines = ["stratum,group,n,p2_5,median,p97_5,width"]
    for res in results:
        for group in ("unexposed", "exposed"):
            s = res[group]
            lines.append(
                f"{res['stratum']},{group},{res['n_' + group]},"
                f"{_fmt(s.lo)},{_fmt(s.median)},{_fmt(s.hi)},{_fmt(s.width)}"
            )
    _write(out_dir / "comparison.csv", "\n".join(lines) + "\n")

    lines = ["stratum,median_diff,diff_p2_5,diff_median,diff_p97_5,ci_overlap"]
    for res in results:
        lines.append(
            f"{res['stratum']},{_fmt(res['median_diff'])},{_fmt(res['diff_lo'])},"
            f"{_fmt(res['diff_median'])},{_fmt(res['diff_hi'])},"
            f"{'yes' if res['ci_overlap'] else 'no'}"
        )
    _write(out_dir / "difference.csv", "\n".join(lines) + "\n")

    lines = ["stratum,transition,unexposed,exposed,difference"]
    txt = ["Stratum     Transition  no-LA  LA  Difference (LA - no-LA)"]
    for res in results:
        per = res["persistence"]
        for k in range(1, 6):
            un, ex = per["unexposed"][k], per["exposed"][k]
            lines.append(
                f"{res['stratum']},Y{k}->Y{k + 1},{_fmt(un)},{_fmt(ex)},{_fmt(ex - un)}"
            )
            txt.append(
                f"{res['stratum']:<11} Y{k}->Y{k + 1:<6} {round_pct(un):>5} "
                f"{round_pct(ex):>3} {round_pct(ex) - round_pct(un):+d}"
            )
    _write(out_dir / "persistence.csv", "\n".join(lines) + "\n")
    _write(out_dir / "persistence.txt", "\n".join(txt) + "\n")

    if args.export_ensemble:
        for res in results:
            for group in ("unexposed", "exposed"):
                _write(
                    out_dir / f"ensemble_{res['stratum']}_{group}.csv",
                    _ensemble_csv(res[group]),
                )

    _write_metadata(out_dir, args)
    for res in results:
        sys.stdout.write(
            f"{res['stratum']}: exposed median {100 * res['exposed'].median:.1f}% "
            f"({100 * res['exposed'].lo:.1f}-{100 * res['exposed'].hi:.1f}), "
            f"unexposed median {100 * res['unexposed'].median:.1f}% "
            f"({100 * res['unexposed'].lo:.1f}-{100 * res['unexposed'].hi:.1f}), "
            f"difference {100 * res['median_diff']:+.1f} pp, "
            f"CIs {'overlap' if res['ci_overlap'] else 'do not overlap'}\n"
        )
    return 0


def cmd_synth(args):
    if args.spec is None:
        raise UsageError("synth requires --spec")
    spec = load_generator_spec(args.spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = generate_panel(spec)
    _write(out_dir / "panel.csv", format_records(records))
    extra = [
        ("students", len(records)),
        ("true_sygr", _fmt(brute_force_sygr(spec.true_matrix))),
    ]
    if spec.effect_matrix is not None:
        extra.append(("true_effect_sygr", _fmt(brute_force_sygr(spec.effect_matrix))))
    extra.append(("generator_seed", spec.seed))
    extra.append(("generator_spec", repr(format_generator_spec(spec))))
    _write_metadata(out_dir, args, extra)
    sys.stdout.write(f"wrote {len(records)} records to {out_dir / 'panel.csv'}\n")
    return 0


def _read_ensemble_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "replicate,estimate":
            raise CohortChainError(f"{path}: expected header 'replicate,estimate'")
        values = []
        for line in fh:
            line = line.strip()
            if line:
                values.append(float(line.split(",")[1]))
    return np.array(values)


def cmd_plot(args):
    if not args.input:
        raise UsageError("plot requires at least one --input ensemble CSV")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    curves = []
    markers = []
    for path in args.input:
        label = Path(path).stem
        values = _read_ensemble_csv(path)
        try:
            xs, dens = kde(values, args.bandwidth)
        except DegenerateEnsemble:
            markers.append((label, float(values[0])))
            continue
        lines = ["x,density"] + [f"{_fmt(x)},{_fmt(d)}" for x, d in zip(xs, dens)]
        _write(out_dir / f"kde_{label}.csv", "\n".join(lines) + "\n")
        curves.append((label, xs, dens))

    svg = render_line_chart(
        curves,
        markers,
        title="Six-year graduation rate",
        x_label="Six-year graduation rate (%)",
        y_label="Density",
    )
    _write(out_dir / "kde.svg", svg)
    _write_metadata(out_dir, args)
    sys.stdout.write(f"wrote {out_dir / 'kde.svg'}\n")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="cohortchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    def common(p, bootstrap_flags=True):
        p.add_argument("--input", action="append", default=None, help="input CSV (repeatable)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--config", default=None, help="key = value config file; flags override")
        p.add_argument("--seed", type=int, default=0)
        if bootstrap_flags:
            p.add_argument("--replicates", type=int, default=1000)
            p.add_argument("--ci", type=float, default=0.95)
            p.add_argument("--horizon", type=int, default=None)

    p = sub.add_parser("estimate", help="bootstrap SYGR estimates per method")
    common(p)
    p.add_argument("--cohort", type=int, default=None)
    p.add_argument(
        "--method",
        action="append",
        choices=["traditional", "markov-reduced", "markov-full"],
        default=None,
    )
    p.add_argument("--aalana", action="store_true")
    p.add_argument("--first-gen", dest="first_gen", action="store_true")
    p.add_argument("--college", default=None)
    p.add_argument("--la", choices=["exposed", "unexposed", "all"], default="all")
    p.add_argument("--export-ensemble", dest="export_ensemble", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("validate", help="positive control: reduced chain vs traditional")
    common(p)
    p.add_argument("--inject-error", dest="inject_error", type=float, default=0.0,
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="LA-exposed vs unexposed group comparison")
    common(p)
    p.add_argument("--aalana", action="store_true")
    p.add_argument("--first-gen", dest="first_gen", action="store_true")
    p.add_argument("--college", default=None)
    p.add_argument("--strata", action="store_true",
                   help="also compare within aalana and first-gen strata")
    p.add_argument("--export-ensemble", dest="export_ensemble", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="generate a synthetic panel from a generator spec")
    common(p, bootstrap_flags=False)
    p.add_argument("--spec", default=None, help="generator spec file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot", help="KDE curves for exported ensembles")
    common(p, bootstrap_flags=False)
    p.add_argument("--bandwidth", type=float, default=None)
    p.set_defaults(func=cmd_plot)

    return parser


def _apply_config_file(parser, argv):
    """Resolve --config into parser defaults so flags win over the file."""
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise UsageError(f"{path}:{line_no}: expected key = value")
            key, _, value = stripped.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key == "input":
                overrides.setdefault("input", []).append(value)
            elif key == "method":
                overrides.setdefault("method", []).append(value)
            else:
                overrides[key] = value
    for action in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
        known = {a.dest for a in action._actions}  # noqa: SLF001
        action.set_defaults(
            **{
                k: _coerce_config_value(action, k, v)
                for k, v in overrides.items()
                if k in known
            }
        )


def _coerce_config_value(subparser, dest, value):
    for action in subparser._actions:  # noqa: SLF001
        if action.dest != dest:
            continue
        if isinstance(value, list):
            return value
        if isinstance(action, (argparse._StoreTrueAction,)):  # noqa: SLF001
            return value.lower() in ("1", "true", "yes")
        if action.type is not None:
            return action.type(value)
        return value
    return value


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 1
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except CohortChainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
