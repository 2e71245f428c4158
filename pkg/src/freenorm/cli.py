"""Command-line interface: parsing, dispatch, JSON/CSV reports, power cache.

Commands: ``norm``, ``selfless`` (injectivity/fibers/growth/transfer/product),
``tree`` (length/stable/project/cascade/path/search), ``ball``.  Exit codes:
0 success, 2 hypothesis violation, 3 budget exceeded, 4 parse error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import _kernels
from .algebra import AlgebraElement, canonical_hash, parse_element
from .cache import PowerCache, default_cache_dir
from .errors import BudgetExceededError, HypothesisViolationError, ParseError
from .norms import certify_norm, vector_lower
from .reporting import Report, error_object, frac_pair
from .rounding import DEFAULT_BITS, RootBound, to_decimal_string
from .selfless import (
    RetractionFamily,
    SubstitutionMap,
    build_retraction,
    check_injectivity,
    fiber_statistics,
    growth_profile,
    product_nontriviality,
    transfer_experiment,
)
from .treegeo import (
    ConstantProvider,
    admissible_path_check,
    constant_cascade,
    minimal_exponent_search,
    projection_diameter,
    stable_length,
    translation_length,
)
from .words import GroupContext, parse_word

DEFAULT_BUDGET = 2_000_000

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_BUDGET = 3
EXIT_PARSE = 4


@dataclass
class RunConfig:
    group: str
    budget: int = DEFAULT_BUDGET
    precision_bits: int = DEFAULT_BITS
    threads: int = 1
    cache_dir: str | None = None
    use_cache: bool = True
    kernel: str | None = None

    def __post_init__(self):
        if self.budget <= 0:
            raise HypothesisViolationError("budget must be positive")
        if self.threads < 1:
            raise HypothesisViolationError("thread count must be at least 1")


def _apply_runtime(config: RunConfig) -> None:
    if config.kernel:
        _kernels.set_backend(config.kernel)
    try:
        import numba

        limit = numba.config.NUMBA_NUM_THREADS
        numba.set_num_threads(max(1, min(config.threads, limit)))
    except ImportError:
        pass


def _cache_for(config: RunConfig) -> PowerCache | None:
    if not config.use_cache:
        return None
    return PowerCache(config.cache_dir or default_cache_dir())


def _root_dict(b: RootBound) -> dict:
    return {
        "radicand": frac_pair(b.radicand),
        "root_order": b.root_order,
        "direction": b.direction,
        "rounded": frac_pair(b.rounded),
        "approx": to_decimal_string(b.rounded, 12, "down" if b.direction == "lower" else "up"),
    }


def _element_inputs(x: AlgebraElement) -> dict:
    return {"element": x.serialize(), "element_hash": canonical_hash(x)}


def _provider_from_arg(arg: str | None) -> ConstantProvider:
    if arg is None or arg == "default":
        return ConstantProvider.default()
    if arg == "trivial":
        lin = (Fraction(0), Fraction(1), Fraction(0))
        return ConstantProvider(q1=lin, q2=lin, q3=lin)
    return ConstantProvider.from_text(Path(arg).read_text())


# -- command handlers ----------------------------------------------------------------


def _cmd_norm(args, config: RunConfig) -> dict:
    ctx = GroupContext.parse(config.group)
    x = parse_element(args.element, ctx)
    cache = _cache_for(config)
    cert = certify_norm(
        x, args.m_max, budget=config.budget, bits=config.precision_bits, cache=cache
    )
    outputs: dict = {"certificate": cert.to_json_dict()}
    if args.probe:
        probe = parse_element(args.probe, ctx)
        outputs["probe_lower"] = _root_dict(vector_lower(x, probe, bits=config.precision_bits))
    return {
        "inputs": {
            "group": ctx.spec_string(),
            **_element_inputs(x),
            "m_max": args.m_max,
            "budget": config.budget,
            "precision_bits": config.precision_bits,
        },
        "outputs": outputs,
    }


def _selfless_map(args, ctx: GroupContext):
    substitutes = getattr(args, "substitute", None) or []
    if substitutes:
        images = {}
        for item in substitutes:
            if "=" not in item:
                raise ParseError(f"--substitute expects gen=word, got {item!r}", item)
            name, _, text = item.partition("=")
            images[name.strip()] = parse_word(text.strip(), ctx)
        return SubstitutionMap(ctx, images), {"substitution": sorted(substitutes)}
    if not getattr(args, "g", None):
        raise ParseError("need --g (retraction) or --substitute (custom map)")
    g = parse_word(args.g, ctx)
    h_factor = ctx.factor_of[args.h] if getattr(args, "h", None) else None
    a_name = getattr(args, "a", None)
    ret = build_retraction(ctx, g, args.n, h_factor=h_factor, a_name=a_name)
    return ret, {"retraction": ret.spec_string()}


def _cmd_selfless(args, config: RunConfig) -> dict:
    ctx = GroupContext.parse(config.group)
    inputs: dict = {"group": ctx.spec_string()}
    if args.subaction == "injectivity":
        mapping, desc = _selfless_map(args, ctx)
        inputs.update(desc)
        inputs["radius"] = args.radius
        report = check_injectivity(mapping, args.radius, budget=config.budget)
        outputs = {
            "radius": report.radius,
            "ball_size": report.ball_size,
            "injective": report.injective,
            "max_fiber": report.max_fiber,
            "collisions": [[str(a), str(b)] for a, b in report.collisions],
        }
    elif args.subaction == "fibers":
        mapping, desc = _selfless_map(args, ctx)
        inputs.update(desc)
        inputs["radius"] = args.radius
        report = fiber_statistics(mapping, args.radius, budget=config.budget)
        outputs = {
            "radius": report.radius,
            "ball_size": report.ball_size,
            "max_multiplicity": report.max_multiplicity,
            "histogram": {str(k): v for k, v in report.histogram.items()},
        }
    elif args.subaction == "growth":
        g = parse_word(args.g, ctx)
        family = RetractionFamily(ctx, g, a_name=getattr(args, "a", None))
        inputs.update({"g": str(g), "radius_max": args.radius_max})
        profile = growth_profile(family, args.radius_max, budget=config.budget)
        outputs = {"f_measured": profile.values}
    elif args.subaction == "transfer":
        z = parse_element(args.element, ctx)
        g = parse_word(args.g, ctx)
        epsilon = Fraction(args.epsilon)
        schedule = [int(v) for v in args.schedule.split(",")]
        family = RetractionFamily(ctx, g, a_name=getattr(args, "a", None))
        pairs = None
        if args.pairs:
            pairs = []
            for chunk in args.pairs.split(","):
                m_text, _, n_text = chunk.partition(":")
                pairs.append((int(m_text), int(n_text)))
        report = transfer_experiment(
            z,
            epsilon,
            schedule,
            family,
            pairs=pairs,
            budget=config.budget,
            bits=config.precision_bits,
        )
        inputs.update(
            {
                **_element_inputs(z),
                "g": str(g),
                "epsilon": frac_pair(epsilon),
                "schedule": schedule,
            }
        )
        outputs = {
            "radius": report.radius,
            "all_equal": report.all_equal,
            "rows": [
                {
                    "m": r.m,
                    "n": r.n,
                    "c_m": frac_pair(r.c_m_source),
                    "c_m_image": frac_pair(r.c_m_image),
                    "l2_equal": r.l2_equal,
                    "f_value": r.f_value,
                    "factor": _root_dict(r.factor),
                    "upper_image": _root_dict(r.upper_image),
                    "lower_source": _root_dict(r.lower_source),
                    "upper_image_direct": _root_dict(r.upper_image_direct),
                    "within_epsilon": r.within_epsilon,
                }
                for r in report.rows
            ],
        }
    elif args.subaction == "product":
        g = parse_word(args.g, ctx)
        ret = build_retraction(ctx, g, args.n, a_name=getattr(args, "a", None))
        s_list = [parse_word(t, ctx) for t in args.s.split(",")]
        p_list = [int(v) for v in args.p.split(",")] if args.p else []
        witness = product_nontriviality(s_list, p_list, ret)
        inputs.update(
            {"retraction": ret.spec_string(), "s": [str(s) for s in s_list], "p": p_list}
        )
        outputs = {
            "product": str(witness.word),
            "nontrivial": witness.nontrivial,
            "length": len(witness.word),
        }
    else:  # pragma: no cover
        raise ParseError(f"unknown selfless subaction {args.subaction!r}")
    return {"inputs": inputs, "outputs": outputs}


def _cmd_tree(args, config: RunConfig) -> dict:
    ctx = GroupContext.parse(config.group)
    inputs: dict = {"group": ctx.spec_string()}
    if args.subaction == "length":
        w = parse_word(args.word, ctx)
        inputs["word"] = str(w)
        outputs = {"translation_length": translation_length(w)}
    elif args.subaction == "stable":
        w = parse_word(args.word, ctx)
        samples = [int(v) for v in args.samples.split(",")]
        report = stable_length(w, samples)
        inputs.update({"word": str(w), "samples": samples})
        outputs = {
            "exact": report.exact,
            "empirical": [[n, frac_pair(v)] for n, v in report.empirical],
        }
    elif args.subaction == "project":
        g = parse_word(args.g, ctx)
        h = parse_word(args.h, ctx)
        report = projection_diameter(g, h)
        inputs.update({"g": str(g), "h": str(h)})
        outputs = {
            "unbounded": report.unbounded,
            "diameter": report.diameter,
            "gate_min": report.gate_min,
            "gate_max": report.gate_max,
        }
    elif args.subaction == "cascade":
        provider = _provider_from_arg(args.provider)
        report = constant_cascade(Fraction(args.lam), args.glen, provider)
        inputs.update({"lambda": str(report.lam), "g_length": args.glen, "provider": provider.to_dict()})
        outputs = report.to_dict()
    elif args.subaction == "path":
        g = parse_word(args.g, ctx)
        h_list = [parse_word(t, ctx) for t in args.h_list.split(",")]
        n_list = [int(v) for v in args.n_list.split(",")]
        provider = _provider_from_arg(args.provider)
        report = admissible_path_check(g, h_list, n_list, provider)
        inputs.update(
            {"g": str(g), "h_list": [str(h) for h in h_list], "n_list": n_list}
        )
        outputs = {
            "product": str(report.product),
            "nontrivial": report.nontrivial,
            "breakpoints": [str(b) for b in report.breakpoints],
            "lambda_emp": None if report.lambda_emp is None else frac_pair(report.lambda_emp),
            "lambda_theory": frac_pair(report.lambda_theory),
            "threshold": frac_pair(report.threshold),
            "threshold_met": report.threshold_met,
            "comparison_ok": report.comparison_ok,
        }
    elif args.subaction == "search":
        g = parse_word(args.g, ctx)
        provider = _provider_from_arg(args.provider)
        report = minimal_exponent_search(
            g, args.h_radius, args.m, provider, budget=config.budget
        )
        inputs.update({"g": str(g), "h_radius": args.h_radius, "m": args.m})
        outputs = {
            "n_emp": report.n_emp,
            "threshold": frac_pair(report.threshold),
            "within_threshold": Fraction(report.n_emp) <= report.threshold,
            "tuples_checked": report.tuples_checked,
            "products_checked": report.products_checked,
            "window": report.window,
            "witnesses": [list(w) for w in report.witnesses],
        }
    else:  # pragma: no cover
        raise ParseError(f"unknown tree subaction {args.subaction!r}")
    return {"inputs": inputs, "outputs": outputs}


def _cmd_ball(args, config: RunConfig) -> dict:
    ctx = GroupContext.parse(config.group)
    words = [str(w) for w in ctx.enumerate_ball(args.radius, budget=config.budget)]
    return {
        "inputs": {"group": ctx.spec_string(), "radius": args.radius},
        "outputs": {"count": len(words), "closed_form": ctx.ball_count(args.radius), "words": words},
    }


# -- argument parsing ----------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--group", required=True, help="group spec, e.g. 'x|y|a'")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max term count")
    parser.add_argument("--precision-bits", type=int, default=DEFAULT_BITS)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--kernel", choices=["numba", "numpy", "python"], default=None)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--out", default=None, help="write the report to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freenorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="certify two-sided operator-norm bounds")
    _add_common(p_norm)
    p_norm.add_argument("--element", required=True)
    p_norm.add_argument("--m-max", type=int, default=4)
    p_norm.add_argument("--probe", default=None, help="optional probe element for a vector lower bound")

    p_self = sub.add_parser("selfless", help="retraction experiments")
    self_sub = p_self.add_subparsers(dest="subaction", required=True)
    for name in ("injectivity", "fibers"):
        sp = self_sub.add_parser(name)
        _add_common(sp)
        sp.add_argument("--g", default=None)
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--h", default=None, help="a generator naming the H factor")
        sp.add_argument("--a", default=None, help="the distinguished letter")
        sp.add_argument("--radius", type=int, required=True)
        sp.add_argument(
            "--substitute",
            action="append",
            help="custom image gen=word (repeatable); overrides the retraction",
        )
    sp = self_sub.add_parser("growth")
    _add_common(sp)
    sp.add_argument("--g", required=True)
    sp.add_argument("--a", default=None)
    sp.add_argument("--radius-max", type=int, required=True)
    sp = self_sub.add_parser("transfer")
    _add_common(sp)
    sp.add_argument("--element", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--a", default=None)
    sp.add_argument("--epsilon", default="1")
    sp.add_argument("--schedule", default="1,2")
    sp.add_argument("--pairs", default=None, help="explicit m:n pairs, e.g. '1:2,2:4'")
    sp = self_sub.add_parser("product")
    _add_common(sp)
    sp.add_argument("--g", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", default=None)
    sp.add_argument("--s", required=True, help="comma-separated words s_1,...,s_m")
    sp.add_argument("--p", default="", help="comma-separated nonzero exponents")

    p_tree = sub.add_parser("tree", help="Cayley-tree geometry")
    tree_sub = p_tree.add_subparsers(dest="subaction", required=True)
    sp = tree_sub.add_parser("length")
    _add_common(sp)
    sp.add_argument("--word", required=True)
    sp = tree_sub.add_parser("stable")
    _add_common(sp)
    sp.add_argument("--word", required=True)
    sp.add_argument("--samples", default="1,2,4,8")
    sp = tree_sub.add_parser("project")
    _add_common(sp)
    sp.add_argument("--g", required=True)
    sp.add_argument("--h", required=True)
    sp = tree_sub.add_parser("cascade")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", default="1")
    sp.add_argument("--glen", type=int, required=True)
    sp.add_argument("--provider", default="default")
    sp = tree_sub.add_parser("path")
    _add_common(sp)
    sp.add_argument("--g", required=True)
    sp.add_argument("--h-list", required=True)
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--provider", default="default")
    sp = tree_sub.add_parser("search")
    _add_common(sp)
    sp.add_argument("--g", required=True)
    sp.add_argument("--h-radius", type=int, required=True)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--provider", default="default")

    p_ball = sub.add_parser("ball", help="enumerate a ShortLex ball")
    _add_common(p_ball)
    p_ball.add_argument("--radius", type=int, required=True)

    return parser


_HANDLERS = {
    "norm": _cmd_norm,
    "selfless": _cmd_selfless,
    "tree": _cmd_tree,
    "ball": _cmd_ball,
}


def _run(args: argparse.Namespace) -> Report:
    config = RunConfig(
        group=args.group,
        budget=args.budget,
        precision_bits=args.precision_bits,
        threads=args.threads,
        cache_dir=args.cache_dir,
        use_cache=not args.no_cache,
        kernel=args.kernel,
    )
    _apply_runtime(config)
    started = time.perf_counter()
    command = args.command
    if hasattr(args, "subaction"):
        command = f"{command}.{args.subaction}"
    body = _HANDLERS[args.command](args, config)
    report = Report(command=command, body=body, timing_seconds=time.perf_counter() - started)
    report.meta["threads"] = config.threads
    report.meta["kernel"] = _kernels.active_backend()
    return report


def run_command(argv: list[str]) -> Report:
    """Parse argv, run the command, and return the structured report."""
    return _run(build_parser().parse_args(argv))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse misuse is a parse failure; --help and friends exit cleanly
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        report = _run(args)
    except ParseError as exc:
        print(error_object("parse", str(exc)))
        return EXIT_PARSE
    except BudgetExceededError as exc:
        print(error_object("budget", str(exc), predicted=exc.predicted, budget=exc.budget))
        return EXIT_BUDGET
    except HypothesisViolationError as exc:
        print(error_object("hypothesis", str(exc)))
        return EXIT_HYPOTHESIS
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
