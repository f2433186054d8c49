"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse or validation failure,
3 cap exceeded. Diagnostics go to stderr, data to stdout.
"""
from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import CapExceededError, ParseError, ValidationError
from .instance import (
    Instance,
    Matching,
    compute_range,
    format_instance,
    parse_instance,
)
from .posets import (
    Dag,
    check_realization,
    enumerate_downsets_bruteforce,
    parse_dag,
)
from .pathdecomp import (
    construct_path_decomposition,
    format_decomposition,
    parse_decomposition,
    pathwidth_exact_tiny,
    to_nice,
    validate_decomposition,
)
from .downsets import count_downsets
from .rotations import all_stable_matchings_bruteforce, rotation_digraph
from .fairness import (
    balanced_bruteforce,
    count_stable_matchings,
    median_stable_matching,
    sample_stable_matchings,
    sex_equal_bruteforce,
)
from .realize import (
    realize_attr6,
    realize_bounded3,
    realize_complete,
    realize_list2inf,
    realize_range,
    construct_instance,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _print_matching(inst: Instance, mu: Matching, out) -> None:
    for m, w in mu.sorted_pairs():
        print(f"{inst.men_labels[m]} {inst.women_labels[w]}", file=out)


def _load_coloring(path: str, g: Dag) -> dict[tuple[int, int], int]:
    colors = {}
    for raw in _read(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"bad coloring line: {line!r}")
        try:
            u, v, c = (int(t) for t in parts)
        except ValueError:
            raise ParseError(f"bad coloring line: {line!r}") from None
        colors[(u, v)] = c
    for e in g.edges:
        if e not in colors:
            raise ParseError(f"coloring file misses edge {e}")
    return colors


def _cmd_realize(args) -> int:
    g = parse_dag(_read(args.poset))
    sidecars: list[tuple[str, str]] = []
    if args.model == "generic":
        colors = _load_coloring(args.coloring, g) if args.coloring else None
        inst = construct_instance(g, colors=colors)
    elif args.model == "complete":
        inst = realize_complete(g)
    elif args.model == "bounded3":
        inst = realize_bounded3(g)
    elif args.model == "attr6":
        res = realize_attr6(g)
        inst = res.instance
        lines = []
        for label, prof in zip(
            list(inst.men_labels) + list(inst.women_labels),
            list(res.men_profiles) + list(res.women_profiles),
        ):
            pts = " ".join(f"{x.numerator}/{x.denominator}" for x in prof.point)
            ws = " ".join(
                f"{x.numerator}/{x.denominator}"
                for x in list(prof.weights) + [prof.constant]
            )
            lines.append(f"point {label}: {pts}")
            lines.append(f"weights {label}: {ws}")
        sidecars.append((".profiles", "\n".join(lines) + "\n"))
    elif args.model == "list2inf":
        res = realize_list2inf(g, master_side=args.master_side)
        inst = res.instance
        lines = []
        for name, master in (("LM1", res.lm1), ("LM2", res.lm2)):
            labels = (
                inst.women_labels if res.master_side == "m" else inst.men_labels
            )
            lines.append(f"{name}: " + " ".join(labels[i] for i in master))
        for i in sorted(res.man_group if res.master_side == "m" else res.woman_group):
            group = (res.man_group if res.master_side == "m" else res.woman_group)[i]
            who = (inst.men_labels if res.master_side == "m" else inst.women_labels)[i]
            lines.append(f"group {who}: {group}")
        sidecars.append((".masters", "\n".join(lines) + "\n"))
    elif args.model == "range":
        if not args.decomp:
            raise ValidationError("--model range requires --decomp")
        x = parse_decomposition(_read(args.decomp))
        if not validate_decomposition(g, x):
            raise ValidationError("decomposition is not valid for the poset")
        inst = realize_range(g, to_nice(g, x))
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown model {args.model}")
    Path(args.output).write_text(format_instance(inst), encoding="utf-8")
    for suffix, text in sidecars:
        Path(args.output + suffix).write_text(text, encoding="utf-8")
    return 0


def _cmd_analyze(args) -> int:
    inst = parse_instance(_read(args.instance))
    dg = rotation_digraph(inst)
    print(f"men {inst.n_men} women {inst.n_women} complete {'yes' if inst.is_complete else 'no'}")
    print(f"rotations {len(dg.rotations)}")
    for rho in dg.rotations:
        cycle = "".join(
            f"({inst.men_labels[m]},{inst.women_labels[w]})" for m, w in rho.pairs
        )
        print(f"rho{rho.id + 1}: {cycle}")
    print(f"edges {len(dg.edges)}")
    for (a, b), rules in sorted(dg.edges.items()):
        tag = "".join(str(r) for r in sorted(rules))
        print(f"rho{a + 1} -> rho{b + 1} rule={tag}")
    if inst.is_complete:
        profile = compute_range(inst)
        print(f"range {profile.k}")
        for m in range(inst.n_men):
            print(f"minrank {inst.men_labels[m]}: {profile.orank_men[m]}")
        for w in range(inst.n_women):
            print(f"minrank {inst.women_labels[w]}: {profile.orank_women[w]}")
        _dg, x = construct_path_decomposition(inst)
        print(f"decomposition width {x.width} bags {len(x.bags)}")
    else:
        print("range n/a (incomplete instance)")
    if args.dot:
        Path(args.dot).write_text(dg.to_dot(inst), encoding="utf-8")
    return 0


def _cmd_count(args) -> int:
    if args.dag:
        if not args.decomp:
            raise ValidationError("count --dag requires --decomp")
        g = parse_dag(_read(args.dag))
        x = parse_decomposition(_read(args.decomp))
        if not validate_decomposition(g, x):
            raise ValidationError("decomposition is not valid for the DAG")
        print(count_downsets(g, to_nice(g, x)))
        return 0
    if not args.instance:
        raise ValidationError("count needs --instance or --dag")
    paths = args.instance
    texts = [_read(p) for p in paths]  # every path readable before any output
    count_one = lambda text: count_stable_matchings(parse_instance(text))
    if len(paths) == 1:
        print(count_one(texts[0]))
        return 0
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        for path, value in zip(paths, pool.map(count_one, texts)):
            print(f"{path}: {value}")
    return 0


def _cmd_sample(args) -> int:
    inst = parse_instance(_read(args.instance))
    rng = random.Random(args.seed)
    for i, mu in enumerate(sample_stable_matchings(inst, rng, args.draws)):
        if i:
            print()
        _print_matching(inst, mu, sys.stdout)
    return 0


def _cmd_median(args) -> int:
    inst = parse_instance(_read(args.instance))
    mu = median_stable_matching(inst, upper=args.upper)
    _print_matching(inst, mu, sys.stdout)
    print(f"N {count_stable_matchings(inst)}")
    return 0


def _cmd_fair(args) -> int:
    inst = parse_instance(_read(args.instance))
    if args.objective == "sexequal":
        mu, scores = sex_equal_bruteforce(inst)
    else:
        mu, scores = balanced_bruteforce(inst)
    _print_matching(inst, mu, sys.stdout)
    print(f"SM {scores.s_men}")
    print(f"SW {scores.s_women}")
    print(f"delta {scores.delta}")
    print(f"beta {scores.beta}")
    return 0


def _cmd_verify(args) -> int:
    g = parse_dag(_read(args.poset))
    inst = parse_instance(_read(args.instance))
    if check_realization(g, inst):
        print("ok")
        return 0
    print("mismatch", file=sys.stderr)
    return 2


def _cmd_oracle(args) -> int:
    if args.oracle_cmd == "count":
        if args.dag:
            g = parse_dag(_read(args.dag))
            print(len(enumerate_downsets_bruteforce(g)))
        elif args.instance:
            inst = parse_instance(_read(args.instance))
            print(len(all_stable_matchings_bruteforce(inst)))
        else:
            raise ValidationError("oracle count needs --instance or --dag")
    elif args.oracle_cmd == "matchings":
        inst = parse_instance(_read(args.instance))
        for i, mu in enumerate(all_stable_matchings_bruteforce(inst)):
            if i:
                print()
            _print_matching(inst, mu, sys.stdout)
    elif args.oracle_cmd == "pathwidth":
        g = parse_dag(_read(args.dag))
        width, x = pathwidth_exact_tiny(g)
        print(width)
        if args.output:
            Path(args.output).write_text(format_decomposition(x), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smposet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="construct an instance realizing a poset")
    p.add_argument("--model", required=True,
                   choices=["generic", "complete", "bounded3", "attr6", "list2inf", "range"])
    p.add_argument("--poset", required=True)
    p.add_argument("--decomp")
    p.add_argument("--coloring")
    p.add_argument("--master-side", choices=["m", "w"], default="m")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("analyze", help="rotations, digraph, range, decomposition width")
    p.add_argument("--instance", required=True)
    p.add_argument("--dot")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("count", help="count stable matchings or downsets")
    p.add_argument("--instance", nargs="+")
    p.add_argument("--dag")
    p.add_argument("--decomp")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("sample", help="uniform stable matchings")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--draws", type=int, default=1)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("median", help="median stable matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--upper", action="store_true")
    p.set_defaults(func=_cmd_median)

    p = sub.add_parser("fair", help="sex-equal or balanced stable matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--objective", required=True, choices=["sexequal", "balanced"])
    p.set_defaults(func=_cmd_fair)

    p = sub.add_parser("verify", help="check an instance realizes a poset")
    p.add_argument("--poset", required=True)
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="brute-force counterparts for CI comparison")
    osub = p.add_subparsers(dest="oracle_cmd", required=True)
    oc = osub.add_parser("count")
    oc.add_argument("--instance")
    oc.add_argument("--dag")
    om = osub.add_parser("matchings")
    om.add_argument("--instance", required=True)
    op = osub.add_parser("pathwidth")
    op.add_argument("--dag", required=True)
    op.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
