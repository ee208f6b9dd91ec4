"""Command-line front end.

JSON in, JSON out (``--json``), with a small table renderer for human use.
Exit codes: 0 success, 1 verification failure, 2 usage errors.  All sampling
is seeded (``--seed``), so reports are byte-identical across runs for fixed
inputs, primes and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .catalog import (
    THEOREM_NAMES,
    UnknownName,
    beta_conic,
    beta_lines,
    builtin,
    builtin_names,
    verify_appendix,
    verify_theorem,
)
from .exterior import AlternatingForm, form_kernel, form_rank, pfaffian, random_unimodular
from .linsys import DEFAULT_PRIMES, LinearSystem, generic_rank, gr_intersection, pfaffian_cubic
from .planes import classify_cr4_plane, is_constant_rank4, normalize_general_plane, recover_cdf
from .planes import NotCR4, NotGeneralType
from .scalars import format_rational
from .scroll import ScrollDatum, restricted_quadric_system_dim, z_membership
from .stability import decide_stability


def _parse_primes(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_system(args) -> LinearSystem:
    if getattr(args, "builtin", None):
        return builtin(args.builtin).system
    if not args.input:
        raise SystemExit(2)
    return LinearSystem.from_json(_load_json(args.input))


def _load_form(path: str) -> AlternatingForm:
    return AlternatingForm.from_json(_load_json(path))


def _emit(args, payload: dict, table: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(table)


def _add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--input", help="path to a JSON system or form")
        group.add_argument(
            "--builtin", choices=builtin_names(), help="use a named catalog system"
        )
    p.add_argument("--primes", type=_parse_primes, default=DEFAULT_PRIMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")


def cmd_rank(args) -> int:
    A = _load_system(args)
    rank = generic_rank(A, random.Random(args.seed))
    pf_zero = pfaffian_cubic(A).is_zero()
    payload = {"generic_rank": rank, "pfaffian_cubic_zero": pf_zero}
    sign = "=" if pf_zero else "!="
    _emit(args, payload, f"generic rank {rank}, Pf-cubic {sign} 0")
    return 0


def cmd_pfaffian(args) -> int:
    data = _load_json(args.input) if args.input else builtin(args.builtin).system.to_json()
    if "terms" in data:
        value = pfaffian(AlternatingForm.from_json(data))
        payload = {"pfaffian": format_rational(value)}
        _emit(args, payload, f"Pf = {format_rational(value)}")
    else:
        cubic = pfaffian_cubic(LinearSystem.from_json(data))
        payload = {"pfaffian_cubic": cubic.to_json(), "zero": cubic.is_zero()}
        _emit(args, payload, f"Pf cubic: {cubic!r}")
    return 0


def cmd_gr_intersect(args) -> int:
    A = _load_system(args)
    report = gr_intersection(A, args.primes)
    lines = ["p,count,type"]
    for p in sorted(report.counts):
        lines.append(f"{p},{report.counts[p]},{report.candidate_type}")
    _emit(args, report.to_json(), "\n".join(lines))
    return 0


def cmd_stability(args) -> int:
    A = _load_system(args)
    verdict = decide_stability(A, args.primes, assume_pi_g=args.assume_pi_g)
    table = f"verdict: {verdict.tag}"
    if verdict.witness is not None:
        w = verdict.witness
        table += f" (witness: s={w.s}, severity={w.severity}, dim U'={w.Uprime.dim})"
    _emit(args, verdict.to_json(), table)
    return 0


def cmd_classify_plane(args) -> int:
    B = _load_system(args)
    payload: dict = {}
    try:
        label = classify_cr4_plane(B, args.primes)
    except NotCR4 as exc:
        ok, ev = is_constant_rank4(B, args.primes)
        payload = {"label": "not_cr4", "evidence": ev.to_json()}
        _emit(args, payload, "label: not_cr4")
        return 0
    payload["label"] = label
    if label == "general":
        datum = recover_cdf(B)
        payload["cdf"] = datum.to_json()
        payload["normalizer"] = normalize_general_plane(B).to_json()
    _emit(args, payload, f"label: {label}")
    return 0


def cmd_scroll(args) -> int:
    B = _load_system(args) if (args.input or args.builtin) else builtin("pi_g").system
    datum = ScrollDatum.from_plane(B)
    payload: dict = {}
    lines: list[str] = []
    if args.quadric_dim:
        dim = restricted_quadric_system_dim(datum)
        payload["quadric_system_dim"] = dim
        lines.append(f"restricted quadric system dimension: {dim}")
    if args.member:
        theta = _load_form(args.member)
        member = z_membership(datum, theta)
        payload["member"] = member
        lines.append(f"scroll membership: {member}")
    if not payload:
        raise SystemExit(2)
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_orbit_sample(args) -> int:
    A = _load_system(args)
    rng = random.Random(args.seed)
    samples = []
    for _ in range(args.count):
        g = random_unimodular(rng)
        samples.append({"g": g.to_json(), "system": A.transformed(g).to_json()})
    payload = {"samples": samples}
    _emit(args, payload, json.dumps(payload, indent=2))
    return 0


def cmd_verify(args) -> int:
    names: list[str]
    if args.theorem == "all":
        names = list(THEOREM_NAMES) + ["appendix"]
    elif args.theorem == "planes":
        names = ["planes_not_stable"]
    else:
        names = [args.theorem]

    def run(name: str):
        if name == "appendix":
            return verify_appendix(args.primes, args.seed)
        return verify_theorem(name, args.primes, args.seed)

    if args.jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run, names))
    else:
        reports = [run(name) for name in names]

    all_ok = all(r.ok for r in reports)
    payload = {"ok": all_ok, "reports": [r.to_json() for r in reports]}
    lines = []
    for r in reports:
        for check, ok in r.checks.items():
            status = "pass" if ok else "FAIL"
            detail = r.details.get(check, "")
            suffix = f"  [{detail}]" if detail else ""
            lines.append(f"{r.name:20s} {check:32s} {status}{suffix}")
    _emit(args, payload, "\n".join(lines))
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfsys",
        description="Exact computations for linear systems of skew-symmetric forms on a 6-space.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("rank", help="generic member rank of a system")
    _add_common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("pfaffian", help="Pfaffian of a form, or the Pfaffian cubic of a system")
    _add_common(p)
    p.set_defaults(func=cmd_pfaffian)

    p = sub.add_parser("gr-intersect", help="point counts of the rank-2 locus over prime fields")
    _add_common(p)
    p.set_defaults(func=cmd_gr_intersect)

    p = sub.add_parser("stability", help="GIT stability verdict with certified witnesses")
    _add_common(p)
    p.add_argument("--assume-pi-g", action="store_true",
                   help="fail unless the system leads with the general-type normal form")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("classify-plane", help="orbit label of a constant-rank-4 plane")
    _add_common(p)
    p.set_defaults(func=cmd_classify_plane)

    p = sub.add_parser("scroll", help="scroll membership and quadric-system dimension")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--plane", dest="input", help="path to the base plane JSON")
    group.add_argument("--builtin", choices=builtin_names())
    p.add_argument("--member", help="path to a form JSON to test for scroll membership")
    p.add_argument("--quadric-dim", action="store_true")
    p.add_argument("--primes", type=_parse_primes, default=DEFAULT_PRIMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scroll)

    p = sub.add_parser("verify", help="run the classification verification suite")
    p.add_argument(
        "--theorem",
        default="all",
        choices=["all", "dim3", "dim4a", "dim4b", "dim5", "planes", "planes_not_stable",
                 "unstable_in_pf", "appendix"],
    )
    p.add_argument("--primes", type=_parse_primes, default=DEFAULT_PRIMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit-sample", help="transform a system by random unimodular elements")
    _add_common(p)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_orbit_sample)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnknownName, NotCR4, NotGeneralType, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
