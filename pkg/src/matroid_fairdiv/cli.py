"""Command-line entry point: ``matroid-fairdiv <command> ...``.

Exit codes: 0 success, 1 usage/parse/validation error, 2 capability error
(valuation class or brute-force size limit), 3 verification mismatch or a
broken internal invariant.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import io as fio
from .algorithms import alg_mms, alg_pmms
from .errors import CapabilityError, ContractError, InvariantError, ValidationError
from .fairness import (
    as_fraction,
    certify_no_mms_allocation,
    fixture,
    is_ef1,
    is_envy_free,
    is_mms,
    is_pmms,
)
from .oracles import exhaustive_max_welfare, exhaustive_mms
from .shares import SharesTable, brute_shares_for_instance, shares_for_instance
from .valuations import validate_matroid_axioms

EXIT_OK, EXIT_USAGE, EXIT_CAPABILITY, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationMismatch(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt_set(s) -> str:
    return ",".join(str(g) for g in sorted(s)) or "-"


def _emit(out, rows) -> None:
    for row in rows:
        out.write("\t".join(str(c) for c in row) + "\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path: str, validate: bool = False):
    return fio.parse_instance(_read(path), validate=validate)


def _parse_alpha(text: str) -> Fraction:
    try:
        return as_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--alpha must be a fraction P/Q in (0, 1], got {text!r}") from None


def _verify_solve(inst, report, args) -> list[tuple]:
    """Brute-force rechecks of a solve report; raises VerificationMismatch on disagreement."""
    rows = []
    try:
        best, _ = exhaustive_max_welfare(inst)
    except CapabilityError as exc:
        return [("verify", "skipped", str(exc))]
    if best != report.welfare:
        raise VerificationMismatch(f"welfare {report.welfare} but the exhaustive optimum is {best}")
    rows.append(("verify", "welfare", best))
    try:
        if args.fairness == "mms":
            brute = brute_shares_for_instance(inst)
            if brute.values != report.shares.values:
                raise VerificationMismatch(
                    f"fast shares {report.shares.values} differ from brute-force {brute.values}"
                )
            rows.append(("verify", "shares", ",".join(map(str, brute.values))))
            verdict = is_mms(inst, report.allocation, 1, brute)
        else:
            verdict = is_pmms(inst, report.allocation, 1, brute=True)
    except CapabilityError as exc:
        return rows + [("verify", "skipped", str(exc))]
    if not verdict.holds:
        raise VerificationMismatch(f"{args.fairness} check failed: {verdict.to_dict()['witness']}")
    rows.append(("verify", args.fairness, "holds"))
    return rows


def cmd_solve(args, out) -> int:
    inst = _load_instance(args.input)
    inst.require_rank()
    report = alg_mms(inst) if args.fairness == "mms" else alg_pmms(inst)
    verify_rows = _verify_solve(inst, report, args) if args.verify else []
    data = report.to_dict()
    if args.verify:
        data["verify"] = [list(r[1:]) for r in verify_rows]
    if args.json:
        out.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        rows = [
            ("algorithm", report.algorithm),
            ("m", inst.m),
            ("n", inst.n),
            ("welfare", report.welfare),
            ("steps", report.steps),
            ("unassigned", _fmt_set(report.unassigned)),
        ]
        if report.shares is not None:
            rows.append(("agent", "bundle", "value", "share"))
            rows += [(i, _fmt_set(b), report.values[i], report.shares.values[i])
                     for i, b in enumerate(report.allocation.bundles)]
        else:
            rows.append(("agent", "bundle", "value", "max_pair_share"))
            for i, b in enumerate(report.allocation.bundles):
                worst = max((mu for (a, _), mu in report.pair_shares.items() if a == i), default=0)
                rows.append((i, _fmt_set(b), report.values[i], worst))
        _emit(out, rows + verify_rows)
    if args.figure:
        from .plotting import plot_solve

        plot_solve(data, args.figure)
    return EXIT_OK


def cmd_shares(args, out) -> int:
    inst = _load_instance(args.input)
    if args.k < 1:
        raise UsageError("--k must be a positive integer")
    fast = shares_for_instance(inst, args.k)
    brute: SharesTable | None
    note = "checked"
    try:
        brute = brute_shares_for_instance(inst, args.k)
    except CapabilityError as exc:
        brute, note = None, f"skipped: {exc}"
    if brute is not None and brute.values != fast.values:
        raise VerificationMismatch(f"fast shares {fast.values} differ from brute-force {brute.values}")
    if args.json:
        doc = {"k": args.k, "fast": fast.to_dict(),
               "brute": None if brute is None else brute.values, "cross_check": note}
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        rows = [("k", args.k), ("agent", "share", "brute", "witness")]
        for i, mu in enumerate(fast.values):
            wit = "|".join(_fmt_set(p) for p in fast.witnesses[i])
            rows.append((i, mu, "-" if brute is None else brute.values[i], wit))
        rows.append(("cross_check", note))
        _emit(out, rows)
    if args.figure:
        from .plotting import plot_shares

        plot_shares(args.k, fast.values, None if brute is None else brute.values, args.figure)
    return EXIT_OK


def cmd_check(args, out) -> int:
    inst = _load_instance(args.input)
    alloc = fio.parse_allocation(_read(args.allocation), inst.m)
    if alloc.m != inst.m:
        raise ValidationError(f"allocation is over {alloc.m} goods, instance has {inst.m}")
    alpha = _parse_alpha(args.alpha)
    prop = args.property
    if prop == "ef":
        verdict = is_envy_free(inst, alloc)
    elif prop == "ef1":
        verdict = is_ef1(inst, alloc)
    elif prop == "mms":
        if inst.all_rank and not args.brute:
            shares = shares_for_instance(inst)
        else:
            shares = SharesTable(inst.n, inst.goods, [exhaustive_mms(v, inst.n) for v in inst.valuations])
        verdict = is_mms(inst, alloc, alpha, shares)
    else:
        verdict = is_pmms(inst, alloc, alpha, brute=args.brute)
    if args.json:
        out.write(json.dumps(verdict.to_dict(), sort_keys=True) + "\n")
    else:
        rows = [("property", prop), ("alpha", f"{alpha.numerator}/{alpha.denominator}"),
                ("holds", "yes" if verdict.holds else "no")]
        for key, val in sorted((verdict.to_dict()["witness"] or {}).items()):
            rows.append(("witness", key, val))
        _emit(out, rows)
    return EXIT_OK


def cmd_certify(args, out) -> int:
    inst = _load_instance(args.input)
    verdict = certify_no_mms_allocation(inst)
    if args.json:
        out.write(json.dumps(verdict.to_dict(), sort_keys=True) + "\n")
        return EXIT_OK
    w = verdict.witness
    rows = [("shares", ",".join(map(str, w["shares"])))]
    if verdict.holds:
        rows.append(("certified", f"no MMS allocation among all {w['allocations']} allocations"))
    else:
        rows.append(("counterexample", "|".join(_fmt_set(b) for b in w["allocation"])))
    _emit(out, rows)
    return EXIT_OK


def cmd_gen(args, out) -> int:
    if args.fixture:
        fx = fixture(args.fixture)
        text = fio.serialize_instance(fx.instance)
        if args.reference:
            if fx.reference_allocation is None:
                raise UsageError(f"fixture {args.fixture} has no reference allocation")
            text = fio.serialize_allocation(fx.reference_allocation)
    else:
        missing = [f for f in ("family", "n", "m", "seed") if getattr(args, f) is None]
        if missing:
            raise UsageError("gen needs --fixture or all of " + ", ".join("--" + f for f in missing))
        cfg = fio.GeneratorConfig(seed=args.seed, family=args.family, n=args.n, m=args.m,
                                  blocks=args.blocks, vertices=args.vertices, slots=args.slots,
                                  dim=args.dim, density=args.density)
        try:
            text = fio.serialize_instance(fio.generate(cfg))
        except ContractError as exc:
            raise UsageError(str(exc)) from None
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    inst = _load_instance(args.input)
    rows = [("m", inst.m), ("n", inst.n), ("agent", "kind", "matroid_axioms")]
    failed = False
    for i, v in enumerate(inst.valuations):
        target = v if v.is_matroid_rank else getattr(v, "matroid", None)
        if target is None:
            status = "n/a"
        else:
            ok = validate_matroid_axioms(target)
            failed |= not ok
            status = "ok" if ok else "violated"
        rows.append((i, v.kind, status))
    if failed:
        # rerun through the parser for the axiom name and witness
        _load_instance(args.input, validate=True)
    _emit(out, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="matroid-fairdiv",
                description="Fair allocations of indivisible goods under matroid-rank valuations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="welfare-maximizing MMS or PMMS allocation")
    s.add_argument("--fairness", choices=("mms", "pmms"), required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--verify", action="store_true", help="recheck with brute-force oracles")
    s.add_argument("--json", action="store_true")
    s.add_argument("--figure", metavar="PATH", help="also write a bar chart of values vs shares")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("shares", help="maximin share of every agent")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--figure", metavar="PATH")
    s.set_defaults(func=cmd_shares)

    s = sub.add_parser("check", help="test an allocation for a fairness property")
    s.add_argument("--property", choices=("ef", "ef1", "mms", "pmms"), required=True)
    s.add_argument("--alpha", default="1", help="approximation factor P/Q (default 1)")
    s.add_argument("--input", required=True)
    s.add_argument("--allocation", required=True)
    s.add_argument("--brute", action="store_true", help="use exhaustive shares")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("certify-no-mms", help="exhaustively decide MMS existence")
    s.add_argument("--input", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("gen", help="write a seeded random instance or a named fixture")
    s.add_argument("--fixture", choices=("xos-4", "wrank-4", "ef1-not-pmms"))
    s.add_argument("--reference", action="store_true", help="with --fixture, write its reference allocation")
    s.add_argument("--family", choices=fio.FAMILIES)
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--blocks", type=int)
    s.add_argument("--vertices", type=int)
    s.add_argument("--slots", type=int)
    s.add_argument("--dim", type=int)
    s.add_argument("--density", type=int, default=40, help="transversal edge percentage")
    s.add_argument("--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("validate", help="exhaustively check every matroid in an instance")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValidationError as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_USAGE
    except CapabilityError as exc:
        err.write(f"unsupported: {exc}\n")
        return EXIT_CAPABILITY
    except (VerificationMismatch, InvariantError) as exc:
        err.write(f"VERIFICATION FAILED: {exc}\n")
        return EXIT_MISMATCH
    except ContractError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
