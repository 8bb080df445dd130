"""Command-line interface: ``rfext <command> ...``.

Exit codes: 0 success, 1 reject or failed property, 2 usage error, bad
input or infeasible parameters.  Secrets are read from files; keys go to
standard output as hex.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import bits as _bits
from .adversary import AttackNotApplicable, FlatDistribution, run_attack_experiment
from .extractor import ExtractorParams, Infeasible, Variant, derive_params, generate, reproduce
from .fileformat import FormatError, HelperFile
from .fuzzy import FuzzyParams, derive_fuzzy_params, fuzzy_gen, fuzzy_rep, make_fuzzy_params
from .gf2k import Basis
from .linearcode import code_from_key, make_code
from .rng import seeded_bits

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _emit(fields: dict[str, object], csv: bool = False, out=None) -> None:
    out = out or sys.stdout
    if csv:
        print(",".join(fields), file=out)
        print(",".join(str(v) for v in fields.values()), file=out)
    else:
        for k, v in fields.items():
            print(f"{k}={v}", file=out)


# --- secret input ---


def read_secret(path: str, fmt: str, n: int) -> int:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if fmt == "bits":
            value, length = _bits.from_bitstring(data.decode("ascii"))
            if length != n:
                raise UsageError(f"input has {length} bits, expected {n}")
            return value
        if fmt == "hex":
            text = "".join(data.decode("ascii").split())
            if len(text) != (n + 3) // 4:
                raise UsageError(f"input has {len(text)} hex digits, expected {(n + 3) // 4}")
            return _bits.from_hex(text, n)
        if len(data) != (n + 7) // 8:
            raise UsageError(f"input has {len(data)} bytes, expected {(n + 7) // 8}")
        raw = int.from_bytes(data, "big")
        pad = len(data) * 8 - n
        if raw & _bits.mask(pad):
            raise UsageError("nonzero padding bits after the last input bit")
        return raw >> pad
    except (UnicodeDecodeError, ValueError) as exc:
        raise UsageError(f"malformed {fmt} input: {exc}") from None


def _seed_element(field, seed: Optional[int]):
    if seed is None:
        return None
    return field.element(seeded_bits(seed, 0, field.degree))


def _note_seed(seed: Optional[int]) -> None:
    if seed is not None:
        print("note: --seed gives a deterministic seed i; security needs OS randomness", file=sys.stderr)


def _write_helper(path: str, hf: HelperFile) -> None:
    try:
        Path(path).write_bytes(hf.to_bytes())
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _read_helper(path: str) -> HelperFile:
    try:
        return HelperFile.from_bytes(Path(path).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except FormatError as exc:
        raise UsageError(f"malformed helper file: {exc}") from None


# --- parameter resolution ---


def _errorless_params(args) -> ExtractorParams:
    basis = Basis.parse(args.basis)
    if args.v is not None or args.ell is not None:
        if args.v is None or args.ell is None:
            raise UsageError("--v and --ell go together")
        variant = Variant(args.variant)
        total = args.n if variant.is_dkrs else args.n // 2
        beta = total - (2 * args.v if variant.is_dkrs else args.v) - args.ell
        try:
            return ExtractorParams(args.n, args.v, args.ell, variant, beta, basis=basis)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.m is None or args.logd is None:
        raise UsageError("give --m and --logd, or explicit --v and --ell")
    try:
        p = derive_params(args.n, args.m, args.logd, args.loge, args.variant, basis)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(p, Infeasible):
        raise UsageError(f"infeasible: {p.constraint} constraint violated ({p.detail})")
    return p


def _code(args):
    try:
        if args.code_key:
            return code_from_key(args.code_key)
        if args.code is None or args.n is None or args.t is None:
            raise UsageError("give --code FAMILY --n N --t T, or --code-key")
        return make_code(args.code, args.n, args.t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fuzzy_params(args) -> FuzzyParams:
    code = _code(args)
    try:
        if args.v is not None or args.ell is not None:
            if args.v is None or args.ell is None:
                raise UsageError("--v and --ell go together")
            return make_fuzzy_params(code, args.v, args.ell, truncate=args.truncate)
        if args.m is None or args.logd is None:
            raise UsageError("give --m and --logd, or explicit --v and --ell")
        p = derive_fuzzy_params(code, args.m, args.logd, args.loge, truncate=args.truncate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(p, Infeasible):
        raise UsageError(f"infeasible: {p.constraint} constraint violated ({p.detail})")
    return p


# --- commands ---


def cmd_params(args) -> int:
    if args.variant == "fuzzy":
        fields = _fuzzy_params(args).report()
    else:
        if args.n is None:
            raise UsageError("--n is required")
        fields = _errorless_params(args).report()
    fields["feasible"] = "yes"
    _emit(fields, args.csv)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = _errorless_params(args)
    w = read_secret(args.input, args.format, params.n)
    _note_seed(args.seed)
    key, helper = generate(w, params, _seed_element(params.field, args.seed))
    _write_helper(args.helper, HelperFile.from_errorless(params, helper))
    print(key.hex())
    return EXIT_OK


def cmd_rep(args) -> int:
    hf = _read_helper(args.helper)
    try:
        params = hf.errorless_params()
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    w = read_secret(args.input, args.format, params.n)
    key = reproduce(w, hf.errorless_helper(params), params)
    if key is None:
        print("REJECT")
        return EXIT_REJECT
    print(key.hex())
    return EXIT_OK


def cmd_fuzzy_gen(args) -> int:
    params = _fuzzy_params(args)
    w = read_secret(args.input, args.format, params.n)
    _note_seed(args.seed)
    key, helper = fuzzy_gen(w, params, _seed_element(params.field, args.seed))
    _write_helper(args.helper, HelperFile.from_fuzzy(params, helper))
    print(key.hex())
    return EXIT_OK


def cmd_fuzzy_rep(args) -> int:
    hf = _read_helper(args.helper)
    try:
        params = hf.fuzzy_params()
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    w = read_secret(args.input, args.format, params.n)
    key = fuzzy_rep(w, hf.fuzzy_helper(params), params)
    if key is None:
        print("REJECT")
        return EXIT_REJECT
    print(key.hex())
    return EXIT_OK


def _attack_params(args) -> tuple[ExtractorParams, list[str]]:
    """Derive parameters, shrinking n and m by 2 while the seed field has odd degree.

    The forger relies on the parity-split basis, which needs an even field
    degree; dropping two bits of w keeps n even and n - m fixed.
    """
    n, m = args.n, args.m
    notes: list[str] = []
    while True:
        try:
            p = derive_params(n, m, args.logd, args.loge, args.variant)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if isinstance(p, Infeasible):
            raise UsageError(f"infeasible: {p.constraint} constraint violated ({p.detail})")
        if p.field_degree % 2 == 0:
            break
        if args.basis == "standard":
            return p, notes
        notes.append(f"field degree {p.field_degree} is odd at n={n}; dropping two bits of w")
        n, m = n - 2, m - 2
        if n < 4 or m <= 0:
            raise UsageError("no even-degree field reachable by truncation")
    return p.with_basis(Basis.STANDARD if args.basis == "standard" else Basis.PARITY_SPLIT), notes


def cmd_attack(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    params, notes = _attack_params(args)
    for note in notes:
        print(f"adjustment={note}")
    try:
        dist = FlatDistribution.zero_top_of_b(params, int(params.m))
        report = run_attack_experiment(params, dist, args.trials, args.seed)
    except (AttackNotApplicable, ValueError) as exc:
        raise UsageError(f"outside the attackable regime: {exc}") from None
    if args.csv:
        print(report.csv_header())
        print(report.csv_row())
    else:
        print(report.to_text())
    print("randomness=deterministic SHAKE-256 per-trial stream (experiment only)")
    return EXIT_OK if report.passed else EXIT_REJECT


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = run_suites(names, n=args.n, quick=not args.full, out=sys.stdout)
    return EXIT_OK if ok else EXIT_REJECT


# --- parser ---


def _add_param_flags(p: argparse.ArgumentParser, with_variant: bool = True) -> None:
    p.add_argument("--n", type=int, help="secret length in bits")
    p.add_argument("--m", type=_rational, help="min-entropy of the secret")
    p.add_argument("--logd", type=_rational, help="log2(1/delta), robustness")
    p.add_argument("--loge", type=_rational, default=Fraction(0), help="log2(1/eps), uniformity")
    p.add_argument("--v", type=int, help="explicit tag length (skips the solver)")
    p.add_argument("--ell", type=int, help="explicit key length (with --v)")
    if with_variant:
        p.add_argument("--variant", default="new", choices=[v.value for v in Variant])
        p.add_argument("--basis", default="standard", choices=["standard", "parity-split"])


def _add_code_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", choices=["hamming", "bch", "exhaustive-random"], help="code family")
    p.add_argument("--code-key", help="full code key such as bch-255-8")
    p.add_argument("--t", type=int, help="number of correctable errors")
    p.add_argument("--truncate", action="store_true", help="drop the last bit of c when n - k is odd (m decreases by 1)")


def _add_io(p: argparse.ArgumentParser, gen: bool) -> None:
    p.add_argument("--input", required=True, help="file holding the secret")
    p.add_argument("--format", default="bits", choices=["bits", "hex", "raw"])
    p.add_argument("--helper", required=True, help="helper file to " + ("write" if gen else "read"))
    if gen:
        p.add_argument("--seed", type=int, help="derive the seed i deterministically (testing only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfext", description="Robust extractors and fuzzy extractors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="solve for tag and key lengths")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=_rational)
    p.add_argument("--logd", type=_rational)
    p.add_argument("--loge", type=_rational, default=Fraction(0))
    p.add_argument("--v", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--variant", default="new", choices=[v.value for v in Variant] + ["fuzzy"])
    p.add_argument("--basis", default="standard", choices=["standard", "parity-split"])
    _add_code_flags(p)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("gen", help="extract a key and write the helper file")
    _add_param_flags(p)
    _add_io(p, gen=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rep", help="reproduce a key from a helper file")
    _add_io(p, gen=False)
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("fuzzy-gen", help="fuzzy extraction with a syndrome sketch")
    _add_param_flags(p, with_variant=False)
    _add_code_flags(p)
    _add_io(p, gen=True)
    p.set_defaults(func=cmd_fuzzy_gen)

    p = sub.add_parser("fuzzy-rep", help="fuzzy reproduction from a close reading")
    _add_io(p, gen=False)
    p.set_defaults(func=cmd_fuzzy_rep)

    p = sub.add_parser("attack", help="run the seed-shift forger")
    p.add_argument("--variant", default="dkrs-post", choices=[v.value for v in Variant])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--logd", type=int, required=True)
    p.add_argument("--loge", type=int, default=0)
    p.add_argument("--basis", default="parity-split", choices=["standard", "parity-split"])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("verify", help="run the exact-oracle property suite")
    p.add_argument("--suite", default="all", choices=["all", "field", "code", "params", "uniformity", "robustness", "attack", "mac", "sketch", "fuzzy", "lemmas"])
    p.add_argument("--n", type=int, help="restrict size-dependent suites to this n")
    p.add_argument("--full", action="store_true", help="larger grids and trial counts")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
