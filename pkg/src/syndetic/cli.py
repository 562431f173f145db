"""Command-line front end.

Every verb writes a DecisionReport (stdout, or --out) and exits with the verdict's code:
0 proved, 1 refuted, 2 undecided-at-scale; errors exit with 3, bad flags with 64 and
tripped resource caps with 65.
"""

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .coloring import Coloring, coloring_to_set, set_to_coloring, verify_coloring
from .config import RunConfig, load_config
from .dynamics import (amenability_witness, replay_patterns, strong_amenability_witness,
                       subshift_intersection_check, subshift_patterns, subshift_union_check, witness_shift_check)
from .engine import (decide_fractionally_thick, decide_n_syndetic, set_spec, verify_syndetic_witness,
                     verify_thick_refutation)
from .errors import CriteriaMismatch, SyndeticError, UsageError
from .figures import repro_figures
from .groups import FreeGroup, Group, IntegerGroup, parse_group
from .logger import cli_logger, set_verbosity
from .reports import (SCHEMA_MODELS, ColoringModel, DecisionReport, MultisetWitness, PatternSetModel, ScsCertificate,
                      Scope, SymmetricPair, SyndeticWitness, ThickRefutation, TranslateTuple, Verdict,
                      load_report_or_certificate)
from .sets import Cylinder, SetExpr, load_set
from .store import CertificateStore
from .strong import build_scs_certificate, parse_epsilon, replay_multiset_witness, scs_falsify, verify_scs_certificate
from .symmetric import (VARIANTS, as_decision_report, dense_orbit_finite_exact, dense_orbit_via_symmetric,
                        replay_pair, symmetric_syndetic)

# flags that only steer where output goes; they are left out of the recorded command
OUTPUT_FLAGS = {"--out": True, "--emit-cert": True, "--store": False, "--verbose": False, "-v": False}


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--group", help="z, f2, free:3, z6, s3, d4, q8 or finite:PATH")
    common.add_argument("--set", dest="set_spec", help="JSON set spec (file or inline) or compact form")
    common.add_argument("--n", type=int, default=2, help="Order n (default: 2)")
    common.add_argument("--radius", type=int, help="Search radius (default from config)")
    common.add_argument("--window", help="Integer window LO:HI (write --window=-8:8 for a negative LO)")
    common.add_argument("--emit-cert", help="Write the certificate alone to this path")
    common.add_argument("--out", help="Write the report to this path instead of stdout")
    common.add_argument("--config", help="Key-value config file (default: $SYNDETIC_CONFIG or syndetic.env)")
    common.add_argument("--seed", type=int, help="Seed for randomized searches")
    common.add_argument("--store", action="store_true", help="Also store the report under the certificate directory")
    common.add_argument("--verbose", "-v", action="store_true", help="Verbose logging on stderr")
    return common


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="syndetic", description="Decide higher-order syndeticity with replayable certificates")
    verbs = parser.add_subparsers(dest="verb", required=True)
    common = _common()

    verbs.add_parser("check-nsyndetic", parents=[common], help="Is A n-syndetic?")
    verbs.add_parser("check-thick", parents=[common], help="Is B 1/n-thick?")

    p = verbs.add_parser("check-scs", parents=[common], help="Strong complete syndeticity: falsify F or certify")
    p.add_argument("--epsilon", default="1/4")
    p.add_argument("--F", dest="elements", help="Comma-separated translates to falsify")
    p.add_argument("--support-radius", type=int, default=4)
    p.add_argument("--max-size", type=int, default=12)
    p.add_argument("--max-mult", type=int, default=4)

    p = verbs.add_parser("build-scs-cert", parents=[common], help="Partition certificate for a letter cylinder")
    p.add_argument("--rank", type=int)
    p.add_argument("--epsilon", default="1/4")
    p.add_argument("--target", default="a")

    p = verbs.add_parser("verify-scs-cert", parents=[common], help="Verify a partition certificate file")
    p.add_argument("path")
    p.add_argument("--epsilon")

    p = verbs.add_parser("check-symmetric", parents=[common], help="Symmetric syndeticity")
    p.add_argument("--variant", choices=VARIANTS, default="plain")
    p.add_argument("--method", choices=["closure", "reduction"], default="reduction")

    p = verbs.add_parser("dense-orbit", parents=[common], help="Is A a dense orbit set?")
    p.add_argument("--method", choices=["auto", "subgroup", "symmetric"], default="auto")

    p = verbs.add_parser("subshift", parents=[common], help="Patterns, meets or unions of translates")
    p.add_argument("--mode", choices=["patterns", "meets", "unions"], default="meets")
    p.add_argument("--window-radius", type=int, default=1, help="Pattern window ball radius")
    p.add_argument("--translate-radius", type=int)

    p = verbs.add_parser("witness-shift", parents=[common], help="F-avoidance and pairwise meets")
    p.add_argument("--F", dest="elements", required=True)
    p.add_argument("--symmetric", action="store_true", help="Close F under inverses")

    p = verbs.add_parser("coloring", parents=[common], help="(F, n)-coloring round trip")
    p.add_argument("--F", dest="elements", default="")

    p = verbs.add_parser("amenability-witness", parents=[common], help="Non-amenability witness or ℤ sweep")
    p.add_argument("--epsilon", default="1/4")
    p.add_argument("--max-modulus", type=int, default=6)

    p = verbs.add_parser("strong-amenability-witness", parents=[common], help="F-avoiding 2-syndetic set search")
    p.add_argument("--F", dest="elements", required=True)
    p.add_argument("--max-modulus", type=int, default=8)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--max-cells", type=int, default=4)

    p = verbs.add_parser("verify", parents=[common], help="Replay a report or check a bare certificate")
    p.add_argument("path")

    p = verbs.add_parser("repro", parents=[common], help="Reproduce the figure bundle")
    p.add_argument("what", choices=["figures"])
    p.add_argument("--powers-window", default=f"1:{2 ** 20}")

    verbs.add_parser("schemas", parents=[common], help="Write JSON schemas of the report models")
    return parser


# --- argument helpers -----------------------------------------------------------

def _window(text: Optional[str]) -> Optional[Tuple[int, int]]:
    if not text:
        return None
    lo, sep, hi = text.partition(":")
    try:
        window = (int(lo), int(hi))
    except ValueError:
        raise UsageError(f"--window expects LO:HI, got {text!r}")
    if not sep or window[0] > window[1]:
        raise UsageError(f"--window expects LO:HI with LO ≤ HI, got {text!r}")
    return window


def _group(args) -> Group:
    return parse_group(args.group or "z")


def _set(args) -> Tuple[Group, SetExpr]:
    if not args.set_spec:
        raise UsageError("--set is required")
    group = parse_group(args.group) if args.group else None
    text = args.set_spec.strip()
    if group is None and not text.startswith("{") and not os.path.exists(text):
        group = IntegerGroup()
    return load_set(args.set_spec, group)


def _elements(text: str, group: Group) -> List:
    return [group.parse(t.strip()) for t in text.split(",") if t.strip()]


def _epsilon(text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return parse_epsilon(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"Bad --epsilon {text!r}: {e}")


def _n(args) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be positive, got {args.n}")
    return args.n


def recorded_command(argv: Sequence[str]) -> List[str]:
    """argv without the output-only flags"""
    out: List[str] = []
    skip = False
    for token in argv:
        if skip:
            skip = False
            continue
        name = token.split("=", 1)[0]
        if name in OUTPUT_FLAGS:
            skip = OUTPUT_FLAGS[name] and "=" not in token
            continue
        out.append(token)
    return out


# --- verbs ------------------------------------------------------------------------

def _check_nsyndetic(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    return decide_n_syndetic(A, _n(args), group, config, _window(args.window))


def _check_thick(args, config: RunConfig) -> DecisionReport:
    group, B = _set(args)
    return decide_fractionally_thick(B, _n(args), group, config, _window(args.window))


def _check_scs(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    eps = _epsilon(args.epsilon)
    question = f"strongly completely syndetic at ε={eps}"
    if args.elements:
        F = _elements(args.elements, group)
        witness = scs_falsify(A, eps, F, group, args.support_radius, args.max_size, args.max_mult, config)
        scale = {"support_radius": args.support_radius, "max_size": args.max_size, "max_mult": args.max_mult,
                 "seed": config.seed}
        if witness is not None:
            return DecisionReport(group=group.spec, set=set_spec(A, group), question=question + " with this F",
                                  verdict=Verdict.REFUTED, certificate=witness, scale=scale)
        return DecisionReport(group=group.spec, set=set_spec(A, group), question=question + " with this F",
                              verdict=Verdict.UNDECIDED, scope=Scope.ball(args.support_radius), scale=scale)
    if isinstance(group, FreeGroup) and isinstance(A, Cylinder) and len(A.word) == 1:
        cert = build_scs_certificate(group.rank, eps, target=group.format(A.word), config=config)
        return DecisionReport(group=group.spec, set=set_spec(A, group), question=question, verdict=Verdict.PROVED,
                              certificate=cert)
    raise UsageError("check-scs needs --F unless the set is a single-letter cylinder of a free group")


def _build_scs_cert(args, config: RunConfig) -> DecisionReport:
    named = _group(args) if args.group else None
    rank = args.rank or (named.rank if isinstance(named, FreeGroup) else 2)
    group = FreeGroup(rank)
    cert = build_scs_certificate(rank, _epsilon(args.epsilon), target=args.target, config=config)
    A = Cylinder(group.parse(args.target))
    return DecisionReport(group=group.spec, set=set_spec(A, group),
                          question=f"strongly completely syndetic at ε={cert.epsilon}", verdict=Verdict.PROVED,
                          certificate=cert)


def _verify_scs_cert(args, config: RunConfig) -> DecisionReport:
    with open(args.path, "r", encoding="utf-8") as f:
        cert = ScsCertificate.model_validate(json.load(f))
    check = verify_scs_certificate(cert, _epsilon(args.epsilon))
    return DecisionReport(group=f"f{cert.rank}", question="partition certificate is valid",
                          verdict=Verdict.PROVED if check.ok else Verdict.REFUTED, certificate=cert,
                          evidence=check.to_dict())


def _check_symmetric(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    report = symmetric_syndetic(A, args.variant, group, config, method=args.method,
                                radius=args.radius if args.radius is not None else 2)
    return as_decision_report(report, A, group, f"{args.variant} symmetrically syndetic")


def _dense_orbit(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    finite = group.is_finite
    if args.method == "subgroup" or (args.method == "auto" and finite):
        exact = dense_orbit_finite_exact(A, group, config)
        if args.method == "auto":
            other = dense_orbit_via_symmetric(A, group, config)
            if other.verdict != exact.verdict:
                raise CriteriaMismatch(f"Subgroup oracle says {exact.verdict.value}, symmetric-subset oracle says "
                                       f"{other.verdict.value}")
        return as_decision_report(exact, A, group, "dense orbit set")
    return as_decision_report(dense_orbit_via_symmetric(A, group, config, _window(args.window)), A, group,
                              "dense orbit set")


def _subshift(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    radius = args.radius if args.radius is not None else config.radius
    if args.mode == "patterns":
        window = list(group.ball(args.window_radius, config.ball_cap))
        model = subshift_patterns(A, window, radius, group, config)
        return DecisionReport(group=group.spec, set=set_spec(A, group), question="subshift patterns",
                              verdict=Verdict.PROVED, scope=Scope.ball(radius), certificate=model,
                              evidence={"patterns": len(model.patterns)})
    check = subshift_union_check if args.mode == "unions" else subshift_intersection_check
    return check(A, _n(args), group, radius, args.translate_radius, config)


def _witness_shift(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    radius = args.radius if args.radius is not None else config.radius
    return witness_shift_check(A, _elements(args.elements, group), group, radius, args.symmetric, config)


def _coloring(args, config: RunConfig) -> DecisionReport:
    group, A = _set(args)
    n = _n(args)
    radius = args.radius if args.radius is not None else 2
    F = _elements(args.elements, group)
    decision = decide_n_syndetic(A, n, group, config)
    if decision.verdict != Verdict.PROVED or not isinstance(decision.certificate, SyndeticWitness):
        return DecisionReport(group=group.spec, set=set_spec(A, group), question=f"({n})-coloring",
                              verdict=decision.verdict, scope=decision.scope,
                              evidence={"reason": f"A is {decision.verdict.value} as an {n}-syndetic set"})
    coloring = set_to_coloring(A, n, F, decision.certificate, group, radius, config)
    conflict = verify_coloring(coloring, group)
    _, back = coloring_to_set(coloring, group)
    ok = conflict is None and back.verdict == Verdict.PROVED
    return DecisionReport(group=group.spec, set=set_spec(A, group), question=f"(F, {n})-coloring",
                          verdict=Verdict.PROVED if ok else Verdict.REFUTED, scope=Scope.ball(radius),
                          certificate=coloring.to_model(group),
                          evidence={"conflict": conflict, "round_trip": back.evidence})


def _amenability(args, config: RunConfig) -> DecisionReport:
    return amenability_witness(_group(args), config, str(_epsilon(args.epsilon)), args.max_modulus)


def _strong_amenability(args, config: RunConfig) -> DecisionReport:
    group = _group(args)
    return strong_amenability_witness(group, _elements(args.elements, group), config, args.max_modulus,
                                      args.max_depth, args.max_cells)


def replay_certificate(cert, A: Optional[SetExpr], group: Group, config: RunConfig) -> Optional[bool]:
    """Independent re-check of a certificate; None when the kind has no standalone replay"""
    if isinstance(cert, ScsCertificate):
        return verify_scs_certificate(cert).ok
    if isinstance(cert, ColoringModel):
        return verify_coloring(Coloring.from_model(cert, group), group) is None
    if A is None:
        return None
    if isinstance(cert, SyndeticWitness):
        return verify_syndetic_witness(A, group, cert, config)
    if isinstance(cert, ThickRefutation):
        return verify_thick_refutation(A, group, cert, config)
    if isinstance(cert, MultisetWitness):
        return replay_multiset_witness(cert, A, group)
    if isinstance(cert, PatternSetModel):
        return replay_patterns(cert, A, group)
    if isinstance(cert, SymmetricPair):
        return replay_pair(A, group, cert, config)
    return None


def _verify(args, config: RunConfig) -> DecisionReport:
    with open(args.path, "r", encoding="utf-8") as f:
        doc = load_report_or_certificate(json.load(f))
    checks: Dict[str, object] = {}
    if isinstance(doc, DecisionReport):
        group = parse_group(doc.group)
        A = load_set(json.dumps(doc.set), group)[1] if doc.set else None
        cert = doc.certificate
        if doc.command:
            replayed = execute(doc.command, config)
            left = doc.model_dump(mode="json", exclude={"wall_time", "command"})
            right = replayed.model_dump(mode="json", exclude={"wall_time", "command"})
            checks["replay"] = left == right
            if left != right:
                checks["mismatch"] = sorted(k for k in left if left[k] != right.get(k))
        subject = doc.group
    else:
        cert = doc
        group = parse_group(f"f{doc.rank}") if isinstance(doc, ScsCertificate) else _group(args)
        A = _set(args)[1] if args.set_spec else None
        subject = group.spec
    if cert is not None and not isinstance(cert, TranslateTuple):
        replay = replay_certificate(cert, A, group, config)
        if replay is not None:
            checks["certificate"] = replay
    if not checks:
        raise UsageError("Nothing to verify: give a report with a command, or a certificate with --group/--set")
    ok = all(v for k, v in checks.items() if k in ("replay", "certificate"))
    return DecisionReport(group=subject, question=f"verify {os.path.basename(args.path)}",
                          verdict=Verdict.PROVED if ok else Verdict.REFUTED, evidence=checks)


def _repro(args, config: RunConfig) -> DecisionReport:
    out_dir = args.out or "figures"
    bundle = repro_figures(out_dir, config, _window(args.powers_window))
    return DecisionReport(group="z", question="repro figures", verdict=Verdict.PROVED, evidence=bundle)


def write_schemas(out_dir: str) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, model in SCHEMA_MODELS.items():
        path = os.path.join(out_dir, f"{name}.schema.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(model.model_json_schema(), f, indent=2, sort_keys=True, ensure_ascii=False)
        written.append(path)
    return written


COMMANDS: Dict[str, Callable] = {
    "check-nsyndetic": _check_nsyndetic,
    "check-thick": _check_thick,
    "check-scs": _check_scs,
    "build-scs-cert": _build_scs_cert,
    "verify-scs-cert": _verify_scs_cert,
    "check-symmetric": _check_symmetric,
    "dense-orbit": _dense_orbit,
    "subshift": _subshift,
    "witness-shift": _witness_shift,
    "coloring": _coloring,
    "amenability-witness": _amenability,
    "strong-amenability-witness": _strong_amenability,
    "verify": _verify,
    "repro": _repro,
}


def _config(args) -> RunConfig:
    try:
        config = load_config(args.config)
    except ValueError as e:
        raise UsageError(str(e))
    return config.replace(seed=args.seed)


def execute(argv: Sequence[str], config: Optional[RunConfig] = None) -> DecisionReport:
    """Parse argv and run the verb; the report records argv without output flags"""
    args = build_parser().parse_args(list(argv))
    if args.verb == "schemas":
        raise UsageError("schemas writes files and produces no report")
    config = config if config is not None else _config(args)
    report = COMMANDS[args.verb](args, config)
    report.command = recorded_command(argv)
    report.scale.setdefault("seed", config.seed)
    return report


def _emit(report: DecisionReport, args, config: RunConfig) -> None:
    text = json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False)
    if args.out and args.verb != "repro":
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if args.emit_cert and report.certificate is not None:
        with open(args.emit_cert, "w", encoding="utf-8") as f:
            json.dump(report.certificate.model_dump(mode="json"), f, indent=2, sort_keys=True, ensure_ascii=False)
    if args.store:
        entry = CertificateStore(config.cert_dir).put(report)
        cli_logger.info(f"Stored report as {entry.digest}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        set_verbosity(args.verbose)
        if args.verb == "schemas":
            written = write_schemas(args.out or os.path.join("docs", "schemas"))
            cli_logger.info(f"Wrote {len(written)} schemas")
            return 0
        config = _config(args)
        report = execute(argv, config)
        _emit(report, args, config)
        cli_logger.info(f"{args.verb}: {report.verdict.value}")
        return report.exit_code
    except SyndeticError as e:
        cli_logger.error(f"{type(e).__name__}: {e.message}")
        sys.stderr.write(f"error: {e.message}\n")
        if e.details:
            sys.stderr.write(json.dumps(e.details, default=str) + "\n")
        return e.exit_code
    except Exception as e:
        cli_logger.error(f"Unexpected error: {e}", exc_info=True)
        return 3
