"""Batch command line: check proof scripts, reflect theorems, audit the
falsity ledger, run the named demos, query licensing, and drive the codec.

All machine output is JSON lines on stdout, one record per line; a trailing
record carries the summary.  Exit codes: 0 success, 1 check or audit
failure, 2 usage error, 3 internal error.  Records carry a timestamp field
unless --no-timestamp is given, so reruns are byte-identical.

ASRT_PROOF_STORE names a directory of proof scripts loaded (and re-checked)
into the session store at startup; registered provability facts come from
there.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional

from . import corpus as corpus_mod
from .syntax import (
    FALSUM, EvalError, FreeVariableError, NotAFormula, ParseError,
    box_quote, decode_code, encode_sentence, encode_term, fmt,
    parse_formula, parse_sentence, parse_term,
)
from .kernel import (
    KernelError, ProofObject, ProofStore, TheoryConfig, UnknownTheoryError,
    check_proof, get_theory, preset_theory, proof_from_sexp, proof_to_sexp,
)
from .reflection import assertible_consistency_instance, reflect_iterated, reflect_theorem
from .semantics import FalsityLedger, audit_corpus
from .diagonal import hazard_demos, liar_suite
from .agency import (
    delegation_derivation, build_sstar, licenses, policy_from_sexp,
    too_much_demo, trust_demo,
)
from .kernel import pa

__all__ = ["main", "run"]

DEMOS = ("liar-suite", "release-hazard", "em-hazard",
         "naturalistic-trust", "reflective-trust", "coherent-trust",
         "disjunctive-trust", "too-much", "delegation", "unsound-base",
         "consistency-sample", "corpus")


class _Out:
    def __init__(self, timestamp: bool):
        self.timestamp = timestamp

    def emit(self, record: dict) -> None:
        if self.timestamp:
            record = {**record, "ts": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
        sys.stdout.write(json.dumps(record) + "\n")


def _load_store(out: _Out) -> ProofStore:
    store = ProofStore()
    root = os.environ.get("ASRT_PROOF_STORE")
    if not root:
        return store
    for path in sorted(Path(root).glob("*.sexp")):
        try:
            proof = proof_from_sexp(path.read_text())
            theory = get_theory(proof.theory) or preset_theory(proof.theory)
            store.register(theory, proof)
        except (KernelError, ParseError, ValueError) as e:
            out.emit({"kind": "store-skip", "file": str(path), "reason": str(e)})
    return store


def _theory(args) -> TheoryConfig:
    name = getattr(args, "theory", None) or "sbox-pa"
    if name.startswith("sstar-j"):
        name = "sstar-" + name[len("sstar-j"):]
    if getattr(args, "theory_file", None):
        return _theory_from_file(args.theory_file)
    return preset_theory(name)


def _theory_from_file(path: str) -> TheoryConfig:
    from .kernel import register_theory
    spec = json.loads(Path(path).read_text())
    extra = tuple(parse_sentence(s) for s in spec.get("extra_axioms", ()))
    return register_theory(TheoryConfig(
        name=spec["name"],
        classical=spec.get("classical", True),
        allow_box=spec.get("allow_box", True),
        jump_axiom=spec.get("jump_axiom", True),
        allow_agent=spec.get("allow_agent", False),
        kappa_count=spec.get("kappa_count", 0),
        iterbox_axioms=spec.get("iterbox_axioms", False),
        extra_axioms=extra))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_check(args, out: _Out, store: ProofStore) -> int:
    t = _theory(args)
    failures = 0
    for path in args.files:
        proof = proof_from_sexp(Path(path).read_text())
        report = check_proof(t, proof, store)
        for r in report.records:
            out.emit({"kind": "line", "file": path, "index": r.index,
                      "rule": r.rule, "note": r.note})
        record = {"kind": "verdict", "file": path, "accepted": report.accepted,
                  "lines": len(proof.lines)}
        if not report.accepted:
            record.update(failed_at=report.failed_at, reason=report.reason)
            failures += 1
        else:
            record["conclusion"] = fmt(proof.conclusion)
            # later files may cite this conclusion through prov facts
            store.register(t, proof)
        out.emit(record)
    return 1 if failures else 0


def _cmd_reflect(args, out: _Out, store: ProofStore) -> int:
    t = _theory(args)
    proof = proof_from_sexp(Path(args.file).read_text())
    if args.iterate == 1:
        trace = reflect_theorem(t, proof, store)
        result = trace.output
        for src, dst in trace.line_map:
            seg = trace.segments[src]
            out.emit({"kind": "map", "source": src, "boxed_line": dst,
                      "segment": list(seg)})
    else:
        result = reflect_iterated(t, proof, args.iterate, store)
    text = proof_to_sexp(result)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    out.emit({"kind": "reflected", "iterate": args.iterate,
              "lines": len(result.lines), "conclusion": fmt(result.conclusion)})
    return 0


def _cmd_falsity(args, out: _Out, store: ProofStore) -> int:
    ledger = FalsityLedger(stages=args.stages, bound=args.bound)
    proofs: list[ProofObject] = []
    paths: list[Path] = []
    if args.corpus:
        paths += sorted(Path(args.corpus).glob("*.sexp"))
    paths += [Path(f) for f in args.files]
    for path in paths:
        proof = proof_from_sexp(path.read_text())
        t = get_theory(proof.theory) or preset_theory(proof.theory)
        report = check_proof(t, proof, store)
        if not report.accepted:
            out.emit({"kind": "verdict", "file": str(path), "accepted": False,
                      "failed_at": report.failed_at, "reason": report.reason})
            return 1
        store.register(t, proof)   # session order: later entries may cite it
        proofs.append(proof)
    audit = audit_corpus(ledger, proofs, args.stages)
    for row in audit.json_lines().splitlines():
        out.emit(json.loads(row))
    return 0 if audit.ok else 1


def _cmd_license(args, out: _Out, store: ProofStore) -> int:
    policy = policy_from_sexp(Path(args.policy).read_text())
    proof = proof_from_sexp(Path(args.proved).read_text())
    t = get_theory(proof.theory) or preset_theory(proof.theory)
    store.register(t, proof)
    actions = licenses(policy, proof.conclusion, store)
    out.emit({"kind": "license", "proved": fmt(proof.conclusion),
              "actions": sorted(actions)})
    return 0


def _cmd_codec(args, out: _Out, store: ProofStore) -> int:
    text = Path(args.file).read_text() if args.file else sys.stdin.read()
    if args.direction == "encode":
        try:
            x = parse_formula(text)
            code = encode_sentence(x)
        except ParseError:
            x = parse_term(text)
            code = encode_term(x)
        out.emit({"kind": "code", "code": str(code)})
        return 0
    code = int(text.strip())
    result = decode_code(code)
    if isinstance(result, NotAFormula):
        out.emit({"kind": "decoded", "ok": False, "reason": result.reason})
        return 1
    out.emit({"kind": "decoded", "ok": True, "sentence": fmt(result)})
    return 0


def _write_proofs(outdir: Optional[str], named: list[tuple[str, ProofObject]],
                  out: _Out) -> None:
    if not outdir:
        return
    root = Path(outdir)
    root.mkdir(parents=True, exist_ok=True)
    for name, proof in named:
        (root / f"{name}.sexp").write_text(proof_to_sexp(proof) + "\n")
        out.emit({"kind": "wrote", "file": str(root / f"{name}.sexp")})


def _cmd_demo(args, out: _Out, store: ProofStore) -> int:
    name = args.name
    if name not in DEMOS:
        out.emit({"kind": "error", "reason": f"unknown demo {name!r}",
                  "available": list(DEMOS)})
        return 2
    t = preset_theory("sbox-pa")
    named: list[tuple[str, ProofObject]] = []
    if name == "liar-suite":
        suite = liar_suite(t, store)
        named = [("not-liar", suite.not_liar),
                 ("boxed-not-liar", suite.boxed_not_liar),
                 ("collapse", suite.collapse)]
        for label, proof in named:
            out.emit({"kind": "theorem", "name": label,
                      "conclusion": fmt(proof.conclusion),
                      "lines": len(proof.lines)})
        out.emit({"kind": "non-goals", "never-derived":
                  [fmt(s) for s in suite.excluded_conclusions()]})
    elif name in ("release-hazard", "em-hazard"):
        release, em = hazard_demos(t, store)
        proof = release if name == "release-hazard" else em
        named = [(name, proof)]
        out.emit({"kind": "theorem", "name": name,
                  "conclusion": fmt(proof.conclusion), "lines": len(proof.lines)})
    elif name.endswith("-trust"):
        result = trust_demo(name[:-len("-trust")], store)
        named = [(name, result.proof)]
        for row in result.manifest():
            out.emit(row)
    elif name == "too-much":
        result = too_much_demo(store)
        named = [(name, result.proof)]
        for row in result.manifest():
            out.emit(row)
    elif name == "delegation":
        result = delegation_derivation(build_sstar(pa(), args.agents), args.action,
                                       level=args.level, store=store)
        named = [(name, result.proof)]
        for row in result.manifest():
            out.emit(row)
    elif name == "unsound-base":
        proofs = corpus_mod.build_unsound_corpus(store)
        named = [(f"unsound-{i}", p) for i, p in enumerate(proofs)]
        ledger = FalsityLedger(stages=5, bound=64)
        audit = audit_corpus(ledger, proofs, 1)
        for row in audit.json_lines().splitlines():
            out.emit(json.loads(row))
        out.emit({"kind": "expected", "flagged": fmt(box_quote(FALSUM))})
    elif name == "consistency-sample":
        for g in range(args.instances):
            proof = assertible_consistency_instance(t, g, store)
            named.append((f"consistency-{g}", proof))
        out.emit({"kind": "consistency", "instances": args.instances,
                  "all_accepted": True})
    elif name == "corpus":
        proofs = corpus_mod.build_corpus(store)
        named = [(f"corpus-{i:03d}", p) for i, p in enumerate(proofs)]
        out.emit({"kind": "corpus", "size": len(proofs)})
    _write_proofs(args.outdir, named, out)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="asrt",
        description="proof kernel for a self-applicative assertibility logic")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress timestamps for reproducible output")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check proof scripts")
    c.add_argument("--theory", default="sbox-pa")
    c.add_argument("--theory-file")
    c.add_argument("files", nargs="+")

    r = sub.add_parser("reflect", help="transform a proof of A into a proof of box<A>")
    r.add_argument("--theory", default="sbox-pa")
    r.add_argument("--theory-file")
    r.add_argument("--iterate", type=int, default=1)
    r.add_argument("-o", "--output")
    r.add_argument("file")

    f = sub.add_parser("falsity", help="audit proofs against the falsity ledger")
    f.add_argument("--stages", type=int, default=5)
    f.add_argument("--bound", type=int, default=64)
    f.add_argument("--corpus", help="directory of .sexp proof scripts")
    f.add_argument("files", nargs="*")

    d = sub.add_parser("demo", help="run a named scenario")
    d.add_argument("name")
    d.add_argument("--outdir")
    d.add_argument("--agents", type=int, default=2)
    d.add_argument("--level", type=int, default=1)
    d.add_argument("--action", type=int, default=7)
    d.add_argument("--instances", type=int, default=10)

    l = sub.add_parser("license", help="query a policy with a proved sentence")
    l.add_argument("--policy", required=True)
    l.add_argument("--proved", required=True)

    k = sub.add_parser("codec", help="encode or decode sentences")
    k.add_argument("direction", choices=("encode", "decode"))
    k.add_argument("file", nargs="?")
    return p


_COMMANDS = {
    "check": _cmd_check,
    "reflect": _cmd_reflect,
    "falsity": _cmd_falsity,
    "demo": _cmd_demo,
    "license": _cmd_license,
    "codec": _cmd_codec,
}


def run(argv: Optional[list[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    out = _Out(timestamp=not args.no_timestamp)
    try:
        store = _load_store(out)
        return _COMMANDS[args.command](args, out, store)
    except (ParseError, FreeVariableError, UnknownTheoryError,
            FileNotFoundError, json.JSONDecodeError) as e:
        out.emit({"kind": "error", "reason": str(e)})
        return 2
    except (KernelError, EvalError) as e:
        out.emit({"kind": "error", "reason": str(e)})
        return 1
    except Exception as e:   # pragma: no cover - defensive
        out.emit({"kind": "internal-error", "reason": repr(e)})
        return 3


def main() -> None:
    sys.exit(run())
