"""Proof reflection: transform any accepted proof into an accepted proof of
the assertibility of its conclusion.

Every line of the source proof is revisited and a proof of box<line> is
emitted:

* main-axiom lines: the computation axiom ax:T(<code>), the jump axiom, a
  forall-elim instance, and two modus ponens steps;
* the jump axiom itself and computation-axiom lines: restate the line, then
  capture and one modus ponens;
* quantified modus ponens lines: the box distribution chain -- unfold the
  quantifiers through box (box-forall-fwd), conjoin the two premise families,
  recombine pointwise with box-imp, and fold the quantifiers back
  (box-forall-bwd).

The transformer is instance-wise: it realizes, per theorem, the procedure
behind the single internal soundness sentence, which is out of scope for the
kernel itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .syntax import (
    And, Box, Forall, Formula, Imp, Rel,
    FALSUM, box_quote, close_over, encode_sentence, neg, numeral_of,
    quote_term,
)
from .kernel import (
    Builder, KernelError, MPStep, ProofObject, ProofStore,
    TheoryConfig, capture_axiom, check_proof, checked,
    jump_axiom_of, proof_code_valid,
)

__all__ = [
    "ReflectionTrace", "MPChainTrace", "reflect_theorem", "reflect_iterated",
    "assertible_consistency_instance", "consistency_predicate",
]


@dataclass(frozen=True)
class MPChainTrace:
    """The displayed box-distribution chain for one modus ponens line."""
    source_index: int
    premises_boxed: tuple[Formula, Formula]
    unfolded: tuple[Formula, Formula]
    conjoined: Formula
    recombined: Formula
    folded: Formula

    def milestones(self) -> tuple[Formula, ...]:
        return (*self.premises_boxed, *self.unfolded, self.conjoined,
                self.recombined, self.folded)


@dataclass(frozen=True)
class ReflectionTrace:
    source: ProofObject
    output: ProofObject
    line_map: tuple[tuple[int, int], ...]   # source line -> output line of box<..>
    segments: tuple[tuple[int, int], ...]   # source line -> emitted span
    mp_chains: tuple[MPChainTrace, ...]

    @property
    def conclusion(self) -> Formula:
        return self.output.conclusion


def reflect_theorem(t: TheoryConfig, proof: ProofObject,
                    store: Optional[ProofStore] = None) -> ReflectionTrace:
    """Accepted proof of A -> accepted proof of box<A>, exact box_quote
    conclusion."""
    if not t.jump_axiom:
        raise KernelError("reflection needs a theory with the jump axiom")
    report = check_proof(t, proof, store)
    if not report.accepted:
        raise KernelError(f"source proof rejected: {report.reason}")
    b = Builder(t, store)
    boxed: list[int] = []
    segments: list[tuple[int, int]] = []
    chains: list[MPChainTrace] = []
    for idx, (line, record) in enumerate(zip(proof.lines, report.records)):
        start = len(b.lines)
        a = line.sentence
        if record.rule == "mp":
            chain, out = _reflect_mp(b, proof, idx, line.step, boxed)
            chains.append(chain)
        elif record.rule == "jump":
            src = b.axiom(a)
            out = b.mp(src, b.axiom(capture_axiom(a)))
        elif record.rule.startswith("comp-"):
            src = b.compute(a)
            out = b.mp(src, b.axiom(capture_axiom(a)))
        else:
            out = _reflect_main_axiom(b, t, a)
        if b.sentence(out) != box_quote(a):
            raise AssertionError("reflection emitted the wrong box sentence")
        boxed.append(out)
        segments.append((start, len(b.lines)))
    final = boxed[-1]
    if final != len(b.lines) - 1:
        final = b.restate(final)
    output = checked(t, b.proof(), store)
    return ReflectionTrace(proof, output, tuple(enumerate(boxed)),
                           tuple(segments), tuple(chains))


def _reflect_main_axiom(b: Builder, t: TheoryConfig, a: Formula) -> int:
    gn = numeral_of(encode_sentence(a))
    ax_claim = Rel(f"ax:{t.name}", (gn,))
    c1 = b.compute(ax_claim)
    jump = jump_axiom_of(t)
    c2 = b.axiom(jump)
    c3 = b.axiom(Imp(jump, Imp(ax_claim, Box(gn))))   # forall-elim at <code>
    c4 = b.mp(c2, c3)
    return b.mp(c1, c4)


def _reflect_mp(b: Builder, proof: ProofObject, idx: int, step: MPStep,
                boxed: Sequence[int]) -> tuple[MPChainTrace, int]:
    conclusion = proof.lines[idx].sentence
    minor = proof.lines[step.minor].sentence
    major = proof.lines[step.major].sentence
    prefix: list[str] = []
    probe = conclusion
    while True:
        stripped_major = _strip(major, prefix)
        stripped_minor = _strip(minor, prefix)
        if (isinstance(stripped_major, Imp) and stripped_major.left == stripped_minor
                and stripped_major.right == probe):
            break
        if not isinstance(probe, Forall):
            raise KernelError("unreconstructible modus ponens line")
        prefix.append(probe.var)
        probe = probe.body
    am, bm = stripped_minor, probe
    bi, bj = boxed[step.minor], boxed[step.major]
    premises = (b.sentence(bi), b.sentence(bj))

    if not prefix:
        ax5 = b.axiom(Imp(Box(quote_term(Imp(am, bm))),
                          Imp(Box(quote_term(am)), Box(quote_term(bm)))))
        x = b.mp(bj, ax5)
        out = b.mp(bi, x)
        chain = MPChainTrace(idx, premises, premises,
                             b.sentence(out), b.sentence(out), b.sentence(out))
        return chain, out

    # unfold the quantifiers through box, one variable at a time
    def unfold(start_idx: int, matrix: Formula) -> int:
        cur = start_idx
        for i, v in enumerate(prefix):
            outer = prefix[:i]
            inner = close_over(prefix[i + 1:], matrix)
            ax = b.axiom(close_over(outer,
                                    Imp(Box(quote_term(Forall(v, inner))),
                                        Forall(v, Box(quote_term(inner))))))
            cur = b.mp(cur, ax)
        return cur

    u = unfold(bi, am)                       # (prefix) box<A>
    v_ = unfold(bj, Imp(am, bm))             # (prefix) box<A -> B>
    unfolded = (b.sentence(u), b.sentence(v_))
    w = b.conj(prefix, u, v_)                # (prefix)(box<A> and box<A->B>)
    chi = And(Box(quote_term(am)), Box(quote_term(Imp(am, bm))))
    el = b.axiom(close_over(prefix, Imp(chi, chi.left)))
    er = b.axiom(close_over(prefix, Imp(chi, chi.right)))
    a5 = b.axiom(close_over(prefix, Imp(Box(quote_term(Imp(am, bm))),
                                        Imp(Box(quote_term(am)),
                                            Box(quote_term(bm))))))
    s1 = b.syllogism(prefix, er, a5)         # chi -> (box<A> -> box<B>)
    s2 = b.apply_s(prefix, s1, el)           # chi -> box<B>
    cur = b.mp(w, s2)                        # (prefix) box<B>
    recombined = b.sentence(cur)

    # fold the quantifiers back under a single box
    for i in range(len(prefix) - 1, -1, -1):
        v = prefix[i]
        outer = prefix[:i]
        inner = close_over(prefix[i + 1:], bm)
        ax = b.axiom(close_over(outer,
                                Imp(Forall(v, Box(quote_term(inner))),
                                    Box(quote_term(Forall(v, inner))))))
        cur = b.mp(cur, ax)
    chain = MPChainTrace(idx, premises, unfolded, b.sentence(w),
                         recombined, b.sentence(cur))
    return chain, cur


def _strip(a: Formula, prefix: Sequence[str]) -> Optional[Formula]:
    for v in prefix:
        if not isinstance(a, Forall) or a.var != v:
            return None
        a = a.body
    return a


def reflect_iterated(t: TheoryConfig, proof: ProofObject, k: int,
                     store: Optional[ProofStore] = None) -> ProofObject:
    """k = 0 returns the proof unchanged; otherwise reflect k times, each
    stage re-checked."""
    if k < 0:
        raise KernelError("iteration count must be >= 0")
    out = proof
    for _ in range(k):
        out = reflect_theorem(t, out, store).output
    return out


def consistency_predicate(t: TheoryConfig, var: str = "g") -> Formula:
    """The designated arithmetization of 'g is not the code of a proof of
    0 = 1 in this theory', as an open formula over codes."""
    from .syntax import Var
    falsum_numeral = numeral_of(encode_sentence(FALSUM))
    return neg(Rel(f"proofof:{t.name}", (Var(var), falsum_numeral)))


def assertible_consistency_instance(t: TheoryConfig, g: int,
                                    store: Optional[ProofStore] = None) -> ProofObject:
    """A checked proof of box<A(<g>)>, A the designated consistency
    predicate: the computation axiom for the instance plus capture."""
    falsum_code = encode_sentence(FALSUM)
    if proof_code_valid(t, g, falsum_code):
        raise KernelError(
            f"{g} codes a proof of 0 = 1 in {t.name}; the base is unsound")
    claim = neg(Rel(f"proofof:{t.name}",
                    (numeral_of(g), numeral_of(falsum_code))))
    b = Builder(t, store)
    i1 = b.compute(claim)
    out = b.mp(i1, b.axiom(capture_axiom(claim)))
    if b.sentence(out) != box_quote(claim):
        raise AssertionError("wrong conclusion in consistency instance")
    return b.checked_proof()
