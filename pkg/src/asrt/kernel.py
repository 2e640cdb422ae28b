"""Trusted core: theory configurations, axiom-scheme recognizers, the proof
checker, trusted computation axioms, and the deduction-theorem transformer.

A proof is a finite sequence of closed sentences, each justified as an axiom
instance, as a trusted computation (a decidable closed atomic claim verified
by the evaluator), or by universally quantified modus ponens:

    from (forall n1 ... nk) A  and  (forall n1 ... nk) (A -> B)
    infer (forall n1 ... nk) B          (k >= 0)

That is the calculus's only rule.  Axioms are universal closures of scheme
instances; the recognizers below accept any closure prefix (vacuous variables
included) whose matrix matches a scheme and leaves the sentence closed.

The authoritative scheme list:

* intuitionistic logic: k, s, and-intro, and-elim-left/right,
  or-intro-left/right, or-elim, ex-falso, forall-elim, exists-intro, and the
  two generalization implications (gen-forall, gen-exists);
* equality: eq-refl, eq-symm, eq-trans, eq-leibniz (replacement);
* arithmetic: the six successor/addition/multiplication axioms plus the
  induction scheme over the full language (box included);
* excluded middle for box-free formulas, in classical configurations only;
* the box axioms: box-or, box-and (both directions), box-exists (one
  direction), box-forall (both directions), box-imp, and capture;
* the jump axiom (forall g)(ax:T g -> box g), per configuration;
* iterbox definitional axioms (iterbox-zero, iterbox-succ, iterbox-collapse)
  in configurations with kappa constants;
* a finite list of extra axioms (exact sentences).

forall-elim and exists-intro admit instance terms whose variables are covered
by the closure prefix; the substitution is capture-checked and rejected
rather than renamed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .syntax import (
    EvalError, ParseError,
    Add, And, Box, Eq, Exists, Fn, Forall, Formula, Imp, Kappa, Mul, Or,
    Rel, Succ, Term, Var,
    FALSUM, ZERO, NotAFormula, Tokens,
    close_over, decode_code, encode_sentence, eval_term, fmt,
    numeral_of, parse_formula_stream, quote_term, sorted_vars, substitute,
)

__all__ = [
    "TheoryConfig", "ProofObject", "ProofLine", "CheckReport", "LineRecord",
    "Justification", "AxiomStep", "ComputeStep", "MPStep", "HypStep",
    "ProofStore", "KernelError", "InvalidDerivation", "UnknownTheoryError",
    "is_axiom", "admit_computation", "check_proof", "checked",
    "discharge_hypothesis", "under_quantifier_mp",
    "Builder", "dist_lemma", "pa", "sbox_pa", "sbox_pa_incon", "sstar", "extend_theory",
    "get_theory", "register_theory", "preset_theory",
    "jump_axiom_of", "capture_axiom", "kappa_axioms", "proof_code_valid",
    "proof_to_sexp", "proof_from_sexp",
]


class KernelError(ValueError):
    pass


class InvalidDerivation(KernelError):
    """A hypothetical derivation handed to discharge_hypothesis is broken."""


class UnknownTheoryError(KernelError):
    pass


# ---------------------------------------------------------------------------
# Theories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoryConfig:
    """An immutable named axiom base.

    ``extra_axioms`` holds finitely many closed sentences admitted verbatim
    (kappa successor axioms, scenario hypotheses, and the like).  The Ax
    recognizer over codes accepts exactly the main axioms: every axiom of the
    configuration except the jump axiom itself.
    """

    name: str
    classical: bool = True
    allow_box: bool = False
    jump_axiom: bool = False
    allow_agent: bool = False
    kappa_count: int = 0
    iterbox_axioms: bool = False
    extra_axioms: tuple[Formula, ...] = ()

    def __post_init__(self):
        for a in self.extra_axioms:
            if a.free:
                raise KernelError("extra axioms must be sentences: " + fmt(a))

    def in_language(self, a: Formula) -> bool:
        if a.has_box and not self.allow_box:
            return False
        if a.has_kappa and (self.kappa_count == 0 or _max_kappa(a) > self.kappa_count):
            return False
        if not self.allow_agent and _has_agent_rel(a):
            return False
        return True

    def is_main_axiom_code(self, g: int) -> bool:
        """The executable Ax recognizer over codes."""
        a = decode_code(g)
        if isinstance(a, NotAFormula) or a.free:
            return False
        j = is_axiom(self, a)
        return j is not None and j.rule != "jump"


def _max_kappa(x: Union[Formula, Term]) -> int:
    if isinstance(x, Kappa):
        return x.index
    out = 0
    for child in _children(x):
        if child.has_kappa:
            out = max(out, _max_kappa(child))
    return out


def _has_agent_rel(a: Formula) -> bool:
    if isinstance(a, Rel) and (a.name.startswith("act") or a.name == "gamma"):
        return True
    if isinstance(a, (And, Or, Imp)):
        return _has_agent_rel(a.left) or _has_agent_rel(a.right)
    if isinstance(a, (Forall, Exists)):
        return _has_agent_rel(a.body)
    return False


def _children(x: Union[Formula, Term]):
    if isinstance(x, (And, Or, Imp, Add, Mul)) or isinstance(x, Eq):
        return (x.left, x.right)
    if isinstance(x, (Forall, Exists)):
        return (x.body,)
    if isinstance(x, (Box, Succ)):
        return (x.arg,)
    if isinstance(x, (Rel, Fn)):
        return x.args
    return ()


def jump_axiom_of(t: TheoryConfig, var: str = "g") -> Formula:
    return Forall(var, Imp(Rel(f"ax:{t.name}", (Var(var),)), Box(Var(var))))


def capture_axiom(a: Formula) -> Formula:
    """Universal closure of A -> box <quote of A>."""
    return close_over(sorted_vars(a.free), Imp(a, Box(quote_term(a))))


def kappa_axioms(j: int) -> tuple[Formula, ...]:
    return tuple(Eq(Kappa(i), Succ(Kappa(i + 1))) for i in range(1, j))


_THEORIES: dict[str, TheoryConfig] = {}


def register_theory(t: TheoryConfig) -> TheoryConfig:
    existing = _THEORIES.get(t.name)
    if existing is not None and existing != t:
        raise KernelError(f"theory name {t.name!r} already registered differently")
    _THEORIES[t.name] = t
    return t


def get_theory(name: str) -> Optional[TheoryConfig]:
    return _THEORIES.get(name)


def pa() -> TheoryConfig:
    return register_theory(TheoryConfig(name="pa"))


def sbox_pa() -> TheoryConfig:
    return register_theory(TheoryConfig(
        name="sbox-pa", allow_box=True, jump_axiom=True))


def sbox_pa_incon() -> TheoryConfig:
    """Box theory over an arithmetically unsound (here: inconsistent) base:
    the base proves 0 = 1, so box <0 = 1> becomes a theorem."""
    return register_theory(TheoryConfig(
        name="sbox-pa-incon", allow_box=True, jump_axiom=True,
        extra_axioms=(Rel("prov:pa", (numeral_of(encode_sentence(FALSUM)),)), FALSUM)))


def sstar(j: int) -> TheoryConfig:
    """Box theory with agent symbols and kappa constants kappa_1..kappa_j,
    axioms kappa_i = kappa_{i+1} + 1 for i < j."""
    if j < 1:
        raise KernelError("sstar needs at least one kappa constant")
    return register_theory(TheoryConfig(
        name=f"sstar-{j}", allow_box=True, jump_axiom=True, allow_agent=True,
        kappa_count=j, iterbox_axioms=True, extra_axioms=kappa_axioms(j)))


def extend_theory(t: TheoryConfig, name: str, hypotheses: Sequence[Formula]) -> TheoryConfig:
    """A derived configuration with extra named-hypothesis axioms."""
    return register_theory(TheoryConfig(
        name=name, classical=t.classical, allow_box=t.allow_box,
        jump_axiom=t.jump_axiom, allow_agent=t.allow_agent,
        kappa_count=t.kappa_count, iterbox_axioms=t.iterbox_axioms,
        extra_axioms=t.extra_axioms + tuple(hypotheses)))


def preset_theory(name: str) -> TheoryConfig:
    """Named presets reachable from the command line."""
    if name == "pa":
        return pa()
    if name == "sbox-pa":
        return sbox_pa()
    if name == "sbox-pa-incon":
        return sbox_pa_incon()
    if name.startswith("sstar-"):
        try:
            return sstar(int(name.split("-", 1)[1]))
        except ValueError:
            pass
    existing = get_theory(name)
    if existing is not None:
        return existing
    raise UnknownTheoryError(f"unknown theory {name!r}")


# ---------------------------------------------------------------------------
# Axiom recognizers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    rule: str
    note: str = ""


def _prefix_splits(a: Formula) -> Iterator[tuple[tuple[str, ...], Formula]]:
    """Yield (prefix, matrix) for every split of the leading forall prefix
    with pairwise distinct variables."""
    prefix: list[str] = []
    yield (), a
    seen = set()
    while isinstance(a, Forall):
        if a.var in seen:
            return
        seen.add(a.var)
        prefix.append(a.var)
        a = a.body
        yield tuple(prefix), a


def _strip_prefix(a: Formula, prefix: Sequence[str]) -> Optional[Formula]:
    for v in prefix:
        if not isinstance(a, Forall) or a.var != v:
            return None
        a = a.body
    return a


def _infer_subst_term(a: Formula, x: str, c: Formula) -> Optional[Term]:
    """Find t with c == a[x := t] (t = 0 when x is not free in a), else None."""
    if x not in a.free:
        return ZERO if a == c else None
    found: list[Term] = []

    def walk_t(p: Term, q: Term) -> bool:
        if isinstance(p, Var) and p.name == x:
            if found and found[0] != q:
                return False
            if not found:
                found.append(q)
            return True
        if x not in p.free:
            return p == q
        if type(p) is not type(q):
            return False
        if isinstance(p, Succ):
            return walk_t(p.arg, q.arg)
        if isinstance(p, (Add, Mul)):
            return walk_t(p.left, q.left) and walk_t(p.right, q.right)
        if isinstance(p, Fn):
            return p.name == q.name and all(walk_t(s, u) for s, u in zip(p.args, q.args))
        return False

    def walk_f(p: Formula, q: Formula) -> bool:
        if x not in p.free:
            return p == q
        if type(p) is not type(q):
            return False
        if isinstance(p, Eq):
            return walk_t(p.left, q.left) and walk_t(p.right, q.right)
        if isinstance(p, Box):
            return walk_t(p.arg, q.arg)
        if isinstance(p, Rel):
            return (p.name == q.name and len(p.args) == len(q.args)
                    and all(walk_t(s, u) for s, u in zip(p.args, q.args)))
        if isinstance(p, (And, Or, Imp)):
            return walk_f(p.left, q.left) and walk_f(p.right, q.right)
        if isinstance(p, (Forall, Exists)):
            return p.var == q.var and walk_f(p.body, q.body)
        return False

    if not walk_f(a, c) or not found:
        return None
    t = found[0]
    try:
        return t if substitute(a, x, t) == c else None
    except Exception:
        return None


def _leibniz_matches(m: Formula) -> bool:
    """m = (t = u) -> (P -> Q) with Q == P[positionwise t -> u]."""
    if not (isinstance(m, Imp) and isinstance(m.left, Eq) and isinstance(m.right, Imp)):
        return False
    t, u = m.left.left, m.left.right
    p, q = m.right.left, m.right.right
    if t == u:
        return p == q

    def walk_t(a: Term, b: Term) -> bool:
        if a == b:
            return True
        if a == t and b == u:
            return True
        if type(a) is not type(b):
            return False
        if isinstance(a, Succ):
            return walk_t(a.arg, b.arg)
        if isinstance(a, (Add, Mul)):
            return walk_t(a.left, b.left) and walk_t(a.right, b.right)
        if isinstance(a, Fn):
            return a.name == b.name and all(walk_t(s, w) for s, w in zip(a.args, b.args))
        return False

    def walk_f(a: Formula, b: Formula) -> bool:
        if a == b:
            return True
        if type(a) is not type(b):
            return False
        if isinstance(a, Eq):
            return walk_t(a.left, b.left) and walk_t(a.right, b.right)
        if isinstance(a, Box):
            return walk_t(a.arg, b.arg)
        if isinstance(a, Rel):
            return (a.name == b.name and len(a.args) == len(b.args)
                    and all(walk_t(s, w) for s, w in zip(a.args, b.args)))
        if isinstance(a, (And, Or, Imp)):
            return walk_f(a.left, b.left) and walk_f(a.right, b.right)
        if isinstance(a, (Forall, Exists)):
            # a replacement under a binder is only sound if the binder cannot
            # capture a variable of t or u
            if a.var != b.var:
                return False
            if a.var in t.free or a.var in u.free:
                return a.body == b.body
            return walk_f(a.body, b.body)
        return False

    return walk_f(p, q)


def _unquote(t: Term) -> Optional[Formula]:
    """Invert quote_term: sub-chain over a canonical numeral -> the formula."""
    probe = t
    while isinstance(probe, Fn) and probe.name == "sub" and isinstance(probe.args[1], Var):
        probe = probe.args[0]
    if probe.canon is None:
        return None
    a = decode_code(probe.canon)
    if isinstance(a, NotAFormula):
        return None
    return a if quote_term(a) == t else None


def _match_logic(m: Formula, prefix: tuple[str, ...]) -> Optional[Justification]:
    if isinstance(m, Imp):
        a, c = m.left, m.right
        # k: A -> (B -> A)
        if isinstance(c, Imp) and c.right == a:
            return Justification("k")
        # s: (A -> (B -> C)) -> ((A -> B) -> (A -> C))
        if (isinstance(a, Imp) and isinstance(a.right, Imp)
                and isinstance(c, Imp) and isinstance(c.left, Imp)
                and isinstance(c.right, Imp)
                and c.left.left == a.left and c.left.right == a.right.left
                and c.right.left == a.left and c.right.right == a.right.right):
            return Justification("s")
        # and-intro: A -> (B -> (A and B))
        if (isinstance(c, Imp) and isinstance(c.right, And)
                and c.right.left == a and c.right.right == c.left):
            return Justification("and-intro")
        if isinstance(a, And):
            if c == a.left:
                return Justification("and-elim-left")
            if c == a.right:
                return Justification("and-elim-right")
        if isinstance(c, Or):
            if c.left == a:
                return Justification("or-intro-left")
            if c.right == a:
                return Justification("or-intro-right")
        # or-elim: (A -> C) -> ((B -> C) -> ((A or B) -> C))
        if (isinstance(a, Imp) and isinstance(c, Imp)
                and isinstance(c.left, Imp) and isinstance(c.right, Imp)
                and isinstance(c.right.left, Or)
                and c.right.left.left == a.left
                and c.right.left.right == c.left.left
                and a.right == c.left.right == c.right.right):
            return Justification("or-elim")
        if a == FALSUM:
            return Justification("ex-falso")
        # forall-elim: (forall x) A -> A[x := t], vars of t covered by prefix
        if isinstance(a, Forall):
            t = _infer_subst_term(a.body, a.var, c)
            if t is not None and t.free <= set(prefix):
                return Justification("forall-elim", fmt(t)[:80])
        # exists-intro: A[x := t] -> (exists x) A
        if isinstance(c, Exists):
            t = _infer_subst_term(c.body, c.var, a)
            if t is not None and t.free <= set(prefix):
                return Justification("exists-intro", fmt(t)[:80])
        # generalization implications
        j = _match_gen_implication(m)
        if j is not None:
            return j
    return None


def _match_gen_implication(m: Formula) -> Optional[Justification]:
    if not (isinstance(m, Imp) and isinstance(m.left, Forall)):
        return None
    ns: list[str] = []
    body = m.left
    while isinstance(body, Forall) and body.var not in ns:
        ns.append(body.var)
        body = body.body
    if not isinstance(body, Imp):
        return None
    a, b = body.left, body.right
    n1, rest = ns[0], ns[1:]
    if n1 not in a.free and m.right == close_over(rest, Imp(a, Forall(n1, b))):
        return Justification("gen-forall", n1)
    if n1 not in b.free and m.right == close_over(rest, Imp(Exists(n1, a), b)):
        return Justification("gen-exists", n1)
    return None


def _match_equality(m: Formula) -> Optional[Justification]:
    if isinstance(m, Eq) and m.left == m.right:
        return Justification("eq-refl")
    if isinstance(m, Imp) and isinstance(m.left, Eq):
        t, u = m.left.left, m.left.right
        c = m.right
        if isinstance(c, Eq) and c.left == u and c.right == t:
            return Justification("eq-symm")
        if (isinstance(c, Imp) and isinstance(c.left, Eq) and isinstance(c.right, Eq)
                and c.left.left == u and c.right.left == t
                and c.left.right == c.right.right):
            return Justification("eq-trans")
        if _leibniz_matches(m):
            return Justification("eq-leibniz")
    return None


def _match_arithmetic(m: Formula) -> Optional[Justification]:
    if isinstance(m, Imp):
        a, c = m.left, m.right
        if (isinstance(a, Eq) and isinstance(a.left, Succ) and a.right == ZERO
                and c == FALSUM):
            return Justification("pa-succ-nonzero")
        if (isinstance(a, Eq) and isinstance(a.left, Succ) and isinstance(a.right, Succ)
                and isinstance(c, Eq) and c.left == a.left.arg and c.right == a.right.arg):
            return Justification("pa-succ-inj")
        j = _match_induction(m)
        if j is not None:
            return j
    if isinstance(m, Eq):
        l, r = m.left, m.right
        if isinstance(l, Add) and l.right == ZERO and r == l.left:
            return Justification("pa-add-zero")
        if (isinstance(l, Add) and isinstance(l.right, Succ) and isinstance(r, Succ)
                and isinstance(r.arg, Add) and r.arg.left == l.left
                and r.arg.right == l.right.arg):
            return Justification("pa-add-succ")
        if isinstance(l, Mul) and l.right == ZERO and r == ZERO:
            return Justification("pa-mul-zero")
        if (isinstance(l, Mul) and isinstance(l.right, Succ) and isinstance(r, Add)
                and isinstance(r.left, Mul) and r.left.left == l.left
                and r.left.right == l.right.arg and r.right == l.left):
            return Justification("pa-mul-succ")
    return None


def _match_induction(m: Formula) -> Optional[Justification]:
    # (A[v:=0] and (forall v)(A -> A[v:=s v])) -> (forall v) A
    if not (isinstance(m, Imp) and isinstance(m.left, And)
            and isinstance(m.right, Forall)):
        return None
    v, a = m.right.var, m.right.body
    step = m.left.right
    if not (isinstance(step, Forall) and step.var == v and isinstance(step.body, Imp)):
        return None
    if step.body.left != a:
        return None
    try:
        if m.left.left != substitute(a, v, ZERO):
            return None
        if step.body.right != substitute(a, v, Succ(Var(v))):
            return None
    except Exception:
        return None
    return Justification("induction", v)


def _match_box(m: Formula) -> Optional[Justification]:
    if not isinstance(m, Imp):
        return None
    a, c = m.left, m.right
    # box-or-fwd: box<A or B> -> box<A> or box<B>
    if (isinstance(a, Box) and isinstance(c, Or)
            and isinstance(c.left, Box) and isinstance(c.right, Box)):
        x, y = _unquote(c.left.arg), _unquote(c.right.arg)
        if x is not None and y is not None and a.arg == quote_term(Or(x, y)):
            return Justification("box-or-fwd")
    if (isinstance(a, Or) and isinstance(c, Box)
            and isinstance(a.left, Box) and isinstance(a.right, Box)):
        x, y = _unquote(a.left.arg), _unquote(a.right.arg)
        if x is not None and y is not None and c.arg == quote_term(Or(x, y)):
            return Justification("box-or-bwd")
    # box-and
    if (isinstance(a, Box) and isinstance(c, And)
            and isinstance(c.left, Box) and isinstance(c.right, Box)):
        x, y = _unquote(c.left.arg), _unquote(c.right.arg)
        if x is not None and y is not None and a.arg == quote_term(And(x, y)):
            return Justification("box-and-fwd")
    if (isinstance(a, And) and isinstance(c, Box)
            and isinstance(a.left, Box) and isinstance(a.right, Box)):
        x, y = _unquote(a.left.arg), _unquote(a.right.arg)
        if x is not None and y is not None and c.arg == quote_term(And(x, y)):
            return Justification("box-and-bwd")
    # box-exists: (exists n) box<A(n)> -> box<(exists n) A>
    if (isinstance(a, Exists) and isinstance(a.body, Box) and isinstance(c, Box)):
        x = _unquote(a.body.arg)
        if x is not None and c.arg == quote_term(Exists(a.var, x)):
            return Justification("box-exists")
    # box-forall-fwd: box<(forall n) A> -> (forall n) box<A(n)>
    if (isinstance(a, Box) and isinstance(c, Forall) and isinstance(c.body, Box)):
        x = _unquote(c.body.arg)
        if x is not None and a.arg == quote_term(Forall(c.var, x)):
            return Justification("box-forall-fwd")
    if (isinstance(a, Forall) and isinstance(a.body, Box) and isinstance(c, Box)):
        x = _unquote(a.body.arg)
        if x is not None and c.arg == quote_term(Forall(a.var, x)):
            return Justification("box-forall-bwd")
    # box-imp: box<A -> B> -> (box<A> -> box<B>)
    if (isinstance(a, Box) and isinstance(c, Imp)
            and isinstance(c.left, Box) and isinstance(c.right, Box)):
        x, y = _unquote(c.left.arg), _unquote(c.right.arg)
        if x is not None and y is not None and a.arg == quote_term(Imp(x, y)):
            return Justification("box-imp")
    # capture: A -> box<A>
    if isinstance(c, Box) and c.arg == quote_term(a):
        return Justification("capture")
    return None


def _match_iterbox(m: Formula) -> Optional[Justification]:
    if isinstance(m, Eq) and isinstance(m.left, Fn) and m.left.name == "iterbox":
        k, g = m.left.args
        if k == ZERO and m.right == g:
            return Justification("iterbox-zero")
        if (isinstance(k, Succ) and isinstance(m.right, Fn)
                and m.right.name == "numboxed"):
            inner = m.right.args[0]
            if (isinstance(inner, Fn) and inner.name == "iterbox"
                    and inner.args[0] == k.arg and inner.args[1] == g):
                return Justification("iterbox-succ")
    # iterbox-collapse: box <code of (box t)> -> box (num-boxed t), t closed
    if (isinstance(m, Imp) and isinstance(m.left, Box) and isinstance(m.right, Box)
            and isinstance(m.right.arg, Fn) and m.right.arg.name == "numboxed"):
        t = m.right.arg.args[0]
        if t.closed and m.left.arg.canon == encode_sentence(Box(t)):
            return Justification("iterbox-collapse")
    return None


def is_axiom(t: TheoryConfig, a: Formula) -> Optional[Justification]:
    """The matched scheme and instantiation note when ``a`` is an axiom of
    ``t``; None otherwise (None is a value, not an error)."""
    if a.free or not t.in_language(a):
        return None
    if a in t.extra_axioms:
        return Justification("extra")
    if t.allow_box and t.jump_axiom and isinstance(a, Forall):
        body = a.body
        if (isinstance(body, Imp) and isinstance(body.left, Rel)
                and body.left.name == f"ax:{t.name}"
                and body.left.args == (Var(a.var),)
                and body.right == Box(Var(a.var))):
            return Justification("jump")
    for prefix, m in _prefix_splits(a):
        j = _match_logic(m, prefix)
        if j is None:
            j = _match_equality(m)
        if j is None:
            j = _match_arithmetic(m)
        if j is None and t.allow_box:
            j = _match_box(m)
        if j is None and t.iterbox_axioms:
            j = _match_iterbox(m)
        if (j is None and t.classical and isinstance(m, Or)
                and isinstance(m.right, Imp) and m.right.right == FALSUM
                and m.right.left == m.left and not m.left.has_box):
            j = Justification("excluded-middle")
        if j is not None:
            return j
    return None


# ---------------------------------------------------------------------------
# Trusted computation axioms
# ---------------------------------------------------------------------------

class ProofStore:
    """Append-only session store of accepted proofs, keyed by theory name
    and conclusion code.  Registration re-checks; claimed statuses are never
    trusted.  Single writer, any number of readers."""

    def __init__(self):
        self._proofs: dict[tuple[str, int], "ProofObject"] = {}

    def register(self, t: TheoryConfig, proof: "ProofObject") -> int:
        if proof.theory != t.name:
            raise KernelError("proof/theory mismatch")
        report = check_proof(t, proof, store=self)
        if not report.accepted:
            raise KernelError(f"refusing to register a rejected proof: {report.reason}")
        g = encode_sentence(proof.conclusion)
        self._proofs[(t.name, g)] = proof
        return g

    def has(self, theory_name: str, g: int) -> bool:
        return (theory_name, g) in self._proofs

    def has_code(self, g: int) -> bool:
        """True when some theory in the session has a registered proof whose
        conclusion carries this code."""
        return any(code == g for (_, code) in self._proofs)

    def get(self, theory_name: str, g: int) -> Optional["ProofObject"]:
        return self._proofs.get((theory_name, g))

    def conclusions(self, theory_name: str) -> list[Formula]:
        return [p.conclusion for (tn, _), p in self._proofs.items() if tn == theory_name]

    def __len__(self):
        return len(self._proofs)


def admit_computation(t: TheoryConfig, a: Formula,
                      store: Optional[ProofStore] = None) -> Optional[Justification]:
    """Justify a decidable closed kappa-free atomic claim via the trusted
    evaluator: true (in)equalities, ax/proofof facts about this theory, and
    prov facts backed by a registered proof.  Returns None when the claim is
    false or out of scope; raises EvalError when evaluation itself fails."""
    if a.free or a.has_kappa:
        return None
    positive, atom = True, a
    if isinstance(a, Imp) and a.right == FALSUM and a != FALSUM:
        positive, atom = False, a.left
    if isinstance(atom, Eq):
        holds = eval_term(atom.left) == eval_term(atom.right)
        if holds == positive:
            return Justification("comp-eq" if positive else "comp-neq")
        return None
    if isinstance(atom, Rel):
        fam, _, qual = atom.name.partition(":")
        about = t if qual == t.name else get_theory(qual)
        if fam == "ax" and about is not None and len(atom.args) == 1:
            holds = about.is_main_axiom_code(eval_term(atom.args[0]))
            if holds == positive:
                return Justification("comp-ax" if positive else "comp-not-ax")
            return None
        if fam == "proofof" and about is not None and len(atom.args) == 2:
            holds = proof_code_valid(about, eval_term(atom.args[0]), eval_term(atom.args[1]))
            if holds == positive:
                return Justification("comp-proofof" if positive else "comp-not-proofof")
            return None
        if fam == "prov" and positive and len(atom.args) == 1 and store is not None:
            if store.has(qual, eval_term(atom.args[0])):
                return Justification("comp-prov", qual)
            return None
    return None


_PROOF_CODE_MAX_LINES = 10_000


def proof_code_valid(t: TheoryConfig, p: int, s: int) -> bool:
    """Decide whether ``p`` codes a proof in ``t`` of the sentence coded
    ``s``: a nonempty code list of closed sentences, each an axiom, an
    evaluator-verifiable computation claim, or quantified modus ponens from
    two earlier lines, with the last line coded ``s``.

    This is the arithmetized proof relation behind the proofof symbol; it
    deliberately ignores the session store, so coded proofs cannot cite
    prov facts."""
    from .syntax import _list_decode  # stable, documented list code
    codes = _list_decode(p)
    if not codes or len(codes) > _PROOF_CODE_MAX_LINES or codes[-1] != s:
        return False
    lines: list[Formula] = []
    for g in codes:
        a = decode_code(g)
        if isinstance(a, NotAFormula) or a.free or not t.in_language(a):
            return False
        lines.append(a)
    for idx, a in enumerate(lines):
        if is_axiom(t, a) is not None:
            continue
        try:
            if admit_computation(t, a) is not None:
                continue
        except EvalError:
            return False
        if not _mp_searchable(lines, idx):
            return False
    return True


def _mp_searchable(lines: Sequence[Formula], idx: int) -> bool:
    for prefix, b in _prefix_splits(lines[idx]):
        for j in range(idx):
            mj = _strip_prefix(lines[j], prefix)
            if not isinstance(mj, Imp) or mj.right != b:
                continue
            for i in range(idx):
                mi = _strip_prefix(lines[i], prefix)
                if mi is not None and mi == mj.left:
                    return True
    return False


# ---------------------------------------------------------------------------
# Proof objects and the checker
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomStep:
    pass


@dataclass(frozen=True)
class ComputeStep:
    pass


@dataclass(frozen=True)
class MPStep:
    major: int   # index of the implication premise
    minor: int   # index of the antecedent premise


@dataclass(frozen=True)
class HypStep:
    """Only valid inside hypothetical derivations fed to discharge."""


Step = Union[AxiomStep, ComputeStep, MPStep, HypStep]


@dataclass(frozen=True)
class ProofLine:
    sentence: Formula
    step: Step


@dataclass(frozen=True)
class ProofObject:
    theory: str
    lines: tuple[ProofLine, ...]

    @property
    def conclusion(self) -> Formula:
        if not self.lines:
            raise KernelError("empty proof has no conclusion")
        return self.lines[-1].sentence

    def __len__(self):
        return len(self.lines)


@dataclass(frozen=True)
class LineRecord:
    index: int
    rule: str
    note: str = ""


@dataclass(frozen=True)
class CheckReport:
    accepted: bool
    theory: str
    records: tuple[LineRecord, ...]
    failed_at: Optional[int] = None
    reason: str = ""

    def json_lines(self) -> str:
        out = []
        for r in self.records:
            out.append(json.dumps({"kind": "line", "index": r.index,
                                   "rule": r.rule, "note": r.note}))
        summary = {"kind": "verdict", "accepted": self.accepted, "theory": self.theory,
                   "lines": len(self.records)}
        if not self.accepted:
            summary["failed_at"] = self.failed_at
            summary["reason"] = self.reason
        out.append(json.dumps(summary))
        return "\n".join(out)


def check_proof(t: TheoryConfig, proof: ProofObject,
                store: Optional[ProofStore] = None) -> CheckReport:
    """Validate every line; deterministic, and independent of the intent
    recorded in the author's step annotations (axiom/compute lines are
    re-derived, MP premise indices are structural and are used as given)."""
    if proof.theory != t.name:
        return CheckReport(False, t.name, (), None,
                           f"proof is for theory {proof.theory!r}")
    if not proof.lines:
        return CheckReport(False, t.name, (), None, "empty proof")
    records: list[LineRecord] = []
    for idx, line in enumerate(proof.lines):
        a = line.sentence
        if a.free:
            return CheckReport(False, t.name, tuple(records), idx,
                               "open formula: " + ", ".join(sorted_vars(a.free)))
        if not t.in_language(a):
            return CheckReport(False, t.name, tuple(records), idx,
                               "sentence outside the theory language")
        if isinstance(line.step, MPStep):
            i, j = line.step.minor, line.step.major
            if not (0 <= i < idx and 0 <= j < idx):
                return CheckReport(False, t.name, tuple(records), idx,
                                   "modus ponens premise index out of range")
            k = _mp_prefix_length(proof.lines[i].sentence, proof.lines[j].sentence, a)
            if k is None:
                return CheckReport(False, t.name, tuple(records), idx,
                                   "modus ponens premises do not match (prefix mismatch "
                                   "or wrong implication)")
            records.append(LineRecord(idx, "mp", f"prefix={k}"))
            continue
        if isinstance(line.step, HypStep):
            return CheckReport(False, t.name, tuple(records), idx,
                               "hypothesis step outside a hypothetical derivation")
        j = is_axiom(t, a)
        if j is None:
            try:
                j = admit_computation(t, a, store)
            except EvalError as e:
                return CheckReport(False, t.name, tuple(records), idx,
                                   f"evaluator failure: {e}")
        if j is None:
            return CheckReport(False, t.name, tuple(records), idx,
                               "not an axiom or admissible computation: " + fmt(a))
        records.append(LineRecord(idx, j.rule, j.note))
    return CheckReport(True, t.name, tuple(records))


def _mp_prefix_length(minor: Formula, major: Formula, conclusion: Formula) -> Optional[int]:
    for prefix, b in _prefix_splits(conclusion):
        mj = _strip_prefix(major, prefix)
        if not isinstance(mj, Imp) or mj.right != b:
            continue
        mi = _strip_prefix(minor, prefix)
        if mi is not None and mi == mj.left:
            return len(prefix)
    return None


def checked(t: TheoryConfig, proof: ProofObject,
            store: Optional[ProofStore] = None) -> ProofObject:
    report = check_proof(t, proof, store)
    if not report.accepted:
        raise KernelError(f"proof rejected at line {report.failed_at}: {report.reason}")
    return proof


# ---------------------------------------------------------------------------
# Proof builder and derived-rule emitters
# ---------------------------------------------------------------------------

class Builder:
    """Accumulates justified lines; every emission is validated immediately,
    so an accepted ProofObject falls out by construction.  Lines are memoized
    by sentence (any earlier justified line may be reused)."""

    def __init__(self, t: TheoryConfig, store: Optional[ProofStore] = None):
        self.t = t
        self.store = store
        self.lines: list[ProofLine] = []
        self._memo: dict[Formula, int] = {}

    def _append(self, a: Formula, step: Step) -> int:
        hit = self._memo.get(a)
        if hit is not None:
            return hit
        self.lines.append(ProofLine(a, step))
        idx = len(self.lines) - 1
        self._memo[a] = idx
        return idx

    def axiom(self, a: Formula) -> int:
        if a in self._memo:
            return self._memo[a]
        if is_axiom(self.t, a) is None:
            raise KernelError("not an axiom of " + self.t.name + ": " + fmt(a))
        return self._append(a, AxiomStep())

    def compute(self, a: Formula) -> int:
        if a in self._memo:
            return self._memo[a]
        if admit_computation(self.t, a, self.store) is None:
            raise KernelError("not an admissible computation: " + fmt(a))
        return self._append(a, ComputeStep())

    def mp(self, minor: int, major: int) -> int:
        """Quantified modus ponens; the prefix length is inferred from the
        major premise."""
        mj = self.lines[major].sentence
        mi = self.lines[minor].sentence
        prefix: list[str] = []
        probe = mj
        while not (isinstance(probe, Imp)
                   and _strip_prefix(mi, prefix) == probe.left):
            if not isinstance(probe, Forall):
                raise KernelError("modus ponens premises do not match:\n  "
                                  + fmt(mi) + "\n  " + fmt(mj))
            prefix.append(probe.var)
            probe = probe.body
        conclusion = close_over(prefix, probe.right)
        return self._append(conclusion, MPStep(major=major, minor=minor))

    def have(self, a: Formula) -> int:
        """Index of an already-derived sentence."""
        hit = self._memo.get(a)
        if hit is None:
            raise KernelError("not derived yet: " + fmt(a))
        return hit

    def restate(self, idx: int) -> int:
        """Repeat an earlier line verbatim (premise indices stay valid)."""
        self.lines.append(self.lines[idx])
        return len(self.lines) - 1

    def sentence(self, idx: int) -> Formula:
        return self.lines[idx].sentence

    def proof(self) -> ProofObject:
        return ProofObject(self.t.name, tuple(self.lines))

    def checked_proof(self) -> ProofObject:
        return checked(self.t, self.proof(), self.store)

    def conclude(self, idx: int) -> ProofObject:
        """Checked proof whose conclusion is the sentence at ``idx``;
        restates it when memoization left it mid-proof."""
        if idx != len(self.lines) - 1:
            self.restate(idx)
        return self.checked_proof()

    # -- derived emitters (combinator plumbing) -----------------------------

    def k_lift(self, prefix: Sequence[str], h: Formula, idx: int) -> int:
        """From (forall p) M derive (forall p) (h -> M)."""
        m = _strip_prefix(self.sentence(idx), prefix)
        kx = self.axiom(close_over(prefix, Imp(m, Imp(h, m))))
        return self.mp(idx, kx)

    def syllogism(self, prefix: Sequence[str], i_pq: int, i_qr: int) -> int:
        """From (forall p)(P -> Q) and (forall p)(Q -> R) derive
        (forall p)(P -> R)."""
        pq = _strip_prefix(self.sentence(i_pq), prefix)
        qr = _strip_prefix(self.sentence(i_qr), prefix)
        if not (isinstance(pq, Imp) and isinstance(qr, Imp) and pq.right == qr.left):
            raise KernelError("syllogism premises do not chain")
        p, q, r = pq.left, pq.right, qr.right
        k1 = self.axiom(close_over(prefix, Imp(qr, Imp(p, qr))))
        x1 = self.mp(i_qr, k1)                      # (p -> (q -> r))
        s1 = self.axiom(close_over(prefix, Imp(Imp(p, Imp(q, r)),
                                               Imp(Imp(p, q), Imp(p, r)))))
        x2 = self.mp(x1, s1)                        # ((p -> q) -> (p -> r))
        return self.mp(i_pq, x2)

    def apply_s(self, prefix: Sequence[str], i_pqr: int, i_pq: int) -> int:
        """From (forall p)(P -> (Q -> R)) and (forall p)(P -> Q) derive
        (forall p)(P -> R)."""
        pqr = _strip_prefix(self.sentence(i_pqr), prefix)
        p, q, r = pqr.left, pqr.right.left, pqr.right.right
        s1 = self.axiom(close_over(prefix, Imp(Imp(p, Imp(q, r)),
                                               Imp(Imp(p, q), Imp(p, r)))))
        x = self.mp(i_pqr, s1)
        return self.mp(i_pq, x)

    def identity(self, prefix: Sequence[str], p: Formula) -> int:
        """(forall prefix) (p -> p)."""
        target = close_over(prefix, Imp(p, p))
        if target in self._memo:
            return self._memo[target]
        q = Imp(p, p)
        s1 = self.axiom(close_over(prefix, Imp(Imp(p, Imp(q, p)),
                                               Imp(Imp(p, q), Imp(p, p)))))
        k1 = self.axiom(close_over(prefix, Imp(p, Imp(q, p))))
        x = self.mp(k1, s1)
        k2 = self.axiom(close_over(prefix, Imp(p, q)))
        return self.mp(k2, x)

    def conj(self, prefix: Sequence[str], i_a: int, i_b: int) -> int:
        """From (forall p) A and (forall p) B derive (forall p)(A and B)."""
        a = _strip_prefix(self.sentence(i_a), prefix)
        b = _strip_prefix(self.sentence(i_b), prefix)
        ai = self.axiom(close_over(prefix, Imp(a, Imp(b, And(a, b)))))
        x = self.mp(i_a, ai)
        return self.mp(i_b, x)

    def cases(self, prefix: Sequence[str], i_ac: int, i_bc: int) -> int:
        """From (forall p)(A -> C) and (forall p)(B -> C) derive
        (forall p)((A or B) -> C)."""
        ac = _strip_prefix(self.sentence(i_ac), prefix)
        bc = _strip_prefix(self.sentence(i_bc), prefix)
        a, c, b = ac.left, ac.right, bc.left
        oe = self.axiom(close_over(prefix, Imp(ac, Imp(bc, Imp(Or(a, b), c)))))
        x = self.mp(i_ac, oe)
        return self.mp(i_bc, x)

    def forall_chain_elim(self, outer: Sequence[str], i_all: int,
                          drop: Sequence[str]) -> int:
        """From (forall outer)(forall drop) M derive, stepwise, the sentence
        (forall outer) M[drop := themselves]; each step is a forall-elim
        axiom at the variable itself plus one modus ponens."""
        idx = i_all
        for v in drop:
            cur = _strip_prefix(self.sentence(idx), outer)
            el = self.axiom(close_over(outer, Imp(cur, cur.body)))
            idx = self.mp(idx, el)
        return idx

    def push_inside(self, outer: Sequence[str], i_imp: int) -> int:
        """From (forall outer)(forall v)(A -> B), with v not free in A,
        derive (forall outer)(A -> (forall v) B) via a generalization
        implication."""
        cur = _strip_prefix(self.sentence(i_imp), outer)
        gi = self.axiom(close_over(outer, Imp(cur, Imp(cur.body.left,
                                                       Forall(cur.var, cur.body.right)))))
        return self.mp(i_imp, gi)


def dist_lemma(b: Builder, prefix: Sequence[str], a: Formula, bm: Formula) -> int:
    """Emit a proof of the closed distribution sentence

        (forall p)(A -> B)  ->  ((forall p) A -> (forall p) B)

    built from forall-elim at prefix variables, the combinators, and the
    generalization implications.  Needed to discharge hypotheses across
    quantified modus ponens."""
    prefix = list(prefix)
    if not prefix:
        raise KernelError("dist_lemma needs a nonempty prefix")
    y0 = close_over(prefix, Imp(a, bm))
    x0 = close_over(prefix, a)

    # (forall prefix)(Y0 -> (A -> B)) and (forall prefix)(X0 -> A), by
    # chaining forall-elim at the prefix variables themselves
    def chain(closed: Formula, matrix: Formula) -> int:
        idx = None
        cur = closed
        for v in prefix:
            nxt = _strip_prefix(cur, (v,))
            step = b.axiom(close_over(prefix, Imp(cur, nxt)))
            idx = step if idx is None else b.syllogism(prefix, idx, step)
            cur = nxt
        assert cur == matrix
        return idx

    c1 = chain(y0, Imp(a, bm))
    c2 = chain(x0, a)

    # (prefix)(Y0 -> (X0 -> B)): compose c1 and c2 pointwise
    kx = b.axiom(close_over(prefix, Imp(Imp(a, bm), Imp(x0, Imp(a, bm)))))
    sx = b.axiom(close_over(prefix, Imp(Imp(x0, Imp(a, bm)),
                                        Imp(Imp(x0, a), Imp(x0, bm)))))
    lift = b.syllogism(prefix, kx, sx)   # (A -> B) -> ((X0 -> A) -> (X0 -> B))
    step = b.syllogism(prefix, c1, lift)  # Y0 -> ((X0 -> A) -> (X0 -> B))
    kf = b.axiom(close_over(prefix, Imp(Imp(x0, a), Imp(y0, Imp(x0, a)))))
    c2y = b.mp(c2, kf)                   # Y0 -> (X0 -> A)
    d = b.apply_s(prefix, step, c2y)     # (prefix)(Y0 -> (X0 -> B))

    # peel the prefix off innermost-first; each peeled quantifier lands
    # directly around the consequent, so the original order is preserved
    inner: Formula = bm
    rest = list(prefix)
    while rest:
        v = rest.pop()
        d = b.push_inside(rest, d)       # (rest)(Y0 -> (forall v)(X0 -> inner))
        gi = b.axiom(close_over(rest, Imp(Forall(v, Imp(x0, inner)),
                                          Imp(x0, Forall(v, inner)))))
        d = b.syllogism(rest, d, gi)
        inner = Forall(v, inner)
    return d


# ---------------------------------------------------------------------------
# Deduction theorem
# ---------------------------------------------------------------------------

def discharge_hypothesis(t: TheoryConfig, h: Formula,
                         derivation: Sequence[tuple[Formula, Step]],
                         store: Optional[ProofStore] = None) -> ProofObject:
    """Compile a hypothetical derivation (axioms, computations, the closed
    hypothesis ``h``, quantified modus ponens) into a checked proof of
    h -> C, C the derivation's last line.  Only intuitionistic schemes are
    used."""
    if h.free:
        raise InvalidDerivation("hypothesis must be closed")
    if not derivation:
        raise InvalidDerivation("empty derivation")
    b = Builder(t, store)
    mapped: list[int] = []   # index of h -> L_i in the output
    for pos, (a, step) in enumerate(derivation):
        if a.free:
            raise InvalidDerivation(f"open formula at line {pos}")
        if isinstance(step, HypStep):
            if a != h:
                raise InvalidDerivation(f"hypothesis line {pos} is not the hypothesis")
            mapped.append(b.identity((), h))
            continue
        if isinstance(step, MPStep):
            i, j = step.minor, step.major
            if not (0 <= i < pos and 0 <= j < pos):
                raise InvalidDerivation(f"bad premise indices at line {pos}")
            k = _mp_prefix_length(derivation[i][0], derivation[j][0], a)
            if k is None:
                raise InvalidDerivation(f"modus ponens does not apply at line {pos}")
            prefix, matrix = [], a
            for _ in range(k):
                prefix.append(matrix.var)
                matrix = matrix.body
            am = _strip_prefix(derivation[i][0], prefix)
            if k == 0:
                # S: (h -> (A -> B)) -> ((h -> A) -> (h -> B))
                sx = b.axiom(Imp(Imp(h, Imp(am, matrix)),
                                 Imp(Imp(h, am), Imp(h, matrix))))
                x = b.mp(mapped[j], sx)
                mapped.append(b.mp(mapped[i], x))
            else:
                de = dist_lemma(b, prefix, am, matrix)
                x = b.syllogism((), mapped[j], de)   # h -> (X0 -> Z0)
                x0 = close_over(prefix, am)
                z0 = close_over(prefix, matrix)
                sx = b.axiom(Imp(Imp(h, Imp(x0, z0)),
                                 Imp(Imp(h, x0), Imp(h, z0))))
                y = b.mp(x, sx)
                mapped.append(b.mp(mapped[i], y))
            continue
        # axiom or computation line: emit it, then weaken under h
        if is_axiom(t, a) is not None:
            idx = b.axiom(a)
        else:
            try:
                ok = admit_computation(t, a, store) is not None
            except EvalError as e:
                raise InvalidDerivation(f"evaluator failure at line {pos}: {e}")
            if not ok:
                raise InvalidDerivation(
                    f"line {pos} is not an axiom or admissible computation: {fmt(a)}")
            idx = b.compute(a)
        mapped.append(b.k_lift((), h, idx))
    final = Imp(h, derivation[-1][0])
    if b.sentence(mapped[-1]) != final:
        raise AssertionError("discharge produced the wrong conclusion")
    # the conclusion must be the proof's last line; restate after memo hits
    if mapped[-1] != len(b.lines) - 1:
        b.restate(mapped[-1])
    return checked(t, b.proof(), store)


def under_quantifier_mp(t: TheoryConfig, prefix: Sequence[str],
                        p_minor: ProofObject, p_major: ProofObject,
                        store: Optional[ProofStore] = None) -> ProofObject:
    """Concatenate a proof of (forall p) A and a proof of (forall p)(A -> B)
    and close with one quantified modus ponens, yielding a checked proof of
    (forall p) B."""
    if p_minor.theory != t.name or p_major.theory != t.name:
        raise KernelError("premise proofs must be in the given theory")
    am = _strip_prefix(p_minor.conclusion, prefix)
    im = _strip_prefix(p_major.conclusion, prefix)
    if am is None or im is None or not isinstance(im, Imp) or im.left != am:
        raise KernelError("premise conclusions do not fit the prefix")
    lines = list(p_minor.lines)
    offset = len(lines)
    for line in p_major.lines:
        step = line.step
        if isinstance(step, MPStep):
            step = MPStep(major=step.major + offset, minor=step.minor + offset)
        lines.append(ProofLine(line.sentence, step))
    conclusion = close_over(prefix, im.right)
    lines.append(ProofLine(conclusion, MPStep(major=len(lines) - 1,
                                              minor=offset - 1)))
    return checked(t, ProofObject(t.name, tuple(lines)), store)


# ---------------------------------------------------------------------------
# Proof-script serialization
# ---------------------------------------------------------------------------

def proof_to_sexp(proof: ProofObject) -> str:
    out = ["(proof", f"  (theory {proof.theory})"]
    for line in proof.lines:
        if isinstance(line.step, AxiomStep):
            just = "(axiom)"
        elif isinstance(line.step, ComputeStep):
            just = "(compute)"
        elif isinstance(line.step, MPStep):
            just = f"(mp {line.step.minor} {line.step.major})"
        else:
            just = "(hyp)"
        out.append(f"  (step {fmt(line.sentence)} {just})")
    out.append(")")
    return "\n".join(out)


def proof_from_sexp(text: str) -> ProofObject:
    ts = Tokens(text)
    ts.expect("(")
    ts.expect("proof")
    ts.expect("(")
    ts.expect("theory")
    name, pos = ts.next()
    if name in ("(", ")"):
        raise ParseError("expected a theory name", pos)
    ts.expect(")")
    lines: list[ProofLine] = []
    while True:
        tok, pos = ts.next()
        if tok == ")":
            break
        if tok != "(":
            raise ParseError(f"expected (step ...), found {tok!r}", pos)
        ts.expect("step")
        sentence = parse_formula_stream(ts)
        ts.expect("(")
        kind, kpos = ts.next()
        if kind == "axiom":
            step: Step = AxiomStep()
        elif kind == "compute":
            step = ComputeStep()
        elif kind == "hyp":
            step = HypStep()
        elif kind == "mp":
            minor_tok, mpos = ts.next()
            major_tok, jpos = ts.next()
            if not (minor_tok.isdigit() and major_tok.isdigit()):
                raise ParseError("mp expects two line indices", mpos)
            step = MPStep(minor=int(minor_tok), major=int(major_tok))
        else:
            raise ParseError(f"unknown justification {kind!r}", kpos)
        ts.expect(")")
        ts.expect(")")
        lines.append(ProofLine(sentence, step))
    return ProofObject(name, tuple(lines))
