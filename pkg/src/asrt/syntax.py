"""Object language: terms, formulas, numerals, substitution, codec, text format.

The language is first order arithmetic (0, s, +, *) extended with:

* a unary assertibility atom ``box`` applied to a term whose value is the
  code of a sentence,
* constants ``kappa i`` (i >= 1),
* definitional function symbols ``sub``, ``num``, ``iterbox``, ``num-boxed``
  whose meaning is fixed by the trusted evaluator in this module,
* relation symbols ``act i`` (unary), ``gamma`` (nullary), ``prov T``,
  ``ax T`` and ``proofof T`` (over codes, relative to a named theory).

Negation is not a constructor: ``not A`` abbreviates ``A -> (= 0 1)``.

Codes are naturals produced by a constructor-tagged Cantor-pairing scheme;
see ``docs/codec.md`` for the published tag table.  Canonical numerals get a
dedicated tag so the code of a quoted sentence grows by a constant factor per
quotation layer instead of exponentially.

Everything here is immutable and pure; values may be freely shared between
threads.
"""

from __future__ import annotations

import re
import sys
from typing import Iterable, Optional, Sequence, Union

# the text format carries codes as decimal literals of unbounded size
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), 2_000_000))

__all__ = [
    "Term", "Succ", "Add", "Mul", "Var", "Kappa", "Fn",
    "Formula", "Eq", "Box", "Rel", "And", "Or", "Imp", "Forall", "Exists",
    "ZERO", "ONE", "TWO", "FALSUM",
    "ParseError", "FreeVariableError", "CaptureError", "EvalError",
    "NotAFormula", "NOT_A_FORMULA",
    "neg", "is_neg", "numeral_of", "eval_term", "eval_formula_atoms",
    "substitute", "substitute_numeral",
    "encode_term", "encode_sentence", "decode_code", "decode_term_code",
    "pair", "unpair",
    "box_quote", "strip_box", "quote_term", "close_over", "universal_closure",
    "var_order_key", "sorted_vars", "fresh_var",
    "parse_term", "parse_formula", "parse_sentence", "fmt",
]

EMPTY: frozenset = frozenset()


class ParseError(ValueError):
    """Raised on malformed input text; carries a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class FreeVariableError(ValueError):
    """Raised when a sentence was required but free variables remain."""

    def __init__(self, names: Iterable[str]):
        self.names = sorted(names)
        super().__init__("free variables not allowed here: " + ", ".join(self.names))


class CaptureError(ValueError):
    """Raised when a substitution would capture a variable of the new term."""


class EvalError(ValueError):
    """Raised by the trusted evaluator: unassigned kappa, bad code, budget."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

FN_ARITY = {"sub": 2, "num": 1, "iterbox": 2, "numboxed": 1}


class Term:
    """Base class; concrete terms are Zero/Succ/Add/Mul/Var/Kappa/Fn."""

    __slots__ = ("h", "free", "has_kappa", "canon", "_code", "_val")

    def _seal(self, h: int, free: frozenset, has_kappa: bool, canon: Optional[int]) -> None:
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "has_kappa", has_kappa)
        object.__setattr__(self, "canon", canon)
        object.__setattr__(self, "_code", None)
        object.__setattr__(self, "_val", None)

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    @property
    def closed(self) -> bool:
        return not self.free

    def __hash__(self) -> int:
        return self.h

    def __repr__(self) -> str:
        return fmt(self)


class _Zero(Term):
    __slots__ = ()

    def __init__(self):
        self._seal(hash(("t0",)), EMPTY, False, 0)

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return isinstance(other, _Zero)


class Succ(Term):
    __slots__ = ("arg",)

    def __init__(self, arg: Term):
        object.__setattr__(self, "arg", arg)
        if arg.canon == 0:
            canon = 1
        elif (isinstance(arg, Mul) and arg.left == TWO
              and arg.right.canon is not None and arg.right.canon >= 1):
            canon = 2 * arg.right.canon + 1
        else:
            canon = None
        self._seal(hash(("t1", arg.h)), arg.free, arg.has_kappa, canon)

    __hash__ = Term.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Succ) or self.h != other.h:
            return False
        if self.canon is not None and other.canon is not None:
            return self.canon == other.canon
        return self.arg == other.arg


class _Bin(Term):
    __slots__ = ("left", "right")
    _tag = ""

    def __init__(self, left: Term, right: Term):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._seal(hash((self._tag, left.h, right.h)), left.free | right.free,
                   left.has_kappa or right.has_kappa, self._canon_of(left, right))

    @staticmethod
    def _canon_of(left: Term, right: Term) -> Optional[int]:
        return None

    __hash__ = Term.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or self.h != other.h:
            return False
        if self.canon is not None and other.canon is not None:
            return self.canon == other.canon
        return self.left == other.left and self.right == other.right


class Add(_Bin):
    __slots__ = ()
    _tag = "t2"


class Mul(_Bin):
    __slots__ = ()
    _tag = "t3"

    @staticmethod
    def _canon_of(left: Term, right: Term) -> Optional[int]:
        # canonical numeral 2m is (s (s 0)) * <canonical m>, m >= 1
        if left == TWO and right.canon is not None and right.canon >= 1:
            return 2 * right.canon
        return None


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not name or "\x00" in name:
            raise ValueError("variable names must be nonempty and NUL-free")
        object.__setattr__(self, "name", name)
        self._seal(hash(("t4", name)), frozenset((name,)), False, None)

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and self.name == other.name)


class Kappa(Term):
    __slots__ = ("index",)

    def __init__(self, index: int):
        if index < 1:
            raise ValueError("kappa index must be >= 1")
        object.__setattr__(self, "index", index)
        self._seal(hash(("t5", index)), EMPTY, True, None)

    __hash__ = Term.__hash__

    def __eq__(self, other):
        return self is other or (isinstance(other, Kappa) and self.index == other.index)


class Fn(Term):
    """Applied definitional function symbol: sub, num, iterbox, numboxed."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: Sequence[Term]):
        if name not in FN_ARITY:
            raise ValueError(f"unknown function symbol {name!r}")
        args = tuple(args)
        if len(args) != FN_ARITY[name]:
            raise ValueError(f"{name} expects {FN_ARITY[name]} arguments")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)
        free = EMPTY
        kap = False
        for a in args:
            free = free | a.free
            kap = kap or a.has_kappa
        self._seal(hash(("t6", name) + tuple(a.h for a in args)), free, kap, None)

    __hash__ = Term.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Fn) and self.h == other.h
                and self.name == other.name and self.args == other.args)


ZERO = _Zero()
ONE = Succ(ZERO)
TWO = Succ(ONE)


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

class Formula:
    __slots__ = ("h", "free", "has_kappa", "has_box", "_code")

    def _seal(self, h: int, free: frozenset, has_kappa: bool, has_box: bool) -> None:
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "has_kappa", has_kappa)
        object.__setattr__(self, "has_box", has_box)
        object.__setattr__(self, "_code", None)

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    @property
    def closed(self) -> bool:
        return not self.free

    def __hash__(self) -> int:
        return self.h

    def __repr__(self) -> str:
        return fmt(self)


class Eq(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._seal(hash(("f0", left.h, right.h)), left.free | right.free,
                   left.has_kappa or right.has_kappa, False)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Eq) and self.h == other.h
                and self.left == other.left and self.right == other.right)


class Box(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Term):
        object.__setattr__(self, "arg", arg)
        self._seal(hash(("f1", arg.h)), arg.free, arg.has_kappa, True)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Box) and self.h == other.h and self.arg == other.arg


class Rel(Formula):
    """Applied relation symbol: act<i>, gamma, prov:<T>, ax:<T>, proofof:<T>."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: Sequence[Term]):
        if not name or "\x00" in name:
            raise ValueError("relation names must be nonempty and NUL-free")
        args = tuple(args)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)
        free = EMPTY
        kap = False
        for a in args:
            free = free | a.free
            kap = kap or a.has_kappa
        self._seal(hash(("f2", name) + tuple(a.h for a in args)), free, kap, False)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Rel) and self.h == other.h
                and self.name == other.name and self.args == other.args)


class _BinF(Formula):
    __slots__ = ("left", "right")
    _tag = ""

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._seal(hash((self._tag, left.h, right.h)), left.free | right.free,
                   left.has_kappa or right.has_kappa, left.has_box or right.has_box)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and self.h == other.h
                and self.left == other.left and self.right == other.right)


class And(_BinF):
    __slots__ = ()
    _tag = "f3"


class Or(_BinF):
    __slots__ = ()
    _tag = "f4"


class Imp(_BinF):
    __slots__ = ()
    _tag = "f5"


class _Quant(Formula):
    __slots__ = ("var", "body")
    _tag = ""

    def __init__(self, var: str, body: Formula):
        if not var or "\x00" in var:
            raise ValueError("variable names must be nonempty and NUL-free")
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)
        self._seal(hash((self._tag, var, body.h)), body.free - {var},
                   body.has_kappa, body.has_box)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and self.h == other.h
                and self.var == other.var and self.body == other.body)


class Forall(_Quant):
    __slots__ = ()
    _tag = "f6"


class Exists(_Quant):
    __slots__ = ()
    _tag = "f7"


FALSUM = Eq(ZERO, ONE)


def neg(a: Formula) -> Formula:
    """A -> (= 0 1); negation is notation, not a constructor."""
    return Imp(a, FALSUM)


def is_neg(a: Formula) -> bool:
    return isinstance(a, Imp) and a.right == FALSUM


# ---------------------------------------------------------------------------
# Variable order, closures, fresh names
# ---------------------------------------------------------------------------

def var_order_key(name: str):
    """Total (shortlex) order on the variable namespace."""
    return (len(name), name)


def sorted_vars(names: Iterable[str]) -> list[str]:
    return sorted(names, key=var_order_key)


def fresh_var(base: str, avoid: Iterable[str]) -> str:
    """Suffix-increment fresh-name discipline: base, base1, base2, ..."""
    taken = set(avoid)
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def close_over(names: Sequence[str], a: Formula) -> Formula:
    """(forall n1 ... (forall nk a)); names may be vacuous in a."""
    for name in reversed(names):
        a = Forall(name, a)
    return a


def universal_closure(a: Formula) -> Formula:
    """Close over the free variables of ``a`` in canonical order."""
    return close_over(sorted_vars(a.free), a)


# ---------------------------------------------------------------------------
# Canonical numerals and term evaluation
# ---------------------------------------------------------------------------

_NUMERAL_MEMO: dict[int, Term] = {0: ZERO, 1: ONE}
_NUMERAL_MEMO_LIMIT = 1 << 16
_NUMERAL_BIG_MEMO: dict[int, Term] = {}
_NUMERAL_BIG_MEMO_CAP = 4096


def numeral_of(n: int) -> Term:
    """Canonical dyadic numeral: 0, s0, then 2m -> (ss0)*m, 2m+1 -> s((ss0)*m).

    Term size is O(log n), so numerals of Godel codes stay manageable.
    """
    if n < 0:
        raise ValueError("numerals denote naturals")
    hit = _NUMERAL_MEMO.get(n)
    if hit is not None:
        return hit
    if n > _NUMERAL_MEMO_LIMIT:
        hit = _NUMERAL_BIG_MEMO.get(n)
        if hit is not None:
            return hit
    # build iteratively from the most significant halving not in the memo
    pending: list[int] = []
    m = n
    while m not in _NUMERAL_MEMO and m not in _NUMERAL_BIG_MEMO:
        pending.append(m)
        m //= 2
    t = _NUMERAL_MEMO.get(m)
    if t is None:
        t = _NUMERAL_BIG_MEMO[m]
    for m in reversed(pending):
        t = Mul(TWO, t) if m % 2 == 0 else Succ(Mul(TWO, t))
        if m <= _NUMERAL_MEMO_LIMIT:
            _NUMERAL_MEMO[m] = t
    if n > _NUMERAL_MEMO_LIMIT:
        if len(_NUMERAL_BIG_MEMO) >= _NUMERAL_BIG_MEMO_CAP:
            _NUMERAL_BIG_MEMO.clear()
        _NUMERAL_BIG_MEMO[n] = t
    return t


def eval_term(t: Term, env: Optional[dict[int, int]] = None) -> int:
    """Value of a closed term; ``env`` assigns naturals to kappa indices.

    Definitional symbols evaluate through the codec: ``num`` yields the code
    of a canonical numeral, ``sub`` substitutes into a coded formula,
    ``iterbox``/``numboxed`` build codes of box-iterated sentences.
    """
    if not t.closed:
        raise EvalError("cannot evaluate a term with free variables: " + fmt(t))
    if t.canon is not None:
        return t.canon
    use_memo = not t.has_kappa
    if use_memo and t._val is not None:
        return t._val
    v = _eval(t, env)
    if use_memo:
        object.__setattr__(t, "_val", v)
    return v


_EVAL_BIT_BUDGET = 2_000_000


def _eval(t: Term, env: Optional[dict[int, int]]) -> int:
    if t.canon is not None:
        return t.canon
    if isinstance(t, Succ):
        return _eval(t.arg, env) + 1
    if isinstance(t, Add):
        return _eval(t.left, env) + _eval(t.right, env)
    if isinstance(t, Mul):
        return _eval(t.left, env) * _eval(t.right, env)
    if isinstance(t, Kappa):
        if env is None or t.index not in env:
            raise EvalError(f"no value assigned to (kappa {t.index})")
        return env[t.index]
    if isinstance(t, Fn):
        args = [_eval(a, env) for a in t.args]
        if t.name == "num":
            return _num_code(args[0])
        if t.name == "numboxed":
            return _numboxed_code(args[0])
        if t.name == "sub":
            return _sub_code(args[0], args[1])
        if t.name == "iterbox":
            return _iterbox_code(args[0], args[1])
    raise EvalError("unevaluatable term: " + fmt(t))


def _num_code(n: int) -> int:
    # matches encode_term(numeral_of(n)) without building the tree
    if n == 0:
        return _CODE_ZERO
    if n == 1:
        return _CODE_ONE
    return pair(TAG_NUMERAL, n)


def _numboxed_code(c: int) -> int:
    out = pair(TAG_BOX, _num_code(c))
    if out.bit_length() > _EVAL_BIT_BUDGET:
        raise EvalError("evaluation budget exceeded (numboxed)")
    return out


_ITERBOX_MAX_ITERATIONS = 4096


def _iterbox_code(k: int, g: int) -> int:
    if k > _ITERBOX_MAX_ITERATIONS:
        raise EvalError("evaluation budget exceeded (iterbox count)")
    for _ in range(k):
        g = _numboxed_code(g)
    return g


def _sub_code(g: int, c: int) -> int:
    """Code of (formula g) with its first free variable replaced by the
    canonical numeral of c; identity when g is not a formula code or the
    formula is closed."""
    phi = decode_code(g)
    if isinstance(phi, NotAFormula) or not phi.free:
        return g
    v = sorted_vars(phi.free)[0]
    return encode_sentence(substitute(phi, v, numeral_of(c)))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def _subst_term(t: Term, v: str, r: Term) -> Term:
    if v not in t.free:
        return t
    if isinstance(t, Var):
        return r
    if isinstance(t, Succ):
        return Succ(_subst_term(t.arg, v, r))
    if isinstance(t, (Add, Mul)):
        return type(t)(_subst_term(t.left, v, r), _subst_term(t.right, v, r))
    if isinstance(t, Fn):
        return Fn(t.name, tuple(_subst_term(a, v, r) for a in t.args))
    raise AssertionError("unreachable")


def substitute(a: Formula, v: str, r: Term) -> Formula:
    """Replace free occurrences of variable ``v`` in ``a`` by term ``r``.

    Substitution never renames binders; if a free variable of ``r`` would be
    captured the substitution is rejected with CaptureError.  The kernel only
    ever substitutes closed terms or terms over the prefix variables, so
    rejection suffices.
    """
    if v not in a.free:
        return a
    if isinstance(a, Eq):
        return Eq(_subst_term(a.left, v, r), _subst_term(a.right, v, r))
    if isinstance(a, Box):
        return Box(_subst_term(a.arg, v, r))
    if isinstance(a, Rel):
        return Rel(a.name, tuple(_subst_term(t, v, r) for t in a.args))
    if isinstance(a, (And, Or, Imp)):
        return type(a)(substitute(a.left, v, r), substitute(a.right, v, r))
    if isinstance(a, (Forall, Exists)):
        # v free in a implies a.var != v
        if a.var in r.free:
            raise CaptureError(
                f"substituting {fmt(r)} for {v} would capture {a.var}")
        return type(a)(a.var, substitute(a.body, v, r))
    raise AssertionError("unreachable")


def substitute_numeral(a: Formula, v: str, n: int) -> Formula:
    """A[v := canonical numeral of n]; numerals are closed, so no capture."""
    return substitute(a, v, numeral_of(n))


# ---------------------------------------------------------------------------
# Codec: constructor-tagged Cantor pairing
# ---------------------------------------------------------------------------

TAG_ZERO = 0
TAG_SUCC = 1
TAG_ADD = 2
TAG_MUL = 3
TAG_VAR = 4
TAG_KAPPA = 5
TAG_NUMERAL = 6     # canonical numerals of value >= 2; payload is the value
TAG_SUB = 7
TAG_NUM = 8
TAG_ITERBOX = 9
TAG_NUMBOXED = 10
TAG_EQ = 11
TAG_BOX = 12
TAG_AND = 13
TAG_OR = 14
TAG_IMP = 15
TAG_FORALL = 16
TAG_EXISTS = 17
TAG_REL = 18

_MAX_TAG = 18
_FN_TAG = {"sub": TAG_SUB, "num": TAG_NUM, "iterbox": TAG_ITERBOX, "numboxed": TAG_NUMBOXED}
_TAG_FN = {v: k for k, v in _FN_TAG.items()}

# codes of the terms 0 and (s 0), fixed by the scheme below
_CODE_ZERO = 1      # pair(TAG_ZERO, 0)
_CODE_ONE = 47      # pair(TAG_SUCC, pair(TAG_ZERO, 0))


def _nat_to_string(n: int) -> tuple[int, int]:
    """Bijection naturals <-> finite bit strings: n maps to the binary of
    n + 1 with the leading 1 removed.  Returns (value, length), MSB first."""
    m = n + 1
    length = m.bit_length() - 1
    return m - (1 << length), length


def _string_to_nat(v: int, length: int) -> int:
    return v + (1 << length) - 1


def pair(a: int, b: int) -> int:
    """Injective size-proportionate pairing: the string of the pair is

        1^k 0 <string of len(a-string), k bits> <a-string> <b-string>

    read back through the natural <-> string bijection.  The result length
    is len(a) + len(b) + O(log len(a)), so codes of syntax trees grow
    linearly with tree size and quotation layers add a constant number of
    bits.  The image is decidable; unpair is its partial inverse."""
    va, la = _nat_to_string(a)
    vb, lb = _nat_to_string(b)
    vl, ll = _nat_to_string(la)
    v = (1 << ll) - 1                      # ll ones
    v = v << 1                             # the zero delimiter
    v = (v << ll) | vl
    v = (v << la) | va
    v = (v << lb) | vb
    return _string_to_nat(v, 2 * ll + 1 + la + lb)


def unpair(n: int) -> Optional[tuple[int, int]]:
    """Partial inverse of pair; None off the image."""
    v, length = _nat_to_string(n)
    ll = 0
    while ll < length and (v >> (length - 1 - ll)) & 1:
        ll += 1
    pos = length - ll - 1                  # bits remaining after 1^ll 0
    if pos < ll:
        return None
    pos -= ll
    la = _string_to_nat((v >> pos) & ((1 << ll) - 1), ll)
    if pos < la:
        return None
    pos -= la
    a = _string_to_nat((v >> pos) & ((1 << la) - 1), la)
    b = _string_to_nat(v & ((1 << pos) - 1), pos)
    return a, b


def _name_code(s: str) -> int:
    return int.from_bytes(s.encode("utf-8"), "big")


def _name_decode(n: int) -> Optional[str]:
    if n == 0:
        return None
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    if b"\x00" in raw:
        return None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return None


def _list_code(codes: Sequence[int]) -> int:
    out = 0
    for c in reversed(codes):
        out = pair(c, out) + 1
    return out


def _list_decode(n: int) -> Optional[list[int]]:
    out = []
    while n != 0:
        parts = unpair(n - 1)
        if parts is None:
            return None
        h, n = parts
        out.append(h)
    return out


def encode_term(t: Term) -> int:
    if t._code is not None:
        return t._code
    if t.canon is not None:
        c = _num_code(t.canon)
    elif isinstance(t, _Zero):
        c = pair(TAG_ZERO, 0)
    elif isinstance(t, Succ):
        c = pair(TAG_SUCC, encode_term(t.arg))
    elif isinstance(t, Add):
        c = pair(TAG_ADD, pair(encode_term(t.left), encode_term(t.right)))
    elif isinstance(t, Mul):
        c = pair(TAG_MUL, pair(encode_term(t.left), encode_term(t.right)))
    elif isinstance(t, Var):
        c = pair(TAG_VAR, _name_code(t.name))
    elif isinstance(t, Kappa):
        c = pair(TAG_KAPPA, t.index)
    elif isinstance(t, Fn):
        payload = encode_term(t.args[0])
        if len(t.args) == 2:
            payload = pair(payload, encode_term(t.args[1]))
        c = pair(_FN_TAG[t.name], payload)
    else:
        raise AssertionError("unreachable")
    object.__setattr__(t, "_code", c)
    return c


def encode_sentence(a: Formula) -> int:
    """Code of a formula (open formulas are codable too)."""
    if a._code is not None:
        return a._code
    if isinstance(a, Eq):
        c = pair(TAG_EQ, pair(encode_term(a.left), encode_term(a.right)))
    elif isinstance(a, Box):
        c = pair(TAG_BOX, encode_term(a.arg))
    elif isinstance(a, And):
        c = pair(TAG_AND, pair(encode_sentence(a.left), encode_sentence(a.right)))
    elif isinstance(a, Or):
        c = pair(TAG_OR, pair(encode_sentence(a.left), encode_sentence(a.right)))
    elif isinstance(a, Imp):
        c = pair(TAG_IMP, pair(encode_sentence(a.left), encode_sentence(a.right)))
    elif isinstance(a, Forall):
        c = pair(TAG_FORALL, pair(_name_code(a.var), encode_sentence(a.body)))
    elif isinstance(a, Exists):
        c = pair(TAG_EXISTS, pair(_name_code(a.var), encode_sentence(a.body)))
    elif isinstance(a, Rel):
        c = pair(TAG_REL, pair(_name_code(a.name), _list_code([encode_term(t) for t in a.args])))
    else:
        raise AssertionError("unreachable")
    object.__setattr__(a, "_code", c)
    return c


class NotAFormula:
    """Failure marker returned by decode_code off the image of the encoder."""

    __slots__ = ("reason",)

    def __init__(self, reason: str):
        self.reason = reason

    def __repr__(self):
        return f"NotAFormula({self.reason!r})"

    def __bool__(self):
        return False


NOT_A_FORMULA = NotAFormula("not in the image of the formula encoder")


def _decode_term(c: int) -> Optional[Term]:
    parts = unpair(c)
    if parts is None:
        return None
    tag, payload = parts
    if tag == TAG_ZERO:
        return ZERO if payload == 0 else None
    if tag == TAG_NUMERAL:
        # values 0 and 1 must use the structural codes 0 and 1
        return numeral_of(payload) if payload >= 2 else None
    if tag == TAG_SUCC:
        arg = _decode_term(payload)
        if arg is None:
            return None
        t = Succ(arg)
        # canonical numerals >= 2 must use TAG_NUMERAL
        return t if t.canon is None or t.canon < 2 else None
    if tag in (TAG_ADD, TAG_MUL):
        parts = unpair(payload)
        if parts is None:
            return None
        lc, rc = parts
        left, right = _decode_term(lc), _decode_term(rc)
        if left is None or right is None:
            return None
        t = Add(left, right) if tag == TAG_ADD else Mul(left, right)
        return t if t.canon is None or t.canon < 2 else None
    if tag == TAG_VAR:
        name = _name_decode(payload)
        return Var(name) if name else None
    if tag == TAG_KAPPA:
        return Kappa(payload) if payload >= 1 else None
    if tag in _TAG_FN:
        name = _TAG_FN[tag]
        if FN_ARITY[name] == 1:
            arg = _decode_term(payload)
            return Fn(name, (arg,)) if arg is not None else None
        parts = unpair(payload)
        if parts is None:
            return None
        lc, rc = parts
        left, right = _decode_term(lc), _decode_term(rc)
        if left is None or right is None:
            return None
        return Fn(name, (left, right))
    return None


def _decode_formula(c: int) -> Optional[Formula]:
    parts = unpair(c)
    if parts is None:
        return None
    tag, payload = parts
    if tag == TAG_EQ:
        parts = unpair(payload)
        if parts is None:
            return None
        lc, rc = parts
        left, right = _decode_term(lc), _decode_term(rc)
        if left is None or right is None:
            return None
        return Eq(left, right)
    if tag == TAG_BOX:
        arg = _decode_term(payload)
        return Box(arg) if arg is not None else None
    if tag in (TAG_AND, TAG_OR, TAG_IMP):
        parts = unpair(payload)
        if parts is None:
            return None
        lc, rc = parts
        left, right = _decode_formula(lc), _decode_formula(rc)
        if left is None or right is None:
            return None
        return {TAG_AND: And, TAG_OR: Or, TAG_IMP: Imp}[tag](left, right)
    if tag in (TAG_FORALL, TAG_EXISTS):
        parts = unpair(payload)
        if parts is None:
            return None
        nc, bc = parts
        name = _name_decode(nc)
        body = _decode_formula(bc) if name else None
        if body is None:
            return None
        return (Forall if tag == TAG_FORALL else Exists)(name, body)
    if tag == TAG_REL:
        parts = unpair(payload)
        if parts is None:
            return None
        nc, ac = parts
        name = _name_decode(nc)
        if not name:
            return None
        arg_codes = _list_decode(ac)
        args = []
        for code in arg_codes:
            t = _decode_term(code)
            if t is None:
                return None
            args.append(t)
        try:
            return Rel(name, args)
        except ValueError:
            return None
    return None


_DECODE_MEMO: dict[int, Union[Formula, NotAFormula]] = {}
_DECODE_MEMO_CAP = 8192


def decode_code(c: int) -> Union[Formula, NotAFormula]:
    """Partial inverse of encode_sentence; NotAFormula off the image."""
    if c < 0:
        return NOT_A_FORMULA
    big = c.bit_length() > 64
    if big:
        hit = _DECODE_MEMO.get(c)
        if hit is not None:
            return hit
    out = _decode_formula(c)
    result = out if out is not None else NOT_A_FORMULA
    if big:
        if len(_DECODE_MEMO) >= _DECODE_MEMO_CAP:
            _DECODE_MEMO.clear()
        _DECODE_MEMO[c] = result
    return result


def decode_term_code(c: int) -> Optional[Term]:
    """Partial inverse of encode_term."""
    return _decode_term(c) if c >= 0 else None


# ---------------------------------------------------------------------------
# Quotation helpers
# ---------------------------------------------------------------------------

def box_quote(a: Formula) -> Formula:
    """(box <numeral of the code of a>); a must be a sentence."""
    if a.free:
        raise FreeVariableError(a.free)
    return Box(numeral_of(encode_sentence(a)))


def strip_box(a: Formula) -> Optional[Formula]:
    """Inverse of box_quote up to term evaluation.

    Returns B when ``a`` is (box t) with t closed, kappa-free, and the value
    of t decodes to a sentence B; otherwise None.
    """
    if not isinstance(a, Box):
        return None
    t = a.arg
    if t.free or t.has_kappa:
        return None
    try:
        g = eval_term(t)
    except EvalError:
        return None
    b = decode_code(g)
    if isinstance(b, NotAFormula) or b.free:
        return None
    return b


def quote_term(a: Formula) -> Term:
    """Term denoting the code of ``a`` with its free variables numeralized.

    Closed a: the numeral of its code.  Open a with free v1 < ... < vk:
    (sub ... (sub <numeral of code a> v1) ... vk), which under an assignment
    of naturals to the vi evaluates to the code of a[vi := numerals].
    """
    t: Term = numeral_of(encode_sentence(a))
    for v in sorted_vars(a.free):
        t = Fn("sub", (t, Var(v)))
    return t


# ---------------------------------------------------------------------------
# Atom-level formula evaluation (used by fragment models and tests)
# ---------------------------------------------------------------------------

def eval_formula_atoms(a: Formula, env: Optional[dict[int, int]] = None) -> Optional[bool]:
    """Classical truth of a closed formula whose atoms are all equalities,
    evaluating terms under ``env``.  None when some atom is not an equality
    or a quantifier is present (no bounded search here)."""
    if isinstance(a, Eq):
        return eval_term(a.left, env) == eval_term(a.right, env)
    if isinstance(a, And):
        l, r = eval_formula_atoms(a.left, env), eval_formula_atoms(a.right, env)
        return None if l is None or r is None else (l and r)
    if isinstance(a, Or):
        l, r = eval_formula_atoms(a.left, env), eval_formula_atoms(a.right, env)
        return None if l is None or r is None else (l or r)
    if isinstance(a, Imp):
        l, r = eval_formula_atoms(a.left, env), eval_formula_atoms(a.right, env)
        return None if l is None or r is None else ((not l) or r)
    return None


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _fmt_term(t: Term, out: list[str]) -> None:
    if t.canon is not None:
        out.append(str(t.canon))
    elif isinstance(t, _Zero):
        out.append("0")
    elif isinstance(t, Succ):
        out.append("(s ")
        _fmt_term(t.arg, out)
        out.append(")")
    elif isinstance(t, Add) or isinstance(t, Mul):
        out.append("(+ " if isinstance(t, Add) else "(* ")
        _fmt_term(t.left, out)
        out.append(" ")
        _fmt_term(t.right, out)
        out.append(")")
    elif isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Kappa):
        out.append(f"(kappa {t.index})")
    elif isinstance(t, Fn):
        out.append("(" + ("num-boxed" if t.name == "numboxed" else t.name))
        for a in t.args:
            out.append(" ")
            _fmt_term(a, out)
        out.append(")")
    else:
        raise AssertionError("unreachable")


def _fmt_rel(a: Rel, out: list[str]) -> None:
    m = re.fullmatch(r"act(\d+)", a.name)
    if m:
        head = f"act {int(m.group(1))}"
    elif a.name == "gamma":
        out.append("gamma")
        return
    elif ":" in a.name:
        fam, theory = a.name.split(":", 1)
        head = f"{fam} {theory}"
    else:
        head = a.name
    out.append("(" + head)
    for t in a.args:
        out.append(" ")
        _fmt_term(t, out)
    out.append(")")


def _fmt_formula(a: Formula, out: list[str]) -> None:
    if isinstance(a, Eq):
        out.append("(= ")
        _fmt_term(a.left, out)
        out.append(" ")
        _fmt_term(a.right, out)
        out.append(")")
    elif isinstance(a, Box):
        out.append("(box ")
        _fmt_term(a.arg, out)
        out.append(")")
    elif isinstance(a, Rel):
        _fmt_rel(a, out)
    elif is_neg(a):
        out.append("(not ")
        _fmt_formula(a.left, out)
        out.append(")")
    elif isinstance(a, (And, Or, Imp)):
        out.append({And: "(and ", Or: "(or ", Imp: "(-> "}[type(a)])
        _fmt_formula(a.left, out)
        out.append(" ")
        _fmt_formula(a.right, out)
        out.append(")")
    elif isinstance(a, (Forall, Exists)):
        out.append("(forall " if isinstance(a, Forall) else "(exists ")
        out.append(a.var)
        out.append(" ")
        _fmt_formula(a.body, out)
        out.append(")")
    else:
        raise AssertionError("unreachable")


def fmt(x: Union[Term, Formula]) -> str:
    """Canonical s-expression text; parse(fmt(x)) == x."""
    out: list[str] = []
    if isinstance(x, Term):
        _fmt_term(x, out)
    else:
        _fmt_formula(x, out)
    return "".join(out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_VAR_RE = re.compile(r"[a-z][a-z0-9_]*")
_THEORY_RE = re.compile(r"[a-z][a-z0-9-]*")
_RESERVED = {
    "s", "kappa", "sub", "num", "iterbox", "num-boxed", "num-of", "godel",
    "box", "forall", "exists", "and", "or", "not", "gamma", "act",
    "prov", "ax", "proofof", "0",
}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.peeked: Optional[tuple[str, int]] = None

    def next(self) -> tuple[str, int]:
        if self.peeked is not None:
            tok, self.peeked = self.peeked, None
            return tok
        m = _TOKEN_RE.match(self.text, self.pos)
        if not m or m.end() <= self.pos and not m.group():
            raise ParseError("unexpected end of input", self.pos)
        self.pos = m.end()
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None:
            raise ParseError("unexpected end of input", self.pos)
        return tok, m.start(3) if m.group(3) else m.start()

    def peek(self) -> Optional[tuple[str, int]]:
        if self.peeked is None:
            m = _TOKEN_RE.match(self.text, self.pos)
            if not m or (m.group(3) is None and m.group(1) is None and m.group(2) is None):
                return None
            self.pos = m.end()
            tok = m.group(1) or m.group(2) or m.group(3)
            self.peeked = (tok, m.start(3) if m.group(3) else m.start())
        return self.peeked

    def expect(self, token: str) -> None:
        tok, pos = self.next()
        if tok != token:
            raise ParseError(f"expected {token!r}, found {tok!r}", pos)

    def at_end(self) -> bool:
        return self.peek() is None


def _parse_nat(ts: _Tokens) -> int:
    tok, pos = ts.next()
    if tok == "(":
        head, hpos = ts.next()
        if head == "godel":
            x = _parse_any(ts)
            ts.expect(")")
            return encode_sentence(x) if isinstance(x, Formula) else encode_term(x)
        raise ParseError(f"expected a natural or (godel ...), found ({head}", hpos)
    if tok.isdigit():
        return int(tok)
    raise ParseError(f"expected a natural number, found {tok!r}", pos)


def _parse_term_head(ts: _Tokens, head: str, pos: int) -> Term:
    if head == "s":
        arg = _parse_term(ts)
        ts.expect(")")
        return Succ(arg)
    if head in ("+", "*"):
        left, right = _parse_term(ts), _parse_term(ts)
        ts.expect(")")
        return Add(left, right) if head == "+" else Mul(left, right)
    if head == "kappa":
        i = _parse_nat(ts)
        ts.expect(")")
        return Kappa(i)
    if head in ("sub", "iterbox"):
        left, right = _parse_term(ts), _parse_term(ts)
        ts.expect(")")
        return Fn(head, (left, right))
    if head == "num":
        arg = _parse_term(ts)
        ts.expect(")")
        return Fn("num", (arg,))
    if head == "num-boxed":
        arg = _parse_term(ts)
        ts.expect(")")
        return Fn("numboxed", (arg,))
    if head in ("num-of", "godel"):
        if head == "num-of":
            n = _parse_nat(ts)
        else:
            x = _parse_any(ts)
            n = encode_sentence(x) if isinstance(x, Formula) else encode_term(x)
        ts.expect(")")
        return numeral_of(n)
    raise ParseError(f"unknown term operator {head!r}", pos)


def _parse_term(ts: _Tokens) -> Term:
    tok, pos = ts.next()
    if tok == "(":
        head, hpos = ts.next()
        return _parse_term_head(ts, head, hpos)
    if tok.isdigit():
        return numeral_of(int(tok))
    if _VAR_RE.fullmatch(tok) and tok not in _RESERVED:
        return Var(tok)
    raise ParseError(f"expected a term, found {tok!r}", pos)


_FORMULA_HEADS = {"=", "box", "->", "and", "or", "not", "forall", "exists",
                  "act", "prov", "ax", "proofof"}


def _parse_formula_head(ts: _Tokens, head: str, pos: int) -> Formula:
    if head == "=":
        left, right = _parse_term(ts), _parse_term(ts)
        ts.expect(")")
        return Eq(left, right)
    if head == "box":
        arg = _parse_term(ts)
        ts.expect(")")
        return Box(arg)
    if head in ("->", "and", "or"):
        left, right = _parse_formula(ts), _parse_formula(ts)
        ts.expect(")")
        return {"->": Imp, "and": And, "or": Or}[head](left, right)
    if head == "not":
        arg = _parse_formula(ts)
        ts.expect(")")
        return neg(arg)
    if head in ("forall", "exists"):
        tok, vpos = ts.next()
        if not _VAR_RE.fullmatch(tok) or tok in _RESERVED:
            raise ParseError(f"expected a variable, found {tok!r}", vpos)
        body = _parse_formula(ts)
        ts.expect(")")
        return (Forall if head == "forall" else Exists)(tok, body)
    if head == "act":
        i = _parse_nat(ts)
        arg = _parse_term(ts)
        ts.expect(")")
        return Rel(f"act{i}", (arg,))
    if head in ("prov", "ax", "proofof"):
        tok, tpos = ts.next()
        if not _THEORY_RE.fullmatch(tok):
            raise ParseError(f"expected a theory name, found {tok!r}", tpos)
        args = [_parse_term(ts)]
        if head == "proofof":
            args.append(_parse_term(ts))
        ts.expect(")")
        return Rel(f"{head}:{tok}", tuple(args))
    raise ParseError(f"unknown formula operator {head!r}", pos)


def _parse_formula(ts: _Tokens) -> Formula:
    tok, pos = ts.next()
    if tok == "gamma":
        return Rel("gamma", ())
    if tok != "(":
        raise ParseError(f"expected a formula, found {tok!r}", pos)
    head, hpos = ts.next()
    if head in _FORMULA_HEADS:
        return _parse_formula_head(ts, head, hpos)
    raise ParseError(f"unknown formula operator {head!r}", hpos)


def _parse_any(ts: _Tokens) -> Union[Term, Formula]:
    peeked = ts.peek()
    if peeked is None:
        raise ParseError("unexpected end of input", len(ts.text))
    tok, pos = peeked
    if tok == "gamma":
        return _parse_formula(ts)
    if tok != "(":
        return _parse_term(ts)
    ts.next()
    head, hpos = ts.next()
    if head in _FORMULA_HEADS:
        return _parse_formula_head(ts, head, hpos)
    return _parse_term_head(ts, head, hpos)


def _finish(ts: _Tokens, x):
    if not ts.at_end():
        tok, pos = ts.peek()
        raise ParseError(f"trailing input {tok!r}", pos)
    return x


Tokens = _Tokens


def parse_term_stream(ts: _Tokens) -> Term:
    return _parse_term(ts)


def parse_formula_stream(ts: _Tokens) -> Formula:
    return _parse_formula(ts)


def parse_term(text: str) -> Term:
    """Parse a term from canonical s-expression text."""
    return _finish((ts := _Tokens(text)), _parse_term(ts))


def parse_formula(text: str) -> Formula:
    """Parse a formula; free variables are allowed (scheme instantiation)."""
    return _finish((ts := _Tokens(text)), _parse_formula(ts))


def parse_sentence(text: str) -> Formula:
    """Parse a sentence; rejects open formulas with FreeVariableError."""
    a = parse_formula(text)
    if a.free:
        raise FreeVariableError(a.free)
    return a
