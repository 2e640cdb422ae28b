import random

import pytest

from asrt.syntax import (
    Add, And, Box, Eq, Exists, Fn, Forall, Imp, Kappa, Mul, Or, Rel, Succ,
    Var,
    FALSUM, ONE, TWO, ZERO,
    CaptureError, EvalError, FreeVariableError, ParseError,
    box_quote, close_over, decode_code, encode_sentence, encode_term,
    eval_term, fmt, numeral_of, parse_formula, parse_sentence,
    parse_term, quote_term, sorted_vars, strip_box, substitute,
    substitute_numeral,
)


def test_parse_smallest_sentence():
    a = parse_sentence("(= 0 0)")
    assert a == Eq(ZERO, ZERO)


def test_parse_box_of_godel_code():
    a = parse_sentence("(box (num-of (godel (= 0 1))))")
    assert a == box_quote(FALSUM)
    assert isinstance(a, Box) and a.arg.canon == encode_sentence(FALSUM)


def test_parse_quantified_implication():
    a = parse_sentence("(forall n (-> (= n n) (= n n)))")
    assert isinstance(a, Forall) and isinstance(a.body, Imp)
    assert parse_sentence(fmt(a)) == a


def test_parse_rejects_open_formula():
    with pytest.raises(FreeVariableError) as e:
        parse_sentence("(= n 0)")
    assert "n" in str(e.value)
    assert parse_formula("(= n 0)").free == {"n"}


def test_parse_errors_carry_position():
    with pytest.raises(ParseError):
        parse_sentence("(= 0")
    with pytest.raises(ParseError):
        parse_sentence("(= 0 0) junk")
    with pytest.raises(ParseError):
        parse_sentence("(frobnicate 0)")


def test_negation_is_notation():
    a = parse_sentence("(not (= 0 0))")
    assert a == Imp(Eq(ZERO, ZERO), FALSUM)
    assert fmt(a) == "(not (= 0 0))"


def test_substitute_numeral_basic():
    a = parse_formula("(= n 0)")
    assert substitute_numeral(a, "n", 0) == parse_sentence("(= 0 0)")


def test_substitute_numeral_bound_shadowing():
    a = parse_formula("(forall n (= n n))")
    assert substitute_numeral(a, "n", 5) == a


def test_substitute_action_antecedent():
    a = parse_formula("(act 1 n)")
    out = substitute_numeral(a, "n", 9)
    assert out == Rel("act1", (numeral_of(9),))


def test_substitution_commutes_for_distinct_variables():
    rnd = random.Random(11)
    a = parse_formula("(and (= n m) (forall k (-> (= k n) (= m k))))")
    for _ in range(50):
        i, j = rnd.randrange(40), rnd.randrange(40)
        one = substitute_numeral(substitute_numeral(a, "n", i), "m", j)
        other = substitute_numeral(substitute_numeral(a, "m", j), "n", i)
        assert one == other


def test_substitute_capture_rejected():
    a = parse_formula("(forall m (= n m))")
    with pytest.raises(CaptureError):
        substitute(a, "n", Var("m"))


def test_numeral_values():
    assert numeral_of(0) == ZERO
    assert numeral_of(1) == Succ(ZERO)
    assert numeral_of(2) == Mul(TWO, ONE)
    for n in [0, 1, 2, 3, 17, 255, 1024]:
        assert eval_term(numeral_of(n)) == n


def test_numeral_soundness_random_256_bit():
    rnd = random.Random(2)
    for _ in range(100):
        n = rnd.getrandbits(256)
        assert eval_term(numeral_of(n)) == n


def test_numeral_soundness_to_one_million():
    for n in range(1_000_001):
        assert numeral_of(n).canon == n
    # spot-check the evaluator against an independent recursive evaluator
    def slow_eval(t):
        if isinstance(t, Succ):
            return slow_eval(t.arg) + 1
        if isinstance(t, Mul):
            return slow_eval(t.left) * slow_eval(t.right)
        if isinstance(t, Add):
            return slow_eval(t.left) + slow_eval(t.right)
        assert t == ZERO
        return 0
    for n in range(0, 1_000_001, 9973):
        t = numeral_of(n)
        assert eval_term(t) == slow_eval(t) == n


def test_numeral_size_is_logarithmic():
    def size(t):
        if t.canon in (0, 1):
            return 1 + (t.canon or 0)
        return 1 + size(t.right if isinstance(t, Mul) else t.arg)
    assert size(numeral_of(2 ** 64)) < 200


def test_eval_arithmetic():
    t = parse_term("(* (s (s 0)) (s (s 0)))")
    assert eval_term(t) == 4
    assert eval_term(parse_term("(+ 3 4)")) == 7


def test_eval_kappa_requires_assignment():
    t = Kappa(1)
    with pytest.raises(EvalError):
        eval_term(t)
    assert eval_term(t, {1: 9}) == 9
    assert eval_term(Succ(Kappa(2)), {2: 3}) == 4


def test_eval_open_term_rejected():
    with pytest.raises(EvalError):
        eval_term(Var("n"))


def test_eval_iterbox_matches_double_encode():
    g = encode_sentence(FALSUM)
    t = Fn("iterbox", (numeral_of(2), numeral_of(g)))
    assert eval_term(t) == encode_sentence(box_quote(box_quote(FALSUM)))


def test_eval_num_matches_encoder():
    for n in [0, 1, 2, 7, 100]:
        t = Fn("num", (numeral_of(n),))
        assert eval_term(t) == encode_term(numeral_of(n))


def test_eval_sub_substitutes_first_variable():
    a = parse_formula("(-> (act 1 n) gamma)")
    g = encode_sentence(a)
    t = Fn("sub", (numeral_of(g), numeral_of(7)))
    assert eval_term(t) == encode_sentence(substitute_numeral(a, "n", 7))


def test_eval_sub_identity_off_image():
    t = Fn("sub", (ZERO, ZERO))
    assert eval_term(t) == 0   # 0 codes no formula; identity fallback


def test_box_quote_strip_box():
    a = parse_sentence("(forall x (= x x))")
    b = box_quote(a)
    assert strip_box(b) == a
    assert strip_box(box_quote(b)) == b
    assert strip_box(parse_sentence("(= 0 0)")) is None
    assert strip_box(Box(Kappa(1))) is None         # kappa term: no strip
    assert strip_box(Box(Var("n"))) is None         # open term: no strip


def test_box_quote_requires_sentence():
    with pytest.raises(FreeVariableError):
        box_quote(parse_formula("(= n n)"))


def test_quote_term_open_formula():
    a = parse_formula("(and (= n m) (= m n))")
    q = quote_term(a)
    assert isinstance(q, Fn) and q.name == "sub"
    # chain substitutes in canonical order: first m, then n? order is shortlex
    assert sorted_vars(a.free) == ["m", "n"]


def test_close_over_vacuous_ok():
    a = close_over(("m", "n"), parse_formula("(= n n)"))
    assert a.closed and isinstance(a, Forall) and a.var == "m"


def _random_term(rnd, depth, vars_):
    if depth == 0 or rnd.random() < 0.3:
        choice = rnd.random()
        if vars_ and choice < 0.35:
            return Var(rnd.choice(vars_))
        if choice < 0.5:
            return Kappa(rnd.randrange(1, 4))
        return numeral_of(rnd.randrange(0, 40))
    k = rnd.randrange(6)
    if k == 0:
        return Succ(_random_term(rnd, depth - 1, vars_))
    if k == 1:
        return Add(_random_term(rnd, depth - 1, vars_),
                   _random_term(rnd, depth - 1, vars_))
    if k == 2:
        return Mul(_random_term(rnd, depth - 1, vars_),
                   _random_term(rnd, depth - 1, vars_))
    if k == 3:
        return Fn("sub", (_random_term(rnd, depth - 1, vars_),
                          _random_term(rnd, depth - 1, vars_)))
    if k == 4:
        return Fn("num", (_random_term(rnd, depth - 1, vars_),))
    return Fn("iterbox", (_random_term(rnd, depth - 1, vars_),
                          _random_term(rnd, depth - 1, vars_)))


def _random_formula(rnd, depth, vars_):
    if depth == 0 or rnd.random() < 0.3:
        k = rnd.randrange(4)
        if k == 0:
            return Eq(_random_term(rnd, 2, vars_), _random_term(rnd, 2, vars_))
        if k == 1:
            return Box(_random_term(rnd, 2, vars_))
        if k == 2:
            return Rel("gamma", ())
        return Rel(f"act{rnd.randrange(1, 4)}", (_random_term(rnd, 1, vars_),))
    k = rnd.randrange(6)
    if k < 3:
        return [And, Or, Imp][k](_random_formula(rnd, depth - 1, vars_),
                                 _random_formula(rnd, depth - 1, vars_))
    if k == 3:
        return Rel(f"prov:sbox-pa", (_random_term(rnd, 1, vars_),))
    v = rnd.choice("nmgk") + (str(rnd.randrange(3)) if rnd.random() < 0.4 else "")
    q = Forall if k == 4 else Exists
    return q(v, _random_formula(rnd, depth - 1, vars_ + [v]))


def test_roundtrip_print_parse_and_codec_random():
    rnd = random.Random(42)
    for _ in range(10_000):
        a = _random_formula(rnd, rnd.randrange(1, 9), [])
        assert parse_formula(fmt(a)) == a
        assert decode_code(encode_sentence(a)) == a


def test_box_quote_injective_on_random_corpus():
    rnd = random.Random(5)
    seen = {}
    for _ in range(500):
        a = _random_formula(rnd, 3, [])
        if a.free:
            a = close_over(sorted_vars(a.free), a)
        b = box_quote(a)
        key = encode_sentence(b)
        assert seen.setdefault(key, a) == a
