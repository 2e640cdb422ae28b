import random

import pytest

from asrt.syntax import (
    Box, Eq, Imp, Or, Var,
    FALSUM, box_quote, decode_code, encode_sentence, neg, numeral_of,
    parse_formula,
)
from asrt.kernel import (
    KernelError, check_proof, proof_from_sexp, proof_to_sexp,
)
from asrt.diagonal import diagonalize, hazard_demos, liar_suite


@pytest.fixture(scope="module")
def suite(t_box):
    return liar_suite(t_box)


def test_liar_fixed_point_biconditional(t_box, suite):
    fp = suite.fixed_point
    liar = fp.sentence
    quoted = neg(Box(numeral_of(encode_sentence(liar))))
    assert fp.quoted_instance == quoted
    assert fp.forward.conclusion == Imp(liar, quoted)
    assert fp.backward.conclusion == Imp(quoted, liar)
    assert check_proof(t_box, fp.forward).accepted
    assert check_proof(t_box, fp.backward).accepted


def test_liar_self_reference(suite):
    """The liar's box argument evaluates to the liar's own code."""
    from asrt.syntax import eval_term
    liar = suite.liar
    assert isinstance(liar, Imp) and isinstance(liar.left, Box)
    assert eval_term(liar.left.arg) == encode_sentence(liar)


def test_suite_exact_conclusions(t_box, suite):
    liar = suite.liar
    assert suite.not_liar.conclusion == neg(liar)
    assert suite.boxed_not_liar.conclusion == box_quote(neg(liar))
    assert suite.collapse.conclusion == Imp(box_quote(liar), box_quote(FALSUM))
    for proof in (suite.not_liar, suite.boxed_not_liar, suite.collapse):
        assert check_proof(t_box, proof).accepted


def test_suite_never_derives_the_forbidden(suite, t_box):
    """No accepted output line is falsehood, box<falsehood>, the liar, or
    the liar's unboxed negation target."""
    release, em = hazard_demos(t_box, suite=suite)
    excluded = set(suite.excluded_conclusions())
    for proof in (suite.not_liar, suite.boxed_not_liar, suite.collapse,
                  release, em, suite.fixed_point.forward,
                  suite.fixed_point.backward):
        for line in proof.lines:
            assert line.sentence not in excluded


def test_release_hazard_exact(t_box, suite):
    release, _ = hazard_demos(t_box, suite=suite)
    assert release.conclusion == neg(Imp(box_quote(suite.liar), suite.liar))
    assert check_proof(t_box, release).accepted


def test_em_hazard_exact(t_box, suite):
    _, em = hazard_demos(t_box, suite=suite)
    liar_box = box_quote(suite.liar)
    assert em.conclusion == Imp(Or(liar_box, neg(liar_box)), box_quote(FALSUM))
    assert check_proof(t_box, em).accepted


def test_hazards_recheck_after_serialization(t_box, suite):
    for proof in hazard_demos(t_box, suite=suite):
        again = proof_from_sexp(proof_to_sexp(proof))
        assert again == proof
        assert check_proof(t_box, again).accepted


def test_diagonalize_constant(t_box):
    fp = diagonalize(t_box, parse_formula("(-> (= x x) (= 0 0))"), "x")
    assert check_proof(t_box, fp.forward).accepted
    assert check_proof(t_box, fp.backward).accepted


def test_diagonalize_variable_free_formula(t_box):
    """A formula with no occurrence of the designated variable is its own
    fixed point: L is (= 0 0) itself and the biconditional is trivial."""
    from asrt.syntax import parse_sentence
    d = parse_sentence("(= 0 0)")
    fp = diagonalize(t_box, d, "x")
    assert fp.sentence == d and fp.quoted_instance == d
    assert check_proof(t_box, fp.forward).accepted
    assert check_proof(t_box, fp.backward).accepted


def test_diagonalize_truth_teller(t_box):
    fp = diagonalize(t_box, Box(Var("x")), "x")
    assert fp.sentence == fp.forward.conclusion.left
    assert check_proof(t_box, fp.forward).accepted
    assert check_proof(t_box, fp.backward).accepted


def test_diagonalize_arity_check(t_box):
    with pytest.raises(KernelError):
        diagonalize(t_box, parse_formula("(= x y)"), "x")
    with pytest.raises(KernelError):
        diagonalize(t_box, parse_formula("(= y y)"), "x")


def _random_box_free_formula(rnd, var):
    from asrt.syntax import Add, And, Mul, Or as OrF, Succ
    def term(depth):
        if depth == 0 or rnd.random() < 0.4:
            return Var(var) if rnd.random() < 0.4 else numeral_of(rnd.randrange(9))
        k = rnd.randrange(3)
        if k == 0:
            return Succ(term(depth - 1))
        return (Add if k == 1 else Mul)(term(depth - 1), term(depth - 1))
    def formula(depth):
        if depth == 0 or rnd.random() < 0.4:
            return Eq(term(2), term(2))
        k = rnd.randrange(3)
        return [And, OrF, Imp][k](formula(depth - 1), formula(depth - 1))
    while True:
        a = formula(3)
        if a.free == {var}:
            return a


def test_fixed_point_law_random(t_box):
    rnd = random.Random(8)
    for _ in range(20):
        d = _random_box_free_formula(rnd, "x")
        fp = diagonalize(t_box, d, "x")
        assert check_proof(t_box, fp.forward).accepted
        assert check_proof(t_box, fp.backward).accepted
        assert decode_code(encode_sentence(fp.sentence)) == fp.sentence
