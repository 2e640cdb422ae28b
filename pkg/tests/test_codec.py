"""Codec contract: golden values frozen from the independent reference
encoder, exact roundtrips, and failure off the image."""

import random

from reference_codec import ref_encode, ref_encode_term

from asrt.syntax import (
    Box, Kappa, Rel, Succ, Var,
    FALSUM, ONE, NotAFormula,
    box_quote, decode_code, decode_term_code, encode_sentence, encode_term,
    numeral_of, pair, parse_formula, unpair,
)

# frozen once from the reference encoder; the scheme is fixed, so these are
# stable across runs and platforms
GOLDEN = {
    "(= 0 0)": 14479,
    "(= 0 1)": 231695,
    "(forall x (= x x))": 257232087984885112,
    "(forall g (-> (ax sbox-pa g) (box g)))":
        1367667958521453477991333498655999796589955485575032167,
}
GOLDEN_BOX_FALSUM = 1903134991
GOLDEN_TERMS = {"5": 221, "(s 1)": 783}


def test_golden_values_match_reference_encoder():
    for text, want in GOLDEN.items():
        a = parse_formula(text)
        assert encode_sentence(a) == want
        assert ref_encode(a) == want
    assert encode_sentence(box_quote(FALSUM)) == GOLDEN_BOX_FALSUM
    assert ref_encode(box_quote(FALSUM)) == GOLDEN_BOX_FALSUM
    for text, want in GOLDEN_TERMS.items():
        from asrt.syntax import parse_term
        t = parse_term(text)
        assert encode_term(t) == want
        assert ref_encode_term(t) == want


def test_reference_encoder_agrees_on_random_asts():
    from test_syntax import _random_formula
    rnd = random.Random(77)
    for _ in range(2000):
        a = _random_formula(rnd, 4, [])
        assert ref_encode(a) == encode_sentence(a)


def test_roundtrip_count():
    from test_syntax import _random_formula
    rnd = random.Random(99)
    for _ in range(10_000):
        a = _random_formula(rnd, rnd.randrange(1, 8), [])
        assert decode_code(encode_sentence(a)) == a


def test_decode_zero_not_a_formula():
    out = decode_code(0)
    assert isinstance(out, NotAFormula) and not out


def test_small_codes_never_decode_then_reencode_elsewhere():
    """Enumeration oracle: on 0..4000, decode is the partial inverse of
    encode -- whenever decode succeeds, re-encoding returns the same code,
    and 0 is not in the image."""
    hits = 0
    for c in range(4000):
        a = decode_code(c)
        if not isinstance(a, NotAFormula):
            hits += 1
            assert encode_sentence(a) == c
        t = decode_term_code(c)
        if t is not None:
            assert encode_term(t) == c
    assert hits > 0


def test_noncanonical_numeral_codes_rejected():
    # a structural encoding of the canonical numeral 2 is off the image
    two_structural = pair(3, pair(encode_term(parse_formula_term("(s (s 0))")),
                                  encode_term(ONE)))
    assert decode_term_code(two_structural) is None


def parse_formula_term(text):
    from asrt.syntax import parse_term
    return parse_term(text)


def test_pair_unpair_partial_inverse():
    rnd = random.Random(3)
    for _ in range(5000):
        a = rnd.randrange(0, 1 << rnd.randrange(1, 128))
        b = rnd.randrange(0, 1 << rnd.randrange(1, 128))
        assert unpair(pair(a, b)) == (a, b)
    assert unpair(0) is None


def test_codes_stable_across_quotation_layers():
    """Code growth per quotation layer is bounded by a constant number of
    bits, which keeps deeply iterated boxes representable."""
    a = FALSUM
    sizes = []
    for _ in range(8):
        a = box_quote(a)
        sizes.append(encode_sentence(a).bit_length())
    deltas = [b - a for a, b in zip(sizes, sizes[1:])]
    assert max(deltas) < 64


def test_kappa_and_rel_codes_roundtrip():
    for a in (Box(Kappa(2)), Rel("prov:sstar-2", (numeral_of(5),)),
              Rel("gamma", ()), Rel("act3", (Succ(Var("n")),))):
        if a.free:
            continue
        assert decode_code(encode_sentence(a)) == a
