import random

import pytest

from asrt.syntax import (
    And, Box, Eq, Exists, Forall, Imp, Or, Rel, Succ, Var,
    FALSUM,
    box_quote, close_over, encode_sentence, fmt, neg, numeral_of,
    parse_formula, parse_sentence, quote_term,
)
from asrt.kernel import (
    AxiomStep, Builder, HypStep, InvalidDerivation, KernelError,
    MPStep, ProofLine, ProofObject, ProofStore,
    admit_computation, capture_axiom, check_proof, discharge_hypothesis,
    dist_lemma, extend_theory, is_axiom, jump_axiom_of, preset_theory,
    proof_code_valid, proof_from_sexp, proof_to_sexp, sstar,
    under_quantifier_mp,
)


# ---------------------------------------------------------------------------
# Axiom recognizers
# ---------------------------------------------------------------------------

def test_jump_axiom_recognized(t_box):
    assert is_axiom(t_box, jump_axiom_of(t_box)).rule == "jump"
    assert is_axiom(t_box, jump_axiom_of(t_box, "v")).rule == "jump"


def test_jump_axiom_not_in_pa(t_pa, t_box):
    assert is_axiom(t_pa, jump_axiom_of(t_box)) is None


def test_box_or_axiom_both_directions(t_box):
    a, b = parse_sentence("(= 0 0)"), FALSUM
    fwd = Imp(Box(quote_term(Or(a, b))),
              Or(Box(quote_term(a)), Box(quote_term(b))))
    bwd = Imp(Or(Box(quote_term(a)), Box(quote_term(b))),
              Box(quote_term(Or(a, b))))
    assert is_axiom(t_box, fwd).rule == "box-or-fwd"
    assert is_axiom(t_box, bwd).rule == "box-or-bwd"


def test_release_is_not_an_axiom(t_box):
    a = parse_sentence("(= 0 0)")
    assert is_axiom(t_box, Imp(box_quote(a), a)) is None


def test_capture_closed_and_open(t_box):
    a = parse_sentence("(= 0 0)")
    assert is_axiom(t_box, capture_axiom(a)).rule == "capture"
    open_ = parse_formula("(= n n)")
    cap = capture_axiom(open_)
    assert cap.closed and is_axiom(t_box, cap).rule == "capture"


def test_excluded_middle_box_free_only(t_box):
    a = parse_sentence("(= 0 0)")
    assert is_axiom(t_box, Or(a, neg(a))).rule == "excluded-middle"
    boxed = box_quote(a)
    assert is_axiom(t_box, Or(boxed, neg(boxed))) is None


def test_generalization_implications(t_box):
    nn = parse_formula("(= n n)")
    closed = parse_sentence("(= 0 0)")
    gi1 = Imp(Forall("n", Imp(closed, nn)), Imp(closed, Forall("n", nn)))
    assert is_axiom(t_box, gi1).rule == "gen-forall"
    gi2 = Imp(Forall("n", Imp(nn, closed)), Imp(Exists("n", nn), closed))
    assert is_axiom(t_box, gi2).rule == "gen-exists"
    # freshness condition violated: n free in the stationary side
    bad = Imp(Forall("n", Imp(nn, nn)), Imp(nn, Forall("n", nn)))
    assert bad.free or is_axiom(t_box, bad) is None


def test_forall_elim_with_prefix_covered_term(t_box):
    nn = parse_formula("(= n n)")
    inst = close_over(("m",), Imp(Forall("n", nn),
                                  parse_formula("(= m m)")))
    assert is_axiom(t_box, inst).rule == "forall-elim"
    # term outside the prefix is rejected
    loose = Imp(Forall("n", nn), parse_formula("(= m m)"))
    assert loose.free


def test_forall_elim_capture_rejected(t_box):
    # (forall n)(exists m)(n = m) -> (exists m)(m = m) would capture m
    body = Exists("m", Eq(Var("n"), Var("m")))
    bad = close_over(("m",), Imp(Forall("n", body),
                                 Exists("m", Eq(Var("m"), Var("m")))))
    assert is_axiom(t_box, bad) is None


def test_induction_over_box_language(t_box):
    a = parse_formula("(box (num n))")
    inst = Imp(And(parse_sentence("(box (num 0))"),
                   Forall("n", Imp(a, parse_formula("(box (num (s n)))")))),
               Forall("n", a))
    assert is_axiom(t_box, inst).rule == "induction"


def test_leibniz_replacement(t_box):
    from asrt.syntax import parse_term
    q = parse_term("(sub 3 3)")
    target = numeral_of(17)
    leib = Imp(Eq(q, target), Imp(Box(q), Box(target)))
    assert is_axiom(t_box, leib).rule == "eq-leibniz"
    wrong = Imp(Eq(q, target), Imp(Box(q), Box(numeral_of(18))))
    assert is_axiom(t_box, wrong) is None


def test_iterbox_axioms_only_with_kappa_theory(t_box):
    ts = sstar(2)
    g = numeral_of(7)
    zero_inst = Eq(parse_formula_term("(iterbox 0 7)"), g)
    assert is_axiom(ts, zero_inst).rule == "iterbox-zero"
    assert is_axiom(t_box, zero_inst) is None
    succ_inst = parse_sentence(
        "(= (iterbox (s (kappa 2)) 7) (num-boxed (iterbox (kappa 2) 7)))")
    assert is_axiom(ts, succ_inst).rule == "iterbox-succ"


def parse_formula_term(text):
    from asrt.syntax import parse_term
    return parse_term(text)


def test_kappa_axioms_and_language_bounds():
    ts = sstar(3)
    from asrt.syntax import Kappa
    assert is_axiom(ts, Eq(Kappa(1), Succ(Kappa(2)))).rule == "extra"
    assert is_axiom(ts, Eq(Kappa(2), Succ(Kappa(3)))).rule == "extra"
    assert is_axiom(ts, Eq(Kappa(3), Succ(Kappa(4)))) is None  # out of range


# ---------------------------------------------------------------------------
# Computation axioms and the proof store
# ---------------------------------------------------------------------------

def test_computation_equalities(t_pa):
    assert admit_computation(t_pa, parse_sentence("(= (+ 2 2) 4)")).rule == "comp-eq"
    assert admit_computation(t_pa, parse_sentence("(not (= 2 3))")).rule == "comp-neq"
    assert admit_computation(t_pa, parse_sentence("(= 2 3)")) is None
    assert admit_computation(t_pa, parse_sentence("(not (= 2 2))")) is None


def test_computation_rejects_nonatomic_and_open(t_pa):
    assert admit_computation(t_pa, parse_sentence("(or (= 0 0) (= 0 0))")) is None
    assert admit_computation(t_pa, parse_formula("(= n n)")) is None


def test_computation_ax_claims(t_box):
    g = encode_sentence(parse_sentence("(forall x (= x x))"))
    assert admit_computation(
        t_box, Rel("ax:sbox-pa", (numeral_of(g),))).rule == "comp-ax"
    assert admit_computation(
        t_box, neg(Rel("ax:sbox-pa", (numeral_of(0),)))).rule == "comp-not-ax"
    # jump axiom is not a main axiom
    ja = encode_sentence(jump_axiom_of(t_box))
    assert admit_computation(t_box, Rel("ax:sbox-pa", (numeral_of(ja),))) is None


def test_prov_requires_registered_proof(t_box):
    store = ProofStore()
    a = parse_sentence("(forall x (= x x))")
    claim = Rel("prov:sbox-pa", (numeral_of(encode_sentence(a)),))
    assert admit_computation(t_box, claim, store) is None
    b = Builder(t_box, store)
    b.axiom(a)
    store.register(t_box, b.checked_proof())
    assert admit_computation(t_box, claim, store).rule == "comp-prov"


def test_store_monotonicity(t_box):
    """A fresh (deleted) store invalidates prov admissions made earlier."""
    store = ProofStore()
    a = parse_sentence("(forall x (= x x))")
    b = Builder(t_box, store)
    b.axiom(a)
    store.register(t_box, b.checked_proof())
    claim = Rel("prov:sbox-pa", (numeral_of(encode_sentence(a)),))
    bb = Builder(t_box, store)
    bb.compute(claim)
    proof = bb.checked_proof()
    assert check_proof(t_box, proof, store).accepted
    assert not check_proof(t_box, proof, ProofStore()).accepted


def test_store_rejects_unchecked(t_box):
    store = ProofStore()
    bad = ProofObject(t_box.name, (ProofLine(FALSUM, AxiomStep()),))
    with pytest.raises(KernelError):
        store.register(t_box, bad)


def test_proofof_evaluation(t_pa):
    from asrt.syntax import _list_code
    refl = parse_sentence("(forall x (= x x))")
    p = _list_code([encode_sentence(refl)])
    assert proof_code_valid(t_pa, p, encode_sentence(refl))
    assert not proof_code_valid(t_pa, p, encode_sentence(FALSUM))
    assert not proof_code_valid(t_pa, 0, encode_sentence(FALSUM))
    # with a modus ponens line, searched structurally
    a = parse_sentence("(= 0 0)")
    imp = Imp(a, Or(a, FALSUM))
    p2 = _list_code([encode_sentence(a), encode_sentence(imp),
                     encode_sentence(Or(a, FALSUM))])
    assert proof_code_valid(t_pa, p2, encode_sentence(Or(a, FALSUM)))


# ---------------------------------------------------------------------------
# The checker
# ---------------------------------------------------------------------------

def test_one_line_equality_axiom(t_pa):
    proof = ProofObject("pa", (ProofLine(parse_sentence("(forall x (= x x))"),
                                         AxiomStep()),))
    assert check_proof(t_pa, proof).accepted


def test_empty_proof_rejected(t_pa):
    report = check_proof(t_pa, ProofObject("pa", ()))
    assert not report.accepted and "empty" in report.reason


def test_open_formula_rejected(t_pa):
    proof = ProofObject("pa", (ProofLine(parse_formula("(= n n)"), AxiomStep()),))
    report = check_proof(t_pa, proof)
    assert not report.accepted and report.failed_at == 0


def test_language_enforcement(t_pa):
    proof = ProofObject("pa", (ProofLine(box_quote(FALSUM), AxiomStep()),))
    report = check_proof(t_pa, proof)
    assert not report.accepted and "language" in report.reason


def test_swapped_premises_rejected(t_box):
    nn = parse_formula("(= n n)")
    orn = Or(nn, FALSUM)
    b = Builder(t_box)
    i1 = b.axiom(parse_sentence("(forall n (= n n))"))
    i2 = b.axiom(close_over(("n",), Imp(nn, orn)))
    b.mp(i1, i2)
    good = b.checked_proof()
    last = good.lines[-1]
    swapped = ProofObject(good.theory, good.lines[:-1] + (
        ProofLine(last.sentence, MPStep(major=last.step.minor,
                                        minor=last.step.major)),))
    report = check_proof(t_box, swapped)
    assert not report.accepted and report.failed_at == len(good.lines) - 1


def test_forward_reference_rejected(t_box):
    a = parse_sentence("(= 0 0)")
    lines = (ProofLine(a, MPStep(major=1, minor=1)),
             ProofLine(Imp(a, a), AxiomStep()))
    report = check_proof(t_box, ProofObject("sbox-pa", lines))
    assert not report.accepted and report.failed_at == 0


def test_annotations_do_not_change_verdict(t_box):
    """Swapping axiom/compute intent tags never flips acceptance."""
    b = Builder(t_box)
    b.compute(parse_sentence("(= (+ 2 2) 4)"))
    proof = b.checked_proof()
    relabeled = ProofObject(proof.theory, tuple(
        ProofLine(l.sentence, AxiomStep()) for l in proof.lines))
    assert check_proof(t_box, relabeled).accepted


def test_duplicate_lines_permitted(t_box):
    a = parse_sentence("(forall x (= x x))")
    proof = ProofObject("sbox-pa", (ProofLine(a, AxiomStep()),
                                    ProofLine(a, AxiomStep())))
    assert check_proof(t_box, proof).accepted


def test_hyp_step_rejected_outside_discharge(t_box):
    proof = ProofObject("sbox-pa", (ProofLine(FALSUM, HypStep()),))
    assert not check_proof(t_box, proof).accepted


def test_serialization_roundtrip(t_box):
    b = Builder(t_box)
    i1 = b.axiom(parse_sentence("(forall n (= n n))"))
    i2 = b.axiom(close_over(("n",), Imp(parse_formula("(= n n)"),
                                        Or(parse_formula("(= n n)"), FALSUM))))
    b.mp(i1, i2)
    proof = b.checked_proof()
    again = proof_from_sexp(proof_to_sexp(proof))
    assert again == proof and check_proof(t_box, again).accepted


# ---------------------------------------------------------------------------
# Deduction theorem and quantified modus ponens
# ---------------------------------------------------------------------------

def test_discharge_identity(t_box):
    h = parse_sentence("(box (num-of (godel (= 0 0))))")
    proof = discharge_hypothesis(t_box, h, [(h, HypStep())])
    assert proof.conclusion == Imp(h, h)


def test_discharge_requires_closed_hypothesis(t_box):
    with pytest.raises(InvalidDerivation):
        discharge_hypothesis(t_box, parse_formula("(= n n)"), [])


def test_under_quantifier_mp_op(t_box):
    nn = parse_formula("(= n n)")
    orn = Or(nn, FALSUM)
    pa_ = Builder(t_box)
    pa_.axiom(parse_sentence("(forall n (= n n))"))
    pab = Builder(t_box)
    pab.axiom(close_over(("n",), Imp(nn, orn)))
    out = under_quantifier_mp(t_box, ("n",), pa_.checked_proof(),
                              pab.checked_proof())
    assert out.conclusion == close_over(("n",), orn)
    with pytest.raises(KernelError):
        under_quantifier_mp(t_box, ("m",), pa_.checked_proof(),
                            pab.checked_proof())


def test_plain_mp_via_op(t_box):
    a = parse_sentence("(= 0 0)")
    p1 = Builder(t_box)
    p1.axiom(a)
    p2 = Builder(t_box)
    p2.axiom(Imp(a, Or(a, FALSUM)))
    out = under_quantifier_mp(t_box, (), p1.checked_proof(), p2.checked_proof())
    assert out.conclusion == Or(a, FALSUM)


def _random_hypothetical(rnd, t):
    """A random valid hypothetical derivation; quantified modus ponens with
    both empty and nonempty prefixes."""
    nn = parse_formula("(= n n)")
    pool = [
        parse_sentence("(forall n (= n n))"),
        parse_sentence("(= 0 0)"),
        close_over(("n",), Imp(nn, Or(nn, FALSUM))),
    ]
    h = rnd.choice([
        parse_sentence("(box (num-of (godel (= 0 0))))"),
        parse_sentence("(forall n (not (= n n)))"),
        Or(parse_sentence("(= 0 0)"), FALSUM),
    ])
    steps = [(h, HypStep())]
    for a in rnd.sample(pool, k=rnd.randrange(1, len(pool) + 1)):
        steps.append((a, AxiomStep()))
    # close with quantified modus ponens whenever two lines fit
    sentences = [s for s, _ in steps]
    if close_over(("n",), nn) in sentences and close_over(
            ("n",), Imp(nn, Or(nn, FALSUM))) in sentences:
        i = sentences.index(close_over(("n",), nn))
        j = sentences.index(close_over(("n",), Imp(nn, Or(nn, FALSUM))))
        steps.append((close_over(("n",), Or(nn, FALSUM)),
                      MPStep(major=j, minor=i)))
    if h == parse_sentence("(forall n (not (= n n)))") and close_over(
            ("n",), nn) in sentences:
        i = sentences.index(close_over(("n",), nn))
        steps.append((close_over(("n",), FALSUM), MPStep(major=0, minor=i)))
    return h, steps


def test_deduction_theorem_random(t_box):
    rnd = random.Random(13)
    for _ in range(100):
        h, steps = _random_hypothetical(rnd, t_box)
        proof = discharge_hypothesis(t_box, h, steps)
        assert proof.conclusion == Imp(h, steps[-1][0])
        assert check_proof(t_box, proof).accepted


def test_dist_lemma_two_variables(t_box):
    mm = parse_formula("(= (+ n m) (+ n m))")
    b = Builder(t_box)
    idx = dist_lemma(b, ("n", "m"), mm, Or(mm, FALSUM))
    want = Imp(close_over(("n", "m"), Imp(mm, Or(mm, FALSUM))),
               Imp(close_over(("n", "m"), mm),
                   close_over(("n", "m"), Or(mm, FALSUM))))
    assert b.sentence(idx) == want
    assert check_proof(t_box, b.proof()).accepted


# ---------------------------------------------------------------------------
# Negative controls: generated release and box-excluded-middle families
# ---------------------------------------------------------------------------

def _random_arith_sentence(rnd):
    from test_syntax import _random_formula
    while True:
        a = _random_formula(rnd, rnd.randrange(1, 4), [])
        if not a.free and not a.has_box and not a.has_kappa:
            return a


def test_release_family_rejected(t_box):
    rnd = random.Random(21)
    for _ in range(100):
        a = _random_arith_sentence(rnd)
        release = Imp(box_quote(a), a)
        assert is_axiom(t_box, release) is None, fmt(release)


def test_box_excluded_middle_family_rejected(t_box):
    rnd = random.Random(22)
    for _ in range(100):
        a = _random_arith_sentence(rnd)
        boxed = box_quote(a) if rnd.random() < 0.5 else Box(quote_term(a))
        em = Or(boxed, neg(boxed))
        assert is_axiom(t_box, em) is None, fmt(em)


def test_theory_registry_and_presets():
    assert preset_theory("pa").name == "pa"
    assert preset_theory("sstar-2").kappa_count == 2
    with pytest.raises(KernelError):
        preset_theory("nope")


def test_extended_theory_carries_hypotheses(t_box):
    h = parse_sentence("(= 0 0)")
    d = extend_theory(t_box, "sbox-pa-test-ext", (h,))
    assert is_axiom(d, h).rule == "extra"
    assert is_axiom(t_box, jump_axiom_of(t_box)).rule == "jump"


def test_recognized_axioms_are_classically_true(t_box):
    """Soundness sweep over generated scheme instances: every propositional
    or equality axiom instance built from random closed arithmetic formulas
    is recognized and classically true under term evaluation."""
    from asrt.syntax import And as AndF, eval_formula_atoms, numeral_of

    rnd = random.Random(37)

    def qf(depth):
        if depth == 0 or rnd.random() < 0.4:
            from asrt.syntax import Add, Mul
            mk = lambda: numeral_of(rnd.randrange(0, 7))
            t = Add(mk(), mk()) if rnd.random() < 0.5 else Mul(mk(), mk())
            return Eq(t, numeral_of(rnd.randrange(0, 30)))
        k = rnd.randrange(3)
        return [AndF, Or, Imp][k](qf(depth - 1), qf(depth - 1))

    checked = 0
    for _ in range(300):
        a, b, c = qf(2), qf(2), qf(2)
        instances = [
            Imp(a, Imp(b, a)),
            Imp(Imp(a, Imp(b, c)), Imp(Imp(a, b), Imp(a, c))),
            Imp(a, Imp(b, AndF(a, b))),
            Imp(AndF(a, b), a),
            Imp(AndF(a, b), b),
            Imp(a, Or(a, b)),
            Imp(b, Or(a, b)),
            Imp(Imp(a, c), Imp(Imp(b, c), Imp(Or(a, b), c))),
            Imp(FALSUM, a),
            Or(a, neg(a)),
        ]
        for inst in instances:
            assert is_axiom(t_box, inst) is not None, fmt(inst)
            assert eval_formula_atoms(inst) is True, fmt(inst)
            checked += 1
    assert checked == 3000
