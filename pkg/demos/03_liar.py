"""Self-reference without paradox: the liar sentence and the two hazards.

A sentence L says of itself that it is not assertible: L <-> not box<L>.
Assuming L yields both not box<L> (through the fixed point) and box<L>
(through capture), so not L is a theorem -- and then box<not L>, and the
collapse lemma box<L> -> box<falsehood>. But nothing stronger: neither L,
nor not box<L>, nor box<falsehood> itself is derivable. Adding release
(box<L> -> L) refutes itself; adding excluded middle over box<L> proves
box<falsehood>.

Run:  python demos/03_liar.py
"""

from asrt.syntax import eval_term, encode_sentence, fmt
from asrt.kernel import check_proof, sbox_pa
from asrt.diagonal import hazard_demos, liar_suite

t = sbox_pa()
suite = liar_suite(t)
liar = suite.liar

print("the liar:", fmt(liar))
print()

# Its box argument evaluates to its own code.
inner = liar.left.arg
print("inner term value == own code:",
      eval_term(inner) == encode_sentence(liar))

print("fixed point, forward: ", fmt(suite.fixed_point.forward.conclusion)[:80])
print("fixed point, backward:", fmt(suite.fixed_point.backward.conclusion)[:80])
print()

for label, proof in [("not L", suite.not_liar),
                     ("box<not L>", suite.boxed_not_liar),
                     ("box<L> -> box<falsehood>", suite.collapse)]:
    ok = check_proof(t, proof).accepted
    print(f"{label:28s} {len(proof.lines):3d} lines  accepted={ok}")

print()
print("never derived:", ", ".join(fmt(s)[:40] for s in suite.excluded_conclusions()))
print()

release, em = hazard_demos(t, suite=suite)
print("release hazard:", fmt(release.conclusion)[:90])
print("  (a release implication for L is refutable)")
print("excluded-middle hazard:", fmt(em.conclusion)[:90])
print("  (deciding box<L> either way forces box<falsehood>)")
