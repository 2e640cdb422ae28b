"""Reflection: every theorem's proof transforms into a proof of its own
assertibility, and the transformation iterates.

Run:  python demos/04_reflection.py
"""

from asrt.syntax import FALSUM, box_quote, fmt, parse_sentence, strip_box
from asrt.kernel import Builder, check_proof, sbox_pa, sbox_pa_incon
from asrt.reflection import (
    assertible_consistency_instance, reflect_iterated, reflect_theorem,
)

t = sbox_pa()

# Start from a one-line proof of an axiom.
b = Builder(t)
b.axiom(parse_sentence("(forall x (= x x))"))
proof = b.checked_proof()

trace = reflect_theorem(t, proof)
print("source:    ", fmt(proof.conclusion))
print("reflected: ", fmt(trace.conclusion))
print("lines:", len(trace.output.lines), " accepted:",
      check_proof(t, trace.output).accepted)
print()

# A proof with a quantified modus ponens step exercises the distribution
# chain: unfold box through the quantifier, conjoin, recombine, fold back.
from asrt.syntax import Imp, Or, close_over, parse_formula
nn = parse_formula("(= n n)")
b = Builder(t)
i1 = b.axiom(parse_sentence("(forall n (= n n))"))
i2 = b.axiom(close_over(("n",), Imp(nn, Or(nn, FALSUM))))
b.mp(i1, i2)
mp_proof = b.checked_proof()
trace = reflect_theorem(t, mp_proof)
print("distribution chain stations:")
for station in trace.mp_chains[0].milestones():
    print("   ", fmt(station)[:84])
print()

# Iterate: box<box<...>>, re-checked at each stage.
twice = reflect_iterated(t, proof, 2)
print("two layers:", fmt(twice.conclusion)[:60])
print("peels back to the source:",
      strip_box(strip_box(twice.conclusion)) == proof.conclusion)
print()

# Instance-wise assertible consistency: for each g, a checked proof that the
# claim "g is not the code of a proof of 0 = 1" is assertible.
for g in (0, 1, 200):
    p = assertible_consistency_instance(t, g)
    print(f"g={g}: {fmt(p.conclusion)[:60]}... accepted:",
          check_proof(t, p).accepted)
print()

# Over an unsound base, reflection makes box<0 = 1> a theorem -- soundness of
# the base, not its mere consistency, is what keeps assertibility honest.
ti = sbox_pa_incon()
b = Builder(ti)
b.axiom(FALSUM)
bad = reflect_theorem(ti, b.checked_proof())
print("unsound base proves:", fmt(bad.conclusion),
      "==", "box<0=1>:", bad.conclusion == box_quote(FALSUM))
