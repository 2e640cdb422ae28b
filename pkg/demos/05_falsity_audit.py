"""The stratified falsity audit: a bounded, tri-state realization of the
semantics under which no theorem of a sound configuration is ever judged
false.

Run:  python demos/05_falsity_audit.py
"""

from asrt.syntax import FALSUM, box_quote, fmt, parse_sentence
from asrt.semantics import FalsityLedger, audit_corpus
from asrt.corpus import build_corpus, build_unsound_corpus
from asrt.kernel import ProofStore

ledger = FalsityLedger(stages=5, bound=64)

# 0 = 1 is false at every stage; box enters one stage later per layer.
print("0=1 at stage 0:        ", ledger.member(FALSUM, 0).value)
a = FALSUM
for k in range(1, 6):
    a = box_quote(a)
    print(f"box^{k}<0=1> at {k}/{k-1}:   ",
          ledger.member(a, k).value, "/", ledger.member(a, k - 1).value)

# Quantifiers scan 0..bound; recognized tame matrices get definitive
# verdicts, with root certificates reaching past the bound.
examples = [
    "(forall x (= x x))",
    "(forall n (or (= n n) (= 0 1)))",
    "(exists n (= n (s n)))",
    "(forall n (not (= (* n n) (num-of 9409))))",   # witness at 97 > bound
]
for text in examples:
    print(f"{text:48s}", ledger.member(parse_sentence(text), 5).value)

# indeterminate records bound exhaustion, never a definitive claim
u = parse_sentence("(forall g (-> (prov sbox-pa g) (box g)))")
print(f"{fmt(u):48s}", ledger.member(u, 5).value)
print()

# Audit the whole regression corpus: zero theorems in the falsity set.
store = ProofStore()
corpus = build_corpus(store)
report = audit_corpus(ledger, corpus, 5)
print(f"sound corpus: {len(corpus)} theorems, flagged={len(report.flagged)}, "
      f"out={report.out_count}, indeterminate={report.indeterminate_count}, "
      f"mp spot-checks={report.mp_checked}")

# The unsound base is caught: box<0=1> is flagged at stage 1.
bad = build_unsound_corpus()
report = audit_corpus(ledger, bad, 1)
print("unsound corpus flagged:",
      [fmt(s) for s, _ in report.flagged])
