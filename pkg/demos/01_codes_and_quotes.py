"""Codes and quotation: the object language, canonical numerals, and the
box operator applied to Gödel codes.

Run:  python demos/01_codes_and_quotes.py
"""

from asrt.syntax import (
    FALSUM, box_quote, decode_code, encode_sentence, eval_term, fmt,
    numeral_of, parse_sentence, parse_term, strip_box,
)

# Sentences are s-expressions; negation is notation for implying 0 = 1.
a = parse_sentence("(not (= (s 0) 0))")
print("a sentence:   ", fmt(a))

# Every sentence has a code, and decode inverts encode on the image.
code = encode_sentence(a)
print("its code:     ", code)
print("decodes back: ", fmt(decode_code(code)))
print("off the image:", decode_code(0))

# Canonical numerals are dyadic, so the numeral of a code stays small.
n = numeral_of(code)
print("numeral value:", eval_term(n))

# box_quote(A) is box applied to the numeral of A's code; strip_box inverts.
boxed = box_quote(FALSUM)
print("box<0=1>:     ", fmt(boxed))
print("stripped:     ", fmt(strip_box(boxed)))

# Quotation layers add only a constant number of bits per layer, so iterated
# assertibility stays representable.
b = FALSUM
for k in range(1, 7):
    b = box_quote(b)
    print(f"box^{k}<0=1> code bits:", encode_sentence(b).bit_length())

# The same sentence through parser sugar: (godel X) is the literal code of X.
sugar = parse_sentence("(box (num-of (godel (= 0 1))))")
assert sugar == boxed
print("sugar parses to the same tree:", fmt(sugar))

# iterbox arithmetizes quotation: iterbox(k, g) is the code of box^k applied
# to the sentence coded g.
it = parse_term("(iterbox 3 (godel (= 0 1)))")
lhs = eval_term(it)
rhs = encode_sentence(box_quote(box_quote(box_quote(FALSUM))))
assert lhs == rhs
print("iterbox(3, <0=1>) == code of box^3<0=1>:", lhs == rhs)
