"""Grade model responses: boxed-answer extraction and normalized comparison."""

from mentalese import extract_boxed, normalize_answer, verify

GOLD = "27"

RESPONSES = {
    "compact symbolic": "<think>\nSET:n;SUM:n+(n+1)+(n+2)=3n+3;EQ:3n+3=k^3;"
                        "SET:k=3m;EQ:n+1=9m^3;CALC:n=8;SUM:8+9+10=27;ANS:27\n</think>\n\n\\boxed{27}",
    "latex fraction":   "The total is \\boxed{\\frac{54}{2}}",
    "restated twice":   "**Final Answer** \\boxed{27}. Therefore the answer is \\(\\boxed{27}\\).",
    "wrong answer":     "I believe it is \\boxed{28}",
    "no box at all":    "the answer is 27",
}

for label, text in RESPONSES.items():
    verdict = verify(text, GOLD)
    print(f"{label:18} correct={verdict.correct}  reason={verdict.reason.value:20} "
          f"extracted={verdict.extracted!r}")

# The pieces are available separately: extraction is brace-matching aware
# and takes the LAST balanced box; normalization rewrites LaTeX idioms.
print()
print("extract:  ", extract_boxed("first \\boxed{1}, finally \\boxed{-\\frac{2}{3}}"))
print("normalize:", normalize_answer("-\\frac{2}{3}"), "|",
      normalize_answer("\\dfrac{\\sqrt{2}}{2}"), "|", normalize_answer(" +27 "))

# Rational comparison is exact; decimals use a 1e-9 absolute tolerance.
print()
print("0.5 vs 1/2:", verify("\\boxed{0.5}", "1/2").reason.value)
print("10^-12 off:", verify("\\boxed{1000000000001/1000000000000}", "1").correct)
