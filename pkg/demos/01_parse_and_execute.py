"""Parse a symbolic reasoning trace, inspect it, execute it.

A trace is a semicolon-joined list of OPERATION:expression steps ending in
one ANS step.  Payloads may mix LaTeX and ASCII math freely.
"""

from mentalese import execute, parse_trace, print_trace, validate_trace, value_to_string

TRACE = r"""
DEF: $\otimes(a,b)=a^2/b$;
CALC1: $x = 1 \otimes 2 = 1/2$;
CALC2: $y = x \otimes 3 = (1/2)^2/3 = 1/12$;
CALC3: $z = 2 \otimes 3 = 4/3$;
CALC4: $w = 1 \otimes z = 1/(4/3) = 3/4$;
SUB: $y-w = 1/12 - 3/4 = -8/12 = -2/3$;
ANS: $\boxed{-\frac{2}{3}}$.
"""

trace = parse_trace(TRACE)
print(f"parsed {len(trace)} steps:")
for step in trace:
    print(f"  {step.op.name:6} ({step.op.kind:8})  {step.payload}")

# The linter reports structural problems; an empty report means valid.
print("\nvalidation report:", validate_trace(trace) or "clean")

# Canonical printing normalizes whitespace and LaTeX down to plain math.
print("\ncanonical form:")
print(" ", print_trace(trace))

# Execution is exact: the answer comes back as the rational -2/3, not a float.
result = execute(trace)
print("\nanswer:", value_to_string(result.answer))
print("steps executed:", result.steps_executed)
print("warnings:", list(result.warnings) or "none")

# Traces with case splits re-solve the same unknown independently per case.
CASES = (
    "SET:w;EQ:abs(180-5.5*w)=110;"
    "CASE1:180-5.5*w=110;SOLVE1:w=70/5.5;"
    "CASE2:180-5.5*w=-110;SOLVE2:w=290/5.5;"
    "CALC1:w1=70/5.5=12+8/11;CALC2:w2=290/5.5=52+8/11;"
    "DIFF:t=w2-w1=40;ANS:40"
)
print("\ncase-split trace answer:", value_to_string(execute(parse_trace(CASES)).answer))
