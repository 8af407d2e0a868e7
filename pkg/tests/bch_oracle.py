"""Independent BCH oracle: truncated series in the free algebra on {A, B}.

Elements are dicts word -> Fraction with words of length <= 3. The product of
flow exponentials is taken in execution order (first flow leftmost), logged,
and the Lie coefficients are read off basis words:

    [A,B]      = AB - BA               -> coefficient of "AB"
    [A,[A,B]]  = AAB - 2ABA + BAA      -> coefficient of "AAB"
    [B,[B,A]]  = BBA - 2BAB + ABB      -> coefficient of "BBA"
"""

from fractions import Fraction

DEPTH = 3


def mul(x, y):
    out = {}
    for u, cu in x.items():
        for v, cv in y.items():
            if len(u) + len(v) <= DEPTH:
                w = u + v
                out[w] = out.get(w, 0) + cu * cv
    return {w: c for w, c in out.items() if c}


def add(x, y, scale=1):
    out = dict(x)
    for w, c in y.items():
        out[w] = out.get(w, 0) + scale * c
    return {w: c for w, c in out.items() if c}


def exp_letter(letter, coeff):
    c = Fraction(coeff)
    return {"": Fraction(1), letter: c, letter * 2: c**2 / 2, letter * 3: c**3 / 6}


def log_series(x):
    y = add(x, {"": Fraction(1)}, -1)
    y2 = mul(y, y)
    y3 = mul(y2, y)
    return add(add(y, y2, Fraction(-1, 2)), y3, Fraction(1, 3))


def bch_coefficients(flows):
    """Return (w11, w12, w21, w31, w32) for a flow list [("A"|"B", coeff), ...]."""
    prod = {"": Fraction(1)}
    for letter, coeff in flows:
        prod = mul(prod, exp_letter(letter, coeff))
    z = log_series(prod)
    w = {k: z.get(k, Fraction(0)) for k in ("A", "B", "AB", "BA", "AAB", "ABA", "BAA", "BBA", "BAB", "ABB")}
    # the log must be a Lie element; check the words the brackets tie together
    assert w["BA"] == -w["AB"]
    assert (w["ABA"], w["BAA"]) == (-2 * w["AAB"], w["AAB"])
    assert (w["BAB"], w["ABB"]) == (-2 * w["BBA"], w["BBA"])
    return w["A"], w["B"], w["AB"], w["AAB"], w["BBA"]
