"""Text format for polynomials.

Grammar (used by the CLI and test fixtures): a signed sum of terms, each a
'*'-separated product of factors

    factor := INTEGER | INTEGER/INTEGER | s | t | s^EXP | t^EXP

with EXP a nonnegative integer.  '^1' may be omitted, whitespace is
insignificant, and parentheses are not part of the grammar.  Examples:

    3/2*s^2*t - t^3 + 1
    -s + 5/7
    0

The printer emits terms with s-exponent, then t-exponent, descending, so
parse(format(p)) == p exactly.
"""

from __future__ import annotations

from .poly import BiPoly, Q, UniPoly


class PolyParseError(ValueError):
    """Syntax error in polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^":
            tokens.append((ch, ch, i))
            i += 1
        elif ch in "st":
            tokens.append(("var", ch, i))
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "/":
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise PolyParseError("expected denominator digits", j + 1)
                tokens.append(("rat", text[i:k], i))
                i = k
            else:
                tokens.append(("int", text[i:j], i))
                i = j
        else:
            raise PolyParseError(f"unexpected character {ch!r}", i)
    return tokens


def parse_bipoly(text: str) -> BiPoly:
    """Parse polynomial text into a BiPoly; raises PolyParseError."""
    tokens = _tokenize(text)
    if not tokens:
        raise PolyParseError("empty polynomial text", 0)
    terms: dict[tuple[int, int], object] = {}
    pos = 0
    ntok = len(tokens)

    def peek():
        return tokens[pos] if pos < ntok else (None, None, len(text))

    while pos < ntok:
        sign = 1
        kind, val, at = peek()
        while kind in ("+", "-"):
            if kind == "-":
                sign = -sign
            pos += 1
            kind, val, at = peek()
        if kind is None:
            raise PolyParseError("dangling sign", at)

        coeff = Q(sign)
        s_exp = 0
        t_exp = 0
        expect_factor = True
        while expect_factor:
            kind, val, at = peek()
            if kind in ("int", "rat"):
                coeff *= Q(val)
                pos += 1
            elif kind == "var":
                var = val
                pos += 1
                exp = 1
                k2, v2, at2 = peek()
                if k2 == "^":
                    pos += 1
                    k3, v3, at3 = peek()
                    if k3 != "int":
                        raise PolyParseError("expected integer exponent after '^'", at3)
                    exp = int(v3)
                    pos += 1
                if var == "s":
                    s_exp += exp
                else:
                    t_exp += exp
            else:
                raise PolyParseError("expected a coefficient or variable", at)
            k2, _, _ = peek()
            if k2 == "*":
                pos += 1
                expect_factor = True
            else:
                expect_factor = False

        key = (s_exp, t_exp)
        terms[key] = terms.get(key, Q(0)) + coeff

    return BiPoly(terms)


def parse_unipoly(text: str) -> UniPoly:
    """Parse text that must not mention s; returns a UniPoly in t."""
    p = parse_bipoly(text)
    if p.c and p.s_degree() > 0:
        raise PolyParseError("variable s not allowed here", text.find("s"))
    return p.coeff_s(0)


def _format_terms(items: list[tuple[tuple[int, int], object]]) -> str:
    if not items:
        return "0"
    parts: list[str] = []
    for (a, e), q in items:
        neg = q < 0
        mag = -q if neg else q
        factors = []
        if mag != 1 or (a == 0 and e == 0):
            factors.append(str(mag))
        if a:
            factors.append("s" if a == 1 else f"s^{a}")
        if e:
            factors.append("t" if e == 1 else f"t^{e}")
        term = "*".join(factors)
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append((" - " if neg else " + ") + term)
    return "".join(parts)


def format_bipoly(p: BiPoly) -> str:
    """Canonical text for a BiPoly; parse_bipoly inverts it exactly."""
    items = sorted(p.c.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))
    return _format_terms(items)


def format_unipoly(u: UniPoly) -> str:
    items = sorted(((0, e), q) for e, q in u.c.items())
    items.sort(key=lambda kv: -kv[0][1])
    return _format_terms(items)
