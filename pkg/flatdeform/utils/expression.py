"""Recursive-descent parsers for the two expression languages of problem files.

Element expressions live in Q[t, 1/t][u]:

    elem   := term (("+" | "-") term)*
    term   := [sign] rational ["*" factor ("*" factor)*] | [sign] factor ("*" factor)*
    factor := "t" ["^" int] | "u" ["^" nat] | "(" elem ")"
    rational := int ["/" nat]

Relations live in the free algebra Q<x, y>:

    rel   := rterm (("+" | "-") rterm)*
    rterm := [sign] [rational ["*"]] mono | [sign] rational
    mono  := letter ["^" nat] (["*"] letter ["^" nat])* | "1"

Whitespace is insignificant. Errors carry the 1-based line and column of
the offending character.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from flatdeform.core.arithmetic import LaurentPolynomial, RationalFunction, UniPolynomial, rf
from flatdeform.core.free_algebra import FreePolynomial
from flatdeform.errors import ExpressionSyntaxError

# monomial t^a u^b is keyed by (b, a)
_Terms = dict[tuple[int, int], Fraction]


def _add(a: _Terms, b: _Terms, sign: int = 1) -> _Terms:
    out = defaultdict(Fraction, a)
    for key, c in b.items():
        out[key] += sign * c
    return {k: c for k, c in out.items() if c != 0}


def _mul(a: _Terms, b: _Terms) -> _Terms:
    out: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for (ub, ta), c in a.items():
        for (vb, sa), d in b.items():
            out[(ub + vb, ta + sa)] += c * d
    return {k: c for k, c in out.items() if c != 0}


class _Scanner:
    def __init__(self, text: str, line: int = 1):
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, message: str, pos: int | None = None) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, self.text, self.pos if pos is None else pos, self.line)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str | None = None) -> str:
        ch = self.peek()
        if not ch:
            raise self.error("unexpected end of input" if expected is None else f"expected {expected!r}")
        if expected is not None and ch != expected:
            raise self.error(f"expected {expected!r}, found {ch!r}")
        self.pos += 1
        return ch

    def natural(self) -> int:
        if not self.peek().isdigit():
            found = self.peek() or "end of input"
            raise self.error(f"expected a number, found {found!r}")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos])

    def integer(self) -> int:
        if self.peek() == "-":
            self.take()
            return -self.natural()
        return self.natural()

    def rational(self) -> Fraction:
        num = self.natural()
        if self.peek() == "/":
            slash = self.pos
            self.take()
            den = self.natural()
            if den == 0:
                raise self.error("division by zero", slash)
            return Fraction(num, den)
        return Fraction(num)

    def sign(self) -> int:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        return sign

    def finish(self):
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")


class _ElementParser:
    def __init__(self, scanner: _Scanner):
        self.s = scanner

    def elem(self) -> _Terms:
        value = self.term()
        while self.s.peek() in ("+", "-"):
            sign = 1 if self.s.take() == "+" else -1
            value = _add(value, self.term(), sign)
        return value

    def term(self) -> _Terms:
        sign = self.s.sign()
        if self.s.peek().isdigit():
            value: _Terms = {(0, 0): sign * self.s.rational()}
            if self.s.peek() != "*":
                return {k: c for k, c in value.items() if c != 0}
            self.s.take("*")
            value = _mul(value, self.factor())
        else:
            value = _mul({(0, 0): Fraction(sign)}, self.factor())
        while self.s.peek() == "*":
            self.s.take()
            value = _mul(value, self.factor())
        return value

    def factor(self) -> _Terms:
        ch = self.s.peek()
        if ch == "t":
            self.s.take()
            exp = 1
            if self.s.peek() == "^":
                self.s.take()
                exp = self.s.integer()
            return {(0, exp): Fraction(1)}
        if ch == "u":
            self.s.take()
            exp = 1
            if self.s.peek() == "^":
                self.s.take()
                exp = self.s.natural()
            return {(exp, 0): Fraction(1)}
        if ch == "(":
            self.s.take()
            value = self.elem()
            self.s.take(")")
            return value
        raise self.s.error("expected 't', 'u', a number or '('" if ch else "unexpected end of input")


def _parse_terms(text: str, line: int = 1) -> _Terms:
    scanner = _Scanner(text, line)
    if not scanner.peek():
        raise scanner.error("empty expression")
    value = _ElementParser(scanner).elem()
    scanner.finish()
    return value


def parse_element(text: str, line: int = 1) -> UniPolynomial:
    """Parse into a polynomial in u whose coefficients are Laurent polynomials in t."""
    terms = _parse_terms(text, line)
    by_u: dict[int, LaurentPolynomial] = defaultdict(LaurentPolynomial)
    for (b, a), c in terms.items():
        by_u[b] = by_u[b] + LaurentPolynomial.monomial(c, a)
    top = max(by_u, default=-1)
    coeffs = [by_u[b].to_rational_function() if b in by_u else RationalFunction.zero()
              for b in range(top + 1)]
    return UniPolynomial(coeffs, "u")


def parse_laurent(text: str, line: int = 1) -> LaurentPolynomial:
    terms = _parse_terms(text, line)
    out = LaurentPolynomial()
    for (b, a), c in terms.items():
        if b:
            raise ExpressionSyntaxError("u is not allowed here", text, text.find("u"), line)
        out = out + LaurentPolynomial.monomial(c, a)
    return out


def _format_monomial(c: Fraction, a: int, b: int) -> str:
    factors = []
    if a:
        factors.append("t" if a == 1 else f"t^{a}")
    if b:
        factors.append("u" if b == 1 else f"u^{b}")
    body = "*".join(factors)
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return f"-{body}"
    return f"{c}*{body}"


def format_laurent(p: LaurentPolynomial) -> str:
    return format_element(UniPolynomial([p.to_rational_function()], "u"))


def format_element(p: UniPolynomial) -> str:
    """Print in the element grammar; terms by descending u-degree, then t-degree."""
    parts = []
    for b in range(p.degree, -1, -1):
        c = rf(p[b])
        if c.is_zero:
            continue
        laurent = LaurentPolynomial.from_rational_function(c)
        for a, coeff in sorted(laurent.terms().items(), reverse=True):
            parts.append(_format_monomial(coeff, a, b))
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


class _RelationParser:
    def __init__(self, scanner: _Scanner):
        self.s = scanner

    def rel(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = defaultdict(Fraction)
        word, c = self.rterm()
        out[word] += c
        while self.s.peek() in ("+", "-"):
            sign = 1 if self.s.take() == "+" else -1
            word, c = self.rterm()
            out[word] += sign * c
        return out

    def rterm(self) -> tuple[str, Fraction]:
        sign = self.s.sign()
        coeff = Fraction(1)
        if self.s.peek().isdigit():
            coeff = self.s.rational()
            if self.s.peek() == "*":
                self.s.take()
                if self.s.peek() not in ("x", "y"):
                    raise self.s.error("expected 'x' or 'y'")
            elif self.s.peek() not in ("x", "y"):
                # a bare "1" is the empty word
                return "", sign * coeff
        return self.mono(), sign * coeff

    def mono(self) -> str:
        parts = [self.letter()]
        while True:
            ch = self.s.peek()
            if ch == "*":
                self.s.take()
                parts.append(self.letter())
            elif ch in ("x", "y"):
                parts.append(self.letter())
            else:
                return "".join(parts)

    def letter(self) -> str:
        ch = self.s.peek()
        if ch not in ("x", "y"):
            raise self.s.error("expected 'x' or 'y'" if ch else "unexpected end of input")
        self.s.take()
        k = 1
        if self.s.peek() == "^":
            self.s.take()
            k = self.s.natural()
        return ch * k


def parse_relation(text: str, line: int = 1) -> FreePolynomial:
    scanner = _Scanner(text, line)
    if not scanner.peek():
        raise scanner.error("empty relation")
    terms = _RelationParser(scanner).rel()
    scanner.finish()
    return FreePolynomial({w: c for w, c in terms.items() if c != 0})


def format_relation(p: FreePolynomial) -> str:
    return str(p)
