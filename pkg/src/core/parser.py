"""
Tokenizer and recursive-descent parser for the polynomial/operator grammar.

Grammar (whitespace insignificant):

    expr   := ['+' | '-'] term (('+' | '-') term)*
    term   := power (('*' | '/') power)*
    power  := atom ['^' INT]
    atom   := INT | IDENT | DERIV | '(' expr ')'

IDENT matches [a-zA-Z][a-zA-Z0-9_]*; an identifier of the form d_<var>
is a derivation token. Evaluation is delegated to an algebra object so the
same tree feeds polynomials, localized fractions and Weyl operators.
"""
import re
from typing import Any, List, NamedTuple, Protocol, Tuple

from .constants import DERIVATION_PREFIX, PATTERN_IDENTIFIER, PATTERN_INTEGER
from .errors import ParseError

TOKEN_SPEC = [
    ('INT', PATTERN_INTEGER),
    ('IDENT', PATTERN_IDENTIFIER),
    ('OP', r'[+\-*/^()]'),
    ('SKIP', r'\s+'),
]
TOKEN_REGEX = re.compile('|'.join(f'(?P<{name}>{pattern})' for name, pattern in TOKEN_SPEC))


class Token(NamedTuple):
    kind: str
    value: str
    position: int


Node = Tuple[Any, ...]


class Algebra(Protocol):
    """Callbacks used by evaluate()."""

    def integer(self, value: int) -> Any: ...
    def variable(self, name: str) -> Any: ...
    def derivation(self, name: str) -> Any: ...
    def add(self, a: Any, b: Any) -> Any: ...
    def sub(self, a: Any, b: Any) -> Any: ...
    def mul(self, a: Any, b: Any) -> Any: ...
    def div(self, a: Any, b: Any) -> Any: ...
    def neg(self, a: Any) -> Any: ...
    def power(self, a: Any, exponent: int) -> Any: ...


def tokenize(text: str) -> List[Token]:
    """
    Split an expression into tokens.

    Args:
        text: Expression string

    Returns:
        List of tokens (whitespace dropped)

    Raises:
        ParseError: On any character outside the grammar
    """
    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_REGEX.match(text, position)
        if not match:
            raise ParseError(f"Unexpected character '{text[position]}'", text, position)
        kind = match.lastgroup
        if kind == 'IDENT' and match.group().startswith(DERIVATION_PREFIX) and len(match.group()) > len(DERIVATION_PREFIX):
            kind = 'DERIV'
        if kind != 'SKIP':
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    return tokens


class ExpressionParser:
    """Recursive-descent parser producing a small tuple-based syntax tree."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    def parse(self) -> Node:
        if not self.tokens:
            raise ParseError("Empty expression", self.text, 0)
        node = self._expr()
        if self.index < len(self.tokens):
            token = self.tokens[self.index]
            raise ParseError(f"Unexpected token '{token.value}'", self.text, token.position)
        return node

    def _peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _take(self) -> Token:
        token = self._peek()
        if token is None:
            raise ParseError("Unexpected end of expression", self.text, len(self.text))
        self.index += 1
        return token

    def _expr(self) -> Node:
        token = self._peek()
        negate = False
        if token is not None and token.kind == 'OP' and token.value in '+-':
            self._take()
            negate = token.value == '-'
        node = self._term()
        if negate:
            node = ('neg', node)
        while True:
            token = self._peek()
            if token is None or token.kind != 'OP' or token.value not in '+-':
                return node
            self._take()
            node = ('add' if token.value == '+' else 'sub', node, self._term())

    def _term(self) -> Node:
        node = self._power()
        while True:
            token = self._peek()
            if token is None or token.kind != 'OP' or token.value not in '*/':
                return node
            self._take()
            node = ('mul' if token.value == '*' else 'div', node, self._power())

    def _power(self) -> Node:
        node = self._atom()
        token = self._peek()
        if token is not None and token.kind == 'OP' and token.value == '^':
            self._take()
            exponent = self._take()
            if exponent.kind != 'INT':
                raise ParseError("Exponent must be a nonnegative integer literal", self.text, exponent.position)
            node = ('pow', node, int(exponent.value))
        return node

    def _atom(self) -> Node:
        token = self._take()
        if token.kind == 'INT':
            return ('int', int(token.value))
        if token.kind == 'IDENT':
            return ('var', token.value)
        if token.kind == 'DERIV':
            return ('deriv', token.value[len(DERIVATION_PREFIX):])
        if token.kind == 'OP' and token.value == '(':
            node = self._expr()
            closing = self._take()
            if closing.value != ')':
                raise ParseError("Expected ')'", self.text, closing.position)
            return node
        raise ParseError(f"Unexpected token '{token.value}'", self.text, token.position)


def evaluate(node: Node, algebra: Algebra) -> Any:
    """Evaluate a syntax tree with the given algebra callbacks."""
    kind = node[0]
    if kind == 'int':
        return algebra.integer(node[1])
    if kind == 'var':
        return algebra.variable(node[1])
    if kind == 'deriv':
        return algebra.derivation(node[1])
    if kind == 'neg':
        return algebra.neg(evaluate(node[1], algebra))
    if kind == 'pow':
        return algebra.power(evaluate(node[1], algebra), node[2])
    left = evaluate(node[1], algebra)
    right = evaluate(node[2], algebra)
    return getattr(algebra, kind)(left, right)


def parse_expression(text: str, algebra: Algebra) -> Any:
    """Parse and evaluate ``text`` in one step."""
    return evaluate(ExpressionParser(text).parse(), algebra)
