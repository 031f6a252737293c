import re
from typing import Callable, List, Optional, Tuple


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class PolyParseError(ValueError):
    """
    Raised on malformed scalar or polynomial text. Columns are 1-based.
    """
    def __init__(self, message, col=None, line=None):
        self.message = message
        self.col = col
        self.line = line
        where = ""
        if line is not None:
            where += f"line {line}, "
        if col is not None:
            where += f"col {col}: "
        super().__init__(f"{where}{message}")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            break  # only trailing whitespace left
        number, name, symbol = match.groups()
        col = match.start(match.lastindex) + 1
        if number is not None:
            tokens.append(("int", number, col))
        elif name is not None:
            tokens.append(("name", name, col))
        else:
            if symbol not in "+-*/^()":
                raise PolyParseError(f"unexpected character {symbol!r}", col)
            tokens.append(("op", symbol, col))
        pos = match.end()
    return tokens


class ExpressionParser:
    """
    Recursive-descent parser shared by scalars and polynomials.

        expr  := [+|-] term (( + | - ) term)*
        term  := power (( * | / ) power)*
        power := atom [ ^ INT ]
        atom  := INT | NAME | ( expr )

    `integer` builds a ring value from an int, `resolve` maps a name to a ring
    value (or None when undeclared) and `divide` performs exact division.
    """
    def __init__(self, integer: Callable, resolve: Callable, divide: Callable):
        self.integer = integer
        self.resolve = resolve
        self.divide = divide

    def parse(self, text: str, line: Optional[int] = None):
        self._tokens = tokenize(text)
        self._pos = 0
        self._line = line
        if not self._tokens:
            raise PolyParseError("empty expression", 1, line)
        value = self._expr()
        if self._pos < len(self._tokens):
            _, tok, col = self._tokens[self._pos]
            raise PolyParseError(f"unexpected token {tok!r}", col, line)
        return value

    def _peek(self):
        if self._pos < len(self._tokens):
            return self._tokens[self._pos]
        return None

    def _take(self):
        token = self._peek()
        if token is None:
            end = self._tokens[-1][2] + len(self._tokens[-1][1]) if self._tokens else 1
            raise PolyParseError("unexpected end of expression", end, self._line)
        self._pos += 1
        return token

    def _error(self, message, col):
        return PolyParseError(message, col, self._line)

    def _expr(self):
        sign = 1
        token = self._peek()
        if token is not None and token[0] == "op" and token[1] in "+-":
            self._take()
            sign = -1 if token[1] == "-" else 1
        value = self._term()
        if sign < 0:
            value = -value
        while True:
            token = self._peek()
            if token is None or token[0] != "op" or token[1] not in "+-":
                return value
            self._take()
            rhs = self._term()
            value = value + rhs if token[1] == "+" else value - rhs

    def _term(self):
        value = self._power()
        while True:
            token = self._peek()
            if token is None or token[0] != "op" or token[1] not in "*/":
                return value
            self._take()
            rhs = self._power()
            if token[1] == "*":
                value = value * rhs
            else:
                try:
                    value = self.divide(value, rhs)
                except ZeroDivisionError:
                    raise self._error("division by zero", token[2])
                except ValueError as e:
                    raise self._error(str(e), token[2])

    def _power(self):
        value = self._atom()
        token = self._peek()
        if token is not None and token[0] == "op" and token[1] == "^":
            self._take()
            kind, exponent, col = self._take()
            if kind != "int":
                raise self._error(f"exponent must be a nonnegative integer, got {exponent!r}", col)
            value = value ** int(exponent)
        return value

    def _atom(self):
        kind, tok, col = self._take()
        if kind == "int":
            return self.integer(int(tok))
        if kind == "name":
            value = self.resolve(tok)
            if value is None:
                raise self._error(f"undeclared variable {tok!r}", col)
            return value
        if tok == "(":
            value = self._expr()
            closing = self._take()
            if closing[1] != ")":
                raise self._error(f"expected ')', got {closing[1]!r}", closing[2])
            return value
        raise self._error(f"unexpected token {tok!r}", col)
