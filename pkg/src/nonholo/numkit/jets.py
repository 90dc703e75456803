"""Truncated multivariate Taylor polynomials (jets).

Evaluating a chart map once on jet-valued coordinates yields its full Taylor
expansion at a point up to a degree budget.  Lie brackets of jet vector
fields are then exact polynomial algebra, which keeps deep derived-flag
computations cheap: the value at the base point of a bracket nested d deep
only needs the original fields expanded to degree d.
"""

import math


class Jet:
    """Polynomial in ``nvars`` variables, accurate through total degree ``deg``."""

    __slots__ = ("nvars", "deg", "coef")

    def __init__(self, nvars, deg, coef=None):
        self.nvars = nvars
        self.deg = deg
        self.coef = coef if coef is not None else {}

    @classmethod
    def constant(cls, c, nvars, deg):
        coef = {(0,) * nvars: float(c)} if c != 0.0 else {}
        return cls(nvars, deg, coef)

    @property
    def value(self):
        """Value at the expansion point (the constant term)."""
        return self.coef.get((0,) * self.nvars, 0.0)

    def _like(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets on different variable sets")
            return other
        return Jet.constant(other, self.nvars, self.deg)

    def __add__(self, other):
        other = self._like(other)
        deg = min(self.deg, other.deg)
        coef = {k: v for k, v in self.coef.items() if sum(k) <= deg}
        for k, v in other.coef.items():
            if sum(k) <= deg:
                coef[k] = coef.get(k, 0.0) + v
        return Jet(self.nvars, deg, coef)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.deg, {k: -v for k, v in self.coef.items()})

    def __sub__(self, other):
        return self + (-self._like(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            if other == 0.0:
                return Jet(self.nvars, self.deg, {})
            return Jet(self.nvars, self.deg, {k: v * other for k, v in self.coef.items()})
        if other.nvars != self.nvars:
            raise ValueError("jets on different variable sets")
        deg = min(self.deg, other.deg)
        coef = {}
        for ka, va in self.coef.items():
            da = sum(ka)
            for kb, vb in other.coef.items():
                if da + sum(kb) > deg:
                    continue
                k = tuple(a + b for a, b in zip(ka, kb))
                coef[k] = coef.get(k, 0.0) + va * vb
        return Jet(self.nvars, deg, coef)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise TypeError("jet powers are nonnegative integers")
        out = Jet.constant(1.0, self.nvars, self.deg)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i):
        """Partial derivative in variable i; degree budget drops by one."""
        coef = {}
        for k, v in self.coef.items():
            if k[i] == 0:
                continue
            kk = list(k)
            kk[i] -= 1
            coef[tuple(kk)] = v * k[i]
        return Jet(self.nvars, max(self.deg - 1, 0), coef)

    def _nilpotent(self):
        zero = (0,) * self.nvars
        return Jet(self.nvars, self.deg, {k: v for k, v in self.coef.items() if k != zero})

    def _compose_series(self, derivs):
        """sum derivs[k]/k! * (self - value)^k, derivs at the constant term."""
        g = self._nilpotent()
        out = Jet.constant(derivs[0], self.nvars, self.deg)
        gk = Jet.constant(1.0, self.nvars, self.deg)
        for k in range(1, self.deg + 1):
            gk = gk * g
            if not gk.coef:
                break
            out = out + gk * (derivs[k] / math.factorial(k))
        return out

    def reciprocal(self):
        c = self.value
        derivs = [((-1.0) ** k) * math.factorial(k) / c ** (k + 1) for k in range(self.deg + 1)]
        return self._compose_series(derivs)

    def sin(self):
        c = self.value
        table = [math.sin(c), math.cos(c), -math.sin(c), -math.cos(c)]
        return self._compose_series([table[k % 4] for k in range(self.deg + 1)])

    def cos(self):
        c = self.value
        table = [math.cos(c), -math.sin(c), -math.cos(c), math.sin(c)]
        return self._compose_series([table[k % 4] for k in range(self.deg + 1)])

    def tan(self):
        return self.sin() * self.cos().reciprocal()

    def exp(self):
        e = math.exp(self.value)
        return self._compose_series([e] * (self.deg + 1))

    def log(self):
        c = self.value
        derivs = [math.log(c)]
        derivs += [((-1.0) ** (k - 1)) * math.factorial(k - 1) / c**k for k in range(1, self.deg + 1)]
        return self._compose_series(derivs)

    def sqrt(self):
        c = self.value
        derivs = [math.sqrt(c)]
        coeff = 0.5
        for k in range(1, self.deg + 1):
            derivs.append(coeff * c ** (0.5 - k))
            coeff *= 0.5 - k
        return self._compose_series(derivs)

    def __repr__(self):
        return f"Jet(deg={self.deg}, {self.coef!r})"


def jet_variables(point, deg):
    """Coordinate jets x_i = p_i + X_i at ``point`` with budget ``deg``."""
    n = len(point)
    out = []
    for i, p in enumerate(point):
        e = tuple(1 if j == i else 0 for j in range(n))
        coef = {e: 1.0}
        if p != 0.0:
            coef[(0,) * n] = float(p)
        out.append(Jet(n, deg, coef))
    return out
