"""
Arbitrary-precision scalars and the precision-escalation ladder

All high-precision arithmetic goes through mpmath. Functions that take a
`digits` argument evaluate inside `mp.workdps(digits)`; mpmath's context is
process-global, so parallel evaluation happens in separate processes.
"""
import math
from decimal import Decimal
from typing import Any, Callable, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

from mpmath import mp, mpf
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tachyon.core.exceptions import NonEvaluableError, TachyonError
from tachyon.core.logging import get_logger

logger = get_logger(__name__)

MIN_DIGITS = 15

T = TypeVar("T")
Number = Union["BigReal", mpf, int, float, str]
Vec3 = Tuple[mpf, mpf, mpf]


# ============= BigReal =============
class BigReal(BaseModel):
    """Real scalar tagged with the decimal precision it was computed at"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: mpf
    digits: int = Field(..., ge=MIN_DIGITS)

    @classmethod
    def of(cls, value: Number, digits: int) -> "BigReal":
        """Round `value` to `digits` significant decimal digits"""
        digits = max(int(digits), MIN_DIGITS)
        if isinstance(value, BigReal):
            value = value.value
        with mp.workdps(digits):
            return cls(value=+mpf(value), digits=digits)

    @classmethod
    def parse(cls, text: str) -> "BigReal":
        """Parse the `<mantissa>@<digits>` serialized form"""
        mantissa, sep, digits = text.strip().partition("@")
        if not sep:
            raise ValueError(f"Missing digit annotation in {text!r}")
        return cls.of(mantissa, int(digits))

    def serialize(self) -> str:
        """Scientific notation at full precision plus the digit count"""
        return f"{to_scientific(self.value, self.digits)}@{self.digits}"

    # ---------- arithmetic at the wider precision ----------
    def _binary(self, other: Number, op: Callable[[mpf, mpf], mpf]) -> "BigReal":
        if isinstance(other, BigReal):
            digits = max(self.digits, other.digits)
            rhs: Any = other.value
        else:
            digits = self.digits
            rhs = other
        with mp.workdps(digits):
            return BigReal(value=+op(self.value, mpf(rhs)), digits=digits)

    def __add__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other: Number) -> "BigReal":
        return self._binary(other, lambda a, b: b / a)

    def _unary(self, op: Callable[[mpf], mpf]) -> "BigReal":
        with mp.workdps(self.digits):
            return BigReal(value=+op(self.value), digits=self.digits)

    def __neg__(self) -> "BigReal":
        return self._unary(lambda a: -a)

    def __abs__(self) -> "BigReal":
        return self._unary(abs)

    def _compare(self, other: Number, op: Callable[[mpf, mpf], bool]) -> bool:
        with mp.workdps(digits_of(self, other)):
            return op(self.value, _raw(other))

    def __lt__(self, other: Number) -> bool:
        return self._compare(other, lambda a, b: a < b)

    def __le__(self, other: Number) -> bool:
        return self._compare(other, lambda a, b: a <= b)

    def __gt__(self, other: Number) -> bool:
        return self._compare(other, lambda a, b: a > b)

    def __ge__(self, other: Number) -> bool:
        return self._compare(other, lambda a, b: a >= b)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"BigReal({mp.nstr(self.value, 20)}, digits={self.digits})"


def _raw(x: Number) -> mpf:
    """Raw mpf; non-BigReal inputs are parsed at the caller's working precision"""
    return x.value if isinstance(x, BigReal) else mpf(x)


def digits_of(*xs: Any) -> int:
    """Widest precision among BigReal operands, else the ambient one"""
    found = [x.digits for x in xs if isinstance(x, BigReal)]
    return max(found) if found else mp.dps


def to_mpf(x: Number) -> mpf:
    """Convert any accepted numeric input to an mpf at the current precision"""
    if isinstance(x, BigReal):
        return +x.value
    if isinstance(x, float):
        # binary floats only enter from tests and defaults; go through repr
        return mpf(repr(x))
    return mpf(x)


def to_scientific(value: mpf, digits: int) -> str:
    """Decimal scientific notation with exactly `digits` significant digits"""
    return mp.nstr(
        value, digits, strip_zeros=False, min_fixed=0, max_fixed=0, show_zero_exponent=True
    )


# ============= Vector helpers =============
def vec(x: Any, y: Any, z: Any = 0) -> Vec3:
    return (mpf(x), mpf(y), mpf(z))


def dot(a: Sequence[mpf], b: Sequence[mpf]) -> mpf:
    return mp.fdot(a, b)


def cross(a: Sequence[mpf], b: Sequence[mpf]) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def add(*vs: Sequence[mpf]) -> Vec3:
    return tuple(mp.fsum(v[i] for v in vs) for i in range(3))  # type: ignore[return-value]


def sub(a: Sequence[mpf], b: Sequence[mpf]) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def scale(s: mpf, a: Sequence[mpf]) -> Vec3:
    return (s * a[0], s * a[1], s * a[2])


def norm(a: Sequence[mpf]) -> mpf:
    return mp.sqrt(mp.fdot(a, a))


# ============= Precision policy =============
class PrecisionPolicy(BaseModel):
    """Geometric ladder of working precisions and the agreement criterion"""

    model_config = ConfigDict(frozen=True)

    start_digits: int = Field(50, ge=MIN_DIGITS)
    growth_factor: float = Field(2.0, gt=1)
    agreement_tol: Decimal = Decimal("1e-10")
    max_digits: int = Field(1600, ge=MIN_DIGITS)
    near_zero_exponent: int = Field(300, ge=1)

    @field_validator("agreement_tol")
    @classmethod
    def validate_tol(cls, v: Decimal) -> Decimal:
        if not Decimal(0) < v < Decimal(1):
            raise ValueError("agreement_tol must lie in (0, 1)")
        return v

    @model_validator(mode="after")
    def validate_range(self) -> "PrecisionPolicy":
        if self.max_digits < self.start_digits:
            raise ValueError("max_digits must not be below start_digits")
        return self

    def ladder(self) -> List[int]:
        """Digit counts visited, e.g. 50, 100, 200, ... up to max_digits"""
        rungs = [self.start_digits]
        while True:
            nxt = int(math.ceil(rungs[-1] * self.growth_factor))
            if nxt > self.max_digits:
                break
            rungs.append(nxt)
        return rungs

    def with_start(self, start_digits: int) -> "PrecisionPolicy":
        """Same policy restarted at a different rung"""
        return self.model_copy(
            update={"start_digits": start_digits, "max_digits": max(self.max_digits, start_digits)}
        )

    def agrees(self, coarse: mpf, fine: mpf) -> bool:
        """Relative agreement, absolute when the finer value is near zero"""
        with mp.workdps(max(self.max_digits, self.near_zero_exponent + 20)):
            tol = mpf(str(self.agreement_tol))
            diff = abs(coarse - fine)
            if abs(fine) > mpf(10) ** (-self.near_zero_exponent):
                return diff <= tol * abs(fine)
            return diff <= tol


class Escalation(NamedTuple):
    value: Any
    converged: bool
    digits_used: int


def _as_values(result: Any) -> Sequence[mpf]:
    if isinstance(result, BigReal):
        return (result.value,)
    if isinstance(result, (tuple, list)):
        return tuple(_raw(v) for v in result)
    return (_raw(result),)


def escalate(
    evaluate: Callable[[int], T],
    policy: PrecisionPolicy,
    project: Callable[[T], Sequence[mpf]] = _as_values,
) -> Escalation:
    """
    Recompute at growing precision until two successive rungs agree.

    Returns the coarser of the first agreeing pair. A rung that raises a
    package error breaks the chain of comparisons; if every rung raises,
    NonEvaluableError is raised from the last failure.
    """
    previous: Optional[Tuple[T, int]] = None
    last_good: Optional[Tuple[T, int]] = None
    last_error: Optional[TachyonError] = None

    for digits in policy.ladder():
        try:
            value = evaluate(digits)
        except (TachyonError, ZeroDivisionError) as exc:
            logger.debug(f"Rung {digits} digits failed: {exc}")
            last_error = exc if isinstance(exc, TachyonError) else TachyonError(str(exc))
            previous = None
            continue

        if previous is not None:
            coarse, fine = project(previous[0]), project(value)
            if all(policy.agrees(c, f) for c, f in zip(coarse, fine)):
                logger.debug(f"Converged at {previous[1]} digits (checked at {digits})")
                return Escalation(previous[0], True, previous[1])

        previous = (value, digits)
        last_good = previous

    if last_good is None:
        raise NonEvaluableError(
            f"Evaluation failed at every precision up to {policy.max_digits} digits",
            {"cause": str(last_error) if last_error else None},
        )

    logger.warning(f"No agreement up to {policy.max_digits} digits; returning last value")
    return Escalation(last_good[0], False, last_good[1])


# ============= Root refinement =============
def bracketed_newton(
    f: Callable[[mpf], mpf],
    df: Callable[[mpf], mpf],
    lo: mpf,
    hi: mpf,
    tol: mpf,
    max_iter: Optional[int] = None,
) -> mpf:
    """
    Newton iteration safeguarded by a sign-change bracket.

    Steps that would leave the bracket fall back to bisection, so the
    iteration always converges; near a root it is quadratic.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError("bracket does not change sign")
    # orient so that f(neg) < 0 < f(pos)
    neg, pos = (lo, hi) if f_lo < 0 else (hi, lo)

    if max_iter is None:
        max_iter = 40 + 2 * mp.prec
    x = (neg + pos) / 2
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0:
            return x
        if fx < 0:
            neg = x
        else:
            pos = x
        slope = df(x)
        lower, upper = min(neg, pos), max(neg, pos)
        candidate = x - fx / slope if slope != 0 else None
        if candidate is None or not lower < candidate < upper:
            candidate = (neg + pos) / 2
        if abs(candidate - x) <= tol or upper - lower <= tol:
            return candidate
        x = candidate
    return x
