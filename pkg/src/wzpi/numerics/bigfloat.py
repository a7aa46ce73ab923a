"""Working-precision contexts.

Big floats are mpmath ``mpf`` values.  Every numeric job creates its own
``MPContext`` so precision is an explicit argument and never shared state.
"""

from __future__ import annotations

import math

import mpmath

GUARD_BITS = 64


def bits_for(digits: int) -> int:
    """Working precision in bits for ``digits`` decimal digits plus guard bits."""
    return int(math.ceil(digits * 3.33)) + GUARD_BITS


def working_context(digits: int, extra_bits: int = 0) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits_for(digits) + extra_bits
    return ctx


def residual_exponent(ctx, a, b) -> int | None:
    """floor(log10 |a - b| / max(|b|, 1e-300)); None when the difference is exactly zero."""
    diff = abs(a - b)
    if not diff:
        return None
    scale = abs(b) if b else ctx.mpf(1)
    return int(ctx.floor(ctx.log10(diff / scale)))


def agree(ctx, a, b, digits: int) -> bool:
    """Relative agreement of a and b to 10**-digits."""
    if not b:
        return abs(a) < ctx.mpf(10) ** (-digits)
    return abs(a - b) <= abs(b) * ctx.mpf(10) ** (-digits)
