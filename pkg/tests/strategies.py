"""Shared hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

unit = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)
shift = st.floats(-3.0, 3.0, allow_nan=False)
small_n = st.integers(0, 300)


def points(dim, count=8):
    return st.lists(st.lists(unit, min_size=dim, max_size=dim), min_size=1, max_size=count).map(np.array)


def raw_points(dim, count=8, bound=50.0):
    coord = st.floats(-bound, bound, allow_nan=False)
    return st.lists(st.lists(coord, min_size=dim, max_size=dim), min_size=1, max_size=count).map(np.array)


@st.composite
def fourier_coeffs(draw, dim=1, max_terms=4, max_freq=3, real=True):
    """Coefficient dicts; real ones are made conjugate-symmetric."""
    freq = st.tuples(*[st.integers(-max_freq, max_freq)] * dim)
    amp = st.floats(-1.0, 1.0, allow_nan=False)
    out = {}
    for k in draw(st.lists(freq, min_size=1, max_size=max_terms)):
        c = complex(draw(amp), draw(amp))
        if real:
            neg = tuple(-v for v in k)
            if neg == k:
                c = complex(c.real)
            out[k] = out.get(k, 0) + c / 2
            out[neg] = out.get(neg, 0) + c.conjugate() / 2
        else:
            out[k] = out.get(k, 0) + c
    return out
