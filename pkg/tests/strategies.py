"""Hypothesis strategies shared across the test modules."""

import numpy as np
from hypothesis import strategies as st

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
complex_scalars = st.builds(complex, finite, finite)


def complex_vectors(size, min_norm=1e-3):
    return (st.lists(complex_scalars, min_size=size, max_size=size)
            .map(lambda v: np.array(v, dtype=complex))
            .filter(lambda v: np.linalg.norm(v) > min_norm))


unit_disc = st.builds(
    lambda r, t: np.sqrt(r) * np.exp(1j * t),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=-np.pi, max_value=np.pi),
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
trial_indices = st.integers(min_value=0, max_value=10**6)


def instance(config, trial):
    """Channels and symbols for one trial of ``config``."""
    from cogci.constellation import draw_symbols
    from cogci.scenario import generate_channels

    return generate_channels(config, trial), draw_symbols(config, trial)


def links(h_ss, h_ps, psi=1.0):
    """ChannelSet with a silent primary and the given noise floor."""
    from cogci.scenario import ChannelSet

    h_ss = np.atleast_2d(np.asarray(h_ss, dtype=complex))
    K = h_ss.shape[0]
    return ChannelSet.from_links(h_ss, np.ones((K, 2)), np.asarray(h_ps, dtype=complex),
                                 np.ones(2), np.zeros(2, dtype=complex), psi)
