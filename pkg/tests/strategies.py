import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
small_vec3 = arrays(np.float64, 3, elements=st.floats(-3, 3, allow_nan=False))
rotvec = arrays(np.float64, 3, elements=st.floats(-np.pi, np.pi, allow_nan=False))
seeds = st.integers(0, 2**32 - 1)


def random_rotation(rng):
    """Uniformly distributed rotation from a normalized Gaussian quaternion.

    Written out longhand so that it does not share code with the package.
    """
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_unit(rng, n=None):
    v = rng.normal(size=(3,) if n is None else (n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
