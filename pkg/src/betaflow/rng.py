"""Reproducible random streams and the gamma/beta variate generators."""
import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(value):
    """SplitMix64 finalizer on a 64-bit integer."""
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed, stream_id):
    return splitmix64(splitmix64(int(seed) & _MASK64) ^ (int(stream_id) & _MASK64))


class RngStream:
    """A numbered random stream: identical (seed, stream_id) gives identical draws.

    Child streams mix the parent's key with a new id, so parallel workers can
    each own a stream without coordinating.
    """

    def __init__(self, seed=0, stream_id=0):
        if int(seed) < 0 or int(stream_id) < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.key = mix_seed(self.seed, self.stream_id)
        self.generator = np.random.Generator(np.random.PCG64(self.key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, stream_id):
        return RngStream(self.key, stream_id)

    def uniform(self, size=None):
        return self.generator.random(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def signs(self, size=None):
        """Fair +-1 signs."""
        return np.where(self.generator.random(size) < 0.5, -1.0, 1.0)

    def permutation(self, n):
        return self.generator.permutation(n)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)


def _log_gamma_mt(rng, shape, n):
    """n draws of ln G, G ~ Gamma(shape, 1) with shape >= 1 (Marsaglia-Tsang)."""
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = need + need // 16 + 16
        x = rng.normal(batch)
        u = rng.uniform(batch)
        v = 1.0 + c * x
        ok = v > 0.0
        v = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        with np.errstate(divide="ignore"):
            logu = np.log(u)
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        full = logu < 0.5 * x2 + d * (1.0 - v + np.log(v))
        accept = ok & (squeeze | full)
        vals = np.log(d) + np.log(v[accept])
        take = min(need, vals.size)
        out[filled:filled + take] = vals[:take]
        filled += take
    return out


def log_gamma_variates(rng, shape, n):
    """n draws of ln G, G ~ Gamma(shape, 1), for any shape > 0.

    Shapes below one use G(a) = G(a + 1) U^{1/a}, applied in log space so the
    tiny values produced for small shapes do not underflow.
    """
    if shape >= 1.0:
        return _log_gamma_mt(rng, shape, n)
    boosted = _log_gamma_mt(rng, shape + 1.0, n)
    u = rng.uniform(n)
    # uniform() is on [0, 1); u == 0 has probability ~2^-53 and is redrawn
    while np.any(u == 0.0):
        zero = u == 0.0
        u[zero] = rng.uniform(int(zero.sum()))
    return boosted + np.log(u) / shape


def beta_variates(rng, a, b, n):
    """n draws from B_I(a, b) on the open interval (0, 1).

    Ratio of gamma draws, formed as a logistic of the log-gamma difference.
    Exact 0 or 1 results are redrawn, never clamped.
    """
    out = np.empty(n)
    todo = np.arange(n)
    while todo.size:
        m = todo.size
        la = log_gamma_variates(rng, a, m)
        lb = log_gamma_variates(rng, b, m)
        x = 1.0 / (1.0 + np.exp(lb - la))
        out[todo] = x
        todo = todo[(x <= 0.0) | (x >= 1.0)]
    return out
