"""Minimal dense networks: ELU MLP with hand-written reverse-mode gradients,
Adam, and a versioned binary checkpoint format.

The networks here are plain MLPs (policy/value trunk, domain estimator), so
there is no autodiff graph: forward caches activations, backward walks the
layers in reverse and returns exact parameter gradients.  float32 for
training, float64 for gradient checking.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

CHECKPOINT_MAGIC = b"QGCKPT01"
CHECKPOINT_VERSION = 1


def orthogonal(shape, gain: float, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal init via QR of a Gaussian matrix."""
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(gain * q[:rows, :cols])


def elu(x):
    return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))


def elu_grad(x, fx):
    # d/dx elu = 1 for x > 0, elu(x) + 1 otherwise (C1 across 0)
    return np.where(x > 0.0, 1.0, fx + 1.0)


class Mlp:
    """Dense MLP, ELU on hidden layers, identity output.

    sizes = [n_in, h1, ..., n_out].  forward() caches pre-activations for
    backward(); parameters() and matching gradient lists feed the Adam step.
    """

    def __init__(self, sizes, rng: np.random.Generator | None = None, out_gain: float = 1.0, dtype=np.float32):
        rng = rng or np.random.default_rng(0)
        self.sizes = list(sizes)
        self.dtype = dtype
        self.weights = []
        self.biases = []
        n_layers = len(sizes) - 1
        for i in range(n_layers):
            gain = out_gain if i == n_layers - 1 else np.sqrt(2.0)
            w = orthogonal((sizes[i], sizes[i + 1]), gain, rng).astype(dtype)
            self.weights.append(w)
            self.biases.append(np.zeros(sizes[i + 1], dtype=dtype))
        self._cache = None

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def parameters(self) -> list:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def forward(self, x: np.ndarray, cache: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=self.dtype)
        pre = []
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            if i < last:
                pre.append(z)
                h = elu(z)
                acts.append(h)
            else:
                h = z
        if cache:
            self._cache = (pre, acts)
        return h

    def backward(self, dout: np.ndarray):
        """Gradients for the last cached forward.  Returns (grads, dx) where
        grads aligns with parameters()."""
        if self._cache is None:
            raise RuntimeError("forward(cache=True) must run before backward()")
        pre, acts = self._cache
        dout = np.asarray(dout, dtype=self.dtype)
        grads = [None] * (2 * len(self.weights))
        delta = dout
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = acts[i].T @ delta
            grads[2 * i + 1] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.weights[i].T
                z = pre[i - 1]
                delta = delta * elu_grad(z, acts[i])
        dx = delta @ self.weights[0].T
        return grads, dx


class Adam:
    """Standard Adam with bias correction."""

    def __init__(self, params: list, lr: float = 1e-3, betas=(0.9, 0.999), eps: float = 1e-8):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list, grads: list) -> None:
        self.t += 1
        b1t = 1.0 - self.b1**self.t
        b2t = 1.0 - self.b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)

    def state_arrays(self) -> dict:
        out = {"adam_t": np.array([self.t], dtype=np.int64)}
        for i, (m, v) in enumerate(zip(self.m, self.v)):
            out[f"adam_m{i}"] = m
            out[f"adam_v{i}"] = v
        return out

    def load_state_arrays(self, arrays: dict) -> None:
        self.t = int(arrays["adam_t"][0])
        for i in range(len(self.m)):
            self.m[i][:] = arrays[f"adam_m{i}"]
            self.v[i][:] = arrays[f"adam_v{i}"]


# ------------------------------------------------------------------ checkpoint
#
# Byte layout (little-endian):
#   magic            8 bytes  b"QGCKPT01"
#   version          uint32
#   meta_len         uint32
#   meta             meta_len bytes of UTF-8 JSON:
#                      {"meta": {...user metadata...},
#                       "arrays": [{"name": str, "dtype": str,
#                                   "shape": [int...], "offset": int,
#                                   "nbytes": int}, ...]}
#   data             raw C-order array bytes, at the offsets given above,
#                    relative to the end of the meta block.


def save_checkpoint(path: str, arrays: dict, meta: dict | None = None) -> None:
    """Atomic write (temp file + rename) of named arrays plus JSON metadata."""
    index = []
    offset = 0
    items = list(arrays.items())
    for name, arr in items:
        arr = np.ascontiguousarray(arr)
        index.append(
            {"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape), "offset": offset, "nbytes": arr.nbytes}
        )
        offset += arr.nbytes
    header = json.dumps({"meta": meta or {}, "arrays": index}).encode("utf-8")
    dirname = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirname, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dirname, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(CHECKPOINT_MAGIC)
            f.write(struct.pack("<II", CHECKPOINT_VERSION, len(header)))
            f.write(header)
            for (name, arr), entry in zip(items, index):
                f.write(np.ascontiguousarray(arr).tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path: str):
    """Returns (arrays: dict[str, ndarray], meta: dict)."""
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        version, meta_len = struct.unpack("<II", f.read(8))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        header = json.loads(f.read(meta_len).decode("utf-8"))
        data = f.read()
    arrays = {}
    for entry in header["arrays"]:
        start = entry["offset"]
        buf = data[start : start + entry["nbytes"]]
        arrays[entry["name"]] = np.frombuffer(buf, dtype=entry["dtype"]).reshape(entry["shape"]).copy()
    return arrays, header["meta"]
