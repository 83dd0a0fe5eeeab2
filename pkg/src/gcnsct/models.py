"""Graph convolutional layers with an optional smoothness control term.

The baseline layer is H^l = act(W H^{l-1} G). The smoothness control
term (SCT) adds a learnable matrix B that lies entirely inside the
smooth eigenspace (B = A Q^T for a d x m coefficient matrix A), so it
never increases the distance of the pre-activation to the eigenspace but
lets training steer the normalised smoothness of the activated output.

Two coefficient architectures are provided:

  * pool:     A = W .* (H_in Q)                       (W is d x m)
  * residual: A = softmax(H_in Q) .* (b W0 H0 Q + (1 - b) W1 H_in Q),
              b = log(theta / l + 1)                  (W0, W1 are d x d)

Skip-connection variants mirror two published architectures: one mixes
the propagated features with the encoded input and an identity-anchored
weight; the other anchors the Dirichlet energy between configurable
bounds via near-orthogonal weights and a learnable convex-style split.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import autodiff as ad
from .activations import Activation, activation_from_config
from .errors import ConfigError, InputError, ShapeError
from .graphs import PropagationOperator, SpectralBasis
from .rng import stream

BETA_CLAMP = 1e-6

MODEL_KINDS = ("gcn", "gcn-sct", "gcnii", "gcnii-sct", "egnn", "egnn-sct")


@dataclass
class SctParams:
    """Learnable pieces of the smoothness control term (as tape nodes)."""

    arch: str
    w: ad.TapeNode | None = None
    w0: ad.TapeNode | None = None
    w1: ad.TapeNode | None = None
    theta: float = 0.5

    def __post_init__(self):
        if self.arch not in ("pool", "residual"):
            raise ConfigError(f"unknown SCT architecture {self.arch!r}")
        if self.arch == "pool" and self.w is None:
            raise ConfigError("pool SCT needs the d x m coefficient matrix")
        if self.arch == "residual" and (self.w0 is None or self.w1 is None):
            raise ConfigError("residual SCT needs both d x d matrices")


def residual_mix_weight(theta: float, l: int) -> float:
    """The layer-decaying residual coefficient log(theta / l + 1), clamped
    into (0, 1)."""
    if l < 1:
        raise InputError(f"layer index must be >= 1, got {l}")
    beta = math.log(theta / l + 1.0)
    return min(max(beta, BETA_CLAMP), 1.0 - BETA_CLAMP)


def sct_term(
    h_in: ad.TapeNode,
    h0: ad.TapeNode | None,
    basis: SpectralBasis,
    params: SctParams,
    l: int,
) -> ad.TapeNode:
    """Smoothness control term B = A Q^T; lies in the smooth subspace by
    construction. ``h_in`` is the layer input; the residual architecture
    also needs the encoded input ``h0``."""
    if l < 1:
        raise InputError(f"layer index must be >= 1, got {l}")
    q = ad.constant(basis.q)
    pooled_in = ad.matmul(h_in, q)
    if params.arch == "pool":
        coeff = ad.hadamard(params.w, pooled_in)
    else:
        if h0 is None:
            raise InputError("residual SCT needs the encoded input features")
        beta = residual_mix_weight(params.theta, l)
        pooled_h0 = ad.matmul(h0, q)
        gate = ad.softmax(pooled_in, axis=0)
        mixed = ad.add(
            ad.scale(ad.matmul(params.w0, pooled_h0), beta),
            ad.scale(ad.matmul(params.w1, pooled_in), 1.0 - beta),
        )
        coeff = ad.hadamard(gate, mixed)
    return ad.matmul(coeff, ad.transpose(q))


def _maybe_add_sct(z, h_in, h0, basis, sct, l):
    if sct is None:
        return z
    if basis is None:
        raise InputError("SCT needs the spectral basis")
    return ad.add(z, sct_term(h_in, h0, basis, sct, l))


def gcn_layer(
    h_prev: ad.TapeNode,
    op: PropagationOperator,
    weight: ad.TapeNode,
    act: Activation,
    sct: SctParams | None = None,
    h0: ad.TapeNode | None = None,
    basis: SpectralBasis | None = None,
    l: int = 1,
) -> ad.TapeNode:
    """act(W H G [+ B])."""
    z = ad.matmul(ad.matmul(weight, h_prev), ad.constant(op.g))
    z = _maybe_add_sct(z, h_prev, h0, basis, sct, l)
    return ad.activation(z, act)


def _blend(a_node_or_float, x: ad.TapeNode, y: ad.TapeNode) -> ad.TapeNode:
    """(1 - a) x + a y for a either a float or a 1x1 node."""
    if isinstance(a_node_or_float, ad.TapeNode):
        a = a_node_or_float
        one_minus = ad.sub(ad.constant([[1.0]]), a)
        return ad.add(ad.mul_scalar(one_minus, x), ad.mul_scalar(a, y))
    a = float(a_node_or_float)
    return ad.add(ad.scale(x, 1.0 - a), ad.scale(y, a))


def gcnii_layer(
    h_prev: ad.TapeNode,
    h0: ad.TapeNode,
    op: PropagationOperator,
    weight: ad.TapeNode,
    alpha_l,
    beta_l,
    act: Activation,
    sct: SctParams | None = None,
    basis: SpectralBasis | None = None,
    l: int = 1,
) -> ad.TapeNode:
    """act( ((1 - b) I + b W) ((1 - a) H G + a H0) [+ B] ).

    The identity-anchored weight multiplies on the feature side so it
    mixes feature dimensions, never nodes. ``alpha_l`` and ``beta_l`` may
    be floats (scheduled) or 1x1 tape nodes (learnable).
    """
    for name, v in (("alpha_l", alpha_l), ("beta_l", beta_l)):
        if not isinstance(v, ad.TapeNode) and not 0.0 < float(v) < 1.0:
            raise InputError(f"{name} must lie strictly in (0, 1), got {v}")
    propagated = ad.matmul(h_prev, ad.constant(op.g))
    combined = _blend(alpha_l, propagated, h0)
    eye = ad.constant(np.eye(weight.shape[0]))
    mix = _blend(beta_l, eye, weight)
    z = ad.matmul(mix, combined)
    z = _maybe_add_sct(z, h_prev, h0, basis, sct, l)
    return ad.activation(z, act)


def egnn_layer(
    h_prev: ad.TapeNode,
    h0: ad.TapeNode,
    op: PropagationOperator,
    weight: ad.TapeNode,
    c_min: float,
    c1: ad.TapeNode,
    act: Activation,
    sct: SctParams | None = None,
    basis: SpectralBasis | None = None,
    l: int = 1,
) -> ad.TapeNode:
    """act( W (c1 H0 + c2 H + (1 - c_min) H G) [+ B] ) with c2 = c_min - c1."""
    if not 0.0 <= c_min <= 1.0:
        raise InputError(f"c_min must lie in [0, 1], got {c_min}")
    if c1.shape != (1, 1):
        raise ShapeError(f"c1 must be a 1x1 node, got {c1.shape}")
    c2 = ad.sub(ad.constant([[c_min]]), c1)
    anchored = ad.add(ad.mul_scalar(c1, h0), ad.mul_scalar(c2, h_prev))
    propagated = ad.scale(ad.matmul(h_prev, ad.constant(op.g)), 1.0 - c_min)
    z = ad.matmul(weight, ad.add(anchored, propagated))
    z = _maybe_add_sct(z, h_prev, h0, basis, sct, l)
    return ad.activation(z, act)


def orthogonality_penalty(weight: ad.TapeNode, scale_sq: float) -> ad.TapeNode:
    """|W^T W - scale_sq I|_F^2; keeps near-orthogonal weights near-orthogonal."""
    eye = ad.constant(scale_sq * np.eye(weight.shape[1]))
    return ad.sum_sq(ad.sub(ad.matmul(ad.transpose(weight), weight), eye))


@dataclass
class ModelConfig:
    """Architecture description; serialisable to the JSON config format."""

    kind: str = "gcn"
    layers: int = 2
    hidden_dim: int = 16
    activation: str = "relu"
    activation_param: float | None = None
    sct_arch: str | None = None
    theta: float = 0.5
    alpha: float = 0.1
    c_min: float = 0.5
    c_max: float = 1.0
    lambda_orth: float = 1e-3
    dropout: float = 0.0
    seed: int = 0
    gcnii_learnable: bool = False
    identity_io: bool = False

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.layers < 1:
            raise ConfigError(f"need at least one layer, got {self.layers}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.kind.startswith("gcnii") and not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"skip mix alpha must lie in (0, 1), got {self.alpha}")
        if self.sct_arch is None and self.kind.endswith("-sct"):
            # the pooled form suits the plain model, the residual form the
            # skip-connected ones
            self.sct_arch = "pool" if self.kind == "gcn-sct" else "residual"
        if self.sct_arch is not None and self.sct_arch not in ("pool", "residual"):
            raise ConfigError(f"unknown SCT architecture {self.sct_arch!r}")

    @property
    def uses_sct(self) -> bool:
        return self.kind.endswith("-sct")

    def make_activation(self) -> Activation:
        return activation_from_config(self.activation, self.activation_param)

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("model config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json_dict(self) -> dict:
        return asdict(self)


@dataclass
class ForwardPass:
    logits: ad.TapeNode
    features: list[ad.TapeNode] = field(default_factory=list)
    leaves: dict[str, ad.TapeNode] = field(default_factory=dict)


class Model:
    """A stack of graph convolutional layers bound to one graph.

    Parameters live in ``self.params`` as plain arrays; each forward pass
    wraps them in fresh tape leaves so the optimiser can update them in
    place between passes.
    """

    def __init__(
        self,
        config: ModelConfig,
        d_in: int,
        num_classes: int,
        op: PropagationOperator,
        basis: SpectralBasis,
    ):
        self.config = config
        self.op = op
        self.basis = basis
        self.d_in = d_in
        self.num_classes = num_classes
        d = config.hidden_dim
        if config.identity_io and not (d_in == d == num_classes):
            raise ConfigError("identity encoders need matching input/hidden/output dims")
        rng = stream(config.seed, 0)
        self.params: dict[str, np.ndarray] = {}
        if not config.identity_io:
            self.params["enc_w"] = _glorot(rng, d, d_in)
            self.params["enc_b"] = np.zeros((d, 1))
        for l in range(1, config.layers + 1):
            if config.kind.startswith("egnn"):
                scale = math.sqrt(config.c_max) if l == 1 else 1.0
                self.params[f"w{l}"] = scale * np.eye(d)
                self.params[f"egnn_c1_{l}"] = np.array([[config.c_min / 2.0]])
            else:
                self.params[f"w{l}"] = _glorot(rng, d, d)
            if config.uses_sct:
                if config.sct_arch == "pool":
                    self.params[f"sct_w{l}"] = rng.uniform(-0.1, 0.1, size=(d, basis.m))
                else:
                    self.params[f"sct_w0_{l}"] = _glorot(rng, d, d)
                    self.params[f"sct_w1_{l}"] = _glorot(rng, d, d)
            if config.kind.startswith("gcnii") and config.gcnii_learnable:
                self.params[f"gcnii_a{l}"] = np.array([[_logit(config.alpha)]])
                self.params[f"gcnii_b{l}"] = np.array(
                    [[_logit(residual_mix_weight(config.theta, l))]]
                )
        if not config.identity_io:
            self.params["dec_w"] = _glorot(rng, num_classes, d)
            self.params["dec_b"] = np.zeros((num_classes, 1))
        self.activation = config.make_activation()

    def parameter_group(self, name: str) -> str:
        """"fc" for encoder/decoder parameters, "conv" for the rest."""
        return "fc" if name.startswith(("enc_", "dec_")) else "conv"

    def _sct_params(self, leaves: dict[str, ad.TapeNode], l: int) -> SctParams | None:
        if not self.config.uses_sct:
            return None
        if self.config.sct_arch == "pool":
            return SctParams(arch="pool", w=leaves[f"sct_w{l}"])
        return SctParams(
            arch="residual",
            w0=leaves[f"sct_w0_{l}"],
            w1=leaves[f"sct_w1_{l}"],
            theta=self.config.theta,
        )

    def forward(
        self,
        x: np.ndarray,
        training: bool = False,
        dropout_rng: np.random.Generator | None = None,
    ) -> ForwardPass:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape != (self.d_in, self.op.g.shape[0]):
            raise ShapeError(
                f"features must be {self.d_in} x {self.op.g.shape[0]}, got {x.shape}"
            )
        cfg = self.config
        leaves = {name: ad.leaf(arr) for name, arr in self.params.items()}
        if cfg.identity_io:
            h = ad.constant(x)
        else:
            h = ad.add_col_bias(ad.matmul(leaves["enc_w"], ad.constant(x)), leaves["enc_b"])
        features = [h]
        h0 = h
        use_dropout = training and cfg.dropout > 0.0
        if use_dropout and dropout_rng is None:
            raise InputError("training with dropout needs a generator")
        for l in range(1, cfg.layers + 1):
            h_in = features[-1]
            if use_dropout:
                keep = (dropout_rng.random(h_in.shape) >= cfg.dropout) / (1.0 - cfg.dropout)
                h_in = ad.hadamard(h_in, ad.constant(keep))
            sct = self._sct_params(leaves, l)
            if cfg.kind.startswith("gcnii"):
                if cfg.gcnii_learnable:
                    alpha_l = ad.sigmoid(leaves[f"gcnii_a{l}"])
                    beta_l = ad.sigmoid(leaves[f"gcnii_b{l}"])
                else:
                    alpha_l = cfg.alpha
                    beta_l = residual_mix_weight(cfg.theta, l)
                h = gcnii_layer(
                    h_in, h0, self.op, leaves[f"w{l}"], alpha_l, beta_l,
                    self.activation, sct, self.basis, l,
                )
            elif cfg.kind.startswith("egnn"):
                h = egnn_layer(
                    h_in, h0, self.op, leaves[f"w{l}"], cfg.c_min,
                    leaves[f"egnn_c1_{l}"], self.activation, sct, self.basis, l,
                )
            else:
                h = gcn_layer(
                    h_in, self.op, leaves[f"w{l}"], self.activation, sct, h0, self.basis, l
                )
            features.append(h)
        if cfg.identity_io:
            logits = features[-1]
        else:
            logits = ad.add_col_bias(
                ad.matmul(leaves["dec_w"], features[-1]), leaves["dec_b"]
            )
        return ForwardPass(logits=logits, features=features, leaves=leaves)

    def regularization(self, leaves: dict[str, ad.TapeNode]) -> ad.TapeNode | None:
        """Orthogonality penalty for the energy-anchored kinds, else None."""
        cfg = self.config
        if not cfg.kind.startswith("egnn") or cfg.lambda_orth == 0.0:
            return None
        total = None
        for l in range(1, cfg.layers + 1):
            scale_sq = cfg.c_max if l == 1 else 1.0
            term = orthogonality_penalty(leaves[f"w{l}"], scale_sq)
            total = term if total is None else ad.add(total, term)
        return ad.scale(total, cfg.lambda_orth)


def _glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    bound = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


def _logit(p: float) -> float:
    p = min(max(p, 1e-9), 1.0 - 1e-9)
    return math.log(p / (1.0 - p))
