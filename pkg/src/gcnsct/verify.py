"""Executable property suite.

Every documented invariant of the library runs here as a named check
with an explicit tolerance; the verify command turns the results into a
JSON report and an exit code. All randomness is drawn from per-property
streams of one master seed, so repeated runs are byte-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .activations import (
    Activation,
    elu,
    identity,
    leaky_relu,
    leaky_relu_sphere_residual,
    pos_neg_split,
    relu,
    relu_midpoint_sphere_residual,
    relu_sphere_residual,
    split_projection_identity_residual,
)
from .control import (
    is_nonincreasing,
    leaky_range_probe,
    relu_min_smoothness_closed_form,
    verify_monotone_region,
)
from .errors import InputError
from .generators import gnp_graph, random_connected_graph
from .graphs import build_propagation_operator, eigenbasis
from .linalg import symmetric_eigendecomposition
from .models import Model, ModelConfig, SctParams, sct_term
from .rng import stream
from .smoothness import (
    dirichlet_energy,
    distance_to_eigenspace,
    normalized_smoothness,
)
from .training import TrainConfig, sbm_dataset, train


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_residual": self.worst,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _random_instance(rng, max_n=30, max_d=8, connected=False):
    n = int(rng.integers(2, max_n + 1))
    p = float(rng.uniform(0.08, 0.9))
    graph = random_connected_graph(rng, n, p) if connected else gnp_graph(rng, n, p)
    op = build_propagation_operator(graph)
    basis = eigenbasis(graph, op)
    d = int(rng.integers(1, max_d + 1))
    z = rng.standard_normal((d, n)) * float(rng.uniform(0.3, 3.0))
    return graph, op, basis, z


def check_eigh_reconstruction(rng) -> PropertyResult:
    tol = 1e-8
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        m = rng.standard_normal((n, n))
        m = 0.5 * (m + m.T)
        w, v = symmetric_eigendecomposition(m)
        scale = max(np.linalg.norm(m), 1e-30)
        worst = max(worst, float(np.linalg.norm(v @ np.diag(w) @ v.T - m)) / scale)
        worst = max(worst, float(np.linalg.norm(v.T @ v - np.eye(n))))
    return PropertyResult("linalg.eigh-reconstruction", worst < tol, worst, tol)


def check_matmul_associativity(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for _ in range(20):
        i, j, k, l = (int(rng.integers(1, 9)) for _ in range(4))
        a, b, c = rng.standard_normal((i, j)), rng.standard_normal((j, k)), rng.standard_normal((k, l))
        left = ad.matmul(ad.matmul(ad.leaf(a), ad.leaf(b)), ad.leaf(c)).value
        right = ad.matmul(ad.leaf(a), ad.matmul(ad.leaf(b), ad.leaf(c))).value
        scale = max(float(np.max(np.abs(left))), 1.0)
        worst = max(worst, float(np.max(np.abs(left - right))) / scale)
    return PropertyResult("linalg.matmul-associativity", worst < tol, worst, tol)


def finite_difference_gradient(build_loss, params: list[np.ndarray], h: float = 1e-5):
    """Central finite differences of a scalar loss over every param entry."""
    grads = []
    for idx in range(len(params)):
        g = np.zeros_like(params[idx])
        flat = params[idx].reshape(-1)
        gflat = g.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            up = build_loss(params)
            flat[j] = orig - h
            down = build_loss(params)
            flat[j] = orig
            gflat[j] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads


def relative_gradient_error(analytic, numeric) -> float:
    worst = 0.0
    for a, f in zip(analytic, numeric):
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(f))))
        worst = max(worst, float(np.max(np.abs(a - f))) / scale)
    return worst


def _random_tape_loss(rng):
    """A random composition of matmul/add/hadamard/activation/sum with
    inputs nudged away from activation kinks."""
    d = int(rng.integers(2, 5))
    n = int(rng.integers(2, 5))
    shapes = [(d, d), (d, n), (d, n)]
    params = [rng.standard_normal(s) for s in shapes]
    acts = [elu(1.0), identity(), leaky_relu(0.3), relu()]
    act = acts[int(rng.integers(0, len(acts)))]
    mixer = rng.standard_normal((d, d))
    # fixed shift keeping the unperturbed pre-activations away from the
    # kink, so central differences see a locally smooth function
    base = mixer @ (params[0] @ params[1] + params[2])
    shift = np.where(np.abs(base) < 0.05, 0.1, 0.0)

    def build(ps):
        nodes = [ad.leaf(p) for p in ps]
        w, x, y = nodes
        t = ad.matmul(w, x)
        t = ad.add(t, y)
        t = ad.matmul(ad.constant(mixer), t)
        if act.kind in ("relu", "leaky_relu"):
            t = ad.add(t, ad.constant(shift))
        t = ad.activation(t, act)
        t = ad.hadamard(t, t)
        return ad.sum_all(t), nodes

    return build, params


def check_autodiff_finite_difference(rng) -> PropertyResult:
    tol = 1e-5
    worst = 0.0
    for _ in range(50):
        build, params = _random_tape_loss(rng)
        loss, nodes = build(params)
        ad.backward(loss)
        analytic = [nd.grad for nd in nodes]
        numeric = finite_difference_gradient(
            lambda ps: float(build(ps)[0].value[0, 0]), params
        )
        worst = max(worst, relative_gradient_error(analytic, numeric))
    return PropertyResult("autodiff.finite-difference", worst < tol, worst, tol)


def check_eigenspace_dimension(rng) -> PropertyResult:
    tol = 0.0
    mismatches = 0
    for _ in range(100):
        graph, op, basis, _ = _random_instance(rng)
        w, _ = symmetric_eigendecomposition(op.g)
        multiplicity = int(np.sum(np.abs(w - 1.0) < 1e-8))
        if multiplicity != basis.m:
            mismatches += 1
    return PropertyResult(
        "graphs.eigenspace-dimension", mismatches == 0, float(mismatches), tol,
        "closed-form dimension vs eigensolver multiplicity",
    )


def check_basis_fixed_orthonormal(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for _ in range(100):
        _, op, basis, _ = _random_instance(rng)
        worst = max(worst, float(np.max(np.abs(op.g @ basis.q - basis.q))))
        worst = max(worst, float(np.max(np.abs(basis.q.T @ basis.q - np.eye(basis.m)))))
    return PropertyResult("graphs.basis-fixed-orthonormal", worst < tol, worst, tol)


def check_spectrum_range(rng) -> PropertyResult:
    slack = 1e-9
    worst = 0.0
    for _ in range(100):
        _, op, _, _ = _random_instance(rng)
        w, _ = symmetric_eigendecomposition(op.g)
        worst = max(worst, float(np.max(w)) - 1.0, -1.0 - float(np.min(w)))
    return PropertyResult("graphs.spectrum-range", worst <= slack, worst, slack)


def check_seminorm_equivalence(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(100):
        _, op, basis, h = _random_instance(rng)
        dist = distance_to_eigenspace(h, basis)
        energy = dirichlet_energy(h, op)
        w, _ = symmetric_eigendecomposition(op.g)
        if basis.m < op.g.shape[0]:
            alpha = math.sqrt(max(1.0 - float(w[basis.m]), 0.0))
        else:
            alpha = 1.0
        worst = max(worst, alpha * dist - energy, energy - math.sqrt(2.0) * dist)
    return PropertyResult("smoothness.seminorm-equivalence", worst <= slack, worst, slack)


def check_homogeneity(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for _ in range(50):
        _, op, basis, h = _random_instance(rng)
        c = float(rng.uniform(-5.0, 5.0))
        for measure in (lambda m: distance_to_eigenspace(m, basis), lambda m: dirichlet_energy(m, op)):
            base = measure(h)
            scaled = measure(c * h)
            worst = max(worst, abs(scaled - abs(c) * base) / max(base, 1.0))
    return PropertyResult("smoothness.homogeneity", worst < tol, worst, tol)


def check_triangle_inequality(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(50):
        _, op, basis, h1 = _random_instance(rng)
        h2 = rng.standard_normal(h1.shape)
        for measure in (lambda m: distance_to_eigenspace(m, basis), lambda m: dirichlet_energy(m, op)):
            worst = max(worst, measure(h1 + h2) - measure(h1) - measure(h2))
    return PropertyResult("smoothness.triangle-inequality", worst <= slack, worst, slack)


def check_scale_invariance(rng) -> PropertyResult:
    tol = 1e-12
    worst = 0.0
    for _ in range(50):
        _, _, basis, h = _random_instance(rng)
        z = h[0]
        c = float(rng.uniform(0.1, 10.0)) * (1.0 if rng.random() < 0.5 else -1.0)
        worst = max(worst, abs(normalized_smoothness(c * z, basis) - normalized_smoothness(z, basis)))
    return PropertyResult("smoothness.scale-invariance", worst < tol, worst, tol)


def check_relu_sphere(rng) -> PropertyResult:
    tol = 1e-9
    worst = 0.0
    for _ in range(100):
        _, _, basis, z = _random_instance(rng)
        worst = max(worst, relu_sphere_residual(z, basis).residual)
    return PropertyResult("activations.relu-sphere", worst < tol, worst, tol)


def check_leaky_sphere(rng) -> PropertyResult:
    tol = 1e-9
    worst = 0.0
    for _ in range(100):
        _, _, basis, z = _random_instance(rng)
        a = float(rng.uniform(0.05, 0.95))
        worst = max(worst, leaky_relu_sphere_residual(z, a, basis).residual)
    return PropertyResult("activations.leaky-sphere", worst < tol, worst, tol)


def check_midpoint_sphere(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for _ in range(100):
        _, _, _, z = _random_instance(rng)
        scale = max(float(np.sum(z * z)), 1e-30)
        worst = max(worst, relu_midpoint_sphere_residual(z) / scale)
    return PropertyResult("activations.midpoint-sphere", worst < tol, worst, tol,
                          "residual relative to |Z|_F^2")


def check_split_identity(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for _ in range(100):
        _, _, basis, z = _random_instance(rng)
        plus, minus = pos_neg_split(z)
        if float(np.max(np.abs(z - (plus - minus)))) != 0.0:
            worst = max(worst, 1.0)
        scale = max(float(np.sum(z * z)), 1e-30)
        worst = max(worst, split_projection_identity_residual(z, basis) / scale)
    return PropertyResult("activations.split-identity", worst < tol, worst, tol,
                          "residual relative to |Z|_F^2")


def check_distance_contraction(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(100):
        _, _, basis, z = _random_instance(rng)
        worst = max(
            worst,
            distance_to_eigenspace(np.maximum(z, 0.0), basis) - distance_to_eigenspace(z, basis),
        )
    return PropertyResult("activations.distance-contraction", worst <= slack, worst, slack)


def check_leaky_two_sided(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(100):
        _, _, basis, z = _random_instance(rng)
        a = float(rng.uniform(0.05, 0.95))
        h = np.where(z > 0.0, z, a * z)
        dist_z = distance_to_eigenspace(z, basis)
        dist_h = distance_to_eigenspace(h, basis)
        worst = max(worst, dist_h - dist_z, a * dist_z - dist_h)
    return PropertyResult("activations.leaky-two-sided", worst <= slack, worst, slack)


def check_energy_contraction(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(100):
        _, op, _, z = _random_instance(rng)
        a = float(rng.uniform(0.05, 0.95))
        energy_z = dirichlet_energy(z, op)
        worst = max(worst, dirichlet_energy(np.maximum(z, 0.0), op) - energy_z)
        worst = max(worst, dirichlet_energy(np.where(z > 0.0, z, a * z), op) - energy_z)
    return PropertyResult("activations.energy-contraction", worst <= slack, worst, slack)


def _connected_vector_instance(rng, n_hi=20, target_s=None):
    """Connected graph plus a vector with a controlled smooth coefficient."""
    n = int(rng.integers(4, n_hi + 1))
    graph = random_connected_graph(rng, n, float(rng.uniform(0.2, 0.7)))
    op = build_propagation_operator(graph)
    basis = eigenbasis(graph, op)
    e = basis.q[:, 0]
    u = rng.uniform(-1.0, 1.0, size=n)
    u_perp = u - float(u @ e) * e
    if np.linalg.norm(u_perp) < 1e-9:  # pragma: no cover
        u_perp = np.ones(n) - float(np.ones(n) @ e) * e
    if target_s is None:
        z = u
    else:
        t = target_s / math.sqrt(1.0 - target_s * target_s)
        z = u_perp + t * float(np.linalg.norm(u_perp)) * e
    return graph, op, basis, z


def check_corollary_range(rng) -> PropertyResult:
    """Shifting can push the activated output's s both below and above the
    input's, while the unnormalised distance never grows."""
    slack = 1e-10
    failures = 0
    worst_dist = 0.0
    for _ in range(50):
        _, op, basis, z = _connected_vector_instance(rng)
        e = basis.q[:, 0]
        # retarget the input's s midway between the reachable minimum and 1
        # so both directions of the range are nontrivial
        floor = relu_min_smoothness_closed_form(z, op)
        target = 0.5 * (floor + 1.0)
        t = target / math.sqrt(1.0 - target * target)
        z_perp = z - float(z @ e) * e
        z = z_perp + t * float(np.linalg.norm(z_perp)) * e
        s_in = normalized_smoothness(z, basis)
        dist_in = float(np.linalg.norm(z_perp))
        x = z / np.sqrt(op.degrees)
        c = math.sqrt(float(op.degrees.sum()))
        threshold = c * float(np.max(x))
        grid = np.concatenate([
            np.linspace(float(z @ e) - 3 * np.linalg.norm(z), threshold - abs(threshold) * 1e-9 - 1e-12, 2001),
            [threshold + abs(threshold) * 1e-6 + 0.1, threshold + 1.0],
        ])
        shifted = z[None, :] - grid[:, None] * e[None, :]
        h = np.maximum(shifted, 0.0)
        proj = h @ e
        norms = np.linalg.norm(h, axis=1)
        s_vals = np.where(norms > 0.0, np.abs(proj) / np.maximum(norms, 1e-300), 1.0)
        dists = np.linalg.norm(h - proj[:, None] * e[None, :], axis=1)
        if not (np.min(s_vals) < s_in and np.max(s_vals) > s_in):
            failures += 1
        worst_dist = max(worst_dist, float(np.max(dists)) - dist_in)
    passed = failures == 0 and worst_dist <= slack
    return PropertyResult(
        "control.corollary-range", passed, max(float(failures), worst_dist), slack,
        f"{failures} instances missed the two-sided range",
    )


def check_relu_min_closed_form(rng) -> PropertyResult:
    tol = 1e-4
    worst = 0.0
    for _ in range(50):
        _, op, basis, z = _connected_vector_instance(rng)
        closed = relu_min_smoothness_closed_form(z, op)
        e = basis.q[:, 0]
        x = z / np.sqrt(op.degrees)
        c = math.sqrt(float(op.degrees.sum()))
        threshold = c * float(np.max(x))
        low = c * float(np.min(x)) - 1.0
        high = threshold - abs(threshold) * 1e-9 - 1e-15
        grid = np.linspace(low, high, 20001)
        shifted = z[None, :] - grid[:, None] * e[None, :]
        h = np.maximum(shifted, 0.0)
        proj = h @ e
        norms = np.linalg.norm(h, axis=1)
        s_vals = np.where(norms > 0.0, np.abs(proj) / np.maximum(norms, 1e-300), 1.0)
        worst = max(worst, abs(float(np.min(s_vals)) - closed))
    return PropertyResult("control.relu-min-closed-form", worst < tol, worst, tol)


def check_monotone_region(rng) -> PropertyResult:
    failures = 0
    for _ in range(20):
        _, op, basis, z = _connected_vector_instance(rng)
        x = z / np.sqrt(op.degrees)
        c = math.sqrt(float(op.degrees.sum()))
        threshold = c * float(np.max(x))
        grid = np.linspace(threshold - 5.0, threshold - abs(threshold) * 1e-6 - 1e-9, 401)
        if not verify_monotone_region(z, op, grid):
            failures += 1
    return PropertyResult(
        "control.monotone-region", failures == 0, float(failures), 0.0,
        "s must be non-increasing below the clipping threshold",
    )


def check_relu_max_exact(rng) -> PropertyResult:
    failures = 0
    for _ in range(20):
        _, op, basis, z = _connected_vector_instance(rng)
        e = basis.q[:, 0]
        x = z / np.sqrt(op.degrees)
        c = math.sqrt(float(op.degrees.sum()))
        threshold = c * float(np.max(x))
        for alpha in (threshold + abs(threshold) * 1e-9 + 1e-12, threshold + 0.5, threshold + 10.0):
            h = np.maximum(z - alpha * e, 0.0)
            if normalized_smoothness(h, basis) != 1.0:
                failures += 1
    return PropertyResult(
        "control.relu-max-exact", failures == 0, float(failures), 0.0,
        "s is exactly 1 at and above the clipping threshold",
    )


def check_smooth_input_stays_smooth(rng) -> PropertyResult:
    tol = 1e-12
    worst = 0.0
    for _ in range(20):
        _, op, basis, _ = _connected_vector_instance(rng)
        e = basis.q[:, 0]
        z = float(rng.uniform(-2.0, 2.0)) * e
        for alpha in np.linspace(-3.0, 3.0, 41):
            h = np.maximum(z - alpha * e, 0.0)
            worst = max(worst, abs(normalized_smoothness(h, basis) - 1.0))
    return PropertyResult(
        "control.smooth-input-stays-smooth", worst <= tol, worst, tol,
        "inputs inside the eigenspace keep s = 1 for every shift",
    )


def check_leaky_range(rng) -> PropertyResult:
    failures = 0
    worst = 0.0
    for _ in range(50):
        _, _, basis, z = _connected_vector_instance(rng)
        a = float(rng.uniform(0.05, 0.95))
        lo, hi = leaky_range_probe(z, basis, a)
        worst = max(worst, lo, 1.0 - hi)
        if not (lo <= 1e-3 and hi >= 0.999 and hi < 1.0):
            failures += 1
    return PropertyResult(
        "control.leaky-range", failures == 0, worst, 1e-3,
        "sweep must reach below 1e-3 and above 0.999 but never 1",
    )


def check_sct_subspace(rng) -> PropertyResult:
    tol = 1e-10
    worst = 0.0
    for i in range(100):
        _, op, basis, _ = _random_instance(rng, max_n=20, max_d=6)
        d = int(rng.integers(1, 7))
        n = op.g.shape[0]
        h_in = ad.constant(rng.standard_normal((d, n)))
        h0 = ad.constant(rng.standard_normal((d, n)))
        if i % 2 == 0:
            params = SctParams(arch="pool", w=ad.leaf(rng.standard_normal((d, basis.m))))
        else:
            params = SctParams(
                arch="residual",
                w0=ad.leaf(rng.standard_normal((d, d))),
                w1=ad.leaf(rng.standard_normal((d, d))),
                theta=float(rng.uniform(0.1, 0.9)),
            )
        b = sct_term(h_in, h0, basis, params, l=int(rng.integers(1, 6))).value
        worst = max(worst, distance_to_eigenspace(b, basis))
    return PropertyResult("models.sct-subspace", worst < tol, worst, tol)


def check_sct_contraction(rng) -> PropertyResult:
    slack = 1e-10
    worst = 0.0
    for _ in range(30):
        graph, op, basis, _ = _connected_vector_instance(rng, n_hi=15)
        n = graph.n
        d = int(rng.integers(2, 5))
        h_prev = rng.standard_normal((d, n))
        w = rng.standard_normal((d, d))
        spectral = float(np.linalg.norm(w, 2))
        target = float(rng.uniform(0.2, 0.95)) / max(basis.lambda2, 0.5)
        w *= target / max(spectral, 1e-12)
        s_l = float(np.linalg.norm(w, 2))
        if s_l * basis.lambda2 >= 1.0:  # pragma: no cover
            continue
        params = SctParams(arch="pool", w=ad.leaf(rng.standard_normal((d, basis.m))))
        z = ad.add(
            ad.matmul(ad.matmul(ad.leaf(w), ad.constant(h_prev)), ad.constant(op.g)),
            sct_term(ad.constant(h_prev), None, basis, params, l=1),
        )
        h_out = np.maximum(z.value, 0.0)
        bound = s_l * basis.lambda2 * distance_to_eigenspace(h_prev, basis)
        worst = max(worst, distance_to_eigenspace(h_out, basis) - bound)
    return PropertyResult("models.sct-contraction", worst <= slack, worst, slack)


def check_sct_normalized_search(rng) -> PropertyResult:
    """Some pooled-coefficient setting strictly lowers the worst per-dim s
    of a layer output versus the same layer without the control term."""
    found = True
    margin = 0.0
    for _ in range(5):
        graph, op, basis, _ = _connected_vector_instance(rng, n_hi=12)
        n = graph.n
        d = 3
        h_prev = rng.standard_normal((d, n))
        w = rng.standard_normal((d, d)) * 0.5
        pre_plain = w @ h_prev @ op.g
        plain = np.maximum(pre_plain, 0.0)
        s_plain = max(normalized_smoothness(row, basis) for row in plain)
        pooled = (h_prev @ basis.q)  # d x 1
        best = math.inf
        for t in np.linspace(-20.0, 20.0, 401):
            b = (t * pooled) @ basis.q.T
            h = np.maximum(pre_plain + b, 0.0)
            best = min(best, max(normalized_smoothness(row, basis) for row in h))
        if not best < s_plain:
            found = False
        margin = max(margin, best - s_plain)
    return PropertyResult(
        "models.sct-normalized-search", found, margin, 0.0,
        "a pooled coefficient must strictly lower the worst per-dimension s",
    )


def _layer_config(kind: str, seed: int) -> ModelConfig:
    return ModelConfig(
        kind=kind,
        layers=2,
        hidden_dim=3,
        activation="elu",
        activation_param=1.0,
        theta=0.7,
        alpha=0.3,
        c_min=0.6,
        c_max=1.2,
        lambda_orth=1e-2,
        seed=seed,
    )


def model_loss(model: Model, x, labels, mask):
    fp = model.forward(x)
    loss = ad.nll_loss(fp.logits, labels, mask)
    penalty = model.regularization(fp.leaves)
    if penalty is not None:
        loss = ad.add(loss, penalty)
    return loss, fp


def check_layer_gradients(rng) -> PropertyResult:
    tol = 1e-5
    worst = 0.0
    kinds = ("gcn", "gcn-sct", "gcnii", "gcnii-sct", "egnn", "egnn-sct")
    for i in range(50):
        kind = kinds[i % len(kinds)]
        graph, op, basis, _ = _connected_vector_instance(rng, n_hi=6)
        model = Model(_layer_config(kind, int(rng.integers(0, 2**31))), 2, 2, op, basis)
        x = rng.standard_normal((2, graph.n))
        labels = rng.integers(0, 2, size=graph.n)
        mask = np.arange(graph.n)
        names = list(model.params)
        loss, fp = model_loss(model, x, labels, mask)
        ad.backward(loss)
        analytic = [fp.leaves[n].grad.copy() for n in names]
        # the finite-difference driver perturbs the model's arrays in place
        numeric = finite_difference_gradient(
            lambda _ps: float(model_loss(model, x, labels, mask)[0].value[0, 0]),
            [model.params[n] for n in names],
        )
        worst = max(worst, relative_gradient_error(analytic, numeric))
    return PropertyResult("models.layer-gradients", worst < tol, worst, tol)


def check_train_determinism(rng) -> PropertyResult:
    seed = int(rng.integers(0, 2**31))
    dataset = sbm_dataset(seed, block_size=10, feature_dim=4, per_class_split=(4, 3, 3))
    cfg = ModelConfig(kind="gcn", layers=2, hidden_dim=6, seed=seed)
    tcfg = TrainConfig(max_epochs=25, patience=25, seed=seed)
    from .training import build_model

    results = []
    for _ in range(2):
        model = build_model(cfg, dataset)
        results.append(train(model, dataset, tcfg))
    same = (
        results[0].test_accuracy == results[1].test_accuracy
        and results[0].train_losses == results[1].train_losses
        and results[0].val_losses == results[1].val_losses
    )
    return PropertyResult(
        "train.determinism", same, 0.0 if same else 1.0, 0.0,
        "identical seeds must reproduce identical runs",
    )


def check_early_stopping_minimum(rng) -> PropertyResult:
    seed = int(rng.integers(0, 2**31))
    dataset = sbm_dataset(seed, block_size=10, feature_dim=4, per_class_split=(4, 3, 3))
    cfg = ModelConfig(kind="gcn", layers=2, hidden_dim=6, seed=seed)
    tcfg = TrainConfig(max_epochs=40, patience=10, seed=seed)
    from .training import build_model

    result = train(build_model(cfg, dataset), dataset, tcfg)
    ok = result.val_losses[result.best_epoch] == min(result.val_losses)
    return PropertyResult(
        "train.early-stopping-minimum", ok, 0.0 if ok else 1.0, 0.0,
        "returned epoch must hold the minimum validation loss",
    )


def check_grad_norms_nonnegative(rng) -> PropertyResult:
    seed = int(rng.integers(0, 2**31))
    dataset = sbm_dataset(seed, block_size=6, feature_dim=3, per_class_split=(2, 2, 2))
    cfg = ModelConfig(kind="gcn", layers=2, hidden_dim=4, seed=seed)
    tcfg = TrainConfig(max_epochs=3, patience=3, seed=seed, grad_norm_every=1)
    from .training import build_model

    result = train(build_model(cfg, dataset), dataset, tcfg)
    matrix = np.asarray(result.grad_norms)
    ok = matrix.size > 0 and bool(np.all(matrix >= 0.0))
    return PropertyResult(
        "train.grad-norms-nonnegative", ok, float(matrix.min()) if matrix.size else 1.0, 0.0,
    )


REGISTRY = [
    check_eigh_reconstruction,
    check_matmul_associativity,
    check_autodiff_finite_difference,
    check_eigenspace_dimension,
    check_basis_fixed_orthonormal,
    check_spectrum_range,
    check_seminorm_equivalence,
    check_homogeneity,
    check_triangle_inequality,
    check_scale_invariance,
    check_relu_sphere,
    check_leaky_sphere,
    check_midpoint_sphere,
    check_split_identity,
    check_distance_contraction,
    check_leaky_two_sided,
    check_energy_contraction,
    check_corollary_range,
    check_relu_min_closed_form,
    check_monotone_region,
    check_relu_max_exact,
    check_smooth_input_stays_smooth,
    check_leaky_range,
    check_sct_subspace,
    check_sct_contraction,
    check_sct_normalized_search,
    check_layer_gradients,
    check_train_determinism,
    check_early_stopping_minimum,
    check_grad_norms_nonnegative,
]


def run_all(seed: int, inject_fault: str | None = None) -> list[PropertyResult]:
    results = []
    known = set()
    for index, check in enumerate(REGISTRY):
        result = check(stream(seed, 100 + index))
        known.add(result.name)
        if inject_fault == result.name:
            result = PropertyResult(
                name=result.name,
                passed=False,
                worst=result.worst + 1.0,
                tolerance=result.tolerance,
                detail="fault injected for the negative control",
            )
        results.append(result)
    if inject_fault is not None and inject_fault not in known:
        raise InputError(f"no property named {inject_fault!r}; known: {sorted(known)}")
    return results
