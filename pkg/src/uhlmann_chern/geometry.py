"""Connections and curvatures for pure bands and thermal states.

Pure-state objects (Berry and Wilczek-Zee curvature, the projected
zero-temperature limit) and mixed-state objects (Uhlmann connection by
two independent routes, Uhlmann curvature, thermally weighted curvature
traces) share one computational backbone: eigenbasis tangent matrices
T_jk = <j|dH|k> / (E_k - E_j) built from analytic Hamiltonian
gradients. No eigenvector is ever differentiated across parameter
points, so every quantity is manifestly phase-choice independent.

Grid-scale callers use the *_grid functions, which batch whole chunks
of points through stacked eigendecompositions; the per-point public
operations wrap the same kernels with batch size one.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBand,
    GapClosed,
    NotMaximalCluster,
    StepTooLarge,
    VanishingDenominatorWarning,
)
from .linalg import (
    DEGENERACY_TOL,
    commutator,
    eigh_batch,
    psd_sqrt,
)
from .models import BETA_INF, thermal_state

# Pairs with combined density-matrix weight at or below this are dropped
# from the finite-difference connection; the commutator numerator
# carries sqrt-weight factors that vanish faster than the denominator.
WEIGHT_PAIR_FLOOR = 1e-300

# Minimum spectral gap for treating a band or cluster as isolated.
GAP_FLOOR = 1e-8

# Default finite-difference step, as a fraction of the smallest cell
# extent; steps above a tenth of the cell are rejected outright.
FD_STEP_FRACTION = 1e-4
FD_STEP_LIMIT_FRACTION = 0.1


def direction_pairs(dim: int) -> tuple[tuple[int, int], ...]:
    """Ordered coordinate pairs (mu, nu) with mu < nu, lexicographic."""
    return tuple((m, n) for m in range(dim) for n in range(m + 1, dim))


@dataclass(frozen=True)
class ConnectionField:
    """Components A_mu of a matrix-valued 1-form at one point.

    components has shape (n_dirs, N, N); each matrix is anti-Hermitian.
    dropped_pairs counts eigenvalue pairs discarded by the
    finite-difference route's vanishing-denominator guard (always 0 for
    the spectral route).
    """

    components: np.ndarray
    dropped_pairs: int = 0

    def __post_init__(self):
        self.components.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.components.shape[-1]

    @property
    def n_dirs(self) -> int:
        return self.components.shape[0]

    def component(self, mu: int) -> np.ndarray:
        return self.components[mu]

    def anti_hermiticity_defect(self) -> float:
        a = self.components
        scale = np.abs(a).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(a + a.conj().transpose(0, 2, 1)).max() / scale)


@dataclass(frozen=True)
class CurvatureComponents:
    """Components F_{mu nu} of a matrix-valued 2-form at one point.

    Only mu < nu is stored (pairs lists them); the reversed component
    is the negative. basis, when set, holds the column eigenvectors
    that define the matrix indices of subspace-restricted curvatures.
    """

    pairs: tuple[tuple[int, int], ...]
    matrices: np.ndarray
    basis: np.ndarray | None = None

    def __post_init__(self):
        self.matrices.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrices.shape[-1]

    def component(self, mu: int, nu: int) -> np.ndarray:
        if mu == nu:
            return np.zeros_like(self.matrices[0])
        if (mu, nu) in self.pairs:
            return self.matrices[self.pairs.index((mu, nu))]
        if (nu, mu) in self.pairs:
            return -self.matrices[self.pairs.index((nu, mu))]
        raise KeyError((mu, nu))

    def scalar(self, mu: int, nu: int) -> complex:
        """The (mu, nu) component collapsed to a scalar; only valid for
        one-dimensional (abelian) curvatures."""
        c = self.component(mu, nu)
        if c.shape != (1, 1):
            raise ValueError("scalar() needs a 1x1 curvature block")
        return complex(c[0, 0])

    def trace_components(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=-2, axis2=-1)

    def anti_hermiticity_defect(self) -> float:
        f = self.matrices
        scale = np.abs(f).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(f + f.conj().transpose(0, 2, 1)).max() / scale)


# ---------------------------------------------------------------------------
# Batched kernels
# ---------------------------------------------------------------------------


def _gradient_stack(model, pts) -> np.ndarray:
    """Analytic gradient matrices for a point batch, shape (d, B, N, N)."""
    return np.stack([model.gradient_batch(pts, mu) for mu in range(model.dim)])


def _tangent_batch(w, v, grads, degeneracy_tol) -> np.ndarray:
    """Eigenbasis tangent matrices T_jk = G_jk / (E_k - E_j), zero
    within degenerate clusters. w (B, N), v (B, N, N), grads
    (d, B, N, N); returns (d, B, N, N)."""
    g = np.einsum("bji,dbjk,bkl->dbil", v.conj(), grads, v, optimize=True)
    den = w[:, None, :] - w[:, :, None]
    scale = 1.0 + np.abs(w).max(axis=1)
    keep = np.abs(den) > degeneracy_tol * scale[:, None, None]
    return np.where(keep, g / np.where(keep, den, 1.0), 0.0)


def weights_batch(w, beta: float, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Thermal occupations for batches of ascending eigenvalues (B, N)."""
    if math.isinf(beta):
        scale = 1.0 + np.abs(w).max(axis=1, keepdims=True)
        ground = (w - w[:, :1]) <= degeneracy_tol * scale
        return ground / ground.sum(axis=1, keepdims=True)
    x = np.exp(-beta * (w - w[:, :1]))
    return x / x.sum(axis=1, keepdims=True)


def _mixing_batch(lam) -> np.ndarray:
    """Weight-mixing coefficients C_jk = (sqrt l_j - sqrt l_k)^2 /
    (l_j + l_k) for weight batches (B, N); the 0/0 case (both weights
    underflowed to zero) continues the large-beta limit C -> 1."""
    s = np.sqrt(lam)
    num = (s[:, :, None] - s[:, None, :]) ** 2
    den = lam[:, :, None] + lam[:, None, :]
    ok = den > 0
    return np.where(ok, num / np.where(ok, den, 1.0), 1.0)


def _trace_coefficients(lam) -> np.ndarray:
    """coef_ik = l_i (4 l_i l_k / (l_i + l_k)^2 - 1), with the ratio
    read as 0 when both weights vanish."""
    num = 4.0 * lam[:, :, None] * lam[:, None, :]
    den = (lam[:, :, None] + lam[:, None, :]) ** 2
    ok = den > 0
    ratio = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
    return lam[:, :, None] * (ratio - 1.0)


def _trace_pairs(lam, t, pairs) -> np.ndarray:
    """Weighted curvature-trace scalars per direction pair, (P, B)."""
    coef = _trace_coefficients(lam)
    out = np.empty((len(pairs), lam.shape[0]), dtype=np.complex128)
    for i, (mu, nu) in enumerate(pairs):
        fwd = np.einsum("bik,bik,bki->b", coef, t[mu], t[nu], optimize=True)
        rev = np.einsum("bik,bik,bki->b", coef, t[nu], t[mu], optimize=True)
        out[i] = fwd - rev
    return out


def spectral_data_grid(model, pts, beta: float, degeneracy_tol: float = DEGENERACY_TOL):
    """Eigen-data bundle for a point batch: (w, v, lam, t) with shapes
    (B, N), (B, N, N), (B, N), (d, B, N, N)."""
    pts = np.asarray(pts, dtype=np.float64)
    h = model.hamiltonian_batch(pts)
    w, v = eigh_batch(h)
    lam = weights_batch(w, beta, degeneracy_tol)
    t = _tangent_batch(w, v, _gradient_stack(model, pts), degeneracy_tol)
    return w, v, lam, t


def thermal_trace_grid(model, pts, beta: float, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Tr(rho F_U)_{mu nu} scalars over a point batch, shape (P, B)."""
    _, _, lam, t = spectral_data_grid(model, pts, beta, degeneracy_tol)
    return _trace_pairs(lam, t, direction_pairs(model.dim))


def connection_grid(model, pts, beta: float, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Spectral-route Uhlmann connection components over a point batch,
    shape (d, B, N, N), in the original (not eigen-) basis."""
    _, v, lam, t = spectral_data_grid(model, pts, beta, degeneracy_tol)
    a_tilde = -_mixing_batch(lam)[None, :, :, :] * t
    return np.einsum("bij,dbjk,blk->dbil", v, a_tilde, v.conj(), optimize=True)


def _ground_sizes(w, degeneracy_tol) -> np.ndarray:
    scale = 1.0 + np.abs(w).max(axis=1, keepdims=True)
    return ((w - w[:, :1]) <= degeneracy_tol * scale).sum(axis=1)


def ground_block_curvature_grid(
    model, pts, degeneracy_tol: float = DEGENERACY_TOL, gap_floor: float = GAP_FLOOR
):
    """Zero-temperature curvature restricted to the ground cluster, for
    a whole point batch at once.

    Returns (f, d) with f of shape (P, B, D, D) and D the common ground
    degeneracy. Raises GapClosed if the cluster size varies over the
    batch or its gap falls below gap_floor anywhere.
    """
    pts = np.asarray(pts, dtype=np.float64)
    w, v, _, t = spectral_data_grid(model, pts, BETA_INF, degeneracy_tol)
    sizes = _ground_sizes(w, degeneracy_tol)
    d = int(sizes[0])
    if not (sizes == d).all():
        raise GapClosed("ground degeneracy varies across the batch")
    if d == w.shape[1]:
        raise GapClosed("no excited level: the ground cluster is the whole space")
    gap = w[:, d] - w[:, d - 1]
    if float(gap.min()) <= gap_floor:
        raise GapClosed(f"ground-cluster gap {float(gap.min()):.3e} at or below {gap_floor:.0e}")
    pairs = direction_pairs(model.dim)
    tg = t[:, :, :d, d:]  # ground rows, excited columns
    f = np.empty((len(pairs), pts.shape[0], d, d), dtype=np.complex128)
    for i, (mu, nu) in enumerate(pairs):
        # T_kb = -conj(T_bk) across the gap, so the restricted sum
        # -sum_k (T^mu_ak T^nu_kb - (mu <-> nu)) becomes M - M^dagger
        # with M = tg[mu] tg[nu]^dagger.
        m = np.einsum("bak,bck->bac", tg[mu], tg[nu].conj(), optimize=True)
        f[i] = m - m.conj().transpose(0, 2, 1)
    return f, d


def _fd_shift_stack(p, h, dim) -> np.ndarray:
    """Center point plus the 2*dim central-difference shifts."""
    p = np.asarray(p, dtype=np.float64)
    stack = np.repeat(p[None, :], 2 * dim + 1, axis=0)
    for mu in range(dim):
        stack[1 + 2 * mu, mu] += h
        stack[2 + 2 * mu, mu] -= h
    return stack


def _default_step(model, h) -> float:
    scale = min(model.manifold.cell)
    if h is None:
        h = FD_STEP_FRACTION * scale
    if not 0 < h <= FD_STEP_LIMIT_FRACTION * scale:
        raise StepTooLarge(
            f"step {h!r} outside (0, {FD_STEP_LIMIT_FRACTION * scale:.3e}] "
            "(a tenth of the smallest cell extent)"
        )
    return float(h)


def _curvature_from_stack(a_stack, h, dim, pairs):
    """Assemble F = dA + A^A from connection fields evaluated on a
    _fd_shift_stack layout. a_stack has shape (2 dim + 1, ..., d, N, N)
    where ... are optional batch axes; returns (P, ..., N, N)."""
    a0 = a_stack[0]
    out = []
    for mu, nu in pairs:
        d_mu_a_nu = (a_stack[1 + 2 * mu][nu] - a_stack[2 + 2 * mu][nu]) / (2.0 * h)
        d_nu_a_mu = (a_stack[1 + 2 * nu][mu] - a_stack[2 + 2 * nu][mu]) / (2.0 * h)
        out.append(d_mu_a_nu - d_nu_a_mu + commutator(a0[mu], a0[nu]))
    return np.stack(out)


def uhlmann_curvature_grid(
    model, pts, beta: float, h: float | None = None, degeneracy_tol: float = DEGENERACY_TOL
):
    """Uhlmann curvature components and density matrices over a point
    batch: returns (f, rho) with f (P, B, N, N) and rho (B, N, N).

    The exterior-derivative part is a central finite difference of the
    spectral-route connection field; all 2 dim + 1 evaluation points of
    the whole batch go through one stacked eigendecomposition.
    """
    pts = np.asarray(pts, dtype=np.float64)
    h = _default_step(model, h)
    dim = model.dim
    n_shift = 2 * dim + 1
    shifts = np.stack([_fd_shift_stack(p, h, dim) for p in pts])  # (B, S, d)
    flat = shifts.transpose(1, 0, 2).reshape(n_shift * pts.shape[0], dim)
    a_flat = connection_grid(model, flat, beta, degeneracy_tol)
    n = a_flat.shape[-1]
    a_stack = a_flat.reshape(dim, n_shift, pts.shape[0], n, n).transpose(1, 0, 2, 3, 4)
    f = _curvature_from_stack(a_stack, h, dim, direction_pairs(dim))
    hmat = model.hamiltonian_batch(pts)
    w, v = eigh_batch(hmat)
    lam = weights_batch(w, beta, degeneracy_tol)
    rho = np.einsum("bij,bj,bkj->bik", v, lam, v.conj())
    return f, rho


# ---------------------------------------------------------------------------
# Per-point operations
# ---------------------------------------------------------------------------


def _point_data(model, p, beta, degeneracy_tol):
    pts = np.asarray(p, dtype=np.float64)[None, :]
    w, v, lam, t = spectral_data_grid(model, pts, beta, degeneracy_tol)
    return w[0], v[0], lam[0], t[:, 0]


def berry_curvature(model, p, band: int = 0, grad_provider=None,
                    degeneracy_tol: float = DEGENERACY_TOL) -> CurvatureComponents:
    """Abelian curvature of one non-degenerate band.

    F_{mu nu} = -sum_{k != band} (T^mu_bk T^nu_kb - T^nu_bk T^mu_kb),
    purely imaginary. grad_provider overrides the model's analytic
    gradient (signature (p, mu) -> matrix); the default uses it.
    """
    p = np.asarray(p, dtype=np.float64)
    if grad_provider is None:
        w, v, _, t = _point_data(model, p, BETA_INF, degeneracy_tol)
    else:
        h = model.hamiltonian(p)
        w, v = eigh_batch(h[None])
        grads = np.stack([grad_provider(p, mu)[None] for mu in range(model.dim)])
        t = _tangent_batch(w, v, grads, degeneracy_tol)[:, 0]
        w = w[0]
    band = int(band)
    if not 0 <= band < w.size:
        raise DegenerateBand(f"band index {band} outside 0..{w.size - 1}")
    gaps = [abs(w[band] - w[k]) for k in (band - 1, band + 1) if 0 <= k < w.size]
    if min(gaps) <= GAP_FLOOR:
        raise DegenerateBand(
            f"band {band} gap {min(gaps):.3e} at or below {GAP_FLOOR:.0e}; "
            "use wz_curvature on the degenerate cluster"
        )
    pairs = direction_pairs(model.dim)
    mats = np.empty((len(pairs), 1, 1), dtype=np.complex128)
    for i, (mu, nu) in enumerate(pairs):
        fwd = np.dot(t[mu][band, :], t[nu][:, band])
        rev = np.dot(t[nu][band, :], t[mu][:, band])
        mats[i, 0, 0] = -(fwd - rev)
    return CurvatureComponents(pairs, mats)


def _require_maximal_cluster(group, groups):
    group = tuple(sorted(int(i) for i in group))
    if group not in tuple(map(tuple, groups)):
        raise NotMaximalCluster(
            f"index set {group} is not one of the maximal degenerate clusters {groups}"
        )
    return group


def wz_curvature(model, p, group, grad_provider=None,
                 degeneracy_tol: float = DEGENERACY_TOL) -> CurvatureComponents:
    """Non-abelian curvature of a maximal degenerate cluster.

    F_{ab, mu nu} = -sum_{k outside} (T^mu_ak T^nu_kb - T^nu_ak T^mu_kb)
    for a, b in the cluster; returned in the cluster eigenbasis (basis
    attribute holds the column vectors).
    """
    from .linalg import hermitian_eig

    p = np.asarray(p, dtype=np.float64)
    sd = hermitian_eig(model.hamiltonian(p), degeneracy_tol=degeneracy_tol)
    group = _require_maximal_cluster(group, sd.groups)
    idx = np.array(group)
    rest = np.array([k for k in range(sd.dim) if k not in group])
    if grad_provider is None:
        grad_provider = model.gradient
    grads = np.stack([grad_provider(p, mu)[None] for mu in range(model.dim)])
    t = _tangent_batch(sd.eigenvalues[None], sd.eigenvectors[None], grads, degeneracy_tol)[:, 0]
    pairs = direction_pairs(model.dim)
    mats = np.empty((len(pairs), idx.size, idx.size), dtype=np.complex128)
    for i, (mu, nu) in enumerate(pairs):
        fwd = t[mu][np.ix_(idx, rest)] @ t[nu][np.ix_(rest, idx)]
        mats[i] = -(fwd - fwd.conj().T)
    return CurvatureComponents(pairs, mats, basis=sd.eigenvectors[:, idx])


def projector_limit_curvature(model, p, group=None,
                              degeneracy_tol: float = DEGENERACY_TOL) -> CurvatureComponents:
    """Exact zero-temperature curvature of the ground cluster, computed
    from projector derivatives: F = dP dP - (swapped), restricted to
    the ground subspace.

    This is the limit object of the thermal curvature, independent of
    any beta; at beta = 0 the thermal curvature itself is zero instead.
    """
    from .linalg import hermitian_eig

    p = np.asarray(p, dtype=np.float64)
    sd = hermitian_eig(model.hamiltonian(p), degeneracy_tol=degeneracy_tol)
    ground = tuple(sd.groups[0])
    if group is not None and tuple(sorted(int(i) for i in group)) != ground:
        raise GapClosed(f"requested group {tuple(group)} is not the ground cluster {ground}")
    d = len(ground)
    if d == sd.dim:
        raise GapClosed("no excited level: the ground cluster is the whole space")
    gap = sd.eigenvalues[d] - sd.eigenvalues[d - 1]
    if gap <= GAP_FLOOR:
        raise GapClosed(f"ground-cluster gap {gap:.3e} at or below {GAP_FLOOR:.0e}")
    grads = _gradient_stack(model, p[None, :])
    t = _tangent_batch(sd.eigenvalues[None], sd.eigenvectors[None], grads, degeneracy_tol)[:, 0]
    # dP in the eigenbasis: +T on excited-ground entries, -T on
    # ground-excited, zero elsewhere.
    chi = np.zeros(sd.dim)
    chi[list(ground)] = 1.0
    sign = chi[None, :] - chi[:, None]
    dp = sign[None, :, :] * t
    pairs = direction_pairs(model.dim)
    mats = np.empty((len(pairs), d, d), dtype=np.complex128)
    for i, (mu, nu) in enumerate(pairs):
        m = dp[mu] @ dp[nu] - dp[nu] @ dp[mu]
        mats[i] = m[:d, :d]
    return CurvatureComponents(pairs, mats, basis=sd.eigenvectors[:, :d])


def uhlmann_connection_spectral(state, grads) -> ConnectionField:
    """Uhlmann connection from the spectral formula: in the energy
    eigenbasis A_jk = -C_jk T_jk with C the weight-mixing coefficients
    of the thermal occupations; rotated back to the original basis.

    state is a ThermalState; grads is the list of analytic dH/dmu
    matrices at the same point.
    """
    w = state.spectrum.eigenvalues
    v = state.spectrum.eigenvectors
    grads = np.stack([np.asarray(g, dtype=np.complex128)[None] for g in grads])
    t = _tangent_batch(w[None], v[None], grads, state.spectrum.tolerance)[:, 0]
    c = _mixing_batch(state.weights[None])[0]
    a_tilde = -c[None, :, :] * t
    a = np.einsum("ij,djk,lk->dil", v, a_tilde, v.conj(), optimize=True)
    return ConnectionField(a)


def uhlmann_connection_sqrt_fd(model, p, beta: float, h: float | None = None,
                               degeneracy_tol: float = DEGENERACY_TOL) -> ConnectionField:
    """Uhlmann connection from the commutator formula: A_mu has
    eigenbasis entries -<n|[d_mu sqrt(rho), sqrt(rho)]|m> / (l_n + l_m),
    with d_mu sqrt(rho) by central finite differences of psd_sqrt.

    Pairs whose combined weight is at or below 1e-300 are dropped (the
    numerator vanishes faster); their count lands in dropped_pairs and
    triggers a VanishingDenominatorWarning.
    """
    p = np.asarray(p, dtype=np.float64)
    h = _default_step(model, h)
    state = thermal_state(model, p, beta, degeneracy_tol)
    lam = state.weights
    v = state.spectrum.eigenvectors
    sqrho = psd_sqrt(state.rho)
    den = lam[:, None] + lam[None, :]
    keep = den > WEIGHT_PAIR_FLOOR
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(
            f"dropped {dropped} eigenvalue pairs with combined weight <= "
            f"{WEIGHT_PAIR_FLOOR:g}",
            VanishingDenominatorWarning,
            stacklevel=2,
        )
    comps = np.empty((model.dim, lam.size, lam.size), dtype=np.complex128)
    for mu in range(model.dim):
        e = np.zeros_like(p)
        e[mu] = h
        plus = psd_sqrt(thermal_state(model, p + e, beta, degeneracy_tol).rho)
        minus = psd_sqrt(thermal_state(model, p - e, beta, degeneracy_tol).rho)
        dsq = (plus - minus) / (2.0 * h)
        num = v.conj().T @ commutator(dsq, sqrho) @ v
        a_tilde = np.where(keep, -num / np.where(keep, den, 1.0), 0.0)
        comps[mu] = v @ a_tilde @ v.conj().T
    return ConnectionField(comps, dropped_pairs=dropped)


def uhlmann_curvature(model, p, beta: float, connection_route: str = "spectral",
                      h: float | None = None,
                      degeneracy_tol: float = DEGENERACY_TOL) -> CurvatureComponents:
    """Uhlmann curvature F = dA + A^A at one point.

    The exterior derivative is a central finite difference of the
    connection field along each coordinate; the field route is either
    "spectral" (default) or "sqrt_fd". The connection is a single-valued
    matrix field (built from the unique sqrt(rho)), so differencing it
    across nearby points is gauge-safe.
    """
    p = np.asarray(p, dtype=np.float64)
    h = _default_step(model, h)
    if connection_route == "spectral":
        f, _ = uhlmann_curvature_grid(model, p[None, :], beta, h, degeneracy_tol)
        return CurvatureComponents(direction_pairs(model.dim), f[:, 0])
    if connection_route != "sqrt_fd":
        raise ValueError(f"unknown connection route {connection_route!r}")
    stack_pts = _fd_shift_stack(p, h, model.dim)
    with warnings.catch_warnings():
        warnings.simplefilter("once", VanishingDenominatorWarning)
        fields = [
            uhlmann_connection_sqrt_fd(model, q, beta, degeneracy_tol=degeneracy_tol).components
            for q in stack_pts
        ]
    a_stack = np.stack(fields)
    f = _curvature_from_stack(a_stack, h, model.dim, direction_pairs(model.dim))
    return CurvatureComponents(direction_pairs(model.dim), f)


def thermal_trace_spectral(state, grads) -> np.ndarray:
    """Scalars Tr(rho F_U)_{mu nu} per direction pair, straight from the
    weighted double sum over energy eigenstates (no finite differences).
    Purely imaginary up to roundoff.
    """
    w = state.spectrum.eigenvalues
    v = state.spectrum.eigenvectors
    grads = np.stack([np.asarray(g, dtype=np.complex128)[None] for g in grads])
    t = _tangent_batch(w[None], v[None], grads, state.spectrum.tolerance)
    dim = len(grads)
    return _trace_pairs(state.weights[None], t[:, 0][:, None], direction_pairs(dim))[:, 0]


def weighted_trace(state, curvature: CurvatureComponents) -> np.ndarray:
    """Tr(rho F) per stored pair for a full-space curvature; the
    cross-check partner of thermal_trace_spectral."""
    return np.einsum("ij,pji->p", state.rho, curvature.matrices)
